#pragma once

// Efficiency ratio n(x) = -x C'(x) / C(x) of a compliance front.

#include "toposelect/pareto.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace toposelect::er {

enum class ErSource { raw, filtered };

struct ErSeries {
    std::vector<double> vf;
    std::vector<double> n;
    ErSource source = ErSource::raw;
};

std::string_view to_string(ErSource source) noexcept;

/// Derivative of ln C against ln x: three-point non-uniform central
/// differences inside, two-point one-sided differences at both ends. Exact
/// for power laws C = A x^-m.
ErSeries compute_er(std::span<const double> vf, std::span<const double> c);
ErSeries compute_er(const pareto::ParetoFront& front);

/// Envelope of the front, raw ER of the envelope, then Gaussian smoothing of
/// the ER samples.
ErSeries filter_er(const pareto::ParetoFront& front, double sigma = 0.04);

struct BoundsCheck {
    std::size_t below = 0;             ///< samples under lo
    std::size_t above = 0;             ///< samples over hi
    std::size_t strict_increases = 0;  ///< steps n[i+1] - n[i] > increase_tol
    bool ok(double max_increase_share, std::size_t samples) const noexcept {
        return below == 0 && above == 0 &&
               static_cast<double>(strict_increases) <= max_increase_share * static_cast<double>(samples);
    }
};

BoundsCheck check_bounds(const ErSeries& series, double lo = -0.02, double hi = 1.02,
                         double increase_tol = 0.02);

enum class ComponentKind { rod, beam, plate };

/// Idealized component whose optimal stiffness has a closed form.
///   rod:   E vf S / L
///   beam:  E vf^2 S^2 / (4 L^3)
///   plate: E b vf^3 h^3 / (4 L^3)
/// section is S for rod and beam and h for the plate; width is used only by the plate.
struct AnalyticComponent {
    ComponentKind kind = ComponentKind::rod;
    double e = 1.0;
    double length = 1.0;
    double section = 1.0;
    double width = 1.0;
};

double analytic_stiffness(const AnalyticComponent& comp, double vf);
double analytic_er(const AnalyticComponent& comp);

/// Compliance front C = 1 / stiffness sampled on vf_grid.
pareto::ParetoFront analytic_front(const AnalyticComponent& comp, const std::vector<double>& vf_grid);

}  // namespace toposelect::er
