#pragma once

// SIMP compliance minimization with an optimality-criteria update.

#include "toposelect/fem2d.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace toposelect::simp {

enum class FilterKind { density, sensitivity };

std::string_view to_string(FilterKind kind) noexcept;
FilterKind filter_kind_from_string(std::string_view name);

struct OptimizerConfig {
    double penal = 3.0;
    /// Filter radius in element widths; 0 means "scale with the grid", see effective_rmin().
    double rmin = 0.0;
    FilterKind filter = FilterKind::density;
    int max_iters = 300;
    double move_limit = 0.2;
    double change_tol = 0.01;
    double eta = 0.5;
    double e_min = fem::kDefaultEmin;
    double nu = fem::kDefaultPoisson;

    void validate() const;

    /// rmin if set, otherwise max(1.2, 3 * nelx / 200).
    double effective_rmin(const fem::Grid& grid) const;

    friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

struct DesignResult {
    fem::DensityField densities;
    double compliance_p = 0.0;   ///< at the optimization penalization, final field
    double compliance_p1 = 0.0;  ///< same field re-evaluated with penal = 1
    double vf = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Compliance seen at the start of each iteration.
    std::vector<double> history;
};

/// Row-normalized cone filter, w_ij = max(0, rmin - dist(i, j)).
class Filter {
public:
    Filter(const fem::Grid& grid, double rmin);

    std::vector<double> apply(std::span<const double> x) const;
    /// Transpose of apply(); the chain rule through the density filter.
    std::vector<double> apply_transpose(std::span<const double> x) const;

    const Eigen::SparseMatrix<double, Eigen::RowMajor>& weights() const noexcept { return w_; }

private:
    Eigen::SparseMatrix<double, Eigen::RowMajor> w_;
};

Filter filter_build(const fem::Grid& grid, double rmin);

/// Called after every design update with the iteration number, the design
/// variables and the compliance of the previous field.
using IterationObserver = std::function<void(int, std::span<const double>, double)>;

/// Minimizes compliance at target_vf starting from init. The start field is
/// rescaled to the target volume before the first update.
DesignResult optimize(const fem::ProblemSpec& problem, double target_vf,
                      const OptimizerConfig& cfg, const fem::DensityField& init,
                      const IterationObserver& observer = {});

/// Compliance with element moduli e_min + rho^penal (1 - e_min).
double evaluate(const fem::ProblemSpec& problem, const fem::DensityField& densities,
                double penal, double e_min = fem::kDefaultEmin, double nu = fem::kDefaultPoisson);

double evaluate_p1(const fem::ProblemSpec& problem, const fem::DensityField& densities,
                   double e_min = fem::kDefaultEmin, double nu = fem::kDefaultPoisson);

// Starting designs. All patterns live in [0.1, 1] before volume rescaling.
enum class InitKind {
    uniform,
    vertical_stripes_2,
    vertical_stripes_4,
    horizontal_stripes_2,
    horizontal_stripes_4,
    diagonal_rising,
    diagonal_falling,
    disc,
    ring,
    noise,
    previous,
};

inline constexpr std::array<InitKind, 11> kAllInitKinds = {
    InitKind::uniform,          InitKind::vertical_stripes_2, InitKind::vertical_stripes_4,
    InitKind::horizontal_stripes_2, InitKind::horizontal_stripes_4, InitKind::diagonal_rising,
    InitKind::diagonal_falling, InitKind::disc,               InitKind::ring,
    InitKind::noise,            InitKind::previous};

inline constexpr std::uint64_t kDefaultSeed = 20240917;

std::string_view to_string(InitKind kind) noexcept;
InitKind init_kind_from_string(std::string_view name);

/// previous is used by InitKind::previous and falls back to uniform when absent.
fem::DensityField initial_design(InitKind kind, double target_vf, const fem::Grid& grid,
                                 std::uint64_t seed = kDefaultSeed,
                                 const fem::DensityField* previous = nullptr);

/// Maps a field to mean target_vf: scales down (x = s p) when the target is
/// below the current mean, otherwise shifts up (x = min(1, p + t)) with t
/// found by bisection. Mean matches within 1e-9.
fem::DensityField rescale_to_volume(std::span<const double> pattern, double target_vf);

}  // namespace toposelect::simp
