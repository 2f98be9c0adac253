#pragma once

// Two-parameter front model f(x) = a (1/x + b x^(1/b)).

#include "toposelect/fem2d.hpp"

#include <array>
#include <string>

namespace toposelect::metamodel {

struct Anchor {
    double vf = 0.0;
    double c = 0.0;
    friend bool operator==(const Anchor&, const Anchor&) = default;
};

inline constexpr double kDefaultAnchorVf = 0.1;

struct MetaModel {
    double a = 1.0;
    double b = 1.0;
    /// Low-vf anchor first, full-density anchor second.
    std::array<Anchor, 2> fit_points{};
    std::string problem_name;
    /// Copied from the problem the front was computed on; see materials::required_compliance.
    double symmetry_factor = 1.0;

    friend bool operator==(const MetaModel&, const MetaModel&) = default;
};

/// Compliance of the all-ones design under the problem's unit loads.
double full_density_compliance(const fem::ProblemSpec& problem);

/// Fits b from the ratio c1 / c_full by bisection, then a = c_full / (1 + b).
/// Throws FitError when the ratio is outside (1, 1/x1).
MetaModel fit(Anchor low, double c_full, std::string problem_name = {},
              double symmetry_factor = 1.0);

double eval(const MetaModel& m, double x);
double eval_derivative(const MetaModel& m, double x);
double eval_er(const MetaModel& m, double x);

/// Unique x in (0,1] with eval(m, x) = c_req. Throws Infeasible when c_req
/// is below eval(m, 1).
double inverse(const MetaModel& m, double c_req);

}  // namespace toposelect::metamodel
