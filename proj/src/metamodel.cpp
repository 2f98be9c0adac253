#include "toposelect/metamodel.hpp"

#include "toposelect/error.hpp"
#include "toposelect/io.hpp"

#include <cmath>

namespace toposelect::metamodel {

double full_density_compliance(const fem::ProblemSpec& problem) {
    return fem::full_density_compliance(problem);
}

namespace {

double anchor_ratio(double x1, double b) { return (1.0 / x1 + b * std::pow(x1, 1.0 / b)) / (1.0 + b); }

void check_x(double x) {
    if (!(x > 0.0 && x <= 1.0)) throw InvalidArgument("volume fraction must lie in (0,1], got " + io::format_double(x));
}

}  // namespace

MetaModel fit(Anchor low, double c_full, std::string problem_name, double symmetry_factor) {
    const double x1 = low.vf;
    if (!(x1 > 0.0 && x1 < 1.0)) throw FitError("anchor vf must lie in (0,1), got " + io::format_double(x1));
    if (!(c_full > 0.0) || !std::isfinite(c_full)) throw FitError("full-density compliance must be positive");
    if (!(low.c > 0.0) || !std::isfinite(low.c)) throw FitError("anchor compliance must be positive");
    const double r = low.c / c_full;
    if (!(r > 1.0)) {
        throw FitError("anchor ratio c1/c_full = " + io::format_double(r) +
                       " violates the lower bound 1 (front must decrease)");
    }
    if (!(r < 1.0 / x1)) {
        throw FitError("anchor ratio c1/c_full = " + io::format_double(r) + " violates the upper bound 1/x1 = " +
                       io::format_double(1.0 / x1));
    }
    double lo = std::log(1e-6);
    double hi = std::log(1e4);
    const double g_lo = anchor_ratio(x1, std::exp(lo)) - r;
    const double g_hi = anchor_ratio(x1, std::exp(hi)) - r;
    if (!(g_lo > 0.0 && g_hi < 0.0)) {
        throw FitError("no sign change for b in [1e-6, 1e4] at ratio " + io::format_double(r));
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (anchor_ratio(x1, std::exp(mid)) - r > 0.0 ? lo : hi) = mid;
    }
    MetaModel m;
    m.b = std::exp(0.5 * (lo + hi));
    m.a = c_full / (1.0 + m.b);
    m.fit_points = {low, Anchor{1.0, c_full}};
    m.problem_name = std::move(problem_name);
    if (!(symmetry_factor > 0.0)) throw InvalidArgument("symmetry_factor must be positive");
    m.symmetry_factor = symmetry_factor;
    return m;
}

double eval(const MetaModel& m, double x) {
    check_x(x);
    return m.a * (1.0 / x + m.b * std::pow(x, 1.0 / m.b));
}

double eval_derivative(const MetaModel& m, double x) {
    check_x(x);
    return m.a * (-1.0 / (x * x) + std::pow(x, 1.0 / m.b - 1.0));
}

double eval_er(const MetaModel& m, double x) {
    check_x(x);
    const double p = std::pow(x, 1.0 / m.b + 1.0);
    return (1.0 - p) / (1.0 + m.b * p);
}

double inverse(const MetaModel& m, double c_req) {
    const double c_full = eval(m, 1.0);
    if (!std::isfinite(c_req) || c_req < c_full) {
        throw Infeasible("required compliance " + io::format_double(c_req) + " is below f(1) = " +
                         io::format_double(c_full) + ": even the full design is too compliant");
    }
    if (c_req == c_full) return 1.0;
    // eval(x) >= a / x, so eval(lo) >= 2 c_req at lo = a / (2 c_req).
    double lo = std::min(1.0, m.a / (2.0 * c_req));
    double hi = 1.0;
    for (int i = 0; i < 300 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (eval(m, mid) > c_req ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace toposelect::metamodel
