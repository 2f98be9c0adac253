#include "toposelect/er.hpp"

#include "toposelect/error.hpp"

#include <cmath>

namespace toposelect::er {

std::string_view to_string(ErSource source) noexcept {
    return source == ErSource::raw ? "raw" : "filtered";
}

ErSeries compute_er(std::span<const double> vf, std::span<const double> c) {
    const std::size_t n = vf.size();
    if (c.size() != n) throw InvalidArgument("vf and compliance series differ in length");
    if (n < 3) throw InvalidArgument("efficiency ratio needs at least 3 front points");
    std::vector<double> t(n);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(vf[i] > 0.0)) throw InvalidArgument("front vf must be positive");
        if (!(c[i] > 0.0)) throw InvalidArgument("front compliance must be positive");
        if (i > 0 && vf[i] == vf[i - 1]) {
            throw InvalidArgument("duplicate vf " + std::to_string(vf[i]) + " in front");
        }
        if (i > 0 && vf[i] < vf[i - 1]) throw InvalidArgument("front vf must be increasing");
        t[i] = std::log(vf[i]);
        g[i] = std::log(c[i]);
    }
    ErSeries out;
    out.vf.assign(vf.begin(), vf.end());
    out.n.resize(n);
    out.n[0] = -(g[1] - g[0]) / (t[1] - t[0]);
    out.n[n - 1] = -(g[n - 1] - g[n - 2]) / (t[n - 1] - t[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = t[i] - t[i - 1];
        const double h2 = t[i + 1] - t[i];
        const double d = -h2 / (h1 * (h1 + h2)) * g[i - 1] + (h2 - h1) / (h1 * h2) * g[i] +
                         h1 / (h2 * (h1 + h2)) * g[i + 1];
        out.n[i] = -d;
    }
    return out;
}

ErSeries compute_er(const pareto::ParetoFront& front) {
    return compute_er(front.vfs(), front.compliances());
}

ErSeries filter_er(const pareto::ParetoFront& front, double sigma) {
    const ErSeries raw = compute_er(pareto::envelope(front));
    const auto smoothed = pareto::smooth({raw.vf, raw.n}, sigma);
    return {smoothed.x, smoothed.y, ErSource::filtered};
}

BoundsCheck check_bounds(const ErSeries& series, double lo, double hi, double increase_tol) {
    BoundsCheck out;
    for (std::size_t i = 0; i < series.n.size(); ++i) {
        if (series.n[i] < lo) ++out.below;
        if (series.n[i] > hi) ++out.above;
        if (i > 0 && series.n[i] - series.n[i - 1] > increase_tol) ++out.strict_increases;
    }
    return out;
}

double analytic_stiffness(const AnalyticComponent& comp, double vf) {
    if (!(comp.e > 0.0 && comp.length > 0.0 && comp.section > 0.0 && comp.width > 0.0)) {
        throw InvalidArgument("component parameters must be positive");
    }
    if (!(vf > 0.0 && vf <= 1.0)) throw InvalidArgument("vf must lie in (0,1]");
    const double l3 = comp.length * comp.length * comp.length;
    switch (comp.kind) {
        case ComponentKind::rod:
            return comp.e * vf * comp.section / comp.length;
        case ComponentKind::beam:
            return comp.e * vf * vf * comp.section * comp.section / (4.0 * l3);
        case ComponentKind::plate:
            return comp.e * comp.width * vf * vf * vf * comp.section * comp.section * comp.section / (4.0 * l3);
    }
    throw InvalidArgument("unknown component kind");
}

double analytic_er(const AnalyticComponent& comp) {
    switch (comp.kind) {
        case ComponentKind::rod: return 1.0;
        case ComponentKind::beam: return 2.0;
        case ComponentKind::plate: return 3.0;
    }
    throw InvalidArgument("unknown component kind");
}

pareto::ParetoFront analytic_front(const AnalyticComponent& comp, const std::vector<double>& vf_grid) {
    static constexpr const char* names[] = {"rod", "beam", "plate"};
    pareto::ParetoFront front;
    front.problem_name = names[static_cast<int>(comp.kind)];
    for (double vf : vf_grid) front.points.push_back({vf, 1.0 / analytic_stiffness(comp, vf), "analytic"});
    front.validate();
    return front;
}

}  // namespace toposelect::er
