#include "toposelect/simp.hpp"

#include "toposelect/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace toposelect::simp {

std::string_view to_string(FilterKind kind) noexcept {
    return kind == FilterKind::density ? "density" : "sensitivity";
}

FilterKind filter_kind_from_string(std::string_view name) {
    if (name == "density") return FilterKind::density;
    if (name == "sensitivity") return FilterKind::sensitivity;
    throw InvalidArgument("unknown filter kind '" + std::string(name) +
                          "' (expected density or sensitivity)");
}

void OptimizerConfig::validate() const {
    if (!(penal >= 1.0)) throw InvalidArgument("penal must be >= 1");
    if (!(rmin == 0.0 || rmin >= 1.0)) throw InvalidArgument("rmin must be >= 1 (or 0 for the default)");
    if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
    if (!(move_limit > 0.0 && move_limit <= 1.0)) throw InvalidArgument("move_limit must lie in (0,1]");
    if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0,1]");
    if (!(change_tol > 0.0)) throw InvalidArgument("change_tol must be positive");
    if (!(e_min > 0.0 && e_min < 1.0)) throw InvalidArgument("e_min must lie in (0,1)");
    if (!(nu > -1.0 && nu < 0.5)) throw InvalidArgument("nu must lie in (-1,0.5)");
}

double OptimizerConfig::effective_rmin(const fem::Grid& grid) const {
    if (rmin > 0.0) return rmin;
    return std::max(1.2, 3.0 * grid.nelx() / 200.0);
}

Filter::Filter(const fem::Grid& grid, double rmin) {
    if (!(rmin >= 1.0)) throw InvalidArgument("filter radius must be >= 1");
    const int nelx = grid.nelx();
    const int nely = grid.nely();
    const int reach = static_cast<int>(std::ceil(rmin)) - 1;
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<Eigen::Triplet<double>> row;
    for (int i = 0; i < nelx; ++i) {
        for (int j = 0; j < nely; ++j) {
            const int e = grid.element_index(i, j);
            row.clear();
            double sum = 0.0;
            for (int k = std::max(i - reach, 0); k <= std::min(i + reach, nelx - 1); ++k) {
                for (int l = std::max(j - reach, 0); l <= std::min(j + reach, nely - 1); ++l) {
                    const double w = rmin - std::hypot(double(i - k), double(j - l));
                    if (w > 0.0) {
                        row.emplace_back(e, grid.element_index(k, l), w);
                        sum += w;
                    }
                }
            }
            for (const auto& t : row) triplets.emplace_back(t.row(), t.col(), t.value() / sum);
        }
    }
    w_.resize(grid.elements(), grid.elements());
    w_.setFromTriplets(triplets.begin(), triplets.end());
    w_.makeCompressed();
}

std::vector<double> Filter::apply(std::span<const double> x) const {
    Eigen::Map<const Eigen::VectorXd> in(x.data(), static_cast<Eigen::Index>(x.size()));
    std::vector<double> out(x.size());
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = w_ * in;
    return out;
}

std::vector<double> Filter::apply_transpose(std::span<const double> x) const {
    Eigen::Map<const Eigen::VectorXd> in(x.data(), static_cast<Eigen::Index>(x.size()));
    std::vector<double> out(x.size());
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) =
        w_.transpose() * in;
    return out;
}

Filter filter_build(const fem::Grid& grid, double rmin) { return Filter(grid, rmin); }

namespace {

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> moduli_for(std::span<const double> rho, double penal, double e_min) {
    std::vector<double> m(rho.size());
    for (std::size_t e = 0; e < rho.size(); ++e) m[e] = e_min + std::pow(rho[e], penal) * (1.0 - e_min);
    return m;
}

double compliance_of(fem::StiffnessSystem& system, std::span<const double> rho, double penal,
                     double e_min) {
    const auto moduli = moduli_for(rho, penal, e_min);
    return fem::compliance(system.solve(moduli), system.loads());
}

// Smallest design value kept in a start field; OC updates are multiplicative,
// so an exact zero would never grow back.
constexpr double kStartFloor = 1e-3;

}  // namespace

DesignResult optimize(const fem::ProblemSpec& problem, double target_vf,
                      const OptimizerConfig& cfg, const fem::DensityField& init,
                      const IterationObserver& observer) {
    cfg.validate();
    if (!(target_vf > 0.0 && target_vf <= 1.0)) {
        throw InvalidArgument("target volume fraction must lie in (0,1], got " +
                              std::to_string(target_vf));
    }
    const fem::Grid& grid = problem.grid;
    const auto nel = static_cast<std::size_t>(grid.elements());
    if (init.size() != nel) {
        throw InvalidArgument("initial design has " + std::to_string(init.size()) +
                              " entries, grid has " + std::to_string(nel));
    }

    fem::StiffnessSystem system(problem, {}, cfg.nu);
    DesignResult result;

    if (target_vf >= 1.0) {
        result.densities = fem::DensityField::uniform(grid, 1.0);
        const std::vector<double> ones(nel, 1.0);
        result.compliance_p = compliance_of(system, ones, cfg.penal, cfg.e_min);
        result.compliance_p1 = result.compliance_p;
        result.history = {result.compliance_p};
        result.vf = 1.0;
        result.iterations = 1;
        result.converged = true;
        return result;
    }

    const Filter filter(grid, cfg.effective_rmin(grid));
    const fem::Matrix8d& ke = system.element_matrix();
    const bool density_filter = cfg.filter == FilterKind::density;

    std::vector<double> start(init.values().begin(), init.values().end());
    for (double& v : start) v = std::max(v, kStartFloor);
    const fem::DensityField scaled = rescale_to_volume(start, target_vf);
    std::vector<double> x(scaled.values().begin(), scaled.values().end());
    std::vector<double> x_phys = x;
    std::vector<double> x_new(nel);
    std::vector<double> dc(nel);
    const std::vector<double> ones(nel, 1.0);
    const std::vector<double> dv = density_filter ? filter.apply_transpose(ones) : ones;
    const double target_sum = target_vf * static_cast<double>(nel);

    int iter = 0;
    double change = 1.0;
    while (change > cfg.change_tol && iter < cfg.max_iters) {
        ++iter;
        const auto moduli = moduli_for(x_phys, cfg.penal, cfg.e_min);
        const Eigen::VectorXd u = system.solve(moduli);
        double c = 0.0;
        for (std::size_t e = 0; e < nel; ++e) {
            const auto dofs = grid.element_dofs(static_cast<int>(e));
            Eigen::Matrix<double, 8, 1> ue;
            for (int i = 0; i < 8; ++i) ue[i] = u[dofs[i]];
            const double ce = ue.dot(ke * ue);
            c += moduli[e] * ce;
            dc[e] = -cfg.penal * (1.0 - cfg.e_min) * std::pow(x_phys[e], cfg.penal - 1.0) * ce;
        }
        result.history.push_back(c);

        if (density_filter) {
            dc = filter.apply_transpose(dc);
        } else {
            std::vector<double> xdc(nel);
            for (std::size_t e = 0; e < nel; ++e) xdc[e] = x[e] * dc[e];
            dc = filter.apply(xdc);
            for (std::size_t e = 0; e < nel; ++e) dc[e] /= std::max(1e-3, x[e]);
        }

        double l1 = 1e-9;
        double l2 = 1e9;
        while ((l2 - l1) / (l1 + l2) > 1e-12) {
            const double lmid = 0.5 * (l1 + l2);
            for (std::size_t e = 0; e < nel; ++e) {
                const double be = std::pow(std::max(0.0, -dc[e]) / (dv[e] * lmid), cfg.eta);
                const double lo = std::max(0.0, x[e] - cfg.move_limit);
                const double hi = std::min(1.0, x[e] + cfg.move_limit);
                x_new[e] = std::clamp(x[e] * be, lo, hi);
            }
            x_phys = density_filter ? filter.apply(x_new) : x_new;
            const double sum = std::accumulate(x_phys.begin(), x_phys.end(), 0.0);
            if (sum > target_sum) {
                l1 = lmid;
            } else {
                l2 = lmid;
            }
        }
        change = 0.0;
        for (std::size_t e = 0; e < nel; ++e) change = std::max(change, std::abs(x_new[e] - x[e]));
        x.swap(x_new);
        if (observer) observer(iter, x, c);
    }

    for (double& v : x_phys) v = std::clamp(v, 0.0, 1.0);
    result.compliance_p = compliance_of(system, x_phys, cfg.penal, cfg.e_min);
    result.compliance_p1 = compliance_of(system, x_phys, 1.0, cfg.e_min);
    result.vf = mean(x_phys);
    result.densities = fem::DensityField(std::move(x_phys));
    result.iterations = iter;
    result.converged = change <= cfg.change_tol;
    return result;
}

double evaluate(const fem::ProblemSpec& problem, const fem::DensityField& densities, double penal,
                double e_min, double nu) {
    if (densities.size() != static_cast<std::size_t>(problem.grid.elements())) {
        throw InvalidArgument("density field does not match the grid");
    }
    if (!(penal >= 1.0)) throw InvalidArgument("penal must be >= 1");
    fem::StiffnessSystem system(problem, {}, nu);
    return compliance_of(system, densities.values(), penal, e_min);
}

double evaluate_p1(const fem::ProblemSpec& problem, const fem::DensityField& densities,
                   double e_min, double nu) {
    return evaluate(problem, densities, 1.0, e_min, nu);
}

namespace {

constexpr std::array<std::string_view, 11> kInitNames = {
    "uniform",       "vertical_stripes_2", "vertical_stripes_4", "horizontal_stripes_2",
    "horizontal_stripes_4", "diagonal_rising", "diagonal_falling", "disc",
    "ring",          "noise",              "previous"};

double unit_double(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Bilinear interpolation of a coarse random lattice; one lattice cell spans
// roughly eight elements.
std::vector<double> smooth_noise(const fem::Grid& grid, std::uint64_t seed) {
    const int cx = std::max(1, grid.nelx() / 8);
    const int cy = std::max(1, grid.nely() / 8);
    std::mt19937_64 gen(seed);
    std::vector<double> lattice(static_cast<std::size_t>((cx + 1) * (cy + 1)));
    for (double& v : lattice) v = unit_double(gen);
    auto at = [&](int i, int j) { return lattice[static_cast<std::size_t>(i * (cy + 1) + j)]; };
    std::vector<double> out(static_cast<std::size_t>(grid.elements()));
    for (int ex = 0; ex < grid.nelx(); ++ex) {
        for (int ey = 0; ey < grid.nely(); ++ey) {
            const double u = (ex + 0.5) / grid.nelx() * cx;
            const double v = (ey + 0.5) / grid.nely() * cy;
            const int i = std::min(static_cast<int>(u), cx - 1);
            const int j = std::min(static_cast<int>(v), cy - 1);
            const double fu = u - i;
            const double fv = v - j;
            const double val = (1 - fu) * (1 - fv) * at(i, j) + fu * (1 - fv) * at(i + 1, j) +
                               (1 - fu) * fv * at(i, j + 1) + fu * fv * at(i + 1, j + 1);
            out[static_cast<std::size_t>(grid.element_index(ex, ey))] = 0.1 + 0.9 * val;
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(InitKind kind) noexcept { return kInitNames[static_cast<std::size_t>(kind)]; }

InitKind init_kind_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kInitNames.size(); ++i) {
        if (kInitNames[i] == name) return static_cast<InitKind>(i);
    }
    throw InvalidArgument("unknown initial design '" + std::string(name) + "'");
}

fem::DensityField initial_design(InitKind kind, double target_vf, const fem::Grid& grid,
                                 std::uint64_t seed, const fem::DensityField* previous) {
    if (!(target_vf > 0.0 && target_vf <= 1.0)) {
        throw InvalidArgument("target volume fraction must lie in (0,1]");
    }
    const auto nel = static_cast<std::size_t>(grid.elements());
    if (kind == InitKind::previous && previous) {
        if (previous->size() != nel) throw InvalidArgument("previous design does not match the grid");
        return rescale_to_volume(previous->values(), target_vf);
    }
    if (kind == InitKind::noise) return rescale_to_volume(smooth_noise(grid, seed), target_vf);

    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> p(nel, 1.0);
    for (int ex = 0; ex < grid.nelx(); ++ex) {
        for (int ey = 0; ey < grid.nely(); ++ey) {
            const double u = (ex + 0.5) / grid.nelx();
            const double v = (ey + 0.5) / grid.nely();
            const double r = std::hypot(u - 0.5, v - 0.5);
            double val = 1.0;
            switch (kind) {
                case InitKind::vertical_stripes_2: val = 0.55 + 0.45 * std::cos(two_pi * 2 * u); break;
                case InitKind::vertical_stripes_4: val = 0.55 + 0.45 * std::cos(two_pi * 4 * u); break;
                case InitKind::horizontal_stripes_2: val = 0.55 + 0.45 * std::cos(two_pi * 2 * v); break;
                case InitKind::horizontal_stripes_4: val = 0.55 + 0.45 * std::cos(two_pi * 4 * v); break;
                case InitKind::diagonal_rising: val = 0.55 + 0.45 * std::cos(two_pi * 1.5 * (u - v)); break;
                case InitKind::diagonal_falling: val = 0.55 + 0.45 * std::cos(two_pi * 1.5 * (u + v)); break;
                case InitKind::disc: val = r <= 0.35 ? 1.0 : 0.1; break;
                case InitKind::ring: val = (r >= 0.25 && r <= 0.4) ? 1.0 : 0.1; break;
                default: break;
            }
            p[static_cast<std::size_t>(grid.element_index(ex, ey))] = val;
        }
    }
    return rescale_to_volume(p, target_vf);
}

fem::DensityField rescale_to_volume(std::span<const double> pattern, double target_vf) {
    if (pattern.empty()) throw InvalidArgument("cannot rescale an empty field");
    if (!(target_vf > 0.0 && target_vf <= 1.0)) {
        throw InvalidArgument("target volume fraction must lie in (0,1]");
    }
    for (double v : pattern) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("pattern values must lie in [0,1]");
    }
    const double current = mean(pattern);
    std::vector<double> out(pattern.begin(), pattern.end());
    if (target_vf <= current) {
        const double s = target_vf / current;
        for (double& v : out) v *= s;
        return fem::DensityField(std::move(out));
    }
    if (target_vf >= 1.0) return fem::DensityField(std::vector<double>(pattern.size(), 1.0));
    auto shifted_mean = [&](double t) {
        double sum = 0.0;
        for (double v : pattern) sum += std::min(1.0, v + t);
        return sum / static_cast<double>(pattern.size());
    };
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (shifted_mean(mid) < target_vf ? lo : hi) = mid;
    }
    for (double& v : out) v = std::min(1.0, v + hi);
    return fem::DensityField(std::move(out));
}

}  // namespace toposelect::simp
