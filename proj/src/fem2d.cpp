#include "toposelect/fem2d.hpp"

#include "toposelect/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>

namespace toposelect::fem {

Grid::Grid(int nelx, int nely) : nelx_(nelx), nely_(nely) {
    if (nelx < 1 || nely < 1) {
        throw InvalidArgument("grid needs at least one element per direction, got " +
                              std::to_string(nelx) + "x" + std::to_string(nely));
    }
}

std::array<int, 8> Grid::element_dofs(int e) const noexcept {
    const auto [ex, ey] = element_coords(e);
    const int ll = node_index(ex, ey + 1);
    const int lr = node_index(ex + 1, ey + 1);
    const int ur = node_index(ex + 1, ey);
    const int ul = node_index(ex, ey);
    return {2 * ll, 2 * ll + 1, 2 * lr, 2 * lr + 1, 2 * ur, 2 * ur + 1, 2 * ul, 2 * ul + 1};
}

void ProblemSpec::validate() {
    const int ndof = grid.dofs();
    if (loads.empty()) throw InvalidArgument("problem '" + name + "' has no loads");
    std::sort(fixed_dofs.begin(), fixed_dofs.end());
    fixed_dofs.erase(std::unique(fixed_dofs.begin(), fixed_dofs.end()), fixed_dofs.end());
    for (int d : fixed_dofs) {
        if (d < 0 || d >= ndof) {
            throw InvalidArgument("fixed dof " + std::to_string(d) + " outside [0, " +
                                  std::to_string(ndof) + ")");
        }
    }
    for (const auto& load : loads) {
        if (load.dof < 0 || load.dof >= ndof) {
            throw InvalidArgument("load dof " + std::to_string(load.dof) + " outside [0, " +
                                  std::to_string(ndof) + ")");
        }
        if (!std::isfinite(load.magnitude)) throw InvalidArgument("load magnitude is not finite");
        if (std::binary_search(fixed_dofs.begin(), fixed_dofs.end(), load.dof)) {
            throw InvalidArgument("load applied on fixed dof " + std::to_string(load.dof));
        }
    }
    if (fixed_dofs.empty()) throw InvalidArgument("problem '" + name + "' has no supports");
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(length) || !positive(height) || !positive(thickness)) {
        throw InvalidArgument("length, height and thickness must be positive");
    }
    if (!positive(symmetry_factor)) throw InvalidArgument("symmetry_factor must be positive");
}

Eigen::VectorXd ProblemSpec::load_vector() const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(grid.dofs());
    for (const auto& load : loads) f[load.dof] += load.magnitude;
    return f;
}

DensityField::DensityField(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidArgument("density " + std::to_string(v) + " at element " +
                                  std::to_string(i) + " outside [0,1]");
        }
    }
}

DensityField DensityField::uniform(const Grid& grid, double value) {
    return DensityField(std::vector<double>(static_cast<std::size_t>(grid.elements()), value));
}

double DensityField::volume_fraction() const noexcept {
    if (values_.empty()) return 0.0;
    return std::accumulate(values_.begin(), values_.end(), 0.0) /
           static_cast<double>(values_.size());
}

Matrix8d element_stiffness(double nu) {
    if (!(nu > -1.0 && nu < 0.5)) {
        throw InvalidArgument("Poisson ratio must lie in (-1, 0.5), got " + std::to_string(nu));
    }
    // Closed-form integral of B^T D B over the unit square (plane stress).
    const double k[8] = {0.5 - nu / 6.0,   0.125 + nu / 8.0, -0.25 - nu / 12.0,
                         -0.125 + 3.0 * nu / 8.0, -0.25 + nu / 12.0, -0.125 - nu / 8.0,
                         nu / 6.0,          0.125 - 3.0 * nu / 8.0};
    const int idx[8][8] = {{0, 1, 2, 3, 4, 5, 6, 7}, {1, 0, 7, 6, 5, 4, 3, 2},
                           {2, 7, 0, 5, 6, 3, 4, 1}, {3, 6, 5, 0, 7, 2, 1, 4},
                           {4, 5, 6, 7, 0, 1, 2, 3}, {5, 4, 3, 2, 1, 0, 7, 6},
                           {6, 3, 4, 1, 2, 7, 0, 5}, {7, 2, 1, 4, 3, 6, 5, 0}};
    Matrix8d ke;
    const double scale = 1.0 / (1.0 - nu * nu);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) ke(i, j) = scale * k[idx[i][j]];
    }
    return ke;
}

std::vector<double> element_moduli(const DensityField& densities, double penal, double e_min) {
    if (!(penal >= 1.0)) throw InvalidArgument("penalization must be >= 1");
    if (!(e_min > 0.0 && e_min < 1.0)) throw InvalidArgument("e_min must lie in (0,1)");
    std::vector<double> moduli(densities.size());
    for (std::size_t e = 0; e < densities.size(); ++e) {
        moduli[e] = e_min + std::pow(densities[e], penal) * (1.0 - e_min);
    }
    return moduli;
}

namespace {

void check_field(const Grid& grid, const DensityField& densities) {
    if (densities.size() != static_cast<std::size_t>(grid.elements())) {
        throw InvalidArgument("density field has " + std::to_string(densities.size()) +
                              " entries, grid has " + std::to_string(grid.elements()) +
                              " elements");
    }
}

// Maps each full dof to its index among free dofs, or -1 when fixed.
std::vector<int> free_dof_map(const ProblemSpec& problem, int& n_free) {
    std::vector<int> map(static_cast<std::size_t>(problem.grid.dofs()), 0);
    for (int d : problem.fixed_dofs) map[static_cast<std::size_t>(d)] = -1;
    n_free = 0;
    for (auto& m : map) m = (m < 0) ? -1 : n_free++;
    return map;
}

Eigen::VectorXd restrict_vector(const Eigen::VectorXd& full, const std::vector<int>& map,
                                int n_free) {
    Eigen::VectorXd r(n_free);
    for (std::size_t d = 0; d < map.size(); ++d) {
        if (map[d] >= 0) r[map[d]] = full[static_cast<Eigen::Index>(d)];
    }
    return r;
}

Eigen::VectorXd expand_vector(const Eigen::VectorXd& reduced, const std::vector<int>& map) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(map.size()));
    for (std::size_t d = 0; d < map.size(); ++d) {
        if (map[d] >= 0) full[static_cast<Eigen::Index>(d)] = reduced[map[d]];
    }
    return full;
}

using SparseLdlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

void check_ldlt(const SparseLdlt& ldlt) {
    if (ldlt.info() != Eigen::Success) {
        throw SolverFailure("sparse factorization failed (matrix not positive definite)", 0,
                            std::numeric_limits<double>::infinity());
    }
    const Eigen::VectorXd d = ldlt.vectorD();
    if (d.size() == 0) return;
    const double dmax = d.maxCoeff();
    const double dmin = d.minCoeff();
    if (!(dmin > 1e-15 * dmax)) {
        throw SolverFailure("constrained stiffness matrix is singular; supports do not "
                            "prevent rigid-body motion",
                            0, std::numeric_limits<double>::infinity());
    }
}

Eigen::VectorXd pcg(const SparseMatrix& k, const Eigen::VectorXd& b, double tol,
                    std::size_t max_iterations) {
    const Eigen::Index n = b.size();
    Eigen::VectorXd inv_diag(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = k.coeff(i, i);
        if (!(d > 0.0)) throw SolverFailure("non-positive diagonal in PCG", 0, 1.0);
        inv_diag[i] = 1.0 / d;
    }
    const double bnorm = b.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    Eigen::VectorXd ap(n);
    double rz = r.dot(z);
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        ap.noalias() = k * p;
        const double pap = p.dot(ap);
        if (!(pap > 0.0)) throw SolverFailure("PCG breakdown", it, r.norm() / bnorm);
        const double alpha = rz / pap;
        x += alpha * p;
        r -= alpha * ap;
        if (r.norm() <= tol * bnorm) return x;
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    throw SolverFailure("PCG did not converge", max_iterations, r.norm() / bnorm);
}

void check_residual(const SparseMatrix& k, const Eigen::VectorXd& u, const Eigen::VectorXd& f,
                    double tol) {
    const double fnorm = f.norm();
    const double res = (f - k * u).norm();
    if (!(res <= tol * fnorm)) {
        throw SolverFailure("residual above tolerance", 0, fnorm > 0 ? res / fnorm : res);
    }
}

Eigen::VectorXd solve_reduced(const SparseMatrix& k, const Eigen::VectorXd& f,
                              const SolveOptions& options, SparseLdlt* ldlt,
                              bool pattern_analyzed) {
    if (f.size() == 0 || f.norm() == 0.0) return Eigen::VectorXd::Zero(f.size());
    const std::size_t max_it = options.max_iterations
                                   ? options.max_iterations
                                   : 10 * static_cast<std::size_t>(f.size());
    Eigen::VectorXd u;
    switch (options.kind) {
        case SolverKind::pcg:
            u = pcg(k, f, options.relative_tolerance, max_it);
            break;
        case SolverKind::dense_direct: {
            const Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(k)};
            if (llt.info() != Eigen::Success) {
                throw SolverFailure("dense Cholesky failed (matrix not positive definite)", 0,
                                    std::numeric_limits<double>::infinity());
            }
            u = llt.solve(f);
            break;
        }
        case SolverKind::automatic:
        case SolverKind::sparse_direct: {
            SparseLdlt local;
            SparseLdlt& solver = ldlt ? *ldlt : local;
            if (!ldlt || !pattern_analyzed) solver.analyzePattern(k);
            solver.factorize(k);
            check_ldlt(solver);
            u = solver.solve(f);
            break;
        }
    }
    check_residual(k, u, f, options.relative_tolerance);
    return u;
}

}  // namespace

SparseMatrix assemble(const ProblemSpec& problem, const DensityField& densities, double penal,
                      double e_min, double nu) {
    const Grid& grid = problem.grid;
    check_field(grid, densities);
    const Matrix8d ke = element_stiffness(nu);
    const std::vector<double> moduli = element_moduli(densities, penal, e_min);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(grid.elements()) * 64);
    for (int e = 0; e < grid.elements(); ++e) {
        const auto dofs = grid.element_dofs(e);
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) {
                triplets.emplace_back(dofs[i], dofs[j], moduli[static_cast<std::size_t>(e)] * ke(i, j));
            }
        }
    }
    SparseMatrix k(grid.dofs(), grid.dofs());
    k.setFromTriplets(triplets.begin(), triplets.end());
    k.makeCompressed();
    return k;
}

Eigen::VectorXd solve(const ProblemSpec& problem, const SparseMatrix& stiffness,
                      const SolveOptions& options) {
    const int ndof = problem.grid.dofs();
    if (stiffness.rows() != ndof || stiffness.cols() != ndof) {
        throw InvalidArgument("stiffness matrix size does not match the problem grid");
    }
    int n_free = 0;
    const std::vector<int> map = free_dof_map(problem, n_free);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(stiffness.nonZeros()));
    for (int c = 0; c < stiffness.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(stiffness, c); it; ++it) {
            const int rr = map[static_cast<std::size_t>(it.row())];
            const int cc = map[static_cast<std::size_t>(it.col())];
            if (rr >= 0 && cc >= 0) triplets.emplace_back(rr, cc, it.value());
        }
    }
    SparseMatrix kr(n_free, n_free);
    kr.setFromTriplets(triplets.begin(), triplets.end());
    const Eigen::VectorXd fr = restrict_vector(problem.load_vector(), map, n_free);
    return expand_vector(solve_reduced(kr, fr, options, nullptr, false), map);
}

double compliance(const Eigen::VectorXd& displacements, const Eigen::VectorXd& loads) {
    if (displacements.size() != loads.size()) {
        throw InvalidArgument("displacement and load vectors differ in length");
    }
    return loads.dot(displacements);
}

struct StiffnessSystem::Impl {
    Grid grid;
    SolveOptions options;
    Matrix8d ke;
    Eigen::VectorXd loads;
    Eigen::VectorXd reduced_loads;
    std::vector<int> free_map;
    SparseMatrix reduced;
    std::vector<int> slots;  // element-local entry -> index into reduced.valuePtr(), -1 if fixed
    SparseLdlt ldlt;
    bool analyzed = false;

    Impl(const ProblemSpec& problem, SolveOptions opts, double nu)
        : grid(problem.grid), options(opts), ke(element_stiffness(nu)), loads(problem.load_vector()) {
        int n_free = 0;
        free_map = free_dof_map(problem, n_free);
        reduced_loads = restrict_vector(loads, free_map, n_free);

        std::vector<Eigen::Triplet<double>> pattern;
        pattern.reserve(static_cast<std::size_t>(grid.elements()) * 64);
        for (int e = 0; e < grid.elements(); ++e) {
            const auto dofs = grid.element_dofs(e);
            for (int i = 0; i < 8; ++i) {
                for (int j = 0; j < 8; ++j) {
                    const int r = free_map[static_cast<std::size_t>(dofs[i])];
                    const int c = free_map[static_cast<std::size_t>(dofs[j])];
                    if (r >= 0 && c >= 0) pattern.emplace_back(r, c, 1.0);
                }
            }
        }
        reduced.resize(n_free, n_free);
        reduced.setFromTriplets(pattern.begin(), pattern.end());
        reduced.makeCompressed();

        slots.assign(static_cast<std::size_t>(grid.elements()) * 64, -1);
        const int* outer = reduced.outerIndexPtr();
        const int* inner = reduced.innerIndexPtr();
        for (int e = 0; e < grid.elements(); ++e) {
            const auto dofs = grid.element_dofs(e);
            for (int i = 0; i < 8; ++i) {
                for (int j = 0; j < 8; ++j) {
                    const int r = free_map[static_cast<std::size_t>(dofs[i])];
                    const int c = free_map[static_cast<std::size_t>(dofs[j])];
                    if (r < 0 || c < 0) continue;
                    const int* pos = std::lower_bound(inner + outer[c], inner + outer[c + 1], r);
                    slots[static_cast<std::size_t>(e) * 64 + static_cast<std::size_t>(i * 8 + j)] =
                        static_cast<int>(pos - inner);
                }
            }
        }
    }

    Eigen::VectorXd solve(std::span<const double> moduli) {
        if (moduli.size() != static_cast<std::size_t>(grid.elements())) {
            throw InvalidArgument("moduli length does not match the grid");
        }
        double* values = reduced.valuePtr();
        std::fill(values, values + reduced.nonZeros(), 0.0);
        for (std::size_t e = 0; e < moduli.size(); ++e) {
            const double m = moduli[e];
            const int* s = &slots[e * 64];
            for (int k = 0; k < 64; ++k) {
                if (s[k] >= 0) values[s[k]] += m * ke(k / 8, k % 8);
            }
        }
        Eigen::VectorXd u = solve_reduced(reduced, reduced_loads, options, &ldlt, analyzed);
        analyzed = true;
        return expand_vector(u, free_map);
    }
};

StiffnessSystem::StiffnessSystem(const ProblemSpec& problem, SolveOptions options, double nu)
    : impl_(std::make_unique<Impl>(problem, options, nu)) {}
StiffnessSystem::~StiffnessSystem() = default;
StiffnessSystem::StiffnessSystem(StiffnessSystem&&) noexcept = default;
StiffnessSystem& StiffnessSystem::operator=(StiffnessSystem&&) noexcept = default;

Eigen::VectorXd StiffnessSystem::solve(std::span<const double> moduli) { return impl_->solve(moduli); }
const Matrix8d& StiffnessSystem::element_matrix() const noexcept { return impl_->ke; }
const Eigen::VectorXd& StiffnessSystem::loads() const noexcept { return impl_->loads; }
const Grid& StiffnessSystem::grid() const noexcept { return impl_->grid; }

double full_density_compliance(const ProblemSpec& problem, const SolveOptions& options) {
    StiffnessSystem system(problem, options);
    const std::vector<double> moduli(static_cast<std::size_t>(problem.grid.elements()), 1.0);
    return compliance(system.solve(moduli), system.loads());
}

namespace {

constexpr double kPresetHeight = 0.5;
constexpr double kPresetThickness = 0.005;

ProblemSpec base_preset(std::string name, int nelx, int nely, double symmetry_factor) {
    ProblemSpec p;
    p.name = std::move(name);
    p.grid = Grid(nelx, nely);
    p.height = kPresetHeight;
    p.thickness = kPresetThickness;
    p.symmetry_factor = symmetry_factor;
    p.length = symmetry_factor * kPresetHeight * nelx / nely;
    return p;
}

void fix_left_edge_x(ProblemSpec& p) {
    for (int iy = 0; iy <= p.grid.nely(); ++iy) p.fixed_dofs.push_back(2 * p.grid.node_index(0, iy));
}

}  // namespace

ProblemSpec make_preset(const std::string& name, int nelx, int nely) {
    ProblemSpec p;
    if (name == "mbb") {
        p = base_preset(name, nelx ? nelx : 60, nely ? nely : 20, 2.0);
        const Grid& g = p.grid;
        p.loads.push_back({2 * g.node_index(0, 0) + 1, -1.0});
        fix_left_edge_x(p);
        p.fixed_dofs.push_back(2 * g.node_index(g.nelx(), g.nely()) + 1);
    } else if (name == "bridge") {
        p = base_preset(name, nelx ? nelx : 60, nely ? nely : 30, 2.0);
        const Grid& g = p.grid;
        p.loads.push_back({2 * g.node_index(0, g.nely()) + 1, -1.0});
        fix_left_edge_x(p);
        const int corner = g.node_index(g.nelx(), g.nely());
        p.fixed_dofs.push_back(2 * corner);
        p.fixed_dofs.push_back(2 * corner + 1);
    } else if (name == "complex") {
        p = base_preset(name, nelx ? nelx : 60, nely ? nely : 30, 1.0);
        const Grid& g = p.grid;
        const int patch = std::max(1, g.nely() / 4);
        for (int iy = 0; iy <= g.nely(); ++iy) {
            if (iy <= patch || iy >= g.nely() - patch) {
                p.fixed_dofs.push_back(2 * g.node_index(0, iy));
                p.fixed_dofs.push_back(2 * g.node_index(0, iy) + 1);
            }
        }
        const int roller_x = (2 * g.nelx() + 1) / 3;
        p.fixed_dofs.push_back(2 * g.node_index(roller_x, g.nely()) + 1);
        p.loads.push_back({2 * g.node_index(g.nelx(), g.nely() / 2) + 1, -1.0});
    } else {
        throw InvalidArgument("unknown preset '" + name + "' (expected mbb, bridge or complex)");
    }
    p.validate();
    return p;
}

std::vector<std::string> preset_names() { return {"mbb", "bridge", "complex"}; }

}  // namespace toposelect::fem
