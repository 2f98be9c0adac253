#pragma once

// Plane-stress finite elements on a regular grid of unit bilinear quads.
//
// Numbering (shared by every module and file format):
//   element e = ex * nely + ey      (column-major, ey = 0 is the top row)
//   node    n = ix * (nely + 1) + iy (column-major, iy = 0 is the top row)
//   dof     2n is u_x (positive right), 2n + 1 is u_y (positive up)

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace toposelect::fem {

using Matrix8d = Eigen::Matrix<double, 8, 8>;
using SparseMatrix = Eigen::SparseMatrix<double>;

inline constexpr double kDefaultPoisson = 0.3;
inline constexpr double kDefaultEmin = 1e-9;

class Grid {
public:
    Grid(int nelx, int nely);

    int nelx() const noexcept { return nelx_; }
    int nely() const noexcept { return nely_; }
    int elements() const noexcept { return nelx_ * nely_; }
    int nodes() const noexcept { return (nelx_ + 1) * (nely_ + 1); }
    int dofs() const noexcept { return 2 * nodes(); }

    int element_index(int ex, int ey) const noexcept { return ex * nely_ + ey; }
    std::pair<int, int> element_coords(int e) const noexcept { return {e / nely_, e % nely_}; }
    int node_index(int ix, int iy) const noexcept { return ix * (nely_ + 1) + iy; }
    std::pair<int, int> node_coords(int n) const noexcept { return {n / (nely_ + 1), n % (nely_ + 1)}; }

    /// Global dofs of element e in the order expected by element_stiffness():
    /// lower-left, lower-right, upper-right, upper-left, (u_x, u_y) per node.
    std::array<int, 8> element_dofs(int e) const noexcept;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int nelx_;
    int nely_;
};

struct PointLoad {
    int dof;
    double magnitude;
    friend bool operator==(const PointLoad&, const PointLoad&) = default;
};

/// Discretized design domain with loads and supports.
///
/// length/height/thickness describe the physical part in metres. When the grid
/// models only a symmetric portion of it, symmetry_factor is the number of such
/// portions (2 for a half model): each portion carries 1/symmetry_factor of the
/// part's total load and shares its volume fraction.
struct ProblemSpec {
    std::string name;
    Grid grid{1, 1};
    std::vector<PointLoad> loads;
    std::vector<int> fixed_dofs;
    double length = 1.0;
    double height = 1.0;
    double thickness = 1.0;
    double symmetry_factor = 1.0;

    /// Throws InvalidArgument on an empty load list, out-of-range dofs or
    /// non-positive dimensions. Sorts and deduplicates fixed_dofs.
    void validate();

    Eigen::VectorXd load_vector() const;

    friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Per-element densities in [0,1].
class DensityField {
public:
    DensityField() = default;
    explicit DensityField(std::vector<double> values);

    static DensityField uniform(const Grid& grid, double value);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double volume_fraction() const noexcept;

    friend bool operator==(const DensityField&, const DensityField&) = default;

private:
    std::vector<double> values_;
};

/// Stiffness of a unit square element with unit Young's modulus and thickness.
Matrix8d element_stiffness(double nu = kDefaultPoisson);

/// Young's modulus of each element under modified SIMP:
/// e_min + rho^penal * (1 - e_min).
std::vector<double> element_moduli(const DensityField& densities, double penal,
                                    double e_min = kDefaultEmin);

/// Full (unconstrained) global stiffness matrix.
SparseMatrix assemble(const ProblemSpec& problem, const DensityField& densities, double penal,
                      double e_min = kDefaultEmin, double nu = kDefaultPoisson);

enum class SolverKind {
    automatic,      ///< sparse Cholesky
    sparse_direct,
    dense_direct,
    pcg,            ///< conjugate gradients, Jacobi preconditioner
};

struct SolveOptions {
    SolverKind kind = SolverKind::automatic;
    double relative_tolerance = 1e-8;
    /// 0 selects 10 x (number of dofs).
    std::size_t max_iterations = 0;
};

/// Displacements for K U = F with U = 0 on the fixed dofs. Throws
/// SolverFailure when the residual on the free dofs exceeds the tolerance or
/// the constrained matrix is singular.
Eigen::VectorXd solve(const ProblemSpec& problem, const SparseMatrix& stiffness,
                      const SolveOptions& options = {});

/// C = F . U, which equals U^T K U at equilibrium.
double compliance(const Eigen::VectorXd& displacements, const Eigen::VectorXd& loads);

/// Repeated assemble-and-solve for one problem with varying element moduli.
/// Keeps the sparsity pattern, scatter map and symbolic factorization alive
/// between calls; one instance must not be used from two threads at once.
class StiffnessSystem {
public:
    explicit StiffnessSystem(const ProblemSpec& problem, SolveOptions options = {},
                             double nu = kDefaultPoisson);
    ~StiffnessSystem();
    StiffnessSystem(StiffnessSystem&&) noexcept;
    StiffnessSystem& operator=(StiffnessSystem&&) noexcept;

    /// Full displacement vector for the given element moduli.
    Eigen::VectorXd solve(std::span<const double> moduli);

    const Matrix8d& element_matrix() const noexcept;
    const Eigen::VectorXd& loads() const noexcept;
    const Grid& grid() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Compliance of the all-ones field.
double full_density_compliance(const ProblemSpec& problem, const SolveOptions& options = {});

/// Built-in problems with unit load. Physical dimensions default to a 0.5 m
/// tall, 5 mm thick part whose length follows the grid aspect ratio.
///   "mbb"     half of a simply supported beam, load at the top of the
///             symmetry line, roller at the bottom-right corner
///   "bridge"  half of a span pinned at both ends, load at the bottom of the
///             symmetry line (deck level)
///   "complex" full domain, two clamped patches on the left edge, a roller
///             two thirds along the bottom, load at mid-height on the right edge
ProblemSpec make_preset(const std::string& name, int nelx = 0, int nely = 0);
std::vector<std::string> preset_names();

}  // namespace toposelect::fem
