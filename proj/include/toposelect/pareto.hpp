#pragma once

// Compliance / volume-fraction Pareto fronts.

#include "toposelect/error.hpp"
#include "toposelect/fem2d.hpp"
#include "toposelect/simp.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace toposelect {
class ResultCache;
}

namespace toposelect::pareto {

struct FrontPoint {
    double vf = 0.0;
    double c = 0.0;
    /// Which run produced the point, e.g. "baseline:uniform" or "refine2:min@0.26".
    std::string provenance;
    friend bool operator==(const FrontPoint&, const FrontPoint&) = default;
};

struct ParetoFront {
    std::string problem_name;
    std::vector<FrontPoint> points;

    /// Throws InvalidArgument unless vf is strictly increasing in (0,1] and c > 0.
    void validate() const;
    std::vector<double> vfs() const;
    std::vector<double> compliances() const;

    friend bool operator==(const ParetoFront&, const ParetoFront&) = default;
};

/// Plain (x, y) samples with increasing x.
struct Series {
    std::vector<double> x;
    std::vector<double> y;
};

struct SignificantPoints {
    std::vector<std::size_t> minima;  ///< local minima of c * vf
    std::vector<std::size_t> drops;   ///< first point after a large fall of c * vf
};

/// One start field per front point, plus the front itself.
struct SweepResult {
    ParetoFront front;
    std::vector<fem::DensityField> designs;
};

/// Raised when some sweep points could not be optimized.
class SweepError : public Error {
public:
    SweepError(const std::string& what, std::vector<double> failed_vf)
        : Error(what), failed_vf_(std::move(failed_vf)) {}
    const std::vector<double>& failed_vf() const noexcept { return failed_vf_; }

private:
    std::vector<double> failed_vf_;
};

using OptimizeFn = std::function<simp::DesignResult(const fem::ProblemSpec&, double,
                                                    const simp::OptimizerConfig&,
                                                    const fem::DensityField&)>;

/// Everything a sweep needs besides the vf grid. cache may be null.
struct SweepContext {
    const fem::ProblemSpec* problem = nullptr;
    simp::OptimizerConfig cfg;
    ResultCache* cache = nullptr;
    int workers = 1;
    std::uint64_t seed = simp::kDefaultSeed;
    /// Defaults to simp::optimize; tests substitute stubs.
    OptimizeFn optimize;
};

struct RefineOptions {
    int rounds = 3;
    double min_threshold = 0.002;
    double drop_threshold = 0.05;
    /// A round that improves no point by more than this fraction ends refinement.
    double stop_improvement = 5e-4;
};

/// n points evenly spaced on [lo, hi].
std::vector<double> uniform_grid(std::size_t n = 50, double lo = 0.02, double hi = 1.0);

/// One optimization per vf from the uniform start; c is the penal-1 compliance.
SweepResult baseline_sweep(const SweepContext& ctx, const std::vector<double>& vf_grid);

/// All eleven start designs per vf, keeping the lowest penal-1 compliance
/// (ties go to the earlier kind). The "previous" start is the baseline design
/// of the next lower grid point.
SweepResult multistart_sweep(const SweepContext& ctx, const std::vector<double>& vf_grid);

SignificantPoints detect_significant(const ParetoFront& front, double min_threshold = 0.002,
                                     double drop_threshold = 0.05);

/// Warm-start refinement. In each round every point is re-optimized from the
/// design of the closest significant minimum on its left and the closest drop
/// on its right; a point changes only when a new run beats it. history, when
/// given, receives the front after each completed round.
SweepResult refine(const SweepContext& ctx, const SweepResult& start,
                   const RefineOptions& options = {}, std::vector<ParetoFront>* history = nullptr);

/// Running minimum of c over increasing vf.
ParetoFront envelope(const ParetoFront& front);

/// Gaussian-weighted average with standard deviation sigma, kernel cut at
/// 3 sigma and renormalized where it is cut by the ends of the series.
Series smooth(const Series& series, double sigma = 0.04);

}  // namespace toposelect::pareto
