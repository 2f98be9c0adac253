#pragma once

// Shared problem setups, reference values and the memoized desk-scale pipeline.

#include "toposelect/cache.hpp"
#include "toposelect/materials.hpp"
#include "toposelect/metamodel.hpp"
#include "toposelect/pareto.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace toposelect::fixtures {

// Values produced once by tests/oracle/top88_reference.py (numpy/scipy).
namespace reference {
inline constexpr double kMbb60x20FullDensity = 125.87776347242325;
// vf 0.5, penal 3, rmin 1.2, density filter
inline constexpr double kMbb60x20Vf05Compliance = 209.17238226050554;
inline constexpr double kMbb60x20Vf05ComplianceP1 = 185.23118740046712;
inline constexpr int kMbb60x20Vf05Iterations = 97;
// vf 0.5, penal 3, rmin 1.5, density filter
inline constexpr double kMbb60x20Vf05Rmin15Compliance = 218.8152275687362;
}  // namespace reference

std::filesystem::path data_dir();
std::filesystem::path cli_path();

/// Cache shared by the acceptance binary and the integration tests.
std::filesystem::path shared_cache_dir();

/// Empty scratch directory under the build tree.
std::filesystem::path fresh_dir(const std::string& name);

/// 60 x 20 half MBB beam.
const fem::ProblemSpec& desk_mbb();

/// Half model of the 2000 mm x 500 mm, 5 mm thick example beam (60 x 30).
const fem::ProblemSpec& example_mbb();

materials::LoadCase example_load_case(double load_scale = 1.0);
std::vector<materials::Material> example_materials();

struct DeskPipeline {
    pareto::SweepResult baseline;
    pareto::SweepResult multistart;
    pareto::SweepResult refined;
    std::vector<pareto::ParetoFront> rounds;
    metamodel::MetaModel model;
    double seconds = 0.0;  ///< wall time of the sweeps, cache included
};

/// The 50-point desk-scale MBB pipeline, computed through the shared cache
/// once per process.
const DeskPipeline& desk_pipeline();

/// Meta-model of desk_mbb() fitted from f(1) and a multi-start anchor at 0.1.
metamodel::MetaModel fit_desk_model(ResultCache& cache, int workers);

/// Runs the command-line tool; returns its exit code. stdout/stderr go to files
/// in out_dir when given.
int run_cli(const std::vector<std::string>& args, const std::filesystem::path& capture = {});

std::string read_file(const std::filesystem::path& path);

}  // namespace toposelect::fixtures
