#include "fixtures.hpp"

#include "toposelect/io.hpp"
#include "toposelect/parallel.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <sys/wait.h>

namespace toposelect::fixtures {

std::filesystem::path data_dir() { return TOPOSELECT_TEST_DATA; }
std::filesystem::path cli_path() { return TOPOSELECT_CLI; }
std::filesystem::path shared_cache_dir() { return std::filesystem::path(TOPOSELECT_TEST_CACHE) / "shared"; }

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::path(TOPOSELECT_TEST_CACHE) / "scratch" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

const fem::ProblemSpec& desk_mbb() {
    static const fem::ProblemSpec p = fem::make_preset("mbb", 60, 20);
    return p;
}

const fem::ProblemSpec& example_mbb() {
    static const fem::ProblemSpec p = fem::make_preset("mbb", 60, 30);
    return p;
}

materials::LoadCase example_load_case(double load_scale) {
    return {20e3 * load_scale, 5e-3, 5e-3, 2.0, 0.5};
}

std::vector<materials::Material> example_materials() {
    return materials::load_materials(data_dir() / "example_materials.csv");
}

metamodel::MetaModel fit_desk_model(ResultCache& cache, int workers) {
    pareto::SweepContext ctx;
    ctx.problem = &desk_mbb();
    ctx.cache = &cache;
    ctx.workers = workers;
    const auto anchor = pareto::multistart_sweep(ctx, {metamodel::kDefaultAnchorVf});
    return metamodel::fit({anchor.front.points[0].vf, anchor.front.points[0].c},
                          metamodel::full_density_compliance(desk_mbb()), desk_mbb().name,
                          desk_mbb().symmetry_factor);
}

const DeskPipeline& desk_pipeline() {
    static std::once_flag once;
    static DeskPipeline pipe;
    std::call_once(once, [] {
        ResultCache cache(shared_cache_dir());
        pareto::SweepContext ctx;
        ctx.problem = &desk_mbb();
        ctx.cache = &cache;
        ctx.workers = default_workers();
        const auto grid = pareto::uniform_grid(50, 0.02, 1.0);
        const auto t0 = std::chrono::steady_clock::now();
        pipe.baseline = pareto::baseline_sweep(ctx, grid);
        pipe.multistart = pareto::multistart_sweep(ctx, grid);
        pipe.refined = pareto::refine(ctx, pipe.multistart, {}, &pipe.rounds);
        pipe.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        pipe.model = fit_desk_model(cache, ctx.workers);
    });
    return pipe;
}

namespace {

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char ch : s) {
        if (ch == '\'') {
            out += "'\\''";
        } else {
            out += ch;
        }
    }
    return out + "'";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, const std::filesystem::path& capture) {
    std::string cmd = quote(cli_path().string());
    for (const auto& a : args) cmd += " " + quote(a);
    if (!capture.empty()) {
        std::filesystem::create_directories(capture.parent_path());
        cmd += " > " + quote(capture.string() + ".out") + " 2> " + quote(capture.string() + ".err");
    }
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

std::string read_file(const std::filesystem::path& path) { return io::read_text_file(path); }

}  // namespace toposelect::fixtures
