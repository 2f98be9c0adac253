// toposelect: fronts, efficiency ratios, meta-models and material selection
// from the command line. See README.md for the config format.

#include "toposelect/cache.hpp"
#include "toposelect/er.hpp"
#include "toposelect/error.hpp"
#include "toposelect/io.hpp"
#include "toposelect/materials.hpp"
#include "toposelect/metamodel.hpp"
#include "toposelect/parallel.hpp"
#include "toposelect/pareto.hpp"
#include "toposelect/simp.hpp"
#include "toposelect/svg.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace toposelect;
using io::Json;

namespace {

std::mutex log_mutex;

void log(const std::string& line) {
    std::lock_guard lock(log_mutex);
    std::cerr << line << '\n';
}

struct SweepSettings {
    std::size_t points = 50;
    double vf_min = 0.02;
    double vf_max = 1.0;
    pareto::RefineOptions refine;
};

struct RunConfig {
    fem::ProblemSpec problem;
    simp::OptimizerConfig optimizer;
    SweepSettings sweep;
    fs::path cache_dir;
    fs::path output_dir = "out";
    std::uint64_t seed = simp::kDefaultSeed;
    int workers = default_workers();
    double anchor_vf = metamodel::kDefaultAnchorVf;
    double tie_tol = 0.02;
    bool refine_ties = true;
    std::optional<materials::LoadCase> loadcase;
    fs::path materials_csv;
    fs::path metamodel_path;
    fs::path front_path;
};

// Command-line values; each one only counts when the flag was given.
struct Flags {
    std::string config;
    std::string preset;
    std::string problem_file;
    int nelx = 0;
    int nely = 0;
    std::string out;
    std::string cache;
    int workers = 0;
    std::uint64_t seed = 0;
    double penal = 0, rmin = 0;
    std::string filter;
    int max_iters = 0;
    std::size_t points = 0;
    double vf_min = 0, vf_max = 0;
    int rounds = 0;
    double drop_threshold = 0;
    double anchor_vf = 0;
    double vf = 0;
    std::string strategy = "refine";
    std::string front;
    std::string materials;
    std::string metamodel;
    double force = 0, delta = 0, thickness = 0, length = 0, height = 0;
    double load_scale = 1.0;
    double tie_tol = 0;
    bool no_refine = false;
    // The same flag is registered on several subcommands.
    std::map<std::string, std::vector<CLI::Option*>> given;

    bool has(const std::string& name) const {
        auto it = given.find(name);
        if (it == given.end()) return false;
        return std::any_of(it->second.begin(), it->second.end(), [](CLI::Option* o) { return o->count() > 0; });
    }
};

template <class T>
void add(CLI::App* app, Flags& f, const std::string& name, T& target, const std::string& help) {
    f.given[name].push_back(app->add_option("--" + name, target, help));
}

void add_common(CLI::App* app, Flags& f) {
    add(app, f, "config", f.config, "JSON run config");
    add(app, f, "preset", f.preset, "built-in problem: mbb, bridge or complex");
    add(app, f, "problem", f.problem_file, "problem JSON file");
    add(app, f, "nelx", f.nelx, "elements along x (presets)");
    add(app, f, "nely", f.nely, "elements along y (presets)");
    add(app, f, "out", f.out, "output directory");
    add(app, f, "cache", f.cache, "cache directory (default $TOPOSELECT_CACHE or ./.toposelect_cache)");
    add(app, f, "workers", f.workers, "parallel optimizations (default: hardware threads)");
    add(app, f, "seed", f.seed, "seed for the noise start design");
    add(app, f, "penal", f.penal, "SIMP penalization");
    add(app, f, "rmin", f.rmin, "filter radius in elements");
    add(app, f, "filter", f.filter, "density or sensitivity");
    add(app, f, "max-iters", f.max_iters, "optimizer iteration cap");
}

void add_sweep(CLI::App* app, Flags& f) {
    add(app, f, "points", f.points, "number of vf grid points");
    add(app, f, "vf-min", f.vf_min, "lowest vf of the grid");
    add(app, f, "vf-max", f.vf_max, "highest vf of the grid");
    add(app, f, "rounds", f.rounds, "refinement rounds");
    add(app, f, "drop-threshold", f.drop_threshold, "relative fall of c*vf flagged as a drop");
}

template <class T>
void take(const Json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument(std::string("config key '") + key + "': " + e.what());
        }
    }
}

RunConfig build_config(const Flags& f) {
    RunConfig rc;
    Json j = Json::object();
    if (f.has("config")) {
        try {
            j = Json::parse(io::read_text_file(f.config));
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument("config '" + f.config + "' is not valid JSON: " + e.what());
        }
        if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    }
    const fs::path base = f.has("config") ? fs::path(f.config).parent_path() : fs::path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() || base.empty() ? fs::path(p) : base / p; };

    // Problem: flags first, then config, then the default preset.
    int nelx = 0, nely = 0;
    take(j, "nelx", nelx);
    take(j, "nely", nely);
    if (f.has("nelx")) nelx = f.nelx;
    if (f.has("nely")) nely = f.nely;
    if (f.has("problem")) {
        rc.problem = io::problem_from_json(Json::parse(io::read_text_file(f.problem_file)));
    } else if (f.has("preset")) {
        rc.problem = fem::make_preset(f.preset, nelx, nely);
    } else if (j.contains("problem") && j["problem"].is_object()) {
        rc.problem = io::problem_from_json(j["problem"]);
    } else if (j.contains("problem") && j["problem"].is_string()) {
        rc.problem = fem::make_preset(j["problem"].get<std::string>(), nelx, nely);
    } else {
        rc.problem = fem::make_preset("mbb", nelx, nely);
    }

    if (j.contains("optimizer")) rc.optimizer = io::optimizer_config_from_json(j["optimizer"]);
    if (f.has("penal")) rc.optimizer.penal = f.penal;
    if (f.has("rmin")) rc.optimizer.rmin = f.rmin;
    if (f.has("filter")) rc.optimizer.filter = simp::filter_kind_from_string(f.filter);
    if (f.has("max-iters")) rc.optimizer.max_iters = f.max_iters;
    rc.optimizer.validate();

    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        take(s, "points", rc.sweep.points);
        take(s, "vf_min", rc.sweep.vf_min);
        take(s, "vf_max", rc.sweep.vf_max);
        take(s, "rounds", rc.sweep.refine.rounds);
        take(s, "drop_threshold", rc.sweep.refine.drop_threshold);
        take(s, "min_threshold", rc.sweep.refine.min_threshold);
        take(s, "stop_improvement", rc.sweep.refine.stop_improvement);
    }
    if (f.has("points")) rc.sweep.points = f.points;
    if (f.has("vf-min")) rc.sweep.vf_min = f.vf_min;
    if (f.has("vf-max")) rc.sweep.vf_max = f.vf_max;
    if (f.has("rounds")) rc.sweep.refine.rounds = f.rounds;
    if (f.has("drop-threshold")) rc.sweep.refine.drop_threshold = f.drop_threshold;

    if (j.contains("paths")) {
        std::string p;
        if (j["paths"].contains("cache")) {
            take(j["paths"], "cache", p);
            rc.cache_dir = resolve(p);
        }
        if (j["paths"].contains("output")) {
            take(j["paths"], "output", p);
            rc.output_dir = resolve(p);
        }
    }
    if (rc.cache_dir.empty()) rc.cache_dir = ResultCache::default_root();
    if (f.has("cache")) rc.cache_dir = f.cache;
    if (f.has("out")) rc.output_dir = f.out;

    take(j, "seed", rc.seed);
    if (f.has("seed")) rc.seed = f.seed;
    take(j, "workers", rc.workers);
    if (f.has("workers")) rc.workers = f.workers;
    if (rc.workers < 1) throw InvalidArgument("workers must be >= 1");
    take(j, "anchor_vf", rc.anchor_vf);
    if (f.has("anchor-vf")) rc.anchor_vf = f.anchor_vf;
    take(j, "tie_tol", rc.tie_tol);
    if (f.has("tie-tol")) rc.tie_tol = f.tie_tol;
    take(j, "refine_ties", rc.refine_ties);
    if (f.no_refine) rc.refine_ties = false;

    std::string path;
    if (j.contains("materials")) {
        take(j, "materials", path);
        rc.materials_csv = resolve(path);
    }
    if (f.has("materials")) rc.materials_csv = f.materials;
    if (j.contains("metamodel")) {
        take(j, "metamodel", path);
        rc.metamodel_path = resolve(path);
    }
    if (f.has("metamodel")) rc.metamodel_path = f.metamodel;
    if (f.has("front")) rc.front_path = f.front;

    materials::LoadCase lc{0.0, 0.0, rc.problem.thickness, rc.problem.length, rc.problem.height};
    bool any_load = false;
    if (j.contains("loadcase")) {
        const auto& l = j["loadcase"];
        take(l, "F", lc.force);
        take(l, "delta_max", lc.delta_max);
        take(l, "t", lc.thickness);
        take(l, "L", lc.length);
        take(l, "h", lc.height);
        any_load = true;
    }
    if (f.has("force")) lc.force = f.force, any_load = true;
    if (f.has("delta")) lc.delta_max = f.delta, any_load = true;
    if (f.has("thickness")) lc.thickness = f.thickness;
    if (f.has("length")) lc.length = f.length;
    if (f.has("height")) lc.height = f.height;
    if (any_load) {
        lc.force *= f.load_scale;
        rc.loadcase = lc;
    }
    return rc;
}

pareto::SweepContext make_context(const RunConfig& rc, ResultCache& cache) {
    pareto::SweepContext ctx;
    ctx.problem = &rc.problem;
    ctx.cfg = rc.optimizer;
    ctx.cache = &cache;
    ctx.workers = rc.workers;
    ctx.seed = rc.seed;
    return ctx;
}

std::string front_key(const RunConfig& rc) {
    Json key{{"optimizer", io::to_json(rc.optimizer)},
             {"points", rc.sweep.points},
             {"vf_min", rc.sweep.vf_min},
             {"vf_max", rc.sweep.vf_max},
             {"rounds", rc.sweep.refine.rounds},
             {"drop_threshold", rc.sweep.refine.drop_threshold},
             {"min_threshold", rc.sweep.refine.min_threshold},
             {"stop_improvement", rc.sweep.refine.stop_improvement},
             {"seed", rc.seed}};
    return io::fingerprint(key.dump());
}

// Refined fronts are kept next to the run cache so `fit` can report errors.
fs::path stored_front_path(const RunConfig& rc) {
    return rc.cache_dir / io::fingerprint(io::to_json(rc.problem).dump()) / "fronts" /
           ("refine_" + front_key(rc) + ".csv");
}

void write_front(const fs::path& path, const pareto::ParetoFront& front) {
    std::ostringstream s;
    io::write_front_csv(s, front);
    io::write_text_file(path, s.str());
}

svg::PlotSeries front_series(const std::string& label, const pareto::ParetoFront& front) {
    return {label, front.vfs(), front.compliances(), true, false, {}};
}

int cmd_optimize(const RunConfig& rc, double vf) {
    if (!(vf > 0.0 && vf <= 1.0)) {
        throw InvalidArgument("--vf must satisfy 0 < vf <= 1, got " + io::format_double(vf));
    }
    ResultCache cache(rc.cache_dir);
    const auto init = simp::initial_design(simp::InitKind::uniform, vf, rc.problem.grid, rc.seed);
    const auto result = cache.get_or_compute(rc.problem, vf, rc.optimizer, init, [&] {
        return simp::optimize(rc.problem, vf, rc.optimizer, init);
    });
    fs::create_directories(rc.output_dir);
    std::ostringstream csv;
    io::write_density_csv(csv, rc.problem.grid, result.densities);
    io::write_text_file(rc.output_dir / "design.csv", csv.str());
    io::write_text_file(rc.output_dir / "design.svg", svg::density_raster(rc.problem.grid, result.densities));
    const Json summary{{"problem", rc.problem.name},
                       {"nelx", rc.problem.grid.nelx()},
                       {"nely", rc.problem.grid.nely()},
                       {"vf_target", vf},
                       {"vf", result.vf},
                       {"compliance_p", result.compliance_p},
                       {"compliance_p1", result.compliance_p1},
                       {"iterations", result.iterations},
                       {"converged", result.converged},
                       {"optimizer", io::to_json(rc.optimizer)}};
    io::write_text_file(rc.output_dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "vf=" << io::format_double(result.vf) << " compliance_p=" << io::format_double(result.compliance_p)
              << " compliance_p1=" << io::format_double(result.compliance_p1) << " iterations=" << result.iterations
              << '\n';
    return 0;
}

int cmd_pareto(const RunConfig& rc, const std::string& strategy) {
    if (strategy != "baseline" && strategy != "multistart" && strategy != "refine") {
        throw InvalidArgument("--strategy must be baseline, multistart or refine");
    }
    ResultCache cache(rc.cache_dir);
    const auto ctx = make_context(rc, cache);
    const auto grid = pareto::uniform_grid(rc.sweep.points, rc.sweep.vf_min, rc.sweep.vf_max);
    fs::create_directories(rc.output_dir);
    std::vector<svg::PlotSeries> plot;

    log("pareto: baseline sweep, " + std::to_string(grid.size()) + " points");
    const auto base = pareto::baseline_sweep(ctx, grid);
    write_front(rc.output_dir / "front_baseline.csv", base.front);
    plot.push_back(front_series("baseline", base.front));
    if (strategy != "baseline") {
        log("pareto: multi-start sweep, " + std::to_string(grid.size() * simp::kAllInitKinds.size()) + " runs");
        const auto multi = pareto::multistart_sweep(ctx, grid);
        write_front(rc.output_dir / "front_multistart.csv", multi.front);
        plot.push_back(front_series("multi-start", multi.front));
        if (strategy == "refine") {
            log("pareto: refinement, up to " + std::to_string(rc.sweep.refine.rounds) + " rounds");
            std::vector<pareto::ParetoFront> rounds;
            const auto refined = pareto::refine(ctx, multi, rc.sweep.refine, &rounds);
            write_front(rc.output_dir / "front_refine.csv", refined.front);
            write_front(stored_front_path(rc), refined.front);
            plot.push_back(front_series("refined", refined.front));
            plot.push_back(front_series("envelope", pareto::envelope(refined.front)));
            log("pareto: refinement ran " + std::to_string(rounds.size()) + " round(s)");
        }
    }
    svg::PlotOptions opt{"Pareto fronts: " + rc.problem.name, "volume fraction", "compliance (unit load)", false, true};
    io::write_text_file(rc.output_dir / ("front_" + strategy + ".svg"), svg::chart(plot, opt));
    log("pareto: cache hits " + std::to_string(cache.hits()) + ", misses " + std::to_string(cache.misses()));
    return 0;
}

int cmd_er(const RunConfig& rc) {
    const fs::path path = rc.front_path.empty() ? rc.output_dir / "front_refine.csv" : rc.front_path;
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open front file '" + path.string() + "'");
    const auto front = io::read_front_csv(in, rc.problem.name);
    const auto raw = er::compute_er(front);
    const auto filtered = er::filter_er(front);
    fs::create_directories(rc.output_dir);
    std::ostringstream a, b;
    io::write_er_csv(a, raw);
    io::write_er_csv(b, filtered);
    io::write_text_file(rc.output_dir / "er_raw.csv", a.str());
    io::write_text_file(rc.output_dir / "er_filtered.csv", b.str());
    svg::PlotOptions opt{"Efficiency ratio", "volume fraction", "n", false, false};
    io::write_text_file(rc.output_dir / "er.svg",
                        svg::chart({{"raw", raw.vf, raw.n, true, false, {}},
                                    {"filtered", filtered.vf, filtered.n, true, false, {}}},
                                   opt));
    const auto check = er::check_bounds(filtered);
    if (check.below || check.above) {
        log("warning: filtered ER leaves [-0.02, 1.02] at " + std::to_string(check.below + check.above) +
            " sample(s)");
    }
    if (!check.ok(0.10, filtered.n.size())) {
        log("warning: filtered ER increases by more than 0.02 at " + std::to_string(check.strict_increases) +
            " step(s)");
    }
    std::cout << "n(first)=" << io::format_double(filtered.n.front())
              << " n(last)=" << io::format_double(filtered.n.back()) << '\n';
    return 0;
}

metamodel::MetaModel fit_model(const RunConfig& rc, ResultCache& cache) {
    const double c_full = metamodel::full_density_compliance(rc.problem);
    const auto ctx = make_context(rc, cache);
    const auto anchor = pareto::multistart_sweep(ctx, {rc.anchor_vf});
    const auto& p = anchor.front.points.front();
    log("fit: f(1)=" + io::format_double(c_full) + ", f(" + io::format_double(p.vf) + ")=" + io::format_double(p.c) +
        " from " + p.provenance);
    return metamodel::fit({p.vf, p.c}, c_full, rc.problem.name, rc.problem.symmetry_factor);
}

int cmd_fit(const RunConfig& rc) {
    ResultCache cache(rc.cache_dir);
    const auto m = fit_model(rc, cache);
    fs::create_directories(rc.output_dir);
    io::write_text_file(rc.output_dir / "metamodel.json", io::to_json(m).dump(2) + "\n");

    std::vector<double> xs;
    for (int i = 0; i <= 200; ++i) xs.push_back(0.02 + 0.98 * i / 200.0);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(metamodel::eval(m, x));
    std::vector<svg::PlotSeries> plot{{"meta-model", xs, ys, true, false, {}}};

    const fs::path stored = rc.front_path.empty() ? stored_front_path(rc) : rc.front_path;
    if (fs::exists(stored)) {
        std::ifstream in(stored);
        const auto front = io::read_front_csv(in, rc.problem.name);
        std::ostringstream csv;
        csv << "vf,c_front,c_model,rel_error\n";
        double worst = 0.0;
        for (const auto& pt : front.points) {
            const double cm = metamodel::eval(m, pt.vf);
            const double err = (cm - pt.c) / pt.c;
            csv << io::format_double(pt.vf) << ',' << io::format_double(pt.c) << ',' << io::format_double(cm) << ','
                << io::format_double(err) << '\n';
            if (pt.vf >= 0.05) worst = std::max(worst, std::abs(err));
        }
        io::write_text_file(rc.output_dir / "error_profile.csv", csv.str());
        plot.push_back({"refined front", front.vfs(), front.compliances(), false, true, {}});
        std::cout << "max relative error (vf >= 0.05): " << io::format_double(worst) << '\n';
    } else {
        log("notice: no refined front at '" + stored.string() + "'; error profile skipped");
    }
    svg::PlotOptions opt{"Meta-model: " + rc.problem.name, "volume fraction", "compliance (unit load)", false, true};
    io::write_text_file(rc.output_dir / "metamodel.svg", svg::chart(plot, opt));
    std::cout << "a=" << io::format_double(m.a) << " b=" << io::format_double(m.b) << '\n';
    return 0;
}

int cmd_select(const RunConfig& rc) {
    if (rc.materials_csv.empty()) throw InvalidArgument("--materials is required");
    if (!rc.loadcase) throw InvalidArgument("a load case is required (--force and --delta, or config 'loadcase')");
    const auto mats = materials::load_materials(rc.materials_csv);
    if (mats.empty()) throw InvalidArgument("materials file '" + rc.materials_csv.string() + "' has no materials");
    rc.loadcase->validate();

    ResultCache cache(rc.cache_dir);
    metamodel::MetaModel m;
    if (!rc.metamodel_path.empty()) {
        m = io::metamodel_from_json(Json::parse(io::read_text_file(rc.metamodel_path)));
    } else {
        m = fit_model(rc, cache);
    }
    materials::Refiner refiner;
    if (rc.refine_ties) {
        refiner = [&](const materials::Material& mat) {
            return materials::refine_vf(mat, rc.problem, *rc.loadcase, m, rc.optimizer,
                                        [&](const fem::ProblemSpec& p, double vf, const simp::OptimizerConfig& cfg,
                                            const fem::DensityField& init) {
                                            return cache.get_or_compute(p, vf, cfg, init, [&] {
                                                return simp::optimize(p, vf, cfg, init);
                                            });
                                        });
        };
    }
    const auto report = materials::select(mats, m, *rc.loadcase, rc.tie_tol, refiner);

    fs::create_directories(rc.output_dir);
    io::write_text_file(rc.output_dir / "selection.json", io::to_json(report).dump(2) + "\n");
    std::string trail;
    for (const auto& line : report.trail) trail += line + "\n";
    io::write_text_file(rc.output_dir / "selection.txt", trail);

    auto scatter = [](const std::string& label, const std::vector<materials::Material>& ms, const char* color) {
        svg::PlotSeries s{label, {}, {}, false, true, color};
        for (const auto& mat : ms) {
            s.x.push_back(mat.rho);
            s.y.push_back(mat.e / 1e9);
        }
        return s;
    };
    svg::PlotOptions opt{"Ashby chart", "density (kg/m^3)", "Young's modulus (GPa)", true, true};
    io::write_text_file(rc.output_dir / "ashby.svg",
                        svg::chart({scatter("all", report.candidates, "#bbbbbb"),
                                    scatter("Pareto screen", report.kept_after_pareto, "#1f77b4"),
                                    scatter("density screen", report.kept_after_density, "#2ca02c"),
                                    scatter("winner", {report.winner}, "#d62728")},
                                   opt));
    std::cout << trail;
    return 0;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InvalidArgument*>(&e)) return 2;
    if (dynamic_cast<const Infeasible*>(&e)) return 3;
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topology-optimization fronts, meta-models and material selection"};
    app.require_subcommand(1);
    Flags f;

    auto* optimize = app.add_subcommand("optimize", "optimize one design at a fixed volume fraction");
    add_common(optimize, f);
    add(optimize, f, "vf", f.vf, "target volume fraction");
    optimize->get_option("--vf")->required();

    auto* pareto_cmd = app.add_subcommand("pareto", "compute compliance/volume-fraction fronts");
    add_common(pareto_cmd, f);
    add_sweep(pareto_cmd, f);
    add(pareto_cmd, f, "strategy", f.strategy, "baseline, multistart or refine (default)");

    auto* er_cmd = app.add_subcommand("er", "efficiency ratio of a front CSV");
    add_common(er_cmd, f);
    add(er_cmd, f, "front", f.front, "front CSV (default <out>/front_refine.csv)");

    auto* fit_cmd = app.add_subcommand("fit", "fit the two-parameter meta-model");
    add_common(fit_cmd, f);
    add_sweep(fit_cmd, f);
    add(fit_cmd, f, "anchor-vf", f.anchor_vf, "volume fraction of the anchor optimization");
    add(fit_cmd, f, "front", f.front, "front CSV for the error profile");

    auto* select_cmd = app.add_subcommand("select", "choose the minimum-mass material");
    add_common(select_cmd, f);
    add(select_cmd, f, "anchor-vf", f.anchor_vf, "volume fraction of the anchor optimization");
    add(select_cmd, f, "materials", f.materials, "materials CSV (name,E_GPa,rho_kgm3)");
    add(select_cmd, f, "metamodel", f.metamodel, "meta-model JSON (fitted on demand when absent)");
    add(select_cmd, f, "force", f.force, "total load F in N");
    add(select_cmd, f, "delta", f.delta, "deflection limit in m");
    add(select_cmd, f, "thickness", f.thickness, "part thickness in m");
    add(select_cmd, f, "length", f.length, "part length in m");
    add(select_cmd, f, "height", f.height, "part height in m");
    add(select_cmd, f, "load-scale", f.load_scale, "multiplier applied to F");
    add(select_cmd, f, "tie-tol", f.tie_tol, "relative f4 gap that triggers re-scoring");
    select_cmd->add_flag("--no-refine", f.no_refine, "skip re-scoring of near ties");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const RunConfig rc = build_config(f);
        if (*optimize) return cmd_optimize(rc, f.vf);
        if (*pareto_cmd) return cmd_pareto(rc, f.strategy);
        if (*er_cmd) return cmd_er(rc);
        if (*fit_cmd) return cmd_fit(rc);
        if (*select_cmd) return cmd_select(rc);
    } catch (const pareto::SweepError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return 0;
}
