#include "toposelect/pareto.hpp"

#include "toposelect/cache.hpp"
#include "toposelect/io.hpp"
#include "toposelect/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace toposelect::pareto {

void ParetoFront::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!(p.vf > 0.0 && p.vf <= 1.0)) {
            throw InvalidArgument("front point " + std::to_string(i) + " has vf outside (0,1]");
        }
        if (!(p.c > 0.0) || !std::isfinite(p.c)) {
            throw InvalidArgument("front point " + std::to_string(i) + " has non-positive compliance");
        }
        if (i > 0 && !(p.vf > points[i - 1].vf)) {
            throw InvalidArgument("front vf must be strictly increasing (point " + std::to_string(i) + ")");
        }
    }
}

std::vector<double> ParetoFront::vfs() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.vf);
    return out;
}

std::vector<double> ParetoFront::compliances() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.c);
    return out;
}

std::vector<double> uniform_grid(std::size_t n, double lo, double hi) {
    if (n == 0) throw InvalidArgument("vf grid needs at least one point");
    if (!(lo > 0.0 && hi <= 1.0 && lo <= hi)) throw InvalidArgument("vf grid bounds must satisfy 0 < lo <= hi <= 1");
    if (n == 1) return {hi};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    out.back() = hi;
    return out;
}

namespace {

void check_grid(const std::vector<double>& vf_grid) {
    if (vf_grid.empty()) throw InvalidArgument("vf grid is empty");
    for (std::size_t i = 0; i < vf_grid.size(); ++i) {
        if (!(vf_grid[i] > 0.0 && vf_grid[i] <= 1.0)) throw InvalidArgument("vf grid values must lie in (0,1]");
        if (i > 0 && !(vf_grid[i] > vf_grid[i - 1])) throw InvalidArgument("vf grid must be strictly increasing");
    }
}

void check_context(const SweepContext& ctx) {
    if (!ctx.problem) throw InvalidArgument("sweep context has no problem");
    ctx.cfg.validate();
}

simp::DesignResult run_one(const SweepContext& ctx, double vf, const fem::DensityField& init) {
    auto compute = [&] {
        if (ctx.optimize) return ctx.optimize(*ctx.problem, vf, ctx.cfg, init);
        return simp::optimize(*ctx.problem, vf, ctx.cfg, init);
    };
    if (ctx.cache) return ctx.cache->get_or_compute(*ctx.problem, vf, ctx.cfg, init, compute);
    return compute();
}

struct Task {
    std::size_t point = 0;
    double vf = 0.0;
    fem::DensityField init;
    std::string tag;
};

struct TaskOutcome {
    std::optional<simp::DesignResult> result;
    std::string error;
};

std::vector<TaskOutcome> run_tasks(const SweepContext& ctx, const std::vector<Task>& tasks) {
    std::vector<TaskOutcome> out(tasks.size());
    parallel_for(tasks.size(), ctx.workers, [&](std::size_t k) {
        try {
            out[k].result = run_one(ctx, tasks[k].vf, tasks[k].init);
        } catch (const std::exception& e) {
            out[k].error = e.what();
        }
    });
    return out;
}

void throw_failures(const std::vector<Task>& tasks, const std::vector<TaskOutcome>& outcomes,
                    const char* stage) {
    std::vector<double> failed;
    std::ostringstream msg;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        if (outcomes[k].result) continue;
        if (failed.empty() || failed.back() != tasks[k].vf) failed.push_back(tasks[k].vf);
        msg << "\n  vf=" << io::format_double(tasks[k].vf) << " (" << tasks[k].tag << "): " << outcomes[k].error;
    }
    if (!failed.empty()) {
        throw SweepError(std::string(stage) + " failed at " + std::to_string(failed.size()) +
                             " volume fraction(s):" + msg.str(),
                         failed);
    }
}

}  // namespace

SweepResult baseline_sweep(const SweepContext& ctx, const std::vector<double>& vf_grid) {
    check_context(ctx);
    check_grid(vf_grid);
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < vf_grid.size(); ++i) {
        tasks.push_back({i, vf_grid[i],
                         simp::initial_design(simp::InitKind::uniform, vf_grid[i], ctx.problem->grid, ctx.seed),
                         "baseline:uniform"});
    }
    const auto outcomes = run_tasks(ctx, tasks);
    throw_failures(tasks, outcomes, "baseline sweep");

    SweepResult out;
    out.front.problem_name = ctx.problem->name;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        out.front.points.push_back({tasks[i].vf, outcomes[i].result->compliance_p1, tasks[i].tag});
        out.designs.push_back(outcomes[i].result->densities);
    }
    return out;
}

SweepResult multistart_sweep(const SweepContext& ctx, const std::vector<double>& vf_grid) {
    const SweepResult base = baseline_sweep(ctx, vf_grid);
    const fem::Grid& grid = ctx.problem->grid;
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < vf_grid.size(); ++i) {
        const fem::DensityField* previous = i > 0 ? &base.designs[i - 1] : nullptr;
        for (const auto kind : simp::kAllInitKinds) {
            tasks.push_back({i, vf_grid[i], simp::initial_design(kind, vf_grid[i], grid, ctx.seed, previous),
                             "multistart:" + std::string(simp::to_string(kind))});
        }
    }
    const auto outcomes = run_tasks(ctx, tasks);
    throw_failures(tasks, outcomes, "multi-start sweep");

    SweepResult out;
    out.front.problem_name = ctx.problem->name;
    out.front.points.resize(vf_grid.size());
    out.designs.resize(vf_grid.size());
    std::vector<bool> filled(vf_grid.size(), false);
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        const std::size_t i = tasks[k].point;
        const auto& r = *outcomes[k].result;
        if (!filled[i] || r.compliance_p1 < out.front.points[i].c) {
            out.front.points[i] = {tasks[k].vf, r.compliance_p1, tasks[k].tag};
            out.designs[i] = r.densities;
            filled[i] = true;
        }
    }
    return out;
}

SignificantPoints detect_significant(const ParetoFront& front, double min_threshold,
                                     double drop_threshold) {
    if (front.points.empty()) throw InvalidArgument("front is empty");
    const std::size_t n = front.points.size();
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = front.points[i].c * front.points[i].vf;
    SignificantPoints out;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (s[i] < s[i - 1] && s[i] <= (1.0 - min_threshold) * s[i + 1]) out.minima.push_back(i);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if ((s[i] - s[i + 1]) / s[i] > drop_threshold) out.drops.push_back(i + 1);
    }
    return out;
}

SweepResult refine(const SweepContext& ctx, const SweepResult& start, const RefineOptions& options,
                   std::vector<ParetoFront>* history) {
    check_context(ctx);
    start.front.validate();
    if (start.designs.size() != start.front.points.size()) {
        throw InvalidArgument("refine needs one stored design per front point");
    }
    if (options.rounds < 0) throw InvalidArgument("refinement rounds must be >= 0");
    const fem::Grid& grid = ctx.problem->grid;
    SweepResult current = start;

    for (int round = 1; round <= options.rounds; ++round) {
        const auto sig = detect_significant(current.front, options.min_threshold, options.drop_threshold);
        std::vector<Task> tasks;
        const std::string prefix = "refine" + std::to_string(round) + ":";
        for (std::size_t i = 0; i < current.front.points.size(); ++i) {
            const double vf = current.front.points[i].vf;
            const auto left = std::find_if(sig.minima.rbegin(), sig.minima.rend(),
                                           [i](std::size_t m) { return m < i; });
            if (left != sig.minima.rend()) {
                const auto& src = current.front.points[*left];
                tasks.push_back({i, vf,
                                 simp::initial_design(simp::InitKind::previous, vf, grid, ctx.seed,
                                                      &current.designs[*left]),
                                 prefix + "min@" + io::format_double(src.vf)});
            }
            const auto right = std::find_if(sig.drops.begin(), sig.drops.end(),
                                            [i](std::size_t d) { return d > i; });
            if (right != sig.drops.end()) {
                const auto& src = current.front.points[*right];
                tasks.push_back({i, vf,
                                 simp::initial_design(simp::InitKind::previous, vf, grid, ctx.seed,
                                                      &current.designs[*right]),
                                 prefix + "drop@" + io::format_double(src.vf)});
            }
        }
        if (tasks.empty()) break;
        const auto outcomes = run_tasks(ctx, tasks);
        throw_failures(tasks, outcomes, "refinement");

        double best_gain = 0.0;
        const ParetoFront before = current.front;
        for (std::size_t k = 0; k < tasks.size(); ++k) {
            const std::size_t i = tasks[k].point;
            const auto& r = *outcomes[k].result;
            if (r.compliance_p1 < current.front.points[i].c) {
                current.front.points[i] = {tasks[k].vf, r.compliance_p1, tasks[k].tag};
                current.designs[i] = r.densities;
            }
        }
        for (std::size_t i = 0; i < before.points.size(); ++i) {
            best_gain = std::max(best_gain, (before.points[i].c - current.front.points[i].c) / before.points[i].c);
        }
        if (history) history->push_back(current.front);
        if (best_gain <= options.stop_improvement) break;
    }
    return current;
}

ParetoFront envelope(const ParetoFront& front) {
    if (front.points.empty()) throw InvalidArgument("front is empty");
    ParetoFront out = front;
    for (std::size_t i = 1; i < out.points.size(); ++i) {
        if (out.points[i - 1].c < out.points[i].c) {
            out.points[i].c = out.points[i - 1].c;
            out.points[i].provenance = out.points[i - 1].provenance;
        }
    }
    return out;
}

Series smooth(const Series& series, double sigma) {
    if (series.x.size() != series.y.size()) throw InvalidArgument("series x and y differ in length");
    if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
    const std::size_t n = series.x.size();
    Series out{series.x, std::vector<double>(n)};
    const double cut = 3.0 * sigma;
    for (std::size_t i = 0; i < n; ++i) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = series.x[j] - series.x[i];
            if (std::abs(d) > cut) continue;
            const double w = std::exp(-0.5 * (d / sigma) * (d / sigma));
            num += w * series.y[j];
            den += w;
        }
        out.y[i] = num / den;
    }
    return out;
}

}  // namespace toposelect::pareto
