#include "toposelect/io.hpp"
#include "toposelect/pareto.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>

using namespace toposelect;
using namespace toposelect::pareto;

namespace {

ParetoFront front_from_s(const std::vector<double>& vf, const std::vector<double>& s) {
    ParetoFront f;
    for (std::size_t i = 0; i < vf.size(); ++i) f.points.push_back({vf[i], s[i] / vf[i], "t"});
    return f;
}

simp::DesignResult stub_result(const fem::DensityField& init, double vf, double c) {
    simp::DesignResult r;
    r.densities = init;
    r.vf = vf;
    r.compliance_p = c;
    r.compliance_p1 = c;
    r.iterations = 1;
    r.converged = true;
    return r;
}

}  // namespace

TEST(UniformGrid, DefaultSweepSpacing) {
    const auto g = uniform_grid();
    ASSERT_EQ(g.size(), 50u);
    EXPECT_DOUBLE_EQ(g.front(), 0.02);
    EXPECT_EQ(g.back(), 1.0);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] - g[i - 1], 0.02, 1e-12);
    EXPECT_EQ(uniform_grid(1, 0.3, 0.7), std::vector<double>{0.7});
    EXPECT_THROW(uniform_grid(0), InvalidArgument);
    EXPECT_THROW(uniform_grid(5, 0.0, 1.0), InvalidArgument);
}

TEST(ParetoFront, ValidateRejectsBadPoints) {
    ParetoFront f{"x", {{0.1, 2.0, ""}, {0.2, 1.0, ""}}};
    EXPECT_NO_THROW(f.validate());
    f.points[1].vf = 0.1;
    EXPECT_THROW(f.validate(), InvalidArgument);
    f.points[1] = {0.2, -1.0, ""};
    EXPECT_THROW(f.validate(), InvalidArgument);
    f.points[1] = {1.2, 1.0, ""};
    EXPECT_THROW(f.validate(), InvalidArgument);
}

TEST(DetectSignificant, FindsMinimaAndDropsOnWeightedCompliance) {
    const auto f = front_from_s({0.1, 0.2, 0.3, 0.4, 0.5}, {5.0, 4.0, 4.5, 4.4, 3.0});
    const auto sig = detect_significant(f, 0.002, 0.05);
    EXPECT_EQ(sig.minima, std::vector<std::size_t>{1});
    EXPECT_EQ(sig.drops, (std::vector<std::size_t>{1, 4}));
}

TEST(DetectSignificant, ShallowMinimumIgnored) {
    // s[2] sits below both neighbours but only 0.1% below the right one
    const auto f = front_from_s({0.1, 0.2, 0.3, 0.4}, {1.0, 1.01, 1.0, 1.001});
    EXPECT_TRUE(detect_significant(f, 0.002, 0.05).minima.empty());
    EXPECT_EQ(detect_significant(f, 0.0005, 0.05).minima, std::vector<std::size_t>{2});
}

TEST(DetectSignificant, EndpointsNeverMinima) {
    const auto f = front_from_s({0.1, 0.2, 0.3}, {1.0, 2.0, 1.0});
    const auto sig = detect_significant(f);
    EXPECT_TRUE(sig.minima.empty());
    EXPECT_EQ(sig.drops, std::vector<std::size_t>{2});
}

TEST(DetectSignificant, SmoothPowerLawHasNothingToRefine) {
    ParetoFront f;
    for (double vf : uniform_grid(50)) f.points.push_back({vf, std::pow(vf, -1.5), ""});
    const auto sig = detect_significant(f);
    EXPECT_TRUE(sig.minima.empty());
    // s = x^-0.5 falls by more than 5% only across the first few wide ratios
    for (std::size_t d : sig.drops) EXPECT_LT(f.points[d].vf, 0.2);
}

TEST(Envelope, RunningMinimumKeepsSourceProvenance) {
    ParetoFront f{"p", {{0.1, 5, "a"}, {0.2, 3, "b"}, {0.3, 4, "c"}, {0.4, 2, "d"}, {0.5, 2.5, "e"}}};
    const auto env = envelope(f);
    EXPECT_EQ(env.compliances(), (std::vector<double>{5, 3, 3, 2, 2}));
    EXPECT_EQ(env.points[2].provenance, "b");
    EXPECT_EQ(env.points[4].provenance, "d");
    EXPECT_EQ(env.vfs(), f.vfs());
    EXPECT_EQ(envelope(env), env);
}

TEST(Smooth, HandComputedThreePointKernel) {
    const Series s{{0.0, 0.04, 0.08}, {0.0, 1.0, 0.0}};
    const auto out = smooth(s, 0.04);
    const double w1 = std::exp(-0.5);
    const double w2 = std::exp(-2.0);
    EXPECT_NEAR(out.y[1], 1.0 / (1.0 + 2.0 * w1), 1e-15);
    EXPECT_NEAR(out.y[0], w1 / (1.0 + w1 + w2), 1e-15);
    EXPECT_EQ(out.x, s.x);
}

TEST(Smooth, PreservesConstantsAndInteriorLines) {
    const auto x = uniform_grid(51, 0.0 + 1e-9, 1.0);
    Series c{x, std::vector<double>(x.size(), 0.42)};
    for (double v : smooth(c).y) EXPECT_NEAR(v, 0.42, 1e-14);
    Series line{x, {}};
    for (double v : x) line.y.push_back(3.0 * v - 1.0);
    const auto out = smooth(line);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.125 && x[i] < 0.875) EXPECT_NEAR(out.y[i], line.y[i], 1e-12);
    }
    EXPECT_THROW(smooth(line, 0.0), InvalidArgument);
}

TEST(BaselineSweep, OneUniformRunPerPoint) {
    const auto p = fem::make_preset("mbb", 6, 3);
    std::atomic<int> calls{0};
    SweepContext ctx{&p};
    ctx.optimize = [&](const fem::ProblemSpec&, double vf, const simp::OptimizerConfig&,
                       const fem::DensityField& init) {
        ++calls;
        EXPECT_EQ(init, simp::initial_design(simp::InitKind::uniform, vf, p.grid));
        return stub_result(init, vf, 1.0 / vf);
    };
    const auto r = baseline_sweep(ctx, {0.2, 0.5, 0.8});
    EXPECT_EQ(calls.load(), 3);
    EXPECT_EQ(r.front.problem_name, "mbb");
    EXPECT_NEAR(r.front.points[1].c, 2.0, 1e-15);
    EXPECT_EQ(r.front.points[2].provenance, "baseline:uniform");
    EXPECT_THROW(baseline_sweep(ctx, {0.5, 0.2}), InvalidArgument);
}

TEST(MultistartSweep, TiesGoToEarlierKind) {
    const auto p = fem::make_preset("mbb", 6, 3);
    std::atomic<int> calls{0};
    SweepContext ctx{&p};
    ctx.workers = 3;
    ctx.optimize = [&](const fem::ProblemSpec&, double vf, const simp::OptimizerConfig&,
                       const fem::DensityField& init) {
        ++calls;
        return stub_result(init, vf, 1.0 / vf);
    };
    const auto r = multistart_sweep(ctx, {0.2, 0.5});
    EXPECT_EQ(calls.load(), 2 + 22);
    for (const auto& pt : r.front.points) EXPECT_EQ(pt.provenance, "multistart:uniform");
}

TEST(MultistartSweep, PreviousStartIsLowerBaselineDesign) {
    const auto p = fem::make_preset("mbb", 6, 3);
    // every run returns its start with one element changed; only the start built
    // from the vf = 0.2 baseline design is rewarded
    auto mark = [](const fem::DensityField& f) {
        std::vector<double> d(f.values().begin(), f.values().end());
        d[0] = 0.9;
        return fem::DensityField(d);
    };
    const auto expected = simp::rescale_to_volume(
        mark(simp::initial_design(simp::InitKind::uniform, 0.2, p.grid)).values(), 0.5);
    SweepContext ctx{&p};
    ctx.optimize = [&](const fem::ProblemSpec&, double vf, const simp::OptimizerConfig&,
                       const fem::DensityField& init) {
        return stub_result(mark(init), vf, init == expected ? 0.5 / vf : 1.0 / vf);
    };
    const auto r = multistart_sweep(ctx, {0.2, 0.5});
    EXPECT_EQ(r.front.points[0].provenance, "multistart:uniform");
    EXPECT_EQ(r.front.points[1].provenance, "multistart:previous");
    EXPECT_NEAR(r.front.points[1].c, 1.0, 1e-15);
}

TEST(MultistartSweep, NeverWorseThanBaselineOnRealOptimizer) {
    const auto p = fem::make_preset("mbb", 12, 4);
    SweepContext ctx{&p};
    ctx.cfg.max_iters = 40;
    const std::vector<double> grid = {0.2, 0.4, 0.6};
    const auto base = baseline_sweep(ctx, grid);
    const auto multi = multistart_sweep(ctx, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_LE(multi.front.points[i].c, base.front.points[i].c);
}

TEST(Sweep, FailuresReportEveryVolumeFraction) {
    const auto p = fem::make_preset("mbb", 6, 3);
    SweepContext ctx{&p};
    ctx.optimize = [&](const fem::ProblemSpec&, double vf, const simp::OptimizerConfig&,
                       const fem::DensityField& init) -> simp::DesignResult {
        if (vf > 0.25 && vf < 0.35) throw SolverFailure("stub", 1, 1.0);
        return stub_result(init, vf, 1.0 / vf);
    };
    try {
        baseline_sweep(ctx, {0.1, 0.3, 0.5});
        FAIL() << "expected SweepError";
    } catch (const SweepError& e) {
        EXPECT_EQ(e.failed_vf(), std::vector<double>{0.3});
        EXPECT_NE(std::string(e.what()).find("stub"), std::string::npos);
    }
}

TEST(Refine, ReplacesOnlyStrictImprovementsAndStops) {
    const auto p = fem::make_preset("mbb", 6, 3);
    const std::vector<double> vfs = uniform_grid(10, 0.1, 1.0);
    SweepResult start;
    for (std::size_t i = 0; i < vfs.size(); ++i) {
        const double c = std::pow(vfs[i], -2.0) * (i == 5 ? 1.5 : 1.0);
        start.front.points.push_back({vfs[i], c, "baseline:uniform"});
        std::vector<double> d(static_cast<std::size_t>(p.grid.elements()), 0.1 + 0.05 * static_cast<double>(i));
        start.designs.emplace_back(d);
    }
    std::atomic<int> calls{0};
    SweepContext ctx{&p};
    ctx.optimize = [&](const fem::ProblemSpec&, double vf, const simp::OptimizerConfig&,
                       const fem::DensityField& init) {
        ++calls;
        EXPECT_NEAR(init.volume_fraction(), vf, 1e-9);
        return stub_result(init, vf, std::pow(vf, -2.0));
    };
    std::vector<ParetoFront> history;
    const auto out = refine(ctx, start, {}, &history);
    EXPECT_GT(calls.load(), 0);
    ASSERT_EQ(history.size(), 2u);  // second round gains nothing and stops
    for (std::size_t i = 0; i < vfs.size(); ++i) {
        EXPECT_NEAR(out.front.points[i].c, std::pow(vfs[i], -2.0), 1e-12);
        if (i == 5) {
            // the spike makes point 4 a significant minimum, and warm starts from minima are tried first
            EXPECT_EQ(out.front.points[i].provenance, "refine1:min@" + io::format_double(vfs[4]));
        } else {
            EXPECT_EQ(out.front.points[i].provenance, "baseline:uniform");
            EXPECT_EQ(out.designs[i], start.designs[i]);
        }
    }
}

TEST(Refine, ZeroRoundsIsIdentity) {
    const auto p = fem::make_preset("mbb", 6, 3);
    SweepResult start;
    start.front.points = {{0.2, 5.0, "a"}, {0.4, 2.0, "b"}};
    start.designs = {fem::DensityField::uniform(p.grid, 0.2), fem::DensityField::uniform(p.grid, 0.4)};
    SweepContext ctx{&p};
    RefineOptions opts;
    opts.rounds = 0;
    const auto out = refine(ctx, start, opts);
    EXPECT_EQ(out.front, start.front);
    start.designs.pop_back();
    EXPECT_THROW(refine(ctx, start), InvalidArgument);
}

TEST(Refine, NeverIncreasesComplianceOnRealOptimizer) {
    const auto p = fem::make_preset("bridge", 16, 8);
    SweepContext ctx{&p};
    ctx.cfg.max_iters = 40;
    const auto grid = uniform_grid(8, 0.1, 0.8);
    const auto base = baseline_sweep(ctx, grid);
    RefineOptions opts;
    opts.rounds = 2;
    const auto out = refine(ctx, base, opts);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_LE(out.front.points[i].c, base.front.points[i].c);
}
