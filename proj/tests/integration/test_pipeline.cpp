#include "fixtures.hpp"

#include "toposelect/er.hpp"
#include "toposelect/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

using namespace toposelect;

namespace {

pareto::ParetoFront csv_round_trip(const pareto::ParetoFront& f) {
    std::ostringstream out;
    io::write_front_csv(out, f);
    std::istringstream in(out.str());
    return io::read_front_csv(in, f.problem_name);
}

}  // namespace

TEST(DeskPipeline, FrontsShareTheGridAndValidate) {
    const auto& p = fixtures::desk_pipeline();
    const auto grid = pareto::uniform_grid(50, 0.02, 1.0);
    for (const auto* f : {&p.baseline.front, &p.multistart.front, &p.refined.front}) {
        ASSERT_EQ(f->points.size(), grid.size());
        EXPECT_NO_THROW(f->validate());
        for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(f->points[i].vf, grid[i]);
    }
    EXPECT_EQ(p.refined.designs.size(), grid.size());
}

TEST(DeskPipeline, DominanceChainSurvivesCsv) {
    const auto& p = fixtures::desk_pipeline();
    const auto base = csv_round_trip(p.baseline.front);
    const auto multi = csv_round_trip(p.multistart.front);
    const auto refined = csv_round_trip(p.refined.front);
    EXPECT_EQ(refined, p.refined.front);
    for (std::size_t i = 0; i < base.points.size(); ++i) {
        EXPECT_LE(multi.points[i].c, base.points[i].c) << base.points[i].vf;
        EXPECT_LE(refined.points[i].c, multi.points[i].c) << base.points[i].vf;
    }
}

TEST(DeskPipeline, RefinementRoundsNeverIncrease) {
    const auto& p = fixtures::desk_pipeline();
    ASSERT_FALSE(p.rounds.empty());
    const pareto::ParetoFront* prev = &p.multistart.front;
    for (const auto& round : p.rounds) {
        for (std::size_t i = 0; i < round.points.size(); ++i) EXPECT_LE(round.points[i].c, prev->points[i].c);
        prev = &round;
    }
    EXPECT_EQ(p.rounds.back(), p.refined.front);
}

TEST(DeskPipeline, MultistartWinnersComeFromSeveralStarts) {
    const auto& p = fixtures::desk_pipeline();
    std::set<std::string> kinds;
    for (const auto& pt : p.multistart.front.points) kinds.insert(pt.provenance);
    EXPECT_GE(kinds.size(), 2u);
    for (const auto& k : kinds) EXPECT_EQ(k.rfind("multistart:", 0), 0u) << k;
}

TEST(DeskPipeline, BaselineIsAlreadyGoodAtModerateVolume) {
    const auto& p = fixtures::desk_pipeline();
    for (std::size_t i = 0; i < p.baseline.front.points.size(); ++i) {
        const auto& b = p.baseline.front.points[i];
        if (b.vf < 0.3) continue;
        EXPECT_LE(b.c, 1.10 * p.refined.front.points[i].c) << b.vf;
    }
}

TEST(DeskPipeline, FrontStaysBelowUniformMaterialBound) {
    const auto& p = fixtures::desk_pipeline();
    const double c1 = fem::full_density_compliance(fixtures::desk_mbb());
    EXPECT_NEAR(p.refined.front.points.back().c, c1, 1e-6 * c1);
    for (const auto& pt : p.refined.front.points) EXPECT_LE(pt.c, 1.05 * c1 / pt.vf) << pt.vf;
}

TEST(DeskPipeline, StoredDesignsReproduceTheirCompliance) {
    const auto& p = fixtures::desk_pipeline();
    for (std::size_t i : {5u, 20u, 40u}) {
        const auto& pt = p.refined.front.points[i];
        const double c = simp::evaluate_p1(fixtures::desk_mbb(), p.refined.designs[i]);
        EXPECT_NEAR(c, pt.c, 1e-9 * pt.c) << pt.vf;
        EXPECT_NEAR(p.refined.designs[i].volume_fraction(), pt.vf, 1e-6);
    }
}

TEST(DeskPipeline, MetaModelTracksTheRefinedFront) {
    const auto& p = fixtures::desk_pipeline();
    for (const auto& pt : p.refined.front.points) {
        if (pt.vf < 0.05) continue;
        EXPECT_LE(std::abs(metamodel::eval(p.model, pt.vf) - pt.c) / pt.c, 0.10) << pt.vf;
    }
    EXPECT_EQ(p.model.problem_name, "mbb");
    EXPECT_EQ(p.model.symmetry_factor, fixtures::desk_mbb().symmetry_factor);
}

TEST(DeskPipeline, FilteredErStaysInBounds) {
    const auto f = er::filter_er(fixtures::desk_pipeline().refined.front);
    const auto check = er::check_bounds(f);
    EXPECT_EQ(check.below, 0u);
    EXPECT_EQ(check.above, 0u);
}

TEST(DeskPipeline, CliFrontMatchesLibraryFront) {
    // written by the acceptance run through the same cache
    const auto path = std::filesystem::path(fixtures::shared_cache_dir()).parent_path() / "scratch" / "acceptance" /
                      "pareto" / "front_refine.csv";
    if (!std::filesystem::exists(path)) GTEST_SKIP() << "acceptance output not present";
    std::ifstream in(path);
    EXPECT_EQ(io::read_front_csv(in, "mbb"), fixtures::desk_pipeline().refined.front);
}
