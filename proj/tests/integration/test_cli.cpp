#include "fixtures.hpp"

#include "toposelect/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace fs = std::filesystem;
using namespace toposelect;
using io::Json;

namespace {

std::vector<std::string> small_mbb(const fs::path& dir) {
    return {"--preset", "mbb", "--nelx", "20", "--nely", "8", "--cache", (dir / "cache").string(),
            "--out", (dir / "out").string()};
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

void write(const fs::path& path, const std::string& text) { io::write_text_file(path, text); }

}  // namespace

TEST(Cli, OptimizeFullVolumeReportsSolidCompliance) {
    const auto dir = fixtures::fresh_dir("cli_full");
    ASSERT_EQ(fixtures::run_cli(cat({"optimize", "--vf", "1"}, small_mbb(dir)), dir / "log"), 0);
    const auto summary = Json::parse(fixtures::read_file(dir / "out" / "summary.json"));
    const double c1 = fem::full_density_compliance(fem::make_preset("mbb", 20, 8));
    EXPECT_NEAR(summary.at("compliance_p").get<double>(), c1, 1e-9 * c1);
    EXPECT_EQ(summary.at("iterations"), 1);
    EXPECT_TRUE(fs::exists(dir / "out" / "design.csv"));
    EXPECT_TRUE(fs::exists(dir / "out" / "design.svg"));
}

TEST(Cli, InvalidArgumentsExitWithTwo) {
    const auto dir = fixtures::fresh_dir("cli_invalid");
    EXPECT_EQ(fixtures::run_cli(cat({"optimize", "--vf", "1.5"}, small_mbb(dir)), dir / "vf"), 2);
    EXPECT_NE(fixtures::read_file(dir / "vf.err").find("--vf"), std::string::npos);
    EXPECT_EQ(fixtures::run_cli({"optimize"}, dir / "missing"), 2);
    EXPECT_EQ(fixtures::run_cli({"bogus"}, dir / "bogus"), 2);
    EXPECT_EQ(fixtures::run_cli(cat({"optimize", "--vf", "0.5", "--filter", "median"}, small_mbb(dir)), dir / "f"), 2);
    EXPECT_EQ(fixtures::run_cli(cat({"optimize", "--vf", "0.5", "--config", (dir / "nope.json").string()},
                                    small_mbb(dir)),
                                dir / "cfg"),
              2);
}

TEST(Cli, OptimizeIsByteIdenticalAcrossFreshRuns) {
    const auto a = fixtures::fresh_dir("cli_repeat_a");
    const auto b = fixtures::fresh_dir("cli_repeat_b");
    ASSERT_EQ(fixtures::run_cli(cat({"optimize", "--vf", "0.4", "--workers", "1"}, small_mbb(a)), a / "log"), 0);
    ASSERT_EQ(fixtures::run_cli(cat({"optimize", "--vf", "0.4", "--workers", "3"}, small_mbb(b)), b / "log"), 0);
    for (const char* f : {"summary.json", "design.csv", "design.svg"}) {
        EXPECT_EQ(fixtures::read_file(a / "out" / f), fixtures::read_file(b / "out" / f)) << f;
    }
    EXPECT_EQ(fixtures::read_file(a / "log.out"), fixtures::read_file(b / "log.out"));
    // warm rerun reads the cache and still matches
    ASSERT_EQ(fixtures::run_cli(cat({"optimize", "--vf", "0.4"}, small_mbb(a)), a / "warm"), 0);
    EXPECT_EQ(fixtures::read_file(a / "log.out"), fixtures::read_file(a / "warm.out"));
}

TEST(Cli, SelectRejectsEmptyMaterialFile) {
    const auto dir = fixtures::fresh_dir("cli_empty_materials");
    write(dir / "mats.csv", "name,E_GPa,rho_kgm3\n");
    const int rc = fixtures::run_cli(cat({"select", "--materials", (dir / "mats.csv").string(), "--force", "1000",
                                          "--delta", "0.001", "--thickness", "0.005"},
                                         small_mbb(dir)),
                                     dir / "log");
    EXPECT_EQ(rc, 2);
    EXPECT_NE(fixtures::read_file(dir / "log.err").find("no materials"), std::string::npos);
}

TEST(Cli, SelectReportsInfeasibleLoadWithThree) {
    const auto dir = fixtures::fresh_dir("cli_infeasible");
    const auto model = metamodel::fit({0.1, 400.0}, 60.0, "mbb", 2.0);
    write(dir / "model.json", io::to_json(model).dump());
    const int rc = fixtures::run_cli(
        cat({"select", "--materials", (fixtures::data_dir() / "example_materials.csv").string(), "--metamodel",
             (dir / "model.json").string(), "--force", "1e9", "--delta", "0.001", "--thickness", "0.005"},
            small_mbb(dir)),
        dir / "log");
    EXPECT_EQ(rc, 3);
    EXPECT_NE(fixtures::read_file(dir / "log.err").find("error:"), std::string::npos);
}

TEST(Cli, SelectOnExampleMaterialsWithSuppliedModel) {
    const auto dir = fixtures::fresh_dir("cli_select");
    const auto model = metamodel::fit({0.1, 400.0}, 60.0, "mbb", 2.0);
    write(dir / "model.json", io::to_json(model).dump());
    const int rc = fixtures::run_cli(
        cat({"select", "--materials", (fixtures::data_dir() / "example_materials.csv").string(), "--metamodel",
             (dir / "model.json").string(), "--force", "20000", "--delta", "0.005", "--thickness", "0.005",
             "--length", "2", "--height", "0.5", "--no-refine"},
            small_mbb(dir)),
        dir / "log");
    ASSERT_EQ(rc, 0) << fixtures::read_file(dir / "log.err");
    const auto report = Json::parse(fixtures::read_file(dir / "out" / "selection.json"));
    EXPECT_EQ(report.at("candidates").size(), 4u);
    EXPECT_EQ(report.at("kept_after_pareto").size(), 3u);
    EXPECT_EQ(report.at("kept_after_density").size(), 2u);
    EXPECT_GT(report.at("winner_mass").get<double>(), 0.0);
    EXPECT_EQ(fixtures::read_file(dir / "out" / "selection.txt"), fixtures::read_file(dir / "log.out"));
    EXPECT_TRUE(fs::exists(dir / "out" / "ashby.svg"));
}

TEST(Cli, ErOfPowerLawFrontIsConstant) {
    const auto dir = fixtures::fresh_dir("cli_er");
    std::ostringstream csv;
    csv << "vf,c,provenance\n";
    for (int i = 1; i <= 25; ++i) {
        const double x = i / 25.0;
        csv << io::format_double(x) << ',' << io::format_double(7.0 / (x * x)) << ",synthetic\n";
    }
    write(dir / "front.csv", csv.str());
    ASSERT_EQ(fixtures::run_cli({"er", "--front", (dir / "front.csv").string(), "--out", (dir / "out").string()},
                                dir / "log"),
              0);
    for (const char* name : {"er_raw.csv", "er_filtered.csv"}) {
        std::istringstream in(fixtures::read_file(dir / "out" / name));
        std::string line;
        std::getline(in, line);
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            const auto fields = io::split_csv_line(line, rows + 2);
            ASSERT_GE(fields.size(), 2u);
            EXPECT_NEAR(std::stod(fields[1]), 2.0, 1e-9) << name << " " << line;
            ++rows;
        }
        EXPECT_EQ(rows, 25u) << name;
    }
}

TEST(Cli, ErRejectsMalformedFronts) {
    const auto dir = fixtures::fresh_dir("cli_er_bad");
    write(dir / "empty.csv", "");
    EXPECT_EQ(fixtures::run_cli({"er", "--front", (dir / "empty.csv").string(), "--out", (dir / "out").string()},
                                dir / "empty"),
              2);
    write(dir / "bad.csv", "vf,c,provenance\n0.1,abc,x\n0.2,1,y\n");
    EXPECT_EQ(fixtures::run_cli({"er", "--front", (dir / "bad.csv").string(), "--out", (dir / "out").string()},
                                dir / "bad"),
              2);
    EXPECT_NE(fixtures::read_file(dir / "bad.err").find("2"), std::string::npos);
    EXPECT_EQ(fixtures::run_cli({"er", "--front", (dir / "missing.csv").string(), "--out", (dir / "out").string()},
                                dir / "missing"),
              2);
}

TEST(Cli, FitWithoutStoredFrontSkipsErrorProfile) {
    const auto dir = fixtures::fresh_dir("cli_fit");
    ASSERT_EQ(fixtures::run_cli(cat({"fit", "--points", "6"}, small_mbb(dir)), dir / "log"), 0);
    EXPECT_NE(fixtures::read_file(dir / "log.err").find("notice:"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "out" / "error_profile.csv"));
    const auto m = io::metamodel_from_json(Json::parse(fixtures::read_file(dir / "out" / "metamodel.json")));
    EXPECT_NEAR(metamodel::eval(m, 1.0), fem::full_density_compliance(fem::make_preset("mbb", 20, 8)), 1e-9 * m.a);
    EXPECT_EQ(m.symmetry_factor, 2.0);
}

TEST(Cli, ParetoThenFitWritesErrorProfile) {
    const auto dir = fixtures::fresh_dir("cli_pareto_fit");
    const std::vector<std::string> sweep{"--points", "6", "--rounds", "1", "--vf-min", "0.1"};
    ASSERT_EQ(fixtures::run_cli(cat(cat({"pareto"}, sweep), small_mbb(dir)), dir / "pareto"), 0);
    for (const char* f : {"front_baseline.csv", "front_multistart.csv", "front_refine.csv", "front_refine.svg"}) {
        EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    }
    ASSERT_EQ(fixtures::run_cli(cat(cat({"fit"}, sweep), small_mbb(dir)), dir / "fit"), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "error_profile.csv"));
    EXPECT_NE(fixtures::read_file(dir / "fit.out").find("max relative error"), std::string::npos);
}
