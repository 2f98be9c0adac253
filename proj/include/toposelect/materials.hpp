#pragma once

// Material screening and minimum-mass selection under a deflection limit.

#include "toposelect/fem2d.hpp"
#include "toposelect/metamodel.hpp"
#include "toposelect/simp.hpp"

#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace toposelect::materials {

struct Material {
    std::string name;
    double e = 0.0;    ///< Pa
    double rho = 0.0;  ///< kg/m^3
    friend bool operator==(const Material&, const Material&) = default;
};

/// SI units throughout.
struct LoadCase {
    double force = 0.0;
    double delta_max = 0.0;
    double thickness = 0.0;
    double length = 0.0;
    double height = 0.0;

    void validate() const;
};

/// CSV with header name,E_GPa,rho_kgm3. Fields may be double-quoted; blank
/// lines are skipped. Throws ParseError with the line number on malformed
/// rows, InvalidArgument on non-positive values or duplicate names.
std::vector<Material> parse_materials(std::istream& in);
std::vector<Material> load_materials(const std::filesystem::path& path);

/// Keeps materials not dominated in (higher E, lower rho).
std::vector<Material> screen_pareto(const std::vector<Material>& mats);

/// Keeps materials at least as dense as the one with the lowest rho / E
/// (ties in rho / E resolved toward the lighter material).
std::vector<Material> screen_density(const std::vector<Material>& mats);

/// Normalized compliance the design must reach: symmetry_factor * t E delta / F.
/// A model of one symmetric portion carries 1/symmetry_factor of the load.
double required_compliance(const Material& mat, const metamodel::MetaModel& m, const LoadCase& lc);

struct IndexEntry {
    std::string name;
    double x_req = 0.0;
    bool feasible = false;
    double vf = 0.0;
    double f4 = 0.0;  ///< vf * rho, kg/m^3
};

/// f4 = inverse(m, x_req) * rho. Throws Infeasible naming the material.
IndexEntry ashby_index(const Material& mat, const metamodel::MetaModel& m, const LoadCase& lc);

/// Same as ashby_index but records infeasibility instead of throwing.
IndexEntry try_ashby_index(const Material& mat, const metamodel::MetaModel& m, const LoadCase& lc);

double part_mass(const LoadCase& lc, double vf, double rho);

struct RefinedChoice {
    double vf = 0.0;
    double mass = 0.0;
    metamodel::MetaModel model;
    bool fell_back = false;
    std::string note;
};

/// Re-scores a candidate with a meta-model refitted at its own volume fraction.
using Refiner = std::function<RefinedChoice(const Material&)>;

struct SelectionReport {
    std::vector<Material> candidates;
    std::vector<Material> kept_after_pareto;
    std::vector<Material> kept_after_density;
    std::vector<IndexEntry> indices;
    Material winner;
    double winner_vf = 0.0;
    double winner_mass = 0.0;
    std::vector<std::string> near_ties;
    std::vector<std::string> trail;
};

/// Screens, ranks the survivors by f4 and picks the lightest. When the
/// runner-up is within tie_tol of the winner and a refiner is supplied, both
/// are re-scored and the lower refined mass wins. Throws Infeasible when no
/// survivor can meet the deflection limit.
SelectionReport select(const std::vector<Material>& mats, const metamodel::MetaModel& m,
                       const LoadCase& lc, double tie_tol = 0.02, const Refiner& refiner = {});

/// Lowest f4 over all feasible materials, without screening.
std::optional<IndexEntry> exhaustive_best(const std::vector<Material>& mats,
                                          const metamodel::MetaModel& m, const LoadCase& lc);

using OptimizeFn = std::function<simp::DesignResult(const fem::ProblemSpec&, double,
                                                    const simp::OptimizerConfig&,
                                                    const fem::DensityField&)>;

/// One optimization at vf0 = inverse(m0, x_req), a refit with (vf0, c) as the
/// low anchor, and vf1 = inverse(m1, x_req). Falls back to m0 when the new
/// anchor cannot be fitted.
RefinedChoice refine_vf(const Material& mat, const fem::ProblemSpec& problem, const LoadCase& lc,
                        const metamodel::MetaModel& m0, const simp::OptimizerConfig& cfg,
                        const OptimizeFn& optimize = {});

}  // namespace toposelect::materials
