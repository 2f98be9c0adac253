#pragma once

// File formats: JSON documents for problems, configs, results and reports;
// CSV for fronts, ER series and density fields.

#include "toposelect/er.hpp"
#include "toposelect/fem2d.hpp"
#include "toposelect/materials.hpp"
#include "toposelect/metamodel.hpp"
#include "toposelect/pareto.hpp"
#include "toposelect/simp.hpp"

#include <json.hpp>

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace toposelect::io {

using Json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// 64-bit FNV-1a as 16 hex digits.
std::string fingerprint(std::string_view bytes);

/// Splits one CSV record; handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_number);
std::string csv_field(std::string_view text);

// {name, nelx, nely, loads: [[dof, magnitude], ...], fixed_dofs, L, h, t, symmetry_factor}
Json to_json(const fem::ProblemSpec& problem);
fem::ProblemSpec problem_from_json(const Json& j);

/// Missing keys keep the values of base.
Json to_json(const simp::OptimizerConfig& cfg);
simp::OptimizerConfig optimizer_config_from_json(const Json& j, simp::OptimizerConfig base = {});

Json to_json(const simp::DesignResult& result);
simp::DesignResult design_result_from_json(const Json& j);

// {a, b, fit_points: [[vf, c], [vf, c]], problem_name, symmetry_factor}
Json to_json(const metamodel::MetaModel& m);
metamodel::MetaModel metamodel_from_json(const Json& j);

Json to_json(const materials::SelectionReport& report);

/// Header vf,c,provenance.
void write_front_csv(std::ostream& out, const pareto::ParetoFront& front);
pareto::ParetoFront read_front_csv(std::istream& in, std::string problem_name = {});

/// Header vf,n.
void write_er_csv(std::ostream& out, const er::ErSeries& series);
er::ErSeries read_er_csv(std::istream& in, er::ErSource source = er::ErSource::raw);

/// One row per element row (top row first), one column per element column.
void write_density_csv(std::ostream& out, const fem::Grid& grid, const fem::DensityField& field);
fem::DensityField read_density_csv(std::istream& in, const fem::Grid& grid);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file in the same directory and renames it into place.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace toposelect::io
