#include "toposelect/io.hpp"

#include "toposelect/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>
#include <atomic>
#include <functional>

namespace toposelect::io {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fingerprint(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static constexpr char hex[] = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_number) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            if (!cur.empty() || was_quoted) throw ParseError("stray quote inside field", line_number);
            quoted = true;
            was_quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            was_quoted = false;
        } else if (ch == '\r' && i + 1 == line.size()) {
            break;
        } else {
            if (was_quoted) throw ParseError("text after closing quote", line_number);
            cur += ch;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_number);
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view text, std::size_t line, const char* what) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw ParseError(std::string("bad ") + what + " value '" + t + "'", line);
    }
    return v;
}

template <class T>
T require(const Json& j, const char* key) {
    if (!j.contains(key)) throw InvalidArgument(std::string("missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
void maybe(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = require<T>(j, key);
}

// Calls fn(fields, line_number) for every non-blank line after the header.
template <class Fn>
void for_each_record(std::istream& in, const std::vector<std::string>& header, Fn fn) {
    std::string line;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line, line_no);
        if (!seen_header) {
            for (auto& f : fields) f = trim(f);
            if (fields.size() < header.size() ||
                !std::equal(header.begin(), header.end(), fields.begin())) {
                std::string expected;
                for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
                throw ParseError("expected header '" + expected + "'", line_no);
            }
            seen_header = true;
            continue;
        }
        fn(fields, line_no);
    }
    if (!seen_header) throw ParseError("empty file: no header", 0);
}

}  // namespace

Json to_json(const fem::ProblemSpec& problem) {
    Json loads = Json::array();
    for (const auto& l : problem.loads) loads.push_back(Json::array({l.dof, l.magnitude}));
    return Json{{"name", problem.name},
                {"nelx", problem.grid.nelx()},
                {"nely", problem.grid.nely()},
                {"loads", loads},
                {"fixed_dofs", problem.fixed_dofs},
                {"L", problem.length},
                {"h", problem.height},
                {"t", problem.thickness},
                {"symmetry_factor", problem.symmetry_factor}};
}

fem::ProblemSpec problem_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidArgument("problem must be a JSON object");
    fem::ProblemSpec p;
    p.name = j.value("name", std::string{});
    p.grid = fem::Grid(require<int>(j, "nelx"), require<int>(j, "nely"));
    for (const auto& l : require<Json>(j, "loads")) {
        if (!l.is_array() || l.size() != 2) throw InvalidArgument("each load must be [dof, magnitude]");
        p.loads.push_back({l[0].get<int>(), l[1].get<double>()});
    }
    p.fixed_dofs = require<std::vector<int>>(j, "fixed_dofs");
    p.length = require<double>(j, "L");
    p.height = require<double>(j, "h");
    p.thickness = require<double>(j, "t");
    maybe(j, "symmetry_factor", p.symmetry_factor);
    p.validate();
    return p;
}

Json to_json(const simp::OptimizerConfig& cfg) {
    return Json{{"penal", cfg.penal},
                {"rmin", cfg.rmin},
                {"filter", std::string(simp::to_string(cfg.filter))},
                {"max_iters", cfg.max_iters},
                {"move_limit", cfg.move_limit},
                {"change_tol", cfg.change_tol},
                {"eta", cfg.eta},
                {"e_min", cfg.e_min},
                {"nu", cfg.nu}};
}

simp::OptimizerConfig optimizer_config_from_json(const Json& j, simp::OptimizerConfig base) {
    if (!j.is_object()) throw InvalidArgument("optimizer config must be a JSON object");
    maybe(j, "penal", base.penal);
    maybe(j, "rmin", base.rmin);
    if (j.contains("filter")) base.filter = simp::filter_kind_from_string(require<std::string>(j, "filter"));
    maybe(j, "max_iters", base.max_iters);
    maybe(j, "move_limit", base.move_limit);
    maybe(j, "change_tol", base.change_tol);
    maybe(j, "eta", base.eta);
    maybe(j, "e_min", base.e_min);
    maybe(j, "nu", base.nu);
    base.validate();
    return base;
}

Json to_json(const simp::DesignResult& r) {
    return Json{{"compliance_p", r.compliance_p},
                {"compliance_p1", r.compliance_p1},
                {"vf", r.vf},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"history", r.history},
                {"densities", std::vector<double>(r.densities.values().begin(), r.densities.values().end())}};
}

simp::DesignResult design_result_from_json(const Json& j) {
    simp::DesignResult r;
    r.compliance_p = require<double>(j, "compliance_p");
    r.compliance_p1 = require<double>(j, "compliance_p1");
    r.vf = require<double>(j, "vf");
    r.iterations = require<int>(j, "iterations");
    r.converged = require<bool>(j, "converged");
    maybe(j, "history", r.history);
    r.densities = fem::DensityField(require<std::vector<double>>(j, "densities"));
    return r;
}

Json to_json(const metamodel::MetaModel& m) {
    Json pts = Json::array();
    for (const auto& p : m.fit_points) pts.push_back(Json::array({p.vf, p.c}));
    return Json{{"a", m.a},
                {"b", m.b},
                {"fit_points", pts},
                {"problem_name", m.problem_name},
                {"symmetry_factor", m.symmetry_factor}};
}

metamodel::MetaModel metamodel_from_json(const Json& j) {
    metamodel::MetaModel m;
    m.a = require<double>(j, "a");
    m.b = require<double>(j, "b");
    if (!(m.a > 0.0) || !(m.b > 0.0)) throw InvalidArgument("meta-model constants must be positive");
    const auto pts = require<Json>(j, "fit_points");
    if (!pts.is_array() || pts.size() != 2) throw InvalidArgument("fit_points must hold two [vf, c] pairs");
    for (std::size_t i = 0; i < 2; ++i) {
        if (!pts[i].is_array() || pts[i].size() != 2) throw InvalidArgument("fit point must be [vf, c]");
        m.fit_points[i] = {pts[i][0].get<double>(), pts[i][1].get<double>()};
    }
    m.problem_name = j.value("problem_name", std::string{});
    maybe(j, "symmetry_factor", m.symmetry_factor);
    if (!(m.symmetry_factor > 0.0)) throw InvalidArgument("symmetry_factor must be positive");
    return m;
}

namespace {

Json materials_json(const std::vector<materials::Material>& mats) {
    Json out = Json::array();
    for (const auto& m : mats) out.push_back(Json{{"name", m.name}, {"E", m.e}, {"rho", m.rho}});
    return out;
}

}  // namespace

Json to_json(const materials::SelectionReport& r) {
    Json indices = Json::array();
    for (const auto& e : r.indices) {
        Json row{{"name", e.name}, {"x_req", e.x_req}, {"feasible", e.feasible}};
        if (e.feasible) {
            row["vf"] = e.vf;
            row["f4"] = e.f4;
        }
        indices.push_back(row);
    }
    return Json{{"candidates", materials_json(r.candidates)},
                {"kept_after_pareto", materials_json(r.kept_after_pareto)},
                {"kept_after_density", materials_json(r.kept_after_density)},
                {"indices", indices},
                {"winner", Json{{"name", r.winner.name}, {"E", r.winner.e}, {"rho", r.winner.rho}}},
                {"winner_vf", r.winner_vf},
                {"winner_mass", r.winner_mass},
                {"near_ties", r.near_ties},
                {"trail", r.trail}};
}

void write_front_csv(std::ostream& out, const pareto::ParetoFront& front) {
    out << "vf,c,provenance\n";
    for (const auto& p : front.points) {
        out << format_double(p.vf) << ',' << format_double(p.c) << ',' << csv_field(p.provenance) << '\n';
    }
}

pareto::ParetoFront read_front_csv(std::istream& in, std::string problem_name) {
    pareto::ParetoFront front;
    front.problem_name = std::move(problem_name);
    for_each_record(in, {"vf", "c"}, [&](const std::vector<std::string>& f, std::size_t line) {
        if (f.size() < 2 || f.size() > 3) throw ParseError("expected vf,c[,provenance]", line);
        front.points.push_back({parse_number(f[0], line, "vf"), parse_number(f[1], line, "c"),
                                f.size() == 3 ? f[2] : std::string{}});
    });
    if (front.points.empty()) throw ParseError("front file has no data rows", 0);
    front.validate();
    return front;
}

void write_er_csv(std::ostream& out, const er::ErSeries& series) {
    out << "vf,n\n";
    for (std::size_t i = 0; i < series.vf.size(); ++i) {
        out << format_double(series.vf[i]) << ',' << format_double(series.n[i]) << '\n';
    }
}

er::ErSeries read_er_csv(std::istream& in, er::ErSource source) {
    er::ErSeries s;
    s.source = source;
    for_each_record(in, {"vf", "n"}, [&](const std::vector<std::string>& f, std::size_t line) {
        if (f.size() != 2) throw ParseError("expected vf,n", line);
        s.vf.push_back(parse_number(f[0], line, "vf"));
        s.n.push_back(parse_number(f[1], line, "n"));
    });
    return s;
}

void write_density_csv(std::ostream& out, const fem::Grid& grid, const fem::DensityField& field) {
    if (field.size() != static_cast<std::size_t>(grid.elements())) {
        throw InvalidArgument("density field does not match the grid");
    }
    for (int ey = 0; ey < grid.nely(); ++ey) {
        for (int ex = 0; ex < grid.nelx(); ++ex) {
            if (ex) out << ',';
            out << format_double(field[static_cast<std::size_t>(grid.element_index(ex, ey))]);
        }
        out << '\n';
    }
}

fem::DensityField read_density_csv(std::istream& in, const fem::Grid& grid) {
    std::vector<double> values(static_cast<std::size_t>(grid.elements()));
    std::string line;
    std::size_t line_no = 0;
    int ey = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (ey >= grid.nely()) throw ParseError("more rows than the grid has", line_no);
        const auto f = split_csv_line(line, line_no);
        if (static_cast<int>(f.size()) != grid.nelx()) {
            throw ParseError("expected " + std::to_string(grid.nelx()) + " columns", line_no);
        }
        for (int ex = 0; ex < grid.nelx(); ++ex) {
            values[static_cast<std::size_t>(grid.element_index(ex, ey))] =
                parse_number(f[static_cast<std::size_t>(ex)], line_no, "density");
        }
        ++ey;
    }
    if (ey != grid.nely()) throw ParseError("expected " + std::to_string(grid.nely()) + " rows", line_no);
    return fem::DensityField(std::move(values));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    static std::atomic<unsigned long> counter{0};
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(counter++) + "_" +
           std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace toposelect::io
