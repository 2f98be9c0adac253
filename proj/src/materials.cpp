#include "toposelect/materials.hpp"

#include "toposelect/error.hpp"
#include "toposelect/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace toposelect::materials {

void LoadCase::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(force) || !positive(delta_max) || !positive(thickness) || !positive(length) ||
        !positive(height)) {
        throw InvalidArgument("load case values (F, delta_max, t, L, h) must all be positive");
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_field(const std::string& raw, std::size_t line, const char* column) {
    const std::string t = trim(raw);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ParseError(std::string("column ") + column + ": '" + t + "' is not a number", line);
    }
    return v;
}

std::string describe(const Material& m) {
    std::ostringstream s;
    s << m.name << " (E=" << io::format_double(m.e / 1e9) << " GPa, rho=" << io::format_double(m.rho) << ")";
    return s.str();
}

}  // namespace

std::vector<Material> parse_materials(std::istream& in) {
    std::vector<Material> out;
    std::set<std::string> names;
    std::string line;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = io::split_csv_line(line, line_no);
        if (!seen_header) {
            for (auto& f : fields) f = trim(f);
            if (fields != std::vector<std::string>{"name", "E_GPa", "rho_kgm3"}) {
                throw ParseError("expected header 'name,E_GPa,rho_kgm3'", line_no);
            }
            seen_header = true;
            continue;
        }
        if (fields.size() != 3) {
            throw ParseError("expected 3 fields, found " + std::to_string(fields.size()), line_no);
        }
        Material m{trim(fields[0]), parse_field(fields[1], line_no, "E_GPa") * 1e9,
                   parse_field(fields[2], line_no, "rho_kgm3")};
        if (m.name.empty()) throw ParseError("empty material name", line_no);
        if (!(m.e > 0.0)) {
            throw InvalidArgument("material '" + m.name + "' on line " + std::to_string(line_no) +
                                  ": Young's modulus must be positive");
        }
        if (!(m.rho > 0.0)) {
            throw InvalidArgument("material '" + m.name + "' on line " + std::to_string(line_no) +
                                  ": density must be positive");
        }
        if (!names.insert(m.name).second) {
            throw InvalidArgument("duplicate material '" + m.name + "' on line " + std::to_string(line_no));
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<Material> load_materials(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open materials file '" + path.string() + "'");
    return parse_materials(in);
}

std::vector<Material> screen_pareto(const std::vector<Material>& mats) {
    std::vector<Material> kept;
    for (const auto& m : mats) {
        const bool dominated = std::any_of(mats.begin(), mats.end(), [&](const Material& o) {
            return o.e >= m.e && o.rho <= m.rho && (o.e > m.e || o.rho < m.rho);
        });
        if (!dominated) kept.push_back(m);
    }
    return kept;
}

namespace {

const Material& lowest_ratio(const std::vector<Material>& mats) {
    const Material* best = &mats.front();
    for (const auto& m : mats) {
        const double r = m.rho / m.e;
        const double rb = best->rho / best->e;
        if (r < rb || (r == rb && m.rho < best->rho)) best = &m;
    }
    return *best;
}

}  // namespace

std::vector<Material> screen_density(const std::vector<Material>& mats) {
    if (mats.empty()) return {};
    const double rho1 = lowest_ratio(mats).rho;
    std::vector<Material> kept;
    std::copy_if(mats.begin(), mats.end(), std::back_inserter(kept),
                 [rho1](const Material& m) { return m.rho >= rho1; });
    return kept;
}

double required_compliance(const Material& mat, const metamodel::MetaModel& m, const LoadCase& lc) {
    return m.symmetry_factor * lc.thickness * mat.e * lc.delta_max / lc.force;
}

IndexEntry ashby_index(const Material& mat, const metamodel::MetaModel& m, const LoadCase& lc) {
    lc.validate();
    IndexEntry e{mat.name, required_compliance(mat, m, lc)};
    try {
        e.vf = metamodel::inverse(m, e.x_req);
    } catch (const Infeasible& err) {
        throw Infeasible(mat.name + ": " + err.what());
    }
    e.feasible = true;
    e.f4 = e.vf * mat.rho;
    return e;
}

IndexEntry try_ashby_index(const Material& mat, const metamodel::MetaModel& m, const LoadCase& lc) {
    try {
        return ashby_index(mat, m, lc);
    } catch (const Infeasible&) {
        return IndexEntry{mat.name, required_compliance(mat, m, lc)};
    }
}

double part_mass(const LoadCase& lc, double vf, double rho) {
    return lc.length * lc.height * lc.thickness * vf * rho;
}

SelectionReport select(const std::vector<Material>& mats, const metamodel::MetaModel& m,
                       const LoadCase& lc, double tie_tol, const Refiner& refiner) {
    if (mats.empty()) throw InvalidArgument("no materials to select from");
    lc.validate();
    if (!(tie_tol >= 0.0)) throw InvalidArgument("tie tolerance must be non-negative");

    SelectionReport r;
    r.candidates = mats;
    r.kept_after_pareto = screen_pareto(mats);
    for (const auto& mat : mats) {
        if (std::find(r.kept_after_pareto.begin(), r.kept_after_pareto.end(), mat) == r.kept_after_pareto.end()) {
            r.trail.push_back("screen 1 (E-rho Pareto front): removed " + describe(mat) + ", dominated");
        }
    }
    r.kept_after_density = screen_density(r.kept_after_pareto);
    const Material& ref = lowest_ratio(r.kept_after_pareto);
    for (const auto& mat : r.kept_after_pareto) {
        if (std::find(r.kept_after_density.begin(), r.kept_after_density.end(), mat) == r.kept_after_density.end()) {
            r.trail.push_back("screen 2 (density): removed " + describe(mat) + ", lighter than " + ref.name +
                              " which has the lowest rho/E");
        }
    }

    std::vector<IndexEntry> feasible;
    for (const auto& mat : r.kept_after_density) {
        IndexEntry e = try_ashby_index(mat, m, lc);
        std::ostringstream s;
        s << "index: " << mat.name << " x_req=" << io::format_double(e.x_req);
        if (e.feasible) {
            s << " vf=" << io::format_double(e.vf) << " f4=" << io::format_double(e.f4) << " kg/m^3";
            feasible.push_back(e);
        } else {
            s << " infeasible (f(1)=" << io::format_double(metamodel::eval(m, 1.0)) << ")";
        }
        r.trail.push_back(s.str());
        r.indices.push_back(e);
    }
    if (feasible.empty()) {
        throw Infeasible("no screened material can meet the deflection limit (" +
                         std::to_string(r.kept_after_density.size()) + " candidate(s) checked)");
    }
    std::stable_sort(feasible.begin(), feasible.end(),
                     [](const IndexEntry& a, const IndexEntry& b) { return a.f4 < b.f4; });
    auto material_of = [&](const std::string& name) -> const Material& {
        return *std::find_if(r.kept_after_density.begin(), r.kept_after_density.end(),
                             [&](const Material& x) { return x.name == name; });
    };

    const IndexEntry* best = &feasible.front();
    r.winner = material_of(best->name);
    r.winner_vf = best->vf;
    r.winner_mass = part_mass(lc, best->vf, r.winner.rho);
    if (r.kept_after_density.size() == 1) {
        r.trail.push_back("single candidate " + r.winner.name + " selected without index comparison");
    } else if (feasible.size() > 1) {
        const IndexEntry& second = feasible[1];
        const double gap = (second.f4 - best->f4) / best->f4;
        if (gap <= tie_tol) {
            r.near_ties = {best->name, second.name};
            r.trail.push_back("near tie: " + second.name + " is within " + io::format_double(gap * 100.0) +
                              "% of " + best->name);
            if (refiner) {
                const Material& a = material_of(best->name);
                const Material& b = material_of(second.name);
                const RefinedChoice ra = refiner(a);
                const RefinedChoice rb = refiner(b);
                for (const auto* pair : {&ra, &rb}) {
                    if (!pair->note.empty()) r.trail.push_back("refine: " + pair->note);
                }
                r.trail.push_back("refined: " + a.name + " vf=" + io::format_double(ra.vf) + " mass=" +
                                  io::format_double(ra.mass) + " kg; " + b.name + " vf=" +
                                  io::format_double(rb.vf) + " mass=" + io::format_double(rb.mass) + " kg");
                const bool second_wins = rb.mass < ra.mass;
                r.winner = second_wins ? b : a;
                r.winner_vf = second_wins ? rb.vf : ra.vf;
                r.winner_mass = second_wins ? rb.mass : ra.mass;
            } else {
                r.trail.push_back("near tie kept on the meta-model index (no refinement requested)");
            }
        }
    }
    r.trail.push_back("winner: " + r.winner.name + " vf=" + io::format_double(r.winner_vf) +
                      " mass=" + io::format_double(r.winner_mass) + " kg");
    return r;
}

std::optional<IndexEntry> exhaustive_best(const std::vector<Material>& mats, const metamodel::MetaModel& m,
                                          const LoadCase& lc) {
    std::optional<IndexEntry> best;
    for (const auto& mat : mats) {
        IndexEntry e = try_ashby_index(mat, m, lc);
        if (e.feasible && (!best || e.f4 < best->f4)) best = e;
    }
    return best;
}

RefinedChoice refine_vf(const Material& mat, const fem::ProblemSpec& problem, const LoadCase& lc,
                        const metamodel::MetaModel& m0, const simp::OptimizerConfig& cfg,
                        const OptimizeFn& optimize) {
    const double x_req = required_compliance(mat, m0, lc);
    const double vf0 = ashby_index(mat, m0, lc).vf;
    RefinedChoice out{vf0, part_mass(lc, vf0, mat.rho), m0, false, {}};
    if (vf0 >= 1.0) {
        out.note = mat.name + ": full density required, nothing to refine";
        return out;
    }
    const fem::DensityField init = simp::initial_design(simp::InitKind::uniform, vf0, problem.grid);
    const simp::DesignResult res =
        optimize ? optimize(problem, vf0, cfg, init) : simp::optimize(problem, vf0, cfg, init);
    try {
        const metamodel::MetaModel m1 = metamodel::fit({vf0, res.compliance_p1}, m0.fit_points[1].c,
                                                       m0.problem_name, m0.symmetry_factor);
        out.vf = metamodel::inverse(m1, x_req);
        out.model = m1;
        out.mass = part_mass(lc, out.vf, mat.rho);
        out.note = mat.name + ": refit at vf0=" + io::format_double(vf0) + " (c=" +
                   io::format_double(res.compliance_p1) + ") gives vf1=" + io::format_double(out.vf);
    } catch (const Error& e) {
        out.fell_back = true;
        out.note = "warning: " + mat.name + ": refit at vf0=" + io::format_double(vf0) +
                   " failed (" + e.what() + "); kept the original meta-model";
    }
    return out;
}

}  // namespace toposelect::materials
