#include "mehler/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mehler/csv.hpp"
#include "mehler/kernels.hpp"

namespace mehler {

std::string ElementSpec::text() const {
    std::string out = form;
    for (double v : numbers) {
        out += ' ';
        out += format_full(v);
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens_of(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + text + "'");
    }
}

long long parse_int(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not an integer: '" + text + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    try {
        // stoull wraps negative inputs around instead of failing
        if (text.find('-') != std::string::npos) throw std::invalid_argument("negative");
        std::size_t pos = 0;
        unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a non-negative integer: '" + text + "'");
    }
}

ElementSpec parse_element(const std::string& key, const std::string& text) {
    std::vector<std::string> toks = tokens_of(text);
    if (toks.empty()) throw ConfigError(key + ": empty element");
    ElementSpec el;
    el.form = toks[0];
    std::size_t start = 1;
    if (el.form == "embedded") {
        if (toks.size() < 2) throw ConfigError(key + ": embedded needs a flat form");
        el.form += ' ' + toks[1];
        start = 2;
    }
    for (std::size_t i = start; i < toks.size(); ++i)
        el.numbers.push_back(parse_double(key, toks[i]));

    const std::string base = el.form.substr(el.form.find(' ') + 1);
    std::size_t n = el.numbers.size();
    auto fail = [&](const std::string& why) { throw ConfigError(key + ": " + why); };
    if (base == "vector") {
        if (n < 1) fail("vector needs at least one coefficient");
    } else if (base == "gauss") {
        if (n != 2 && n != 3) fail("gauss takes 'c s' or 'cx cy s'");
        if (!(el.numbers.back() > 0.0)) fail("gauss width time must be positive");
    } else if (base == "psection") {
        if (n != 2) fail("psection takes 'z s'");
        if (!(el.numbers[0] > 0.0 && el.numbers[1] > 0.0)) fail("psection needs z > 0, s > 0");
    } else if (base == "ksection") {
        if (n != 1) fail("ksection takes 's'");
        if (!(el.numbers[0] > 0.0)) fail("ksection needs s > 0");
    } else if (base == "heat_atoms") {
        if (el.form != base) fail("heat_atoms is already a path");
        if (n < 2 || n % 2 != 0) fail("heat_atoms takes 'z w' pairs");
        for (std::size_t i = 1; i < n; i += 2)
            if (el.numbers[i] == 0.0) fail("atom weights must be nonzero");
    } else if (base == "heat_atoms2") {
        if (el.form != base) fail("heat_atoms2 is already a path");
        if (n < 3 || n % 3 != 0) fail("heat_atoms2 takes 'x y w' triples");
    } else if (base == "absorbing") {
        if (el.form != base) fail("absorbing is already a path");
        if (n < 1 || (n - 1) % 2 != 0) fail("absorbing takes 'a [z w ...]'");
        if (el.numbers[0] < 0.0) fail("flux weight must be non-negative");
        for (std::size_t i = 1; i < n; i += 2)
            if (!(el.numbers[i] > 0.0)) fail("absorbed atom locations must be positive");
    } else {
        fail("unknown element form '" + el.form + "'");
    }
    return el;
}

bool flat_form(const std::string& form) {
    return form == "vector" || form == "gauss" || form == "psection" || form == "ksection";
}

}  // namespace

std::shared_ptr<const SemigroupSpec> ExperimentConfig::make_semigroup() const {
    std::optional<GrowthBound> growth;
    auto with_growth = [&](std::shared_ptr<const SemigroupSpec> base) {
        if (!growth_c0 && !growth_b0) return base;
        GrowthBound g = base->growth();
        if (growth_c0) g.c0 = *growth_c0;
        if (growth_b0) g.b0 = *growth_b0;
        growth = g;
        if (semigroup_kind == "matrix") {
            Eigen::MatrixXd A(matrix_rows.size(), matrix_rows.size());
            for (std::size_t i = 0; i < matrix_rows.size(); ++i)
                for (std::size_t j = 0; j < matrix_rows.size(); ++j) A(i, j) = matrix_rows[i][j];
            return SemigroupSpec::matrix(A, growth);
        }
        if (semigroup_kind == "heat_line")
            return SemigroupSpec::heat_line(grid_lower, grid_upper, grid_count, growth);
        if (semigroup_kind == "heat_plane")
            return SemigroupSpec::heat_plane(grid_lower, grid_upper, grid_count, growth);
        return SemigroupSpec::absorbing_half_line(grid_upper, grid_count, growth);
    };
    if (semigroup_kind == "matrix") {
        Eigen::MatrixXd A(matrix_rows.size(), matrix_rows.size());
        for (std::size_t i = 0; i < matrix_rows.size(); ++i)
            for (std::size_t j = 0; j < matrix_rows.size(); ++j) A(i, j) = matrix_rows[i][j];
        return with_growth(SemigroupSpec::matrix(A));
    }
    if (semigroup_kind == "heat_line")
        return with_growth(SemigroupSpec::heat_line(grid_lower, grid_upper, grid_count));
    if (semigroup_kind == "heat_plane")
        return with_growth(SemigroupSpec::heat_plane(grid_lower, grid_upper, grid_count));
    if (semigroup_kind == "absorbing_halfline")
        return with_growth(SemigroupSpec::absorbing_half_line(grid_upper, grid_count));
    throw ConfigError("semigroup.kind: unknown kind '" + semigroup_kind + "'");
}

GridFunction ExperimentConfig::make_flat_element(const std::shared_ptr<const SemigroupSpec>& sg,
                                                 const ElementSpec& el,
                                                 const std::string& key) const {
    const std::string base =
        el.form.find(' ') == std::string::npos ? el.form : el.form.substr(el.form.find(' ') + 1);
    const auto& space = sg->space();
    GridFunction f = zero_function(space);
    if (base == "vector") {
        if (space->kind() != SpaceKind::FiniteDim)
            throw ConfigError(key + ": vector elements need the matrix kind");
        if (static_cast<int>(el.numbers.size()) != space->size())
            throw ConfigError(key + ": vector length does not match the space dimension");
        for (int i = 0; i < space->size(); ++i) f.values[i] = el.numbers[i];
    } else if (base == "gauss") {
        if (space->kind() == SpaceKind::Line && el.numbers.size() == 2) {
            for (int i = 0; i < space->size(); ++i)
                f.values[i] = kernel_g1(el.numbers[1], space->node1(i) - el.numbers[0]);
        } else if (space->kind() == SpaceKind::Plane && el.numbers.size() == 3) {
            for (int i = 0; i < space->size(); ++i) {
                auto xy = space->node2(i);
                f.values[i] = kernel_g2(el.numbers[2], xy[0] - el.numbers[0], xy[1] - el.numbers[1]);
            }
        } else {
            throw ConfigError(key + ": gauss arity does not match the space kind");
        }
    } else if (base == "psection") {
        if (space->kind() != SpaceKind::HalfLine)
            throw ConfigError(key + ": psection needs the absorbing kind");
        for (int i = 0; i < space->size(); ++i)
            f.values[i] = kernel_p(el.numbers[1], el.numbers[0], space->node1(i));
    } else if (base == "ksection") {
        if (space->kind() != SpaceKind::HalfLine)
            throw ConfigError(key + ": ksection needs the absorbing kind");
        for (int i = 0; i < space->size(); ++i)
            f.values[i] = kernel_k(el.numbers[0], space->node1(i));
    } else {
        throw ConfigError(key + ": '" + base + "' is not a flat element form");
    }
    return f;
}

EntrancePath ExperimentConfig::make_path_element(const std::shared_ptr<const SemigroupSpec>& sg,
                                                 const ElementSpec& el,
                                                 const std::string& key) const {
    if (el.form.rfind("embedded ", 0) == 0)
        return EntrancePath::embedded(sg, make_flat_element(sg, el, key));
    if (el.form == "heat_atoms") {
        if (sg->space()->kind() != SpaceKind::Line)
            throw ConfigError(key + ": heat_atoms needs the heat_line kind");
        std::vector<Atom> atoms;
        for (std::size_t i = 0; i + 1 < el.numbers.size(); i += 2)
            atoms.push_back({el.numbers[i], 0.0, el.numbers[i + 1]});
        return EntrancePath::heat_atoms(sg, atoms);
    }
    if (el.form == "heat_atoms2")
        throw ConfigError(key +
                          ": plane atom lists are not locally square integrable "
                          "(the coincident-pair time integral diverges); use embedded elements");
    if (el.form == "absorbing") {
        if (sg->space()->kind() != SpaceKind::HalfLine)
            throw ConfigError(key + ": absorbing elements need the absorbing kind");
        std::vector<Atom> atoms;
        for (std::size_t i = 1; i + 1 < el.numbers.size(); i += 2)
            atoms.push_back({el.numbers[i], 0.0, el.numbers[i + 1]});
        return EntrancePath::absorbing_atoms(sg, el.numbers[0], atoms);
    }
    if (flat_form(el.form))
        throw ConfigError(key + ": flat element in entrance-driven mode; prefix with 'embedded'");
    throw ConfigError(key + ": '" + el.form + "' is not a path element form");
}

SCSemigroupSpec ExperimentConfig::make_sc() const {
    SCSemigroupSpec sc;
    sc.sg = make_semigroup();
    sc.params = entrance;
    const bool driven = law_mode == "entrance_driven";
    sc.mode = driven ? SCSemigroupSpec::Mode::EntranceDriven : SCSemigroupSpec::Mode::Differentiable;
    sc.law.carrier = driven ? IDLaw::Carrier::OnPaths : IDLaw::Carrier::OnSpace;

    auto build = [&](const ElementSpec& el, const std::string& key) {
        if (driven) return make_path_element(sc.sg, el, key);
        if (!flat_form(el.form))
            throw ConfigError(key + ": differentiable mode takes flat elements");
        return EntrancePath::embedded(sc.sg, make_flat_element(sc.sg, el, key));
    };
    auto pathnorm = [&](const EntrancePath& e) {
        return driven ? entrance_norm(e, sc.params) : norm(e.embedded_value());
    };
    auto pathinner = [&](const EntrancePath& x, const EntrancePath& y) {
        return driven ? entrance_inner(x, y, sc.params)
                      : inner(x.embedded_value(), y.embedded_value());
    };

    for (std::size_t i = 0; i < law_gauss.size(); ++i) {
        std::string key = "law.gauss." + std::to_string(i + 1);
        EntrancePath e = build(law_gauss[i].element, key + ".element");
        double nn = pathnorm(e);
        if (!(nn > 0.0)) throw ConfigError(key + ".element: zero direction");
        // sigma * element is the invariant; embedded directions are stored at
        // unit norm with sigma absorbing the scale, kernel paths as given.
        GaussDirection g{law_gauss[i].sigma, std::move(e)};
        if (g.element.rep() == EntrancePath::Rep::Embedded && g.element.shift() == 0.0) {
            GridFunction v = g.element.embedded_value();
            v.values /= nn;
            g.element = EntrancePath::embedded(sc.sg, std::move(v));
            g.sigma = law_gauss[i].sigma * nn;
        }
        sc.law.gaussians.push_back(std::move(g));
    }
    for (std::size_t i = 0; i < sc.law.gaussians.size(); ++i)
        for (std::size_t j = i + 1; j < sc.law.gaussians.size(); ++j) {
            double ip = pathinner(sc.law.gaussians[i].element, sc.law.gaussians[j].element);
            double ni = pathnorm(sc.law.gaussians[i].element);
            double nj = pathnorm(sc.law.gaussians[j].element);
            if (std::abs(ip) > 0.05 * ni * nj)
                throw ConfigError("law.gauss." + std::to_string(j + 1) +
                                  ".element: Gaussian directions must be orthogonal (overlap " +
                                  format_full(ip / (ni * nj)) + ")");
        }
    for (std::size_t i = 0; i < law_jumps.size(); ++i) {
        std::string key = "law.jump." + std::to_string(i + 1) + ".element";
        sc.law.jumps.push_back({law_jumps[i].rate, build(law_jumps[i].element, key)});
    }
    return sc;
}

ExperimentConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("malformed line (need key = value): " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("malformed line (empty key): " + line);
        if (kv.count(key)) throw ConfigError(key + ": duplicate key");
        kv[key] = val;
    }

    std::set<std::string> seen;
    auto take = [&](const std::string& key) -> const std::string* {
        auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        seen.insert(key);
        return &it->second;
    };

    ExperimentConfig cfg;
    if (const std::string* v = take("semigroup.kind")) cfg.semigroup_kind = *v;
    const bool is_matrix = cfg.semigroup_kind == "matrix";
    const bool is_absorbing = cfg.semigroup_kind == "absorbing_halfline";
    const bool is_grid = cfg.semigroup_kind == "heat_line" || cfg.semigroup_kind == "heat_plane" ||
                         is_absorbing;
    if (!is_matrix && !is_grid)
        throw ConfigError("semigroup.kind: unknown kind '" + cfg.semigroup_kind + "'");

    if (const std::string* v = take("semigroup.matrix")) {
        if (!is_matrix) throw ConfigError("semigroup.matrix: only valid for the matrix kind");
        cfg.matrix_rows.clear();
        std::istringstream rows(*v);
        std::string row;
        while (std::getline(rows, row, ';')) {
            std::vector<std::string> toks = tokens_of(row);
            if (toks.empty()) throw ConfigError("semigroup.matrix: empty row");
            std::vector<double> r;
            for (const std::string& t : toks) r.push_back(parse_double("semigroup.matrix", t));
            cfg.matrix_rows.push_back(std::move(r));
        }
        for (const auto& r : cfg.matrix_rows)
            if (r.size() != cfg.matrix_rows.size())
                throw ConfigError("semigroup.matrix: matrix must be square");
    } else if (is_matrix) {
        cfg.matrix_rows = {{-1.0}};
    }

    if (is_absorbing) {
        cfg.grid_lower = 0.0;
        cfg.grid_upper = 12.0;
        cfg.grid_count = 480;
    } else if (cfg.semigroup_kind == "heat_plane") {
        cfg.grid_lower = -8.0;
        cfg.grid_upper = 8.0;
        cfg.grid_count = 65;
    }
    if (const std::string* v = take("semigroup.grid.lower")) {
        if (!is_grid || is_absorbing)
            throw ConfigError("semigroup.grid.lower: not applicable to this kind");
        cfg.grid_lower = parse_double("semigroup.grid.lower", *v);
    }
    if (const std::string* v = take("semigroup.grid.upper")) {
        if (!is_grid) throw ConfigError("semigroup.grid.upper: not applicable to this kind");
        cfg.grid_upper = parse_double("semigroup.grid.upper", *v);
    }
    if (const std::string* v = take("semigroup.grid.count")) {
        if (!is_grid) throw ConfigError("semigroup.grid.count: not applicable to this kind");
        cfg.grid_count = static_cast<int>(parse_int("semigroup.grid.count", *v));
    }
    if (is_grid) {
        if (cfg.grid_count < 2) throw ConfigError("semigroup.grid.count: need at least 2 nodes");
        if (is_absorbing) {
            if (!(cfg.grid_upper > 0.0))
                throw ConfigError("semigroup.grid.upper: must be positive");
        } else if (!(cfg.grid_lower < cfg.grid_upper)) {
            throw ConfigError("semigroup.grid.lower: must be below semigroup.grid.upper");
        }
    }
    if (const std::string* v = take("semigroup.growth.c0")) {
        cfg.growth_c0 = parse_double("semigroup.growth.c0", *v);
        if (!(*cfg.growth_c0 > 0.0)) throw ConfigError("semigroup.growth.c0: must be positive");
    }
    if (const std::string* v = take("semigroup.growth.b0")) {
        cfg.growth_b0 = parse_double("semigroup.growth.b0", *v);
        if (*cfg.growth_b0 < 0.0) throw ConfigError("semigroup.growth.b0: must be non-negative");
    }

    std::shared_ptr<const SemigroupSpec> sg = cfg.make_semigroup();
    const double b0 = sg->growth().b0;
    cfg.entrance = EntranceParams::defaults_for(*sg);
    if (const std::string* v = take("entrance.b")) {
        cfg.entrance.b = parse_double("entrance.b", *v);
        cfg.entrance_defaulted = false;
    }
    if (const std::string* v = take("entrance.alpha")) {
        cfg.entrance.alpha = parse_double("entrance.alpha", *v);
        cfg.entrance_defaulted = false;
    }
    if (const std::string* v = take("entrance.s_min"))
        cfg.entrance.s_min = parse_double("entrance.s_min", *v);
    if (const std::string* v = take("entrance.s_max"))
        cfg.entrance.s_max = parse_double("entrance.s_max", *v);
    if (const std::string* v = take("entrance.rho"))
        cfg.entrance.rho = parse_double("entrance.rho", *v);
    if (const std::string* v = take("entrance.gl_points"))
        cfg.entrance.gl_points = static_cast<int>(parse_int("entrance.gl_points", *v));
    if (const std::string* v = take("entrance.tol_scale"))
        cfg.tol_scale = parse_double("entrance.tol_scale", *v);
    if (!(cfg.entrance.b > b0))
        throw ConfigError("entrance.b: must exceed the growth rate b0 = " + format_full(b0));
    if (!(cfg.entrance.alpha > b0))
        throw ConfigError("entrance.alpha: must exceed the growth rate b0 = " + format_full(b0));
    if (!(cfg.entrance.s_min > 0.0)) throw ConfigError("entrance.s_min: must be positive");
    if (!(cfg.entrance.s_max > cfg.entrance.s_min))
        throw ConfigError("entrance.s_max: must exceed entrance.s_min");
    if (!(cfg.entrance.rho > 1.0)) throw ConfigError("entrance.rho: must exceed 1");
    if (cfg.entrance.gl_points < 1 || cfg.entrance.gl_points > 16)
        throw ConfigError("entrance.gl_points: must be in [1, 16]");
    if (!(cfg.tol_scale > 0.0)) throw ConfigError("entrance.tol_scale: must be positive");

    if (const std::string* v = take("law.mode")) cfg.law_mode = *v;
    if (cfg.law_mode != "differentiable" && cfg.law_mode != "entrance_driven")
        throw ConfigError("law.mode: must be 'differentiable' or 'entrance_driven'");
    for (int i = 1;; ++i) {
        std::string base = "law.gauss." + std::to_string(i);
        const std::string* sv = take(base + ".sigma");
        const std::string* ev = take(base + ".element");
        if (!sv && !ev) break;
        if (!ev) throw ConfigError(base + ".element: missing");
        LawGaussCfg g;
        if (sv) {
            g.sigma = parse_double(base + ".sigma", *sv);
            if (!(g.sigma > 0.0)) throw ConfigError(base + ".sigma: must be positive");
        }
        g.element = parse_element(base + ".element", *ev);
        cfg.law_gauss.push_back(std::move(g));
    }
    for (int i = 1;; ++i) {
        std::string base = "law.jump." + std::to_string(i);
        const std::string* rv = take(base + ".rate");
        const std::string* ev = take(base + ".element");
        if (!rv && !ev) break;
        if (!ev) throw ConfigError(base + ".element: missing");
        LawJumpCfg j;
        if (rv) {
            j.rate = parse_double(base + ".rate", *rv);
            if (!(j.rate > 0.0)) throw ConfigError(base + ".rate: must be positive");
        }
        j.element = parse_element(base + ".element", *ev);
        cfg.law_jumps.push_back(std::move(j));
    }

    if (const std::string* v = take("simulation.times")) {
        cfg.sim_times.clear();
        for (const std::string& t : tokens_of(*v))
            cfg.sim_times.push_back(parse_double("simulation.times", t));
    }
    if (cfg.sim_times.empty()) throw ConfigError("simulation.times: need at least one time");
    double prev = 0.0;
    for (double t : cfg.sim_times) {
        if (!(t > prev))
            throw ConfigError("simulation.times: times must be positive and increasing");
        prev = t;
    }
    if (const std::string* v = take("simulation.substeps"))
        cfg.sim_substeps = static_cast<int>(parse_int("simulation.substeps", *v));
    if (cfg.sim_substeps < 1) throw ConfigError("simulation.substeps: must be at least 1");
    if (const std::string* v = take("simulation.paths"))
        cfg.sim_paths = static_cast<int>(parse_int("simulation.paths", *v));
    if (cfg.sim_paths < 1) throw ConfigError("simulation.paths: must be at least 1");
    if (const std::string* v = take("simulation.seed")) cfg.sim_seed = parse_u64("simulation.seed", *v);
    if (const std::string* v = take("simulation.section_s0"))
        cfg.sim_section_s0 = parse_double("simulation.section_s0", *v);
    if (!(cfg.sim_section_s0 > 0.0)) throw ConfigError("simulation.section_s0: must be positive");
    if (const std::string* v = take("simulation.term_cap"))
        cfg.sim_term_cap = static_cast<int>(parse_int("simulation.term_cap", *v));
    if (cfg.sim_term_cap < 10) throw ConfigError("simulation.term_cap: must be at least 10");
    if (const std::string* v = take("simulation.initial"))
        cfg.sim_initial = parse_element("simulation.initial", *v);

    if (const std::string* v = take("outputs.dir")) cfg.out_dir = *v;
    if (cfg.out_dir.empty()) throw ConfigError("outputs.dir: must not be empty");
    if (const std::string* v = take("outputs.format")) cfg.out_format = *v;
    if (cfg.out_format != "csv") throw ConfigError("outputs.format: only 'csv' is supported");
    if (const std::string* v = take("outputs.sample_paths"))
        cfg.out_sample_paths = static_cast<int>(parse_int("outputs.sample_paths", *v));
    if (cfg.out_sample_paths < 0) throw ConfigError("outputs.sample_paths: must be non-negative");

    for (const auto& [key, val] : kv)
        if (!seen.count(key)) throw ConfigError(key + ": unknown key");

    // element/kind compatibility and law constraints surface at load
    cfg.make_sc();
    if (cfg.sim_initial) {
        if (cfg.law_mode == "entrance_driven")
            cfg.make_path_element(sg, *cfg.sim_initial, "simulation.initial");
        else if (flat_form(cfg.sim_initial->form))
            cfg.make_flat_element(sg, *cfg.sim_initial, "simulation.initial");
        else
            throw ConfigError("simulation.initial: differentiable mode takes flat elements");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    auto put = [&](const std::string& key, const std::string& val) {
        out << key << " = " << val << '\n';
    };
    put("semigroup.kind", cfg.semigroup_kind);
    if (cfg.semigroup_kind == "matrix") {
        std::string rows;
        for (std::size_t i = 0; i < cfg.matrix_rows.size(); ++i) {
            if (i) rows += "; ";
            for (std::size_t j = 0; j < cfg.matrix_rows[i].size(); ++j) {
                if (j) rows += ' ';
                rows += format_full(cfg.matrix_rows[i][j]);
            }
        }
        put("semigroup.matrix", rows);
    } else {
        if (cfg.semigroup_kind != "absorbing_halfline")
            put("semigroup.grid.lower", format_full(cfg.grid_lower));
        put("semigroup.grid.upper", format_full(cfg.grid_upper));
        put("semigroup.grid.count", std::to_string(cfg.grid_count));
    }
    if (cfg.growth_c0) put("semigroup.growth.c0", format_full(*cfg.growth_c0));
    if (cfg.growth_b0) put("semigroup.growth.b0", format_full(*cfg.growth_b0));
    put("entrance.b", format_full(cfg.entrance.b));
    put("entrance.alpha", format_full(cfg.entrance.alpha));
    put("entrance.s_min", format_full(cfg.entrance.s_min));
    put("entrance.s_max", format_full(cfg.entrance.s_max));
    put("entrance.rho", format_full(cfg.entrance.rho));
    put("entrance.gl_points", std::to_string(cfg.entrance.gl_points));
    put("entrance.tol_scale", format_full(cfg.tol_scale));
    put("law.mode", cfg.law_mode);
    for (std::size_t i = 0; i < cfg.law_gauss.size(); ++i) {
        std::string base = "law.gauss." + std::to_string(i + 1);
        put(base + ".sigma", format_full(cfg.law_gauss[i].sigma));
        put(base + ".element", cfg.law_gauss[i].element.text());
    }
    for (std::size_t i = 0; i < cfg.law_jumps.size(); ++i) {
        std::string base = "law.jump." + std::to_string(i + 1);
        put(base + ".rate", format_full(cfg.law_jumps[i].rate));
        put(base + ".element", cfg.law_jumps[i].element.text());
    }
    std::string times;
    for (std::size_t i = 0; i < cfg.sim_times.size(); ++i) {
        if (i) times += ' ';
        times += format_full(cfg.sim_times[i]);
    }
    put("simulation.times", times);
    put("simulation.substeps", std::to_string(cfg.sim_substeps));
    put("simulation.paths", std::to_string(cfg.sim_paths));
    put("simulation.seed", std::to_string(cfg.sim_seed));
    put("simulation.section_s0", format_full(cfg.sim_section_s0));
    put("simulation.term_cap", std::to_string(cfg.sim_term_cap));
    if (cfg.sim_initial) put("simulation.initial", cfg.sim_initial->text());
    put("outputs.dir", cfg.out_dir);
    put("outputs.format", cfg.out_format);
    put("outputs.sample_paths", std::to_string(cfg.out_sample_paths));
    return out.str();
}

}  // namespace mehler
