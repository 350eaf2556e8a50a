#include "apk/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace apk {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& text, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (trim(text.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad number '" + text + "'");
}

std::vector<double> parse_row(const std::string& line, std::size_t lineno) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(parse_real(trim(cell), lineno));
    return out;
}

/// "# key=value" header; returns false for other comment lines.
bool parse_header(const std::string& line, std::string& key, std::string& value) {
    auto body = trim(std::string_view(line).substr(1));
    const auto eq = body.find('=');
    if (eq == std::string::npos) return false;
    key = trim(std::string_view(body).substr(0, eq));
    value = trim(std::string_view(body).substr(eq + 1));
    return true;
}

void write_row(std::ostream& os, const Point& p, std::optional<double> extra = std::nullopt) {
    for (std::size_t a = 0; a < p.dim(); ++a) os << (a ? "," : "") << format_real(p[a]);
    if (extra) os << "," << format_real(*extra);
    os << '\n';
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<T>();
}

std::vector<Point> points_from_json(const json& j) {
    std::vector<Point> out;
    for (const auto& row : j) out.push_back(point_from_json(row));
    return out;
}

json points_json(std::span<const Point> pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back(point_json(p));
    return a;
}

template <typename Fn>
auto wrap_parse(std::string_view where, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string(where) + ": " + e.what());
    }
}

} // namespace

std::vector<Point> point_list_from_json(const json& j) { return points_from_json(j); }
json point_list_json(std::span<const Point> pts) { return points_json(pts); }

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------- CSV

void write_pointset_csv(std::ostream& os, const PointSet& S) {
    os << "# dim=" << S.dim() << '\n';
    os << "# r=" << format_real(S.hardcore_radius()) << '\n';
    os << "# window=" << format_real(S.window_radius()) << '\n';
    for (const auto& p : S.points()) write_row(os, p);
}

std::string pointset_csv(const PointSet& S) {
    std::ostringstream os;
    write_pointset_csv(os, S);
    return os.str();
}

PointSet read_pointset_csv(std::istream& is) {
    std::optional<std::size_t> dim;
    std::optional<double> r, window;
    std::vector<Point> pts;
    std::string line, key, value;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            if (!parse_header(t, key, value)) continue;
            if (key == "dim") dim = static_cast<std::size_t>(parse_real(value, lineno));
            else if (key == "r") r = parse_real(value, lineno);
            else if (key == "window") window = parse_real(value, lineno);
            continue;
        }
        if (!dim) throw Error(ErrorCode::ParseError, "point row before '# dim=' header");
        const auto row = parse_row(t, lineno);
        if (row.size() != *dim)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                                   std::to_string(*dim) + " coordinates");
        pts.push_back(Point::from(row));
    }
    if (!dim || !r || !window) throw Error(ErrorCode::ParseError, "missing '# dim=', '# r=' or '# window=' header");
    return PointSet(*dim, std::move(pts), *window, *r);
}

PointSet read_pointset_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    return read_pointset_csv(in);
}

void write_measure_csv(std::ostream& os, const WeightedAtomMeasure& mu) {
    os << "# dim=" << mu.dim() << '\n';
    os << "# bin_tol=" << format_real(mu.bin_tol()) << '\n';
    for (const auto& a : mu.atoms()) write_row(os, a.location, a.weight);
}

WeightedAtomMeasure read_measure_csv(std::istream& is) {
    std::optional<std::size_t> dim;
    std::optional<double> tol;
    std::vector<Atom> atoms;
    std::string line, key, value;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            if (!parse_header(t, key, value)) continue;
            if (key == "dim") dim = static_cast<std::size_t>(parse_real(value, lineno));
            else if (key == "bin_tol") tol = parse_real(value, lineno);
            continue;
        }
        if (!dim) throw Error(ErrorCode::ParseError, "atom row before '# dim=' header");
        auto row = parse_row(t, lineno);
        if (row.size() != *dim + 1) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad width");
        const double w = row.back();
        row.pop_back();
        atoms.push_back({Point::from(row), w});
    }
    if (!dim || !tol) throw Error(ErrorCode::ParseError, "missing '# dim=' or '# bin_tol=' header");
    return WeightedAtomMeasure(*dim, std::move(atoms), *tol);
}

void write_periodogram_csv(std::ostream& os, const Periodogram& pg) {
    os << "# R=" << format_real(pg.radius_used) << ", norm=" << to_string(pg.normalization) << '\n';
    for (std::size_t i = 0; i < pg.k.size(); ++i) write_row(os, pg.k[i], pg.values[i]);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// --------------------------------------------------------------------- JSON

json point_json(const Point& p) {
    json a = json::array();
    for (double c : p.coords()) a.push_back(real_json(c));
    return a;
}

Point point_from_json(const json& j) {
    return wrap_parse("point", [&] {
        if (j.is_number()) return Point{j.get<double>()};
        if (!j.is_array() || j.empty() || j.size() > kMaxDim)
            throw Error(ErrorCode::ParseError, "point must be a number or an array of 1..4 numbers");
        std::vector<double> c;
        for (const auto& x : j) c.push_back(x.get<double>());
        return Point::from(c);
    });
}

json real_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const DensityEstimate& d) {
    return {{"value", real_json(d.value)},
            {"radii_used", d.radii_used},
            {"tail_values", d.tail_values},
            {"converged", d.converged}};
}

json to_json(const PseudoMetricReport& r) {
    return {{"value", real_json(r.value)},
            {"radii", r.radii},
            {"per_radius", r.per_radius},
            {"converged", r.converged},
            {"pitch", real_json(r.pitch)}};
}

json to_json(const CriterionReport& r) {
    return {{"criterion_id", to_string(r.criterion_id)},
            {"epsilon", real_json(r.epsilon)},
            {"verdict", to_string(r.verdict)},
            {"gap", real_json(r.gap)},
            {"gap_bound", real_json(r.gap_bound)},
            {"candidates_tested", r.candidates_tested},
            {"almost_period_set", points_json(r.almost_period_set)}};
}

json to_json(const BraggPeak& p) {
    return {{"location", point_json(p.location)}, {"mass", real_json(p.mass)}, {"stability", real_json(p.stability)}};
}

json to_json(const RegionSpec& A) {
    if (A.is_ball()) return {{"ball", {{"center", point_json(A.as_ball().center)}, {"radius", A.as_ball().radius}}}};
    return {{"box", {{"lo", point_json(A.as_box().lo)}, {"hi", point_json(A.as_box().hi)}}}};
}

json to_json(const PalmIntensityEstimate& e) {
    return {{"region", to_json(e.region)},
            {"value", real_json(e.value)},
            {"stderr", real_json(e.std_error)},
            {"samples", e.samples},
            {"B_used", to_json(e.B_used)}};
}

json to_json(const AcPalmReport& r) {
    return {{"palm", to_json(r.palm)},
            {"per_seed_gamma", r.per_seed_gamma},
            {"per_seed_deviation", r.per_seed_deviation},
            {"mean_gamma", real_json(r.mean_gamma)},
            {"gamma_stderr", real_json(r.gamma_stderr)}};
}

json to_json(const EventAlmostPeriodReport& r) {
    json rows = json::array();
    for (std::size_t i = 0; i < r.candidates.size(); ++i)
        rows.push_back({{"t", point_json(r.candidates[i])},
                        {"probability", r.probability[i]},
                        {"wilson_upper", r.wilson_upper[i]}});
    return {{"criterion", to_json(r.criterion)}, {"candidates", rows}};
}

RegionSpec region_from_json(const json& j) {
    return wrap_parse("region", [&] {
        if (!j.is_object() || j.size() != 1) throw Error(ErrorCode::ParseError, "region must be {ball: ...} or {box: ...}");
        if (j.contains("ball")) {
            const auto& b = j.at("ball");
            reject_unknown_keys(b, {"center", "radius"}, "ball");
            return RegionSpec::ball(point_from_json(b.at("center")), b.at("radius").get<double>());
        }
        if (j.contains("box")) {
            const auto& b = j.at("box");
            reject_unknown_keys(b, {"lo", "hi"}, "box");
            return RegionSpec::box(point_from_json(b.at("lo")), point_from_json(b.at("hi")));
        }
        throw Error(ErrorCode::ParseError, "region must be {ball: ...} or {box: ...}");
    });
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, std::string(where) + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw Error(ErrorCode::ParseError, std::string(where) + ": unknown key '" + key + "'");
    }
}

CutProjectConfig cut_project_from_json(const json& j) {
    return wrap_parse("cut_and_project", [&] {
        if (j.contains("preset")) {
            reject_unknown_keys(j, {"preset", "output_radius", "amplitude", "frequency", "phase"}, "cut_and_project");
            const auto preset = j.at("preset").get<std::string>();
            const double R = get_or(j, "output_radius", 1.0);
            if (preset == "fibonacci") return presets::fibonacci(R);
            if (preset == "deformed_fibonacci")
                return presets::deformed_fibonacci(R, get_or(j, "amplitude", 0.0), get_or(j, "frequency", 0.1),
                                                   get_or(j, "phase", 0.0));
            throw Error(ErrorCode::ParseError, "unknown cut_and_project preset '" + preset + "'");
        }
        reject_unknown_keys(j, {"n", "E_basis", "F_basis", "window", "deformation", "torus_offset", "output_radius",
                                "hardcore_radius"},
                            "cut_and_project");
        CutProjectConfig cfg;
        cfg.n = j.at("n").get<std::size_t>();
        cfg.E_basis = points_from_json(j.at("E_basis"));
        cfg.F_basis = points_from_json(j.at("F_basis"));
        if (j.contains("window") && !j.at("window").is_null()) cfg.window = region_from_json(j.at("window"));
        if (j.contains("deformation")) {
            const auto& d = j.at("deformation");
            reject_unknown_keys(d, {"kind", "amplitude", "frequency", "phase"}, "deformation");
            const auto kind = d.at("kind").get<std::string>();
            if (kind == "sinusoidal") {
                cfg.deformation.kind = Deformation::Kind::sinusoidal;
                cfg.deformation.amplitude = point_from_json(d.at("amplitude"));
                cfg.deformation.frequency = point_from_json(d.at("frequency"));
                cfg.deformation.phase = get_or(d, "phase", 0.0);
            } else if (kind != "zero") {
                throw Error(ErrorCode::ParseError, "unknown deformation kind '" + kind + "'");
            }
        }
        cfg.torus_offset = j.contains("torus_offset") ? point_from_json(j.at("torus_offset")) : Point::zero(cfg.n);
        cfg.output_radius = get_or(j, "output_radius", 1.0);
        cfg.hardcore_radius = get_or(j, "hardcore_radius", 0.0);
        cfg.validate();
        return cfg;
    });
}

ProcessSampler sampler_from_json(const json& j) {
    return wrap_parse("process", [&] {
        reject_unknown_keys(j, {"kind", "model", "basis", "intensity", "hardcore", "dim", "noise_bound", "distribution",
                                "seed", "window_radius"},
                            "process");
        ProcessSampler p;
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "randomized_model_set") p.kind = ProcessKind::randomized_model_set;
        else if (kind == "randomized_lattice") p.kind = ProcessKind::randomized_lattice;
        else if (kind == "matern_II") p.kind = ProcessKind::matern_II;
        else if (kind == "perturbed_lattice") p.kind = ProcessKind::perturbed_lattice;
        else throw Error(ErrorCode::ParseError, "unknown process kind '" + kind + "'");
        p.window_radius = get_or(j, "window_radius", 10.0);
        p.seed = get_or<std::uint64_t>(j, "seed", 0);
        if (p.kind == ProcessKind::randomized_model_set) {
            const auto& m = j.at("model");
            p.model = m.is_string() ? cut_project_from_json(json{{"preset", m.get<std::string>()}})
                                    : cut_project_from_json(m);
        }
        if (j.contains("basis")) p.basis = points_from_json(j.at("basis"));
        else if (p.kind == ProcessKind::randomized_lattice || p.kind == ProcessKind::perturbed_lattice)
            p.basis = {Point{1.0}};
        p.intensity = get_or(j, "intensity", 1.0);
        p.hardcore = get_or(j, "hardcore", 0.3);
        p.dim = get_or<std::size_t>(j, "dim", 1);
        p.noise_bound = get_or(j, "noise_bound", 0.0);
        if (get_or<std::string>(j, "distribution", "uniform_ball") != "uniform_ball")
            throw Error(ErrorCode::ParseError, "only the uniform_ball noise distribution is provided");
        return p;
    });
}

json to_json(const CutProjectConfig& cfg) {
    json j{{"n", cfg.n}, {"E_basis", points_json(cfg.E_basis)}, {"F_basis", points_json(cfg.F_basis)}};
    j["window"] = cfg.window ? to_json(*cfg.window) : json(nullptr);
    if (cfg.deformation.kind == Deformation::Kind::zero) {
        j["deformation"] = {{"kind", "zero"}};
    } else {
        j["deformation"] = {{"kind", "sinusoidal"},
                            {"amplitude", point_json(cfg.deformation.amplitude)},
                            {"frequency", point_json(cfg.deformation.frequency)},
                            {"phase", cfg.deformation.phase}};
    }
    j["torus_offset"] = point_json(cfg.torus_offset.dim() ? cfg.torus_offset : Point::zero(cfg.n));
    j["output_radius"] = cfg.output_radius;
    j["hardcore_radius"] = cfg.hardcore_radius;
    return j;
}

json to_json(const ProcessSampler& p) {
    json j{{"kind", to_string(p.kind)}, {"seed", p.seed}, {"window_radius", p.window_radius}};
    switch (p.kind) {
    case ProcessKind::randomized_model_set: j["model"] = to_json(p.model); break;
    case ProcessKind::randomized_lattice: j["basis"] = points_json(p.basis); break;
    case ProcessKind::matern_II:
        j["intensity"] = p.intensity;
        j["hardcore"] = p.hardcore;
        j["dim"] = p.dim;
        break;
    case ProcessKind::perturbed_lattice:
        j["basis"] = points_json(p.basis);
        j["noise_bound"] = p.noise_bound;
        j["distribution"] = "uniform_ball";
        break;
    }
    return j;
}

} // namespace apk
