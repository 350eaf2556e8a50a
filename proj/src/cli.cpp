#include "apk/cli.hpp"
#include "apk/io.hpp"
#include "apk/parallel.hpp"
#include "apk/rng.hpp"
#include "apk/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace apk {

namespace {

namespace fs = std::filesystem;

struct Output {
    std::string name;
    std::string content;
};

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> threads;
    std::vector<std::string> only;
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open config " + path);
    try {
        json j = json::parse(in);
        if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, "config " + path + ": " + e.what());
    }
}

template <typename T>
void overlay(json& doc, const char* key, const std::optional<T>& v) {
    if (v) doc[key] = *v;
}

template <typename T>
T value_or(const json& doc, const char* key, T fallback) {
    if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("key '") + key + "': " + e.what());
    }
}

std::vector<double> radii_or(const json& doc, const char* key, std::vector<double> fallback) {
    auto r = value_or(doc, key, fallback);
    if (r.empty()) throw Error(ErrorCode::InvalidArgument, std::string(key) + " must not be empty");
    return r;
}

/// A scalar applies to every axis.
Point axis_point(const json& doc, const char* key, double fallback, std::size_t dim) {
    Point p(dim);
    if (!doc.contains(key)) {
        for (std::size_t a = 0; a < dim; ++a) p[a] = fallback;
        return p;
    }
    const auto& v = doc.at(key);
    if (v.is_number()) {
        for (std::size_t a = 0; a < dim; ++a) p[a] = v.get<double>();
        return p;
    }
    p = point_from_json(v);
    if (p.dim() != dim) throw Error(ErrorCode::DimensionMismatch, std::string(key) + " has the wrong dimension");
    return p;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotUniformlyDiscrete: return exit_not_uniformly_discrete;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::HardcoreMismatch:
    case ErrorCode::WindowTooSmall:
    case ErrorCode::RadiusExceedsWindow:
    case ErrorCode::RegionOutsideWindow:
    case ErrorCode::TranslationExceedsWindow:
    case ErrorCode::OutsideWindow: return exit_window_error;
    default: return exit_config_error;
    }
}

// ------------------------------------------------------------------ generate

struct GenerateFlags {
    std::optional<std::string> preset;
    std::optional<double> radius, amplitude, frequency, phase, intensity, hardcore;
    std::optional<std::string> name;
};

json preset_document(const std::string& preset, const GenerateFlags& f) {
    const double s = std::sqrt(1.0 + std::numbers::phi * std::numbers::phi);
    if (preset == "lattice-z") return {{"lattice", {{"basis", {{1.0}}}}}};
    if (preset == "lattice-z2") return {{"lattice", {{"basis", {{1.0, 0.0}, {0.0, 1.0}}}}}};
    if (preset == "fibonacci") return {{"cut_and_project", {{"preset", "fibonacci"}}}};
    if (preset == "deformed-fibonacci") {
        // default amplitude: 5% of the short gap
        return {{"cut_and_project",
                 {{"preset", "deformed_fibonacci"},
                  {"amplitude", f.amplitude.value_or(0.05 / s)},
                  {"frequency", f.frequency.value_or(0.1)},
                  {"phase", f.phase.value_or(0.0)}}}};
    }
    if (preset == "matern")
        return {{"process", {{"kind", "matern_II"}, {"intensity", f.intensity.value_or(2.0)}, {"hardcore", f.hardcore.value_or(0.4)}}}};
    if (preset == "randomized-lattice") return {{"process", {{"kind", "randomized_lattice"}}}};
    throw Error(ErrorCode::ParseError, "unknown preset '" + preset + "'");
}

std::vector<Output> cmd_generate(json doc, const GenerateFlags& f, const Globals& g) {
    if (f.preset) {
        const json p = preset_document(*f.preset, f);
        for (auto it = p.begin(); it != p.end(); ++it) doc[it.key()] = it.value();
        if (!doc.contains("name")) doc["name"] = *f.preset;
    }
    overlay(doc, "radius", f.radius);
    overlay(doc, "name", f.name);
    reject_unknown_keys(doc, {"lattice", "cut_and_project", "process", "radius", "name"}, "generate");
    const int sources = int(doc.contains("lattice")) + int(doc.contains("cut_and_project")) + int(doc.contains("process"));
    if (sources != 1) throw Error(ErrorCode::ParseError, "generate needs exactly one of lattice, cut_and_project, process");
    const bool has_radius = doc.contains("radius");
    const double radius = value_or(doc, "radius", 0.0);

    json sidecar;
    std::optional<PointSet> S;
    if (doc.contains("lattice")) {
        const auto& l = doc.at("lattice");
        reject_unknown_keys(l, {"basis", "window_radius"}, "lattice");
        const auto basis = point_list_from_json(l.at("basis"));
        const double W = has_radius ? radius : value_or(l, "window_radius", 10.0);
        S = make_lattice(basis, W);
        sidecar = {{"kind", "lattice"}, {"config", {{"basis", point_list_json(basis)}, {"window_radius", W}}}, {"seed", nullptr}};
    } else if (doc.contains("cut_and_project")) {
        auto cfg = cut_project_from_json(doc.at("cut_and_project"));
        if (has_radius) cfg.output_radius = radius;
        S = cut_and_project(cfg);
        sidecar = {{"kind", "cut_and_project"}, {"config", to_json(cfg)}, {"irrational", irrationality_heuristic(cfg)},
                   {"seed", nullptr}};
    } else {
        auto p = sampler_from_json(doc.at("process"));
        if (has_radius) p.window_radius = radius;
        if (g.seed) p.seed = *g.seed;
        S = sample(p);
        sidecar = {{"kind", to_string(p.kind)}, {"config", to_json(p)}, {"seed", p.seed}};
    }
    sidecar["dim"] = S->dim();
    sidecar["points"] = S->size();
    sidecar["window"] = S->window_radius();
    sidecar["r_declared"] = S->hardcore_radius();
    sidecar["r_measured"] = real_json(min_pair_distance(S->points()));
    const auto name = value_or<std::string>(doc, "name", "pointset");
    return {{name + ".csv", pointset_csv(*S)}, {name + ".json", sidecar.dump(2) + "\n"}};
}

// -------------------------------------------------------------------- metric

struct MetricFlags {
    std::vector<std::string> files;
    std::optional<std::string> which;
    std::optional<double> tol, R, support;
    std::optional<std::size_t> quad;
};

std::vector<Output> cmd_metric(json doc, const MetricFlags& f) {
    overlay(doc, "which", f.which);
    overlay(doc, "tol", f.tol);
    overlay(doc, "R", f.R);
    overlay(doc, "support_radius", f.support);
    overlay(doc, "quad_points", f.quad);
    if (!f.files.empty()) doc["files"] = f.files;
    reject_unknown_keys(doc, {"files", "which", "radii", "tol", "R", "quad_points", "support_radius", "shape"}, "metric");
    const auto files = value_or<std::vector<std::string>>(doc, "files", {});
    if (files.size() != 2) throw Error(ErrorCode::ParseError, "metric needs two point-set files");
    const PointSet A = read_pointset_file(files[0]), B = read_pointset_file(files[1]);
    if (A.dim() != B.dim()) throw Error(ErrorCode::DimensionMismatch, "point sets differ in dimension");
    const double W = std::min(A.window_radius(), B.window_radius());
    const double r = std::min(A.hardcore_radius(), B.hardcore_radius());
    const auto which = value_or<std::string>(doc, "which", "dbar");
    const auto radii = radii_or(doc, "radii", {0.2 * W, 0.4 * W, 0.6 * W, 0.8 * W});

    PseudoMetricReport rep;
    if (which == "d") {
        // the finest resolution the common window supports
        rep.value = metric_d(A, B, value_or(doc, "tol", std::max(1e-3, 1.0 / (W - 1.0))));
    } else if (which == "dbar") {
        rep.value = dbar(A, B, radii, value_or(doc, "tol", 1e-3 * r));
        rep.radii = radii;
    } else if (which == "dbarc") {
        const double tol = value_or(doc, "tol", 0.01);
        const double R = value_or(doc, "R", std::min(100.0, W - 1.0 / tol - tol - 1.0));
        rep = dbar_c(A, B, R, value_or<std::size_t>(doc, "quad_points", 200), tol);
    } else if (which == "dbarf") {
        const auto shape = value_or<std::string>(doc, "shape", "triangle");
        if (shape != "triangle" && shape != "cosine") throw Error(ErrorCode::ParseError, "shape must be triangle or cosine");
        const TestFunction fn(shape == "triangle" ? BumpShape::triangle : BumpShape::cosine,
                              value_or(doc, "support_radius", 0.95 * r / 5.0), 1.0);
        const double Rmax = *std::max_element(radii.begin(), radii.end());
        const std::size_t fallback = A.dim() == 1 ? std::min<std::size_t>(1000000, std::size_t(std::ceil(2.0 * Rmax / 0.01))) : 200;
        rep = dbar_f(A, B, fn, radii, value_or(doc, "quad_points", fallback));
    } else if (which == "dtilde") {
        rep.value = dtilde(A, B, radii);
        rep.radii = radii;
    } else {
        throw Error(ErrorCode::ParseError, "which must be one of d, dbar, dbarc, dbarf, dtilde");
    }
    json j = to_json(rep);
    j["which"] = which;
    return {{"metric.json", j.dump(2) + "\n"}};
}

// ------------------------------------------------------------------ autocorr

struct AutocorrFlags {
    std::string file;
    std::optional<double> radius, bin_tol, cutoff;
};

std::vector<Output> cmd_autocorr(json doc, const AutocorrFlags& f) {
    overlay(doc, "radius", f.radius);
    overlay(doc, "bin_tol", f.bin_tol);
    overlay(doc, "cutoff", f.cutoff);
    if (!f.file.empty()) doc["file"] = f.file;
    reject_unknown_keys(doc, {"file", "radius", "radii", "bin_tol", "cutoff", "track_floor"}, "autocorr");
    const PointSet S = read_pointset_file(value_or<std::string>(doc, "file", ""));
    const double bin_tol = value_or(doc, "bin_tol", 0.0);
    const double cutoff = value_or(doc, "cutoff", 0.0);
    std::ostringstream csv;
    if (doc.contains("radii")) {
        AutocorrOptions o;
        o.bin_tol = bin_tol;
        o.diff_cutoff = cutoff;
        o.track_floor = value_or(doc, "track_floor", o.track_floor);
        const auto est = autocorrelation_limit(S, radii_or(doc, "radii", {}), o);
        write_measure_csv(csv, est.measure);
        const json summary{{"radii", est.radius_schedule},
                           {"mass_at_zero", est.per_radius_mass_at_zero},
                           {"converged", est.converged},
                           {"tracked_atoms", est.tracked_atoms},
                           {"atoms", est.measure.size()}};
        return {{"autocorr.csv", csv.str()}, {"autocorr.json", summary.dump(2) + "\n"}};
    }
    const double R = value_or(doc, "radius", S.window_radius());
    const auto gamma = finite_autocorrelation(S, R, bin_tol, cutoff);
    write_measure_csv(csv, gamma);
    const json summary{{"radius", R}, {"total_mass", gamma.total_mass()}, {"atoms", gamma.size()}};
    return {{"autocorr.csv", csv.str()}, {"autocorr.json", summary.dump(2) + "\n"}};
}

// ------------------------------------------------------------------ diffract

struct DiffractFlags {
    std::string file;
    std::optional<double> theta_factor, eps;
    std::vector<std::string> criteria;
};

struct AnalysisSetup {
    std::vector<double> radii;
    double eps = 0.05;
    CriterionOptions opts;
    AutocorrOptions ao;
    double grid_step = 0.5;
    double weight_floor = 0.1;
};

AnalysisSetup analysis_setup(const json& doc, const PointSet& S) {
    AnalysisSetup a;
    const double W = S.window_radius();
    a.radii = radii_or(doc, "radii", {0.25 * W, 0.5 * W, 0.75 * W, W});
    a.eps = value_or(doc, "eps", 0.05);
    a.opts.search_radius = value_or(doc, "search_radius", std::min(100.0, W / 4.0));
    a.opts.gap_bound = value_or(doc, "gap_bound", 0.0);
    a.ao.bin_tol = value_or(doc, "bin_tol", 0.05 * S.hardcore_radius());
    a.ao.diff_cutoff = value_or(doc, "cutoff", a.opts.search_radius + 15.0);
    a.ao.track_floor = value_or(doc, "track_floor", 0.5);
    a.grid_step = value_or(doc, "grid_step", 0.5);
    a.weight_floor = value_or(doc, "weight_floor", 0.1);
    return a;
}

std::vector<double> c5_radii(const AnalysisSetup& a, double W) {
    std::vector<double> out;
    for (double R : a.radii)
        if (a.opts.search_radius + a.eps + R <= W) out.push_back(R);
    return out.empty() ? a.radii : out;
}

CriterionReport run_criterion(const std::string& id, const PointSet& S, const AnalysisSetup& a,
                              const AutocorrEstimate& est, const json& doc) {
    CriterionOptions co = a.opts;
    if (co.gap_bound == 0.0 && id != "C3" && id != "ATOM") co.gap_bound = 2.0 * mean_nn_spacing(S) / a.eps;
    if (id == "C3") return criterion_gamma_concentration(est, value_or(doc, "c3_radius", 0.05), a.eps, co);
    if (id == "ATOM") return criterion_atom_concentration(est.measure, a.eps, co);
    const auto cands = default_candidates(est.measure, co.search_radius, a.grid_step, a.weight_floor);
    if (id == "C5") return criterion_almost_periods(S, a.eps, cands, c5_radii(a, S.window_radius()), co);
    if (id == "BOHR") {
        const double step = S.dim() == 1 ? 0.02 : 0.2;
        const KGrid probe{axis_point(doc, "probe_lo", -10.0, S.dim()), axis_point(doc, "probe_hi", 10.0, S.dim()),
                          axis_point(doc, "probe_step", step, S.dim())};
        return bohr_test_mu_conv_f(est.measure, TestFunction(BumpShape::cosine, 0.3, 1.0), a.eps, cands, probe, co);
    }
    throw Error(ErrorCode::ParseError, "unknown criterion '" + id + "' (C3, C5, ATOM, BOHR)");
}

std::vector<Output> cmd_diffract(json doc, const DiffractFlags& f) {
    overlay(doc, "theta_factor", f.theta_factor);
    overlay(doc, "eps", f.eps);
    if (!f.criteria.empty()) doc["criteria"] = f.criteria;
    if (!f.file.empty()) doc["file"] = f.file;
    reject_unknown_keys(doc,
                        {"file", "radii", "k_lo", "k_hi", "k_step", "theta_factor", "stability_bound", "criteria", "eps",
                         "search_radius", "gap_bound", "bin_tol", "cutoff", "track_floor", "grid_step", "weight_floor",
                         "c3_radius", "probe_lo", "probe_hi", "probe_step"},
                        "diffract");
    const PointSet S = read_pointset_file(value_or<std::string>(doc, "file", ""));
    const AnalysisSetup a = analysis_setup(doc, S);
    const double Rmax = *std::max_element(a.radii.begin(), a.radii.end());
    const KGrid grid{axis_point(doc, "k_lo", -3.2, S.dim()), axis_point(doc, "k_hi", 3.2, S.dim()),
                     axis_point(doc, "k_step", 1.0 / (4.0 * Rmax), S.dim())};

    json result{{"points", S.size()}, {"radius", Rmax}};
    std::ostringstream csv;
    if (S.empty()) {
        Periodogram pg;
        pg.dim = S.dim();
        pg.grid = grid;
        pg.radius_used = Rmax;
        write_periodogram_csv(csv, pg);
        result["theta"] = 0.0;
        result["peaks"] = json::array();
        result["criteria"] = json::array();
        return {{"peaks.json", result.dump(2) + "\n"}, {"periodogram.csv", csv.str()}};
    }
    const Periodogram pg = periodogram(S, Rmax, grid);
    write_periodogram_csv(csv, pg);
    const double theta = default_bragg_threshold(S, a.radii, value_or(doc, "theta_factor", 0.05));
    const auto peaks = detect_bragg_peaks(S, a.radii, grid, theta, value_or(doc, "stability_bound", 0.2));
    result["theta"] = theta;
    result["resolution_warning"] = pg.resolution_warning;
    result["peaks"] = json::array();
    for (const auto& p : peaks) result["peaks"].push_back(to_json(p));

    result["criteria"] = json::array();
    const auto ids = value_or<std::vector<std::string>>(doc, "criteria", {});
    if (!ids.empty()) {
        const auto est = autocorrelation_limit(S, a.radii, a.ao);
        for (const auto& id : ids) result["criteria"].push_back(to_json(run_criterion(id, S, a, est, doc)));
    }
    return {{"peaks.json", result.dump(2) + "\n"}, {"periodogram.csv", csv.str()}};
}

// ---------------------------------------------------------------------- appd

struct AppdFlags {
    std::string file;
    std::optional<std::string> criterion;
    std::optional<double> eps;
};

std::vector<Output> cmd_appd(json doc, const AppdFlags& f, const Globals& g) {
    overlay(doc, "criterion", f.criterion);
    overlay(doc, "eps", f.eps);
    if (!f.file.empty()) doc["file"] = f.file;
    reject_unknown_keys(doc,
                        {"file", "process", "criterion", "radii", "eps", "search_radius", "gap_bound", "bin_tol", "cutoff",
                         "track_floor", "grid_step", "weight_floor", "c3_radius", "probe_lo", "probe_hi", "probe_step", "R",
                         "samples"},
                        "appd");
    if (doc.contains("file") == doc.contains("process"))
        throw Error(ErrorCode::ParseError, "appd needs exactly one of file, process");

    if (doc.contains("file")) {
        const PointSet S = read_pointset_file(doc.at("file").get<std::string>());
        const AnalysisSetup a = analysis_setup(doc, S);
        const auto est = autocorrelation_limit(S, a.radii, a.ao);
        const auto rep = run_criterion(value_or<std::string>(doc, "criterion", "C5"), S, a, est, doc);
        return {{"appd.json", to_json(rep).dump(2) + "\n"}};
    }

    auto p = sampler_from_json(doc.at("process"));
    if (g.seed) p.seed = *g.seed;
    const double sr = value_or(doc, "search_radius", 25.0);
    const double R = value_or(doc, "R", 0.2);
    p.window_radius = std::max(p.window_radius, sr + R + 0.5);
    // candidates: differences of an independent realisation plus a regular grid
    ProcessSampler wide = p.for_sample(std::uint64_t{1} << 20);
    wide.window_radius = 3.0 * sr;
    const PointSet chi0 = sample(wide);
    const auto gamma = finite_autocorrelation(chi0, wide.window_radius, 0.01 * chi0.hardcore_radius(), sr);
    const auto cands = default_candidates(gamma, sr, value_or(doc, "grid_step", 0.0), 0.0);
    CriterionOptions co;
    co.search_radius = sr;
    const double spacing = chi0.empty() ? 1.0 : ball_volume(chi0.dim(), wide.window_radius) / double(chi0.size());
    co.gap_bound = value_or(doc, "gap_bound", 10.0 * std::pow(spacing, 1.0 / double(chi0.dim())));
    const auto rep = event_almost_periods(p, R, value_or(doc, "eps", 0.1), cands, value_or<std::size_t>(doc, "samples", 500), co);
    return {{"appd.json", to_json(rep).dump(2) + "\n"}};
}

// ---------------------------------------------------------------------- palm

struct PalmFlags {
    std::optional<std::string> preset;
    std::optional<std::size_t> samples;
};

std::vector<Output> cmd_palm(json doc, const PalmFlags& f, const Globals& g) {
    if (f.preset) {
        if (*f.preset == "matern") {
            doc["process"] = {{"kind", "matern_II"}, {"intensity", 2.0}, {"hardcore", 0.4}, {"window_radius", 5.0}};
            if (!doc.contains("region")) doc["region"] = {{"ball", {{"center", {0.5}}, {"radius", 0.1}}}};
        } else if (*f.preset == "randomized-lattice") {
            doc["process"] = {{"kind", "randomized_lattice"}, {"window_radius", 5.0}};
            if (!doc.contains("region")) doc["region"] = {{"ball", {{"center", {1.0}}, {"radius", 0.25}}}};
        } else {
            throw Error(ErrorCode::ParseError, "palm presets: matern, randomized-lattice");
        }
    }
    overlay(doc, "samples", f.samples);
    reject_unknown_keys(doc, {"process", "region", "samples", "B"}, "palm");
    if (!doc.contains("process") || !doc.contains("region")) throw Error(ErrorCode::ParseError, "palm needs process and region");
    auto p = sampler_from_json(doc.at("process"));
    if (g.seed) p.seed = *g.seed;
    const RegionSpec A = region_from_json(doc.at("region"));
    std::optional<RegionSpec> B;
    if (doc.contains("B")) B = region_from_json(doc.at("B"));
    const auto est = palm_intensity(p, A, value_or<std::size_t>(doc, "samples", 200), B);
    return {{"palm.json", to_json(est).dump(2) + "\n"}};
}

// -------------------------------------------------------------------- verify

struct VerifyFlags {
    std::optional<double> theta_factor;
};

int cmd_verify(json doc, const VerifyFlags& f, const Globals& g, std::vector<Output>& outputs, std::ostream& err) {
    overlay(doc, "theta_factor", f.theta_factor);
    if (g.seed) doc["seed"] = *g.seed;
    if (!g.only.empty()) doc["only"] = g.only;
    const VerifyConfig cfg = verify_config_from_json(doc);
    const VerifyOutcome out = run_verify(cfg);
    for (const auto& c : out.checks) err << (c.passed ? "PASS " : "FAIL ") << c.tag << ": " << c.name << "\n";
    outputs.push_back({"summary.json", summary_json(cfg, out).dump(2) + "\n"});
    for (const auto& [name, artifact] : out.artifacts) outputs.push_back({name + ".json", artifact.dump(2) + "\n"});
    return out.passed() ? exit_ok : exit_verify_failed;
}

void emit(const std::vector<Output>& outputs, const Globals& g, std::ostream& out, std::ostream& err) {
    if (outputs.empty()) return;
    if (g.out.empty()) {
        out << outputs.front().content;
        return;
    }
    fs::create_directories(g.out);
    for (const auto& o : outputs) {
        write_file_atomic(fs::path(g.out) / o.name, o.content);
        err << "wrote " << (fs::path(g.out) / o.name).string() << "\n";
    }
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Almost-periodicity toolkit for uniformly discrete point sets", "apk"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON parameter document for the subcommand");
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--out", g.out, "Output directory (default: primary output on stdout)");
    app.add_option("--threads", g.threads, "Worker threads (fallback: APK_THREADS)");
    app.add_option("--only", g.only, "Verify tags to run (repeatable)");

    GenerateFlags gf;
    auto* gen = app.add_subcommand("generate", "Generate a point set");
    gen->add_option("--preset", gf.preset,
                    "lattice-z, lattice-z2, fibonacci, deformed-fibonacci, matern, randomized-lattice");
    gen->add_option("--radius", gf.radius, "Window radius");
    gen->add_option("--amplitude", gf.amplitude);
    gen->add_option("--frequency", gf.frequency);
    gen->add_option("--phase", gf.phase);
    gen->add_option("--intensity", gf.intensity);
    gen->add_option("--hardcore", gf.hardcore);
    gen->add_option("--name", gf.name, "Base name of the output files");

    MetricFlags mf;
    auto* met = app.add_subcommand("metric", "Distance between two point sets");
    met->add_option("files", mf.files)->expected(2);
    met->add_option("--which", mf.which, "d, dbar, dbarc, dbarf, dtilde");
    met->add_option("--tol", mf.tol);
    met->add_option("--R", mf.R);
    met->add_option("--support", mf.support);
    met->add_option("--quad", mf.quad);

    AutocorrFlags af;
    auto* ac = app.add_subcommand("autocorr", "Finite-radius autocorrelation");
    ac->add_option("file", af.file);
    ac->add_option("--radius", af.radius);
    ac->add_option("--bin-tol", af.bin_tol);
    ac->add_option("--cutoff", af.cutoff);

    DiffractFlags df;
    auto* dif = app.add_subcommand("diffract", "Periodogram, Bragg peaks and criteria");
    dif->add_option("file", df.file);
    dif->add_option("--theta-factor", df.theta_factor);
    dif->add_option("--eps", df.eps);
    dif->add_option("--criterion", df.criteria, "C3, C5, ATOM, BOHR (repeatable)");

    AppdFlags pf;
    auto* appd = app.add_subcommand("appd", "Almost-period detector");
    appd->add_option("file", pf.file);
    appd->add_option("--criterion", pf.criterion);
    appd->add_option("--eps", pf.eps);

    PalmFlags lf;
    auto* palm = app.add_subcommand("palm", "Palm intensity estimate");
    palm->add_option("--preset", lf.preset, "matern, randomized-lattice");
    palm->add_option("--samples", lf.samples);

    VerifyFlags vf;
    auto* ver = app.add_subcommand("verify", "Run the acceptance checks");
    ver->add_option("--theta-factor", vf.theta_factor);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    }

    try {
        if (g.threads) set_thread_count(*g.threads);
        json doc = load_config(g.config);
        std::vector<Output> outputs;
        int code = exit_ok;
        if (*gen) outputs = cmd_generate(std::move(doc), gf, g);
        else if (*met) outputs = cmd_metric(std::move(doc), mf);
        else if (*ac) outputs = cmd_autocorr(std::move(doc), af);
        else if (*dif) outputs = cmd_diffract(std::move(doc), df);
        else if (*appd) outputs = cmd_appd(std::move(doc), pf, g);
        else if (*palm) outputs = cmd_palm(std::move(doc), lf, g);
        else if (*ver) code = cmd_verify(std::move(doc), vf, g, outputs, err);
        emit(outputs, g, out, err);
        return code;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    }
}

} // namespace apk
