#include "apk/verify.hpp"
#include "apk/parallel.hpp"
#include "apk/rng.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace apk {

namespace {

constexpr double kTau = std::numbers::phi;

std::string verdict_name(Verdict v) { return std::string(to_string(v)); }

struct Ctx {
    const VerifyConfig& cfg;
    VerifyOutcome& out;
    std::string tag;

    void check(const std::string& name, bool ok, json detail = json::object()) {
        out.checks.push_back({tag, name, ok, std::move(detail)});
    }
    CounterRng rng(std::uint64_t stream) const { return CounterRng(split_seed(cfg.seed, stream)); }
};

PointSet integers(double window, double shift = 0.0) {
    std::vector<Point> pts;
    const auto lo = static_cast<long>(std::floor(-window + shift)) - 1;
    const auto hi = static_cast<long>(std::ceil(window + shift)) + 1;
    for (long m = lo; m <= hi; ++m) {
        const double x = static_cast<double>(m) - shift;
        if (std::abs(x) <= window) pts.push_back(Point{x});
    }
    return PointSet(1, std::move(pts), window, 1.0);
}

PointSet integer_lattice(double window) {
    const std::vector<Point> basis{Point{1.0}};
    return make_lattice(basis, window);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// -------------------------------------------------------------- criterion 1

void lattice_diffraction(Ctx& c) {
    const PointSet Z = integer_lattice(2000.0);
    const std::vector<double> radii{500.0, 1000.0, 1500.0, 2000.0};

    // closed forms: |sum_{|m| <= N} e^{-2 pi i k m}| = |sin(pi k (2N + 1)) / sin(pi k)|, or 2N + 1 at integers
    auto oracle = [&](double k) {
        std::vector<double> v;
        for (double R : radii) {
            const double N = std::floor(R);
            const double s = std::sin(std::numbers::pi * k);
            const double mod = std::abs(s) < 1e-15 ? 2.0 * N + 1.0
                                                   : std::abs(std::sin(std::numbers::pi * k * (2.0 * N + 1.0)) / s);
            v.push_back(mod * mod / (4.0 * R * R));
        }
        return tail_summary(v, 0.5).mean;
    };
    for (double k : {1.0, 2.0, 3.0}) {
        const auto am = atom_mass(Z, Point{k}, radii);
        const double o = oracle(k);
        c.check("atom_mass k=" + format_real(k), am.mass >= 0.98 && am.mass <= 1.02 && rel_err(am.mass, o) < 1e-9,
                {{"mass", am.mass}, {"oracle", o}, {"band", {0.98, 1.02}}});
    }
    for (double k : {0.5, std::numbers::sqrt2 / 2.0}) {
        const auto am = atom_mass(Z, Point{k}, radii);
        const double o = oracle(k);
        c.check("atom_mass k=" + format_real(k), am.mass <= 0.01 && std::abs(am.mass - o) < 1e-9,
                {{"mass", am.mass}, {"oracle", o}, {"max", 0.01}});
    }

    const PointSet Z1 = integer_lattice(1000.0);
    const std::vector<double> pr{250.0, 500.0, 750.0, 1000.0};
    const KGrid grid{Point{-3.2}, Point{3.2}, Point{1.0 / 4000.0}};
    const double theta = default_bragg_threshold(Z1, pr, c.cfg.theta_factor);
    const auto peaks = detect_bragg_peaks(Z1, pr, grid, theta);
    bool ok = peaks.size() == 7;
    json locs = json::array();
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        const double expect = static_cast<double>(i) - 3.0;
        ok = ok && std::abs(peaks[i].location[0] - expect) < 1e-6 && std::abs(peaks[i].mass - 1.0) < 0.02;
        locs.push_back(to_json(peaks[i]));
    }
    c.check("bragg peaks of Z at -3..3", ok, {{"theta", theta}, {"peaks", locs}});
}

// -------------------------------------------------------------- criterion 2

void autocorr_checks(Ctx& c) {
    const double R = 1000.0;
    const PointSet Z = integer_lattice(R);
    const auto gamma = finite_autocorrelation(Z, R, 0.0);
    const double card = static_cast<double>(Z.size());
    const double vol = 2.0 * R;
    bool ok = true;
    json rows = json::array();
    for (int m = -10; m <= 10; ++m) {
        const double expect = (2.0 * std::floor(R) + 1.0 - std::abs(m)) / (2.0 * R);
        const double got = gamma.mass_at(Point{static_cast<double>(m)});
        ok = ok && rel_err(got, expect) <= 0.01;
        rows.push_back({{"m", m}, {"weight", got}, {"oracle", expect}});
    }
    c.check("gamma_R atoms of Z at |m| <= 10", ok, {{"R", R}, {"atoms", rows}});

    const double total = gamma.total_mass();
    c.check("gamma_R total mass = card^2 / |B_R|", rel_err(total, card * card / vol) <= 1e-12,
            {{"total", total}, {"expected", card * card / vol}});
    c.check("gamma_R({0}) |B_R| = card", rel_err(gamma.mass_at(Point{0.0}) * vol, card) <= 1e-12,
            {{"mass_at_zero_times_volume", gamma.mass_at(Point{0.0}) * vol}, {"card", card}});
    bool sym = true;
    for (const auto& a : gamma.atoms()) {
        const double w = gamma.mass_at(-a.location);
        sym = sym && rel_err(w, a.weight) <= 1e-9;
    }
    c.check("gamma_R symmetric under negation", sym, {{"atoms", gamma.size()}});

    const std::vector<double> radii{500.0, 1000.0, 1500.0, 2000.0};
    AutocorrOptions opts;
    opts.diff_cutoff = 12.0;
    const auto zl = autocorrelation_limit(integer_lattice(2000.0), radii, opts);
    bool lim = std::abs(zl.measure.mass_at(Point{0.0}) - 1.0) <= 0.005;
    for (int m = 1; m <= 10; ++m) lim = lim && std::abs(zl.measure.mass_at(Point{static_cast<double>(m)}) - 1.0) <= 0.005;
    c.check("gamma of Z: atoms -> 1", lim && zl.converged,
            {{"mass_at_zero", zl.measure.mass_at(Point{0.0})}, {"converged", zl.converged}});

    const auto fib = cut_and_project(presets::fibonacci(2000.0));
    AutocorrOptions fo;
    fo.bin_tol = 0.01;
    fo.diff_cutoff = 30.0;
    const auto fl = autocorrelation_limit(fib, radii, fo);
    bool closed = true;
    for (const auto& a : fl.measure.atoms()) closed = closed && fl.measure.mass_at(-a.location) > 0.0;
    c.check("gamma of Fibonacci converges, atoms closed under negation", fl.converged && closed,
            {{"converged", fl.converged}, {"tracked_atoms", fl.tracked_atoms}, {"atoms", fl.measure.size()}});
}

// -------------------------------------------------------------- criterion 3

void estimator_agreement(Ctx& c) {
    const double R = 200.0;
    struct Pair {
        BumpShape psi_shape;
        double psi_rho;
        BumpShape f_shape;
        double f_rho, f_amp;
    };
    const std::vector<Pair> pairs{{BumpShape::triangle, 0.5, BumpShape::triangle, 0.4, 1.0},
                                  {BumpShape::cosine, 0.5, BumpShape::cosine, 0.4, 1.0},
                                  {BumpShape::triangle, 1.0, BumpShape::cosine, 1.5, 0.7},
                                  {BumpShape::cosine, 2.0, BumpShape::triangle, 2.5, 1.3},
                                  {BumpShape::triangle, 0.3, BumpShape::cosine, 3.0, 1.0}};
    const PointSet Z = integer_lattice(R + 10.0);
    const PointSet fib = cut_and_project(presets::fibonacci(R + 10.0));
    for (const auto& [label, S] : {std::pair<std::string, const PointSet*>{"Z", &Z}, {"fibonacci", &fib}}) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto& p = pairs[i];
            const auto psi = TestFunction::normalized(p.psi_shape, p.psi_rho, 1);
            const TestFunction f(p.f_shape, p.f_rho, p.f_amp);
            const double birk = birkhoff_average_hf(*S, psi, f, R, 40000);
            const auto gamma = finite_autocorrelation(*S, R, 0.0, p.f_rho + 0.01);
            const double direct = evaluate(gamma, f);
            c.check(label + " bump pair " + std::to_string(i + 1), std::abs(birk - direct) <= 0.02 * direct,
                    {{"birkhoff", birk}, {"gamma_R_f", direct}, {"R", R}});
        }
    }
}

// -------------------------------------------------------------- criterion 4

void pseudometric_suite(Ctx& c) {
    const double W = 300.0;
    const PointSet base = cut_and_project(presets::fibonacci(W));
    const double r = base.hardcore_radius();
    ProcessSampler proc;
    proc.kind = ProcessKind::randomized_model_set;
    proc.model = presets::fibonacci(W);
    proc.window_radius = W;
    proc.seed = split_seed(c.cfg.seed, 41);

    const double tol = 1e-3 * r;
    const std::vector<double> dbar_radii{100.0, 150.0, 200.0, 250.0};
    const double Rc = 100.0, tol_c = 0.01;
    const std::size_t quad_c = 400;
    const auto f = TestFunction(BumpShape::triangle, 0.95 * r / 5.0, 1.0);
    const std::vector<double> f_radii{100.0, 150.0, 200.0, 250.0};
    const std::size_t quad_f = 50000;
    const double cap = 1.0 / std::numbers::sqrt2;

    auto rng = c.rng(4);
    bool inv_ok = true;
    json inv = json::array();
    for (std::size_t i = 0; i < 10; ++i) {
        const PointSet other = sample(proc.for_sample(i));
        // t on the common lattice of both quadrature grids keeps nodes aligned
        const auto k = static_cast<long>(std::floor(rng.uniform() * 11.0)) - 5;
        const Point t{0.5 * static_cast<double>(k)};
        const double tn = std::abs(t[0]);
        const PointSet a = translate(base, t), b = translate(other, t);

        const double d0 = dbar(base, other, dbar_radii, tol), d1 = dbar(a, b, dbar_radii, tol);
        const auto c0 = dbar_c(base, other, Rc, quad_c, tol_c), c1 = dbar_c(a, b, Rc, quad_c, tol_c);
        const auto f0 = dbar_f(base, other, f, f_radii, quad_f), f1 = dbar_f(a, b, f, f_radii, quad_f);
        // budgets: the averaging ball moves by |t|, so a fraction |t|/R of the integrand changes
        const double bd = 2.0 * tol + 2.5 * std::max(d0, tol) * tn / dbar_radii[2];
        const double bc = 2.0 * tol_c + cap * tn / (0.75 * Rc);
        const double bf = 2.0 * f.amplitude * tn / f_radii[2];
        const bool ok = std::abs(d0 - d1) <= bd && std::abs(c0.value - c1.value) <= bc &&
                        std::abs(f0.value - f1.value) <= bf;
        inv_ok = inv_ok && ok;
        inv.push_back({{"t", tn * (k < 0 ? -1 : 1)},
                       {"dbar", {d0, d1, bd}},
                       {"dbar_c", {c0.value, c1.value, bc}},
                       {"dbar_f", {f0.value, f1.value, bf}}});
    }
    c.check("translation invariance on 10 pairs", inv_ok, {{"pairs", inv}});

    bool tri_ok = true;
    json tri = json::array();
    for (std::size_t i = 0; i < 25; ++i) {
        const PointSet A = sample(proc.for_sample(100 + 3 * i));
        const PointSet B = sample(proc.for_sample(101 + 3 * i));
        const PointSet C = sample(proc.for_sample(102 + 3 * i));
        const double ab = dbar(A, B, dbar_radii, tol), bc = dbar(B, C, dbar_radii, tol), ac = dbar(A, C, dbar_radii, tol);
        const double cab = dbar_c(A, B, Rc, quad_c, tol_c).value, cbc = dbar_c(B, C, Rc, quad_c, tol_c).value,
                     cac = dbar_c(A, C, Rc, quad_c, tol_c).value;
        const double fab = dbar_f(A, B, f, f_radii, quad_f).value, fbc = dbar_f(B, C, f, f_radii, quad_f).value,
                     fac = dbar_f(A, C, f, f_radii, quad_f).value;
        const bool ok = ac <= ab + bc + 2.0 * tol && cac <= cab + cbc + 2.0 * tol_c && fac <= fab + fbc + 2.0 * tol;
        tri_ok = tri_ok && ok;
        tri.push_back({{"dbar", {ab, bc, ac}}, {"dbar_c", {cab, cbc, cac}}, {"dbar_f", {fab, fbc, fac}}});
    }
    c.check("triangle inequality on 25 triples", tri_ok, {{"triples", tri}});

    const PointSet Z = integers(W);
    const auto g = TestFunction(BumpShape::triangle, 0.19, 1.0);
    std::vector<double> vd, vc, vf;
    for (double s = 0.2; s > 0.01; s /= 2.0) {
        const PointSet Zs = integers(W, s);
        vd.push_back(dbar(Z, Zs, dbar_radii, 1e-3));
        vc.push_back(dbar_c(Z, Zs, 50.0, 200, 0.005).value);
        vf.push_back(dbar_f(Z, Zs, g, f_radii, quad_f).value);
    }
    auto decreasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] < v[i - 1])) return false;
        return v.back() <= 0.05;
    };
    c.check("co-convergence on (Z, Z - s)", decreasing(vd) && decreasing(vc) && decreasing(vf),
            {{"shifts", {0.2, 0.1, 0.05, 0.025, 0.0125}}, {"dbar", vd}, {"dbar_c", vc}, {"dbar_f", vf}});
}

// -------------------------------------------------------------- criterion 5

struct CorpusResult {
    CriterionReport c3, c5, atom, bohr;
    bool peaks_dense = false;
    std::size_t peak_count = 0;
};

void criteria_coherence(Ctx& c) {
    const double W = 2000.0, eps = 0.05, sr = 100.0;
    const std::vector<double> radii{500.0, 1000.0, 1500.0, 2000.0};
    const std::vector<double> c5_radii{500.0, 1000.0, 1500.0};

    const PointSet Z = integer_lattice(W);
    const PointSet fib = cut_and_project(presets::fibonacci(W));
    const double min_gap = min_pair_distance(fib.points());
    const PointSet def = cut_and_project(presets::deformed_fibonacci(W, 0.05 * min_gap, 0.1, 0.3));
    ProcessSampler mp;
    mp.kind = ProcessKind::matern_II;
    mp.intensity = 2.0;
    mp.hardcore = 0.4;
    mp.window_radius = W;
    mp.seed = split_seed(c.cfg.seed, 5);
    const PointSet mat = sample(mp);

    const std::vector<std::pair<std::string, const PointSet*>> corpus{
        {"Z", &Z}, {"fibonacci", &fib}, {"deformed_fibonacci", &def}, {"matern", &mat}};
    json artifact = json::object();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& [label, S] = corpus[i];
        AutocorrOptions ao;
        ao.bin_tol = 0.05;
        ao.diff_cutoff = 115.0;
        ao.track_floor = 0.5;
        const auto est = autocorrelation_limit(*S, radii, ao);
        CriterionOptions co;
        co.search_radius = sr;
        co.gap_bound = 2.0 * mean_nn_spacing(*S) / eps;
        const auto cands = default_candidates(est.measure, sr, 0.5, 0.1);

        CorpusResult res;
        res.c3 = criterion_gamma_concentration(est, 0.05, eps, co);
        res.atom = criterion_atom_concentration(est.measure, eps, co);
        res.c5 = criterion_almost_periods(*S, eps, cands, c5_radii, co);
        const KGrid probe{Point{-10.0}, Point{10.0}, Point{0.02}};
        res.bohr = bohr_test_mu_conv_f(est.measure, TestFunction(BumpShape::cosine, 0.3, 1.0), eps, cands, probe, co);

        const std::vector<double> pr{250.0, 500.0, 750.0, 1000.0};
        const double K = 3.2;
        const KGrid kg{Point{-K}, Point{K}, Point{1.0 / 4000.0}};
        const auto peaks = detect_bragg_peaks(*S, pr, kg, default_bragg_threshold(*S, pr, c.cfg.theta_factor));
        std::vector<Point> locs;
        for (const auto& p : peaks) locs.push_back(p.location);
        double peak_gap = std::numeric_limits<double>::infinity();
        if (!locs.empty()) peak_gap = relative_density_gap(locs, K);
        res.peak_count = peaks.size();
        // stable peaks spanning the k-range with gaps below a quarter of it
        res.peaks_dense = peak_gap <= K / 4.0;

        const bool expect_pass = label != "matern";
        const Verdict want = expect_pass ? Verdict::pass : Verdict::fail;
        const bool agree = res.c3.verdict == res.c5.verdict && res.c5.verdict == res.bohr.verdict;
        c.check(label + ": C3, C5, BOHR agree and " + verdict_name(want), agree && res.c3.verdict == want,
                {{"C3", verdict_name(res.c3.verdict)},
                 {"C5", verdict_name(res.c5.verdict)},
                 {"BOHR", verdict_name(res.bohr.verdict)},
                 {"gaps", {real_json(res.c3.gap), real_json(res.c5.gap), real_json(res.bohr.gap)}},
                 {"gap_bound", co.gap_bound},
                 {"gamma_converged", est.converged}});
        c.check(label + ": ATOM pass implies C3 pass",
                res.atom.verdict != Verdict::pass || res.c3.verdict == Verdict::pass,
                {{"ATOM", verdict_name(res.atom.verdict)}, {"C3", verdict_name(res.c3.verdict)}});
        c.check(label + ": Bragg peak summary agrees", res.peaks_dense == (res.c3.verdict == Verdict::pass),
                {{"stable_peaks", res.peak_count}, {"peak_gap", real_json(peak_gap)}, {"k_range", K}});
        artifact[label] = {{"C3", to_json(res.c3)},
                           {"C5", to_json(res.c5)},
                           {"ATOM", to_json(res.atom)},
                           {"BOHR", to_json(res.bohr)},
                           {"bragg_peaks", res.peak_count}};
    }
    c.out.artifacts["coherence_corpus"] = artifact;
}

// -------------------------------------------------------------- criterion 6

ProcessSampler lattice_process(std::uint64_t seed, double window) {
    ProcessSampler p;
    p.kind = ProcessKind::randomized_lattice;
    p.basis = {Point{1.0}};
    p.window_radius = window;
    p.seed = seed;
    return p;
}

ProcessSampler matern_process(std::uint64_t seed, double window) {
    ProcessSampler p;
    p.kind = ProcessKind::matern_II;
    p.intensity = 2.0;
    p.hardcore = 0.4;
    p.window_radius = window;
    p.seed = seed;
    return p;
}

void palm_autocorr(Ctx& c) {
    const std::vector<double> radii{200.0};
    {
        const auto p = lattice_process(split_seed(c.cfg.seed, 6), 210.0);
        const auto A = RegionSpec::ball(Point{1.0}, 0.25);
        const auto rep = verify_acpalm(p, A, radii, 20, 20);
        bool ok = true;
        for (double g : rep.per_seed_gamma) ok = ok && std::abs(g - 1.0) <= 0.05;
        c.check("randomized lattice: |gamma_R(A) - 1| <= 0.05 on 20 seeds", ok,
                {{"per_seed_gamma", rep.per_seed_gamma}, {"palm_estimate", rep.palm.value}});
        c.out.artifacts["palm_autocorr_lattice"] = to_json(rep);
    }
    {
        const auto p = matern_process(split_seed(c.cfg.seed, 7), 210.0);
        const auto A = RegionSpec::ball(Point{0.5}, 0.1);
        const auto rep = verify_acpalm(p, A, radii, 20, 200);
        const double se = std::hypot(rep.gamma_stderr, rep.palm.std_error);
        c.check("matern: mean gamma_R(A) within 3 stderr of the Palm estimate",
                std::abs(rep.mean_gamma - rep.palm.value) <= 3.0 * se,
                {{"mean_gamma", rep.mean_gamma}, {"palm", rep.palm.value}, {"combined_stderr", se}});
        c.out.artifacts["palm_autocorr_matern"] = to_json(rep);
    }
}

// -------------------------------------------------------------- criterion 7

void event_periods(Ctx& c) {
    const double R = 0.2, eps = 0.1, sr = 25.0;
    {
        ProcessSampler p;
        p.kind = ProcessKind::randomized_model_set;
        p.model = presets::fibonacci(1.0);
        p.window_radius = sr + R + 0.5;
        p.seed = split_seed(c.cfg.seed, 8);
        // candidates: difference vectors of an independent realisation
        ProcessSampler wide = p.for_sample(1u << 20);
        wide.window_radius = 3.0 * sr;
        const PointSet chi0 = sample(wide);
        const auto gamma = finite_autocorrelation(chi0, wide.window_radius, 0.01, sr);
        std::vector<Point> cands;
        for (const auto& a : gamma.atoms())
            if (a.location.norm() <= sr) cands.push_back(a.location);
        const double mean_spacing = 2.0 * wide.window_radius / static_cast<double>(chi0.size());
        CriterionOptions co;
        co.search_radius = sr;
        co.gap_bound = 10.0 * mean_spacing;
        const auto rep = event_almost_periods(p, R, eps, cands, 500, co);
        c.check("randomized Fibonacci: accepted gap <= 10 mean spacings",
                rep.criterion.verdict == Verdict::pass,
                {{"gap", real_json(rep.criterion.gap)},
                 {"gap_bound", co.gap_bound},
                 {"accepted", rep.criterion.almost_period_set.size()},
                 {"candidates", cands.size()}});
        c.out.artifacts["event_periods_fibonacci"] = to_json(rep.criterion);
    }
    {
        const auto p = lattice_process(split_seed(c.cfg.seed, 9), 11.0);
        std::vector<Point> cands;
        for (int i = -40; i <= 40; ++i) cands.push_back(Point{0.25 * i});
        CriterionOptions co;
        co.search_radius = 10.0;
        co.gap_bound = 10.0;
        const auto rep = event_almost_periods(p, R, eps, cands, 500, co);
        bool exact = true;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            const bool integer = std::abs(cands[i][0] - std::round(cands[i][0])) < 1e-12;
            const bool accepted = std::binary_search(rep.criterion.almost_period_set.begin(),
                                                     rep.criterion.almost_period_set.end(), cands[i]);
            exact = exact && accepted == integer && (!integer || rep.probability[i] == 0.0);
        }
        c.check("randomized lattice: exactly the integer candidates, with probability 0",
                exact && rep.criterion.verdict == Verdict::pass,
                {{"accepted", rep.criterion.almost_period_set.size()}, {"gap", real_json(rep.criterion.gap)}});
    }
}

// -------------------------------------------------------------- criterion 8

void palm_b(Ctx& c) {
    const auto ball2 = RegionSpec::ball(Point{0.0}, 2.0);
    struct Case {
        std::string label;
        ProcessSampler p;
        RegionSpec A;
        std::size_t n;
    };
    const std::vector<Case> cases{
        {"randomized lattice", lattice_process(split_seed(c.cfg.seed, 10), 5.0), RegionSpec::ball(Point{1.0}, 0.25), 100},
        {"matern", matern_process(split_seed(c.cfg.seed, 11), 5.0), RegionSpec::ball(Point{0.5}, 0.1), 400}};
    for (const auto& k : cases) {
        const auto cube = palm_intensity(k.p, k.A, k.n);
        const auto ball = palm_intensity(k.p, k.A, k.n, ball2);
        const double se = std::hypot(cube.std_error, ball.std_error);
        c.check(k.label + ": J(A) agrees for B = unit cube and B = ball(0, 2)",
                std::abs(cube.value - ball.value) <= 3.0 * se,
                {{"cube", to_json(cube)}, {"ball", to_json(ball)}, {"combined_stderr", se}});
    }
}

// -------------------------------------------------------------- criterion 9

void fibonacci_structure(Ctx& c) {
    const PointSet fib = cut_and_project(presets::fibonacci(2000.0));
    std::vector<double> gaps;
    for (std::size_t i = 1; i < fib.size(); ++i) gaps.push_back(fib[i][0] - fib[i - 1][0]);
    std::sort(gaps.begin(), gaps.end());
    const double S = gaps.front(), L = gaps.back();
    bool two = true;
    for (double g : gaps) two = two && (std::abs(g - S) <= 1e-9 * S || std::abs(g - L) <= 1e-9 * L);
    const double ratio = L / S;
    c.check("two gap values with ratio tau", two && std::abs(ratio - kTau) <= 1e-9 * kTau,
            {{"short", S}, {"long", L}, {"ratio", ratio}, {"tau", kTau}});

    const PointSet flat = cut_and_project(presets::deformed_fibonacci(2000.0, 0.0, 0.1, 0.3));
    c.check("amplitude-0 deformation reproduces the undeformed set bit-exactly",
            flat.points().size() == fib.points().size() &&
                std::equal(flat.points().begin(), flat.points().end(), fib.points().begin()),
            {{"points", fib.size()}});
}

// -------------------------------------------------------------- criterion 10

void determinism(Ctx& c) {
    const std::size_t threads = thread_count();
    auto run = [&](std::size_t n) {
        set_thread_count(n);
        std::string blob = pointset_csv(cut_and_project(presets::fibonacci(500.0)));
        blob += pointset_csv(sample(matern_process(split_seed(c.cfg.seed, 12), 500.0)));
        const auto p = matern_process(split_seed(c.cfg.seed, 13), 5.0);
        blob += to_json(palm_intensity(p, RegionSpec::ball(Point{0.5}, 0.1), 64)).dump();
        const auto gamma = finite_autocorrelation(sample(p.for_sample(3)), 5.0, 0.0);
        std::ostringstream os;
        write_measure_csv(os, gamma);
        blob += os.str();
        return blob;
    };
    const std::string a = run(1), b = run(1), d = run(std::max<std::size_t>(threads, 2));
    set_thread_count(threads);
    c.check("repeated runs are byte-identical", a == b, {{"bytes", a.size()}});
    c.check("results do not depend on the thread count", a == d, {{"bytes", a.size()}});
}

const std::vector<std::pair<std::string, std::function<void(Ctx&)>>>& registry() {
    static const std::vector<std::pair<std::string, std::function<void(Ctx&)>>> r{
        {"lattice-diffraction", lattice_diffraction},
        {"autocorr", autocorr_checks},
        {"estimator-agreement", estimator_agreement},
        {"pseudometrics", pseudometric_suite},
        {"criteria-coherence", criteria_coherence},
        {"palm-autocorr", palm_autocorr},
        {"event-periods", event_periods},
        {"palm-b", palm_b},
        {"fibonacci", fibonacci_structure},
        {"determinism", determinism},
    };
    return r;
}

} // namespace

VerifyConfig verify_config_from_json(const json& j) {
    reject_unknown_keys(j, {"seed", "theta_factor", "only"}, "verify config");
    VerifyConfig cfg;
    try {
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("theta_factor")) cfg.theta_factor = j.at("theta_factor").get<double>();
        if (j.contains("only")) {
            const auto& o = j.at("only");
            if (o.is_string()) cfg.only = {o.get<std::string>()};
            else cfg.only = o.get<std::vector<std::string>>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("verify config: ") + e.what());
    }
    if (!(cfg.theta_factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta_factor must be positive");
    return cfg;
}

bool VerifyOutcome::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& r) { return r.passed; });
}

bool VerifyOutcome::tag_passed(const std::string& tag) const {
    bool any = false;
    for (const auto& r : checks) {
        if (r.tag != tag) continue;
        any = true;
        if (!r.passed) return false;
    }
    return any;
}

const std::vector<std::string>& verify_tags() {
    static const std::vector<std::string> tags = [] {
        std::vector<std::string> t;
        for (const auto& [name, fn] : registry()) t.push_back(name);
        return t;
    }();
    return tags;
}

VerifyOutcome run_verify(const VerifyConfig& cfg) {
    for (const auto& t : cfg.only)
        if (std::find(verify_tags().begin(), verify_tags().end(), t) == verify_tags().end())
            throw Error(ErrorCode::InvalidArgument, "unknown verify tag '" + t + "'");
    VerifyOutcome out;
    for (const auto& [tag, fn] : registry()) {
        if (!cfg.only.empty() && std::find(cfg.only.begin(), cfg.only.end(), tag) == cfg.only.end()) continue;
        Ctx ctx{cfg, out, tag};
        fn(ctx);
    }
    return out;
}

json summary_json(const VerifyConfig& cfg, const VerifyOutcome& out) {
    json checks = json::array();
    for (const auto& r : out.checks)
        checks.push_back({{"tag", r.tag}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    json tags = json::object();
    for (const auto& t : verify_tags()) {
        const bool ran = std::any_of(out.checks.begin(), out.checks.end(), [&](const CheckResult& r) { return r.tag == t; });
        if (ran) tags[t] = out.tag_passed(t) ? "pass" : "fail";
    }
    return {{"seed", cfg.seed},
            {"theta_factor", cfg.theta_factor},
            {"tags", tags},
            {"passed", out.passed()},
            {"checks", checks}};
}

} // namespace apk
