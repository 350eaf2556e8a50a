#include "apk/cli.hpp"
#include "apk/io.hpp"

#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace apk;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "apk");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("apk_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& file) {
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void put(const std::string& file, const std::string& text) { std::ofstream(file) << text; }

std::size_t data_rows(const std::string& csv) {
    std::size_t n = 0;
    std::istringstream is(csv);
    for (std::string line; std::getline(is, line);) n += !line.empty() && line[0] != '#';
    return n;
}

} // namespace

TEST_CASE("cli generate") {
    const auto r = run({"generate", "--preset", "lattice-z", "--radius", "10"});
    CHECK(r.code == exit_ok);
    CHECK(data_rows(r.out) == 21);

    TempDir dir;
    const auto w = run({"--out", dir.path.string(), "generate", "--preset", "fibonacci", "--radius", "50", "--name", "fib"});
    REQUIRE(w.code == exit_ok);
    const json side = json::parse(slurp(dir / "fib.json"));
    CHECK(side.at("irrational") == true);
    CHECK(side.at("points") == data_rows(slurp(dir / "fib.csv")));

    CHECK(run({"generate", "--preset", "nonsense"}).code == exit_config_error);
    CHECK(run({"generate", "--bogus-flag"}).code == exit_config_error);
    CHECK(run({}).code == exit_config_error);
    CHECK(run({"--help"}).code == exit_ok);
}

TEST_CASE("cli config documents") {
    TempDir dir;
    put(dir / "bad.json", "{ \"radius\": ");
    CHECK(run({"--config", dir / "bad.json", "generate"}).code == exit_config_error);
    put(dir / "typo.json", R"({"radiuss": 3})");
    const auto t = run({"--config", dir / "typo.json", "generate"});
    CHECK(t.code == exit_config_error);
    CHECK(t.err.find("radiuss") != std::string::npos);
    put(dir / "ok.json", R"({"lattice": {"basis": [[2.0]], "window_radius": 10}})");
    const auto ok = run({"--config", dir / "ok.json", "generate"});
    CHECK(ok.code == exit_ok);
    CHECK(data_rows(ok.out) == 11);
}

TEST_CASE("cli metric") {
    TempDir dir;
    put(dir / "z.csv", run({"generate", "--preset", "lattice-z", "--radius", "300"}).out);
    std::ostringstream shifted;
    shifted << "# dim=1\n# r=1\n# window=299\n";
    for (int m = -298; m <= 299; ++m) shifted << format_real(m - 0.1) << "\n";
    put(dir / "zs.csv", shifted.str());

    for (const char* which : {"d", "dbar", "dbarc", "dbarf", "dtilde"}) {
        const auto same = run({"metric", dir / "z.csv", dir / "z.csv", "--which", which});
        REQUIRE(same.code == exit_ok);
        CHECK(json::parse(same.out).at("value") == 0.0);
    }
    const auto db = run({"metric", dir / "z.csv", dir / "zs.csv", "--which", "dbar"});
    CHECK(std::abs(json::parse(db.out).at("value").get<double>() - 0.1) <= 1e-3);
    const auto dt = run({"metric", dir / "z.csv", dir / "zs.csv", "--which", "dtilde"});
    CHECK(std::abs(json::parse(dt.out).at("value").get<double>() - 2.0) <= 0.02);

    put(dir / "half.csv", "# dim=1\n# r=0.5\n# window=299\n0\n0.5\n");
    CHECK(run({"metric", dir / "z.csv", dir / "half.csv"}).code == exit_window_error);
    put(dir / "close.csv", "# dim=1\n# r=1\n# window=10\n0\n0.5\n");
    CHECK(run({"metric", dir / "z.csv", dir / "close.csv"}).code == exit_not_uniformly_discrete);
    CHECK(run({"metric", dir / "z.csv", dir / "missing.csv"}).code == exit_config_error);
}

TEST_CASE("cli autocorr and diffract") {
    TempDir dir;
    put(dir / "z.csv", run({"generate", "--preset", "lattice-z", "--radius", "400"}).out);
    const auto ac = run({"autocorr", dir / "z.csv", "--radius", "400", "--cutoff", "5"});
    REQUIRE(ac.code == exit_ok);
    CHECK(data_rows(ac.out) == 11);

    const auto d = run({"diffract", dir / "z.csv", "--criterion", "C3"});
    REQUIRE(d.code == exit_ok);
    const json peaks = json::parse(d.out);
    REQUIRE(peaks.at("peaks").size() > 0);
    for (const auto& p : peaks.at("peaks")) {
        const double k = p.at("location").at(0).get<double>();
        CHECK(std::abs(k - std::round(k)) <= 0.01);
    }
    CHECK(peaks.at("criteria").at(0).at("verdict") == "pass");

    put(dir / "empty.csv", "# dim=1\n# r=1\n# window=100\n");
    const auto e = run({"diffract", dir / "empty.csv"});
    CHECK(e.code == exit_ok);
    CHECK(json::parse(e.out).at("peaks").empty());
}

TEST_CASE("cli palm and appd") {
    const auto p = run({"palm", "--preset", "randomized-lattice", "--samples", "20"});
    REQUIRE(p.code == exit_ok);
    CHECK(json::parse(p.out).contains("value"));

    TempDir dir;
    put(dir / "proc.json", R"({"process": {"kind": "randomized_lattice", "window_radius": 5}, "samples": 50})");
    const auto a = run({"--config", dir / "proc.json", "appd"});
    REQUIRE(a.code == exit_ok);
    CHECK(json::parse(a.out).at("criterion").at("verdict") == "pass");
}

TEST_CASE("cli verify") {
    const auto fail = run({"--only", "lattice-diffraction", "verify", "--theta-factor", "10"});
    CHECK(fail.code == exit_verify_failed);
    CHECK(fail.err.find("FAIL lattice-diffraction") != std::string::npos);

    const auto ok = run({"--only", "palm-autocorr", "verify"});
    CHECK(ok.code == exit_ok);
    const json summary = json::parse(ok.out);
    CHECK(summary.at("tags").size() == 1);
    CHECK(summary.at("tags").at("palm-autocorr") == "pass");
    CHECK(summary.at("passed") == true);

    TempDir a, b;
    REQUIRE(run({"--out", a.path.string(), "--only", "palm-autocorr", "verify"}).code == exit_ok);
    REQUIRE(run({"--out", b.path.string(), "--only", "palm-autocorr", "--threads", "2", "verify"}).code == exit_ok);
    for (const auto& entry : fs::directory_iterator(a.path)) {
        const auto name = entry.path().filename().string();
        CHECK_MESSAGE(slurp(a / name) == slurp(b / name), name);
    }
}
