#include "wvmag/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = wvmag::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("wvmag_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path_ / name) << text;
        return (path_ / name).string();
    }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t line_count(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

const std::string kConfig = WVMAG_DEFAULT_CONFIG;

}  // namespace

TEST_CASE("weak-value") {
    SUBCASE("zero phase") {
        const auto r = run({"weak-value", "--beta", "0.01", "--phi", "0"});
        REQUIRE(r.code == 0);
        const json j = json::parse(r.out);
        CHECK(j["im"].get<double>() == 0.0);
        CHECK(j["re"].get<double>() == doctest::Approx(99.9967).epsilon(1e-6));
        CHECK(j["p_postselect"].get<double>() == doctest::Approx(1.0e-4).epsilon(1e-4));
    }
    SUBCASE("amplified phase") {
        const auto r = run({"weak-value", "--beta", "0.01", "--phi", "3.2e-5"});
        REQUIRE(r.code == 0);
        CHECK(json::parse(r.out)["im"].get<double>() == doctest::Approx(0.31995).epsilon(1e-4));
    }
    SUBCASE("null line") {
        const auto r = run({"weak-value", "--beta", "0.7853981633974483", "--phi", "0.2"});
        REQUIRE(r.code == 0);
        CHECK(std::abs(json::parse(r.out)["im"].get<double>()) < 1e-12);
    }
    SUBCASE("csv format") {
        const auto r = run({"--format", "csv", "weak-value", "--beta", "0.01", "--phi", "0"});
        REQUIRE(r.code == 0);
        CHECK(r.out.rfind("beta_rad,phi_rad,re,im,p_postselect\n", 0) == 0);
    }
    SUBCASE("orthogonal selection is a computation error") {
        const auto r = run({"weak-value", "--beta", "0", "--phi", "0"});
        CHECK(r.code == 1);
        CHECK(r.err.find("orthogonal") != std::string::npos);
    }
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"weak-value", "--beta", "0.01"}).code == 2);
    CHECK(run({"weak-value", "--beta", "abc", "--phi", "0"}).code == 2);
    CHECK(run({"--format", "xml", "weak-value", "--beta", "0.01", "--phi", "0"}).code == 2);
    CHECK(run({"--config", "/nonexistent/x.toml", "table1"}).code == 2);
    CHECK(run({"--help"}).code == 0);

    TempDir dir;
    const auto cfg = dir.write("bad.toml", "[probe]\nw_nm = -5\n");
    const auto r = run({"--config", cfg, "--out", dir.str(), "table1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("probe.w_nm") != std::string::npos);
}

TEST_CASE("spectrum") {
    TempDir dir;
    auto spectrum = [&](const std::string& field, const std::string& sub) {
        const fs::path out = dir.path() / sub;
        const auto r = run({"--config", kConfig, "--out", out.string(), "spectrum", "--beta",
                            "0.010", "--field", field});
        REQUIRE(r.code == 0);
        CHECK(fs::exists(out / "initial_spectrum.csv"));
        CHECK(fs::exists(out / "final_spectrum.csv"));
        const json report = json::parse(slurp(out / "fit_report.json"));
        CHECK(report == json::parse(r.out));
        return report;
    };

    const json one_nT = spectrum("1e-9", "a");
    CHECK(one_nT["measured_shift_nm"].get<double>() == doctest::Approx(-12.06).epsilon(0.005));
    CHECK(one_nT["predicted_shift_nm"].get<double>() == doctest::Approx(-12.06).epsilon(0.005));
    CHECK(one_nT["final_fit"]["converged"] == true);

    const json zero = spectrum("0", "b");
    CHECK(std::abs(zero["measured_shift_nm"].get<double>()) < 1e-6);
    CHECK(zero["peak_ratio"].get<double>() == doctest::Approx(1.0e-4).epsilon(1e-4));

    const json half = spectrum("5e-10", "c");
    CHECK(half["measured_shift_nm"].get<double>() == doctest::Approx(-6.03).epsilon(0.005));

    SUBCASE("json spectra") {
        const fs::path out = dir.path() / "d";
        REQUIRE(run({"--config", kConfig, "--out", out.string(), "--format", "json", "spectrum"})
                    .code == 0);
        CHECK(fs::exists(out / "initial_spectrum.json"));
        CHECK(fs::exists(out / "final_spectrum.json"));
    }
}

TEST_CASE("sweep and table1") {
    TempDir dir;
    const auto r = run({"--config", kConfig, "--out", dir.str(), "table1"});
    REQUIRE(r.code == 0);
    for (const char* name : {"curve_beta_0.007.csv", "curve_beta_0.01.csv",
                             "curve_beta_0.013.csv", "table1.csv"}) {
        CAPTURE(name);
        CHECK(fs::exists(dir.path() / name));
    }
    const std::string table = slurp(dir.path() / "table1.csv");
    CHECK(table.rfind("beta_rad,k_nm_per_T,r2,p_postselect\n", 0) == 0);
    CHECK(line_count(table) == 4);
    CHECK(line_count(slurp(dir.path() / "curve_beta_0.007.csv")) == 22);

    std::istringstream rows(table);
    std::string line;
    std::getline(rows, line);
    const double paper_k[] = {2.46e10, 1.20e10, 0.71e10};
    for (double k_paper : paper_k) {
        REQUIRE(std::getline(rows, line));
        const auto first = line.find(',');
        const double k = std::stod(line.substr(first + 1));
        CHECK(std::abs(k - k_paper) <= 0.015 * k_paper);
    }

    SUBCASE("sweep with betas override") {
        const fs::path out = dir.path() / "sweep";
        const auto s = run({"--config", kConfig, "--out", out.string(), "--format", "json",
                            "sweep", "--betas", "0.02,0.03"});
        REQUIRE(s.code == 0);
        CHECK(fs::exists(out / "curve_beta_0.02.json"));
        const json summary = json::parse(slurp(out / "sensitivity.json"));
        REQUIRE(summary.size() == 2);
        CHECK(summary[0]["beta_rad"].get<double>() == 0.02);
        CHECK(summary[1]["beta_rad"].get<double>() == 0.03);
    }

    SUBCASE("single beta and single field") {
        const auto cfg = dir.write("one.toml",
                                   "[sweep]\nbetas_rad = [0.01]\nb_min_T = 1e-9\nsteps = 1\n");
        const fs::path out = dir.path() / "one";
        const auto s = run({"--config", cfg, "--out", out.string(), "sweep"});
        REQUIRE(s.code == 0);
        CHECK(line_count(slurp(out / "curve_beta_0.01.csv")) == 2);
    }

    SUBCASE("empty beta list") {
        const auto cfg = dir.write("empty.toml", "[sweep]\nbetas_rad = []\n");
        const auto s = run({"--config", cfg, "--out", dir.str(), "sweep"});
        CHECK(s.code == 2);
        CHECK(s.err.find("sweep.betas_rad") != std::string::npos);
    }
}

TEST_CASE("design") {
    SUBCASE("reference constraints") {
        const auto r = run({"--config", kConfig, "design"});
        REQUIRE(r.code == 0);
        const json j = json::parse(r.out);
        CHECK(j["feasible"] == true);
        CHECK(j["chosen_beta"].get<double>() == doctest::Approx(3.17e-3).epsilon(0.01));
        CHECK(j["feasible_beta"]["hi"].get<double>() == doctest::Approx(1.10e-2).epsilon(0.01));
    }
    SUBCASE("infeasible is still success") {
        const auto r = run({"--config", kConfig, "design", "--resolution", "1e6", "--beta-step",
                            "1e-3"});
        REQUIRE(r.code == 0);
        const json j = json::parse(r.out);
        CHECK(j["feasible"] == false);
        CHECK(j["chosen_beta"].is_null());
    }
    SUBCASE("vacuous constraints") {
        const auto r = run({"design", "--floor", "0", "--resolution", "0", "--beta-step", "1e-3"});
        REQUIRE(r.code == 0);
        const json j = json::parse(r.out);
        CHECK(j["chosen_beta"].get<double>() == 1e-3);
        CHECK(j["feasible_beta"]["hi"].get<double>() == doctest::Approx(0.05));
    }
    SUBCASE("no constraints at all") {
        CHECK(run({"design"}).code == 2);
    }
}

TEST_CASE("determinism") {
    TempDir dir;
    const auto cfg = dir.write("noisy.toml", R"(
seed = 5
[spectrometer]
lambda_min_nm = 583
lambda_max_nm = 1083
bin_width_nm = 1.0
noise = "shot"
noise_sigma = 1e-3
)");
    const fs::path a = dir.path() / "a";
    const fs::path b = dir.path() / "b";
    for (const auto& out : {a, b}) {
        REQUIRE(run({"--config", cfg, "--out", out.string(), "spectrum"}).code == 0);
        REQUIRE(run({"--config", cfg, "--out", out.string(), "table1"}).code == 0);
    }
    for (const char* name :
         {"initial_spectrum.csv", "final_spectrum.csv", "fit_report.json", "table1.csv"}) {
        CAPTURE(name);
        CHECK(slurp(a / name) == slurp(b / name));
    }

    const fs::path c = dir.path() / "c";
    REQUIRE(run({"--config", cfg, "--out", c.string(), "--seed", "6", "spectrum"}).code == 0);
    CHECK(slurp(a / "final_spectrum.csv") != slurp(c / "final_spectrum.csv"));
}
