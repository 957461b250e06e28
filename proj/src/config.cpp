#include "wvmag/config.hpp"

#include "wvmag/error.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace wvmag {

ConfigError::ConfigError(std::string key_path, const std::string& message)
    : InvalidArgument(key_path.empty() ? message : key_path + ": " + message),
      key_path_(std::move(key_path)) {}

namespace {

// Thin reader over one TOML table that remembers which keys were consumed so
// leftovers (typos) can be reported by full key path.
class Section {
public:
    Section(const toml::table* table, std::string prefix)
        : table_(table), prefix_(std::move(prefix)) {}

    bool present() const { return table_ != nullptr; }

    std::string path(std::string_view key) const {
        return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
    }

    std::optional<double> number(std::string_view key) {
        const toml::node* node = lookup(key);
        if (!node) return std::nullopt;
        if (auto v = node->value_exact<double>()) return *v;
        if (auto v = node->value_exact<std::int64_t>()) return static_cast<double>(*v);
        throw ConfigError(path(key), "expected a number");
    }

    double number_or(std::string_view key, double fallback) {
        return number(key).value_or(fallback);
    }

    std::optional<std::int64_t> integer(std::string_view key) {
        const toml::node* node = lookup(key);
        if (!node) return std::nullopt;
        if (auto v = node->value_exact<std::int64_t>()) return *v;
        throw ConfigError(path(key), "expected an integer");
    }

    std::optional<std::string> text(std::string_view key) {
        const toml::node* node = lookup(key);
        if (!node) return std::nullopt;
        if (auto v = node->value_exact<std::string>()) return *v;
        throw ConfigError(path(key), "expected a string");
    }

    std::optional<std::vector<double>> numbers(std::string_view key) {
        const toml::node* node = lookup(key);
        if (!node) return std::nullopt;
        const toml::array* arr = node->as_array();
        if (!arr) throw ConfigError(path(key), "expected an array of numbers");
        std::vector<double> out;
        for (const toml::node& item : *arr) {
            if (auto v = item.value_exact<double>()) {
                out.push_back(*v);
            } else if (auto i = item.value_exact<std::int64_t>()) {
                out.push_back(static_cast<double>(*i));
            } else {
                throw ConfigError(path(key), "expected an array of numbers");
            }
        }
        return out;
    }

    void reject_unknown() const {
        if (!table_) return;
        for (const auto& [key, node] : *table_) {
            if (!used_.contains(std::string(key.str()))) {
                throw ConfigError(path(key.str()), "unknown key");
            }
        }
    }

private:
    const toml::node* lookup(std::string_view key) {
        if (!table_) return nullptr;
        used_.insert(std::string(key));
        return table_->get(key);
    }

    const toml::table* table_;
    std::string prefix_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& key, const std::string& message) {
    if (!ok) throw ConfigError(key, message);
}

double positive(Section& s, std::string_view key, double fallback) {
    const double v = s.number_or(key, fallback);
    require(std::isfinite(v) && v > 0.0, s.path(key), "must be finite and > 0");
    return v;
}

double non_negative(Section& s, std::string_view key, double fallback) {
    const double v = s.number_or(key, fallback);
    require(std::isfinite(v) && v >= 0.0, s.path(key), "must be finite and >= 0");
    return v;
}

double finite(Section& s, std::string_view key, double fallback) {
    const double v = s.number_or(key, fallback);
    require(std::isfinite(v), s.path(key), "must be finite");
    return v;
}

int count(Section& s, std::string_view key, int fallback) {
    const std::int64_t v = s.integer(key).value_or(fallback);
    require(v >= 1 && v <= std::numeric_limits<int>::max(), s.path(key), "must be >= 1");
    return static_cast<int>(v);
}

// Re-runs a module validator, attributing failures to `key`.
void check(const std::string& key, const std::function<void()>& validate) {
    try {
        validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(key, e.what());
    }
}

Section section(const toml::table& root, std::string_view name, std::set<std::string>& seen) {
    seen.insert(std::string(name));
    const toml::node* node = root.get(name);
    if (node && !node->is_table()) throw ConfigError(std::string(name), "expected a table");
    return Section(node ? node->as_table() : nullptr, std::string(name));
}

void read_probe(Section& s, RunConfig& cfg) {
    GaussianProbe& probe = cfg.setup.probe;
    probe.i0 = positive(s, "i0", probe.i0);
    probe.lambda0_nm = positive(s, "lambda0_nm", probe.lambda0_nm);
    probe.w_nm = positive(s, "w_nm", probe.w_nm);

    WidthConvention convention = WidthConvention::Variance;
    if (auto c = s.text("convention")) {
        if (*c == "variance") {
            convention = WidthConvention::Variance;
        } else if (*c == "squared-width") {
            convention = WidthConvention::SquaredWidth;
        } else {
            throw ConfigError(s.path("convention"), "expected \"variance\" or \"squared-width\"");
        }
    }
    MomentumMapping mapping = MomentumMapping::Linearized;
    if (auto m = s.text("momentum_mapping")) {
        if (*m == "linearized") {
            mapping = MomentumMapping::Linearized;
        } else if (*m == "reciprocal") {
            mapping = MomentumMapping::Reciprocal;
        } else {
            throw ConfigError(s.path("momentum_mapping"),
                              "expected \"linearized\" or \"reciprocal\"");
        }
    }
    cfg.setup.coupling = CouplingModel::for_probe(probe, convention, mapping);
    cfg.setup.synthesis_grid = WavelengthGrid::around(probe, 5.0, 4001);
}

void read_geometry(Section& s, RunConfig& cfg) {
    if (!s.present()) return;
    const std::string kind = s.text("kind").value_or("fiber-coil");
    if (kind == "single-pass") {
        cfg.setup.geometry = SinglePass{positive(s, "length_m", 1.0)};
    } else if (kind == "multi-reflection") {
        const int passes = count(s, "passes", 1);
        cfg.setup.geometry = MultiReflection{passes, positive(s, "length_m", 1.0)};
    } else if (kind == "fiber-coil") {
        const int turns = count(s, "turns", 1000);
        cfg.setup.geometry = FiberCoil{turns, positive(s, "turn_length_m", 1.0)};
    } else {
        throw ConfigError(s.path("kind"),
                          "expected \"single-pass\", \"multi-reflection\" or \"fiber-coil\"");
    }
}

NoiseModel read_noise(Section& s) {
    const std::string kind = s.text("noise").value_or("none");
    if (kind == "none") return NoNoise{};
    if (kind == "shot") {
        const double sigma = non_negative(s, "noise_sigma", 0.0);
        return ShotNoise{sigma, positive(s, "noise_reference_intensity", 1.0)};
    }
    if (kind == "gaussian") return GaussianNoise{non_negative(s, "noise_sigma", 0.0)};
    throw ConfigError(s.path("noise"), "expected \"none\", \"shot\" or \"gaussian\"");
}

void read_spectrometer(Section& s, RunConfig& cfg) {
    if (!s.present()) return;
    const WavelengthGrid& grid = cfg.setup.synthesis_grid;
    SpectrometerModel model;
    model.lambda_min_nm = positive(s, "lambda_min_nm", grid.min_nm);
    model.lambda_max_nm = positive(s, "lambda_max_nm", grid.max_nm);
    require(model.lambda_min_nm < model.lambda_max_nm, s.path("lambda_max_nm"),
            "must exceed lambda_min_nm");
    model.bin_width_nm = positive(s, "bin_width_nm", 1.0);
    model.intensity_floor = non_negative(s, "intensity_floor", 0.0);
    model.saturation = s.number_or("saturation", std::numeric_limits<double>::infinity());
    require(model.saturation > model.intensity_floor, s.path("saturation"),
            "must exceed intensity_floor");
    model.noise = read_noise(s);
    check(s.path("noise"), [&] { model.validate(); });
    cfg.setup.spectrometer = model;
}

void read_design(Section& s, RunConfig& cfg) {
    if (!s.present()) return;
    DesignConstraints c;
    c.i0_max = positive(s, "i0_max", cfg.setup.probe.i0);
    c.intensity_floor = non_negative(s, "intensity_floor", 0.0);
    c.wavelength_resolution_nm = non_negative(s, "wavelength_resolution_nm", 0.0);
    c.target_field_accuracy_T = positive(s, "target_field_accuracy_T", 1e-9);
    cfg.design = c;

    BetaSearch& search = cfg.beta_search;
    search.beta_min = finite(s, "beta_min_rad", search.beta_min);
    search.beta_max = finite(s, "beta_max_rad", search.beta_max);
    search.step = positive(s, "beta_step_rad", search.step);
    check(s.path("beta_min_rad"), [&] { search.validate(); });
}

}  // namespace

RunConfig parse_config(std::string_view toml_text, std::string_view source_name) {
    toml::table root;
    try {
        root = toml::parse(toml_text, source_name);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << e.description() << " (" << e.source().begin << ")";
        throw ConfigError("", os.str());
    }

    RunConfig cfg;
    std::set<std::string> seen;
    Section top(&root, "");

    if (auto seed = top.integer("seed")) {
        require(*seed >= 0, "seed", "must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(*seed);
    }
    if (auto readout = top.text("readout")) {
        if (*readout == "analytic") {
            cfg.setup.readout = Readout::Analytic;
        } else if (*readout == "synthetic") {
            cfg.setup.readout = Readout::Synthetic;
        } else {
            throw ConfigError("readout", "expected \"analytic\" or \"synthetic\"");
        }
    }

    Section probe = section(root, "probe", seen);
    read_probe(probe, cfg);

    Section coupling = section(root, "coupling", seen);
    if (auto g = coupling.number("g_nm")) {
        require(std::isfinite(*g) && *g > 0.0, "coupling.g_nm", "must be finite and > 0");
        cfg.setup.coupling.g_nm = *g;
    }

    Section geometry = section(root, "geometry", seen);
    read_geometry(geometry, cfg);

    Section medium = section(root, "medium", seen);
    cfg.setup.medium.verdet_rad_per_T_m =
        medium.number_or("verdet_rad_per_T_m", cfg.setup.medium.verdet_rad_per_T_m);
    check("medium.verdet_rad_per_T_m", [&] { cfg.setup.medium.validate(); });

    Section budget = section(root, "budget", seen);
    PhaseBudget raw{finite(budget, "phi_sbc_rad", 0.0), finite(budget, "phi_opd_rad", 0.0), 0.0};
    cfg.setup.budget = calibrate_sbc(raw);

    Section grid = section(root, "grid", seen);
    WavelengthGrid& g = cfg.setup.synthesis_grid;
    g.min_nm = positive(grid, "lambda_min_nm", g.min_nm);
    g.max_nm = positive(grid, "lambda_max_nm", g.max_nm);
    if (auto points = grid.integer("points")) {
        require(*points >= static_cast<std::int64_t>(kMinProbePoints), "grid.points",
                "must be >= " + std::to_string(kMinProbePoints));
        g.points = static_cast<std::size_t>(*points);
    }
    check("grid", [&] { g.validate(); });

    Section spectrometer = section(root, "spectrometer", seen);
    read_spectrometer(spectrometer, cfg);

    Section sweep = section(root, "sweep", seen);
    if (auto betas = sweep.numbers("betas_rad")) {
        require(!betas->empty(), "sweep.betas_rad", "must list at least one angle");
        for (double b : *betas) require(std::isfinite(b), "sweep.betas_rad", "must be finite");
        cfg.betas = *betas;
    }
    cfg.sweep.b_min_T = finite(sweep, "b_min_T", cfg.sweep.b_min_T);
    cfg.sweep.b_max_T = finite(sweep, "b_max_T", cfg.sweep.b_max_T);
    if (auto steps = sweep.integer("steps")) {
        require(*steps >= 1, "sweep.steps", "must be >= 1");
        cfg.sweep.steps = static_cast<std::size_t>(*steps);
    }
    check("sweep.b_max_T", [&] { (void)cfg.sweep.values(); });

    Section spectrum = section(root, "spectrum", seen);
    cfg.spectrum.beta = finite(spectrum, "beta_rad", cfg.spectrum.beta);
    cfg.spectrum.field_T = finite(spectrum, "field_T", cfg.spectrum.field_T);

    Section design = section(root, "design", seen);
    read_design(design, cfg);

    Section output = section(root, "output", seen);
    if (auto dir = output.text("dir")) cfg.output_dir = *dir;

    for (Section* s : {&probe, &coupling, &geometry, &medium, &budget, &grid, &spectrometer,
                       &sweep, &spectrum, &design, &output}) {
        s->reject_unknown();
    }
    for (const auto& [key, node] : root) {
        const std::string name(key.str());
        if (!seen.contains(name) && name != "seed" && name != "readout") {
            throw ConfigError(name, "unknown key");
        }
    }

    if (cfg.setup.spectrometer) cfg.setup.spectrometer->seed = cfg.seed;
    check("", [&] { cfg.setup.validate(); });
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

}  // namespace wvmag
