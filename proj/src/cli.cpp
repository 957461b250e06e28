#include "wvmag/cli.hpp"

#include "wvmag/config.hpp"
#include "wvmag/error.hpp"
#include "wvmag/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace wvmag::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Format { Csv, Json };

struct GlobalOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
};

class FileError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

RunConfig resolve_config(const GlobalOptions& g) {
    RunConfig cfg = g.config_path ? load_config(*g.config_path) : RunConfig{};
    if (g.out_dir) cfg.output_dir = *g.out_dir;
    if (g.seed) {
        cfg.seed = *g.seed;
        if (cfg.setup.spectrometer) cfg.setup.spectrometer->seed = *g.seed;
    }
    return cfg;
}

// Files default to CSV, reports printed to stdout default to JSON.
Format file_format(const GlobalOptions& g) {
    return g.format == "json" ? Format::Json : Format::Csv;
}
Format report_format(const GlobalOptions& g) {
    return g.format == "csv" ? Format::Csv : Format::Json;
}

std::ofstream open_output(const fs::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw FileError("cannot create directory " + path.parent_path().string());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FileError("cannot open " + path.string() + " for writing");
    return os;
}

void finish(std::ofstream& os, const fs::path& path) {
    os.flush();
    if (!os) throw FileError("failed writing " + path.string());
}

void write_spectrum_file(const fs::path& stem, const SpectrumGrid& spectrum, Format format) {
    const fs::path path = stem.string() + (format == Format::Json ? ".json" : ".csv");
    std::ofstream os = open_output(path);
    if (format == Format::Json) {
        os << json(spectrum).dump(2) << '\n';
    } else {
        write_spectrum_csv(os, spectrum);
    }
    finish(os, path);
}

void write_json_file(const fs::path& path, const json& doc) {
    std::ofstream os = open_output(path);
    os << doc.dump(2) << '\n';
    finish(os, path);
}

GaussianFit converged_fit(const SpectrumGrid& spectrum, const FitOptions& options,
                          const char* which) {
    GaussianFit fit = fit_gaussian(spectrum, options);
    if (!fit.converged) {
        throw ComputationError(std::string(which) + " spectrum fit did not converge");
    }
    return fit;
}

int cmd_weak_value(double beta, double phi, Format format, std::ostream& out) {
    const WeakValue aw = weak_value(beta, phi);
    const json report = weak_value_report(aw);
    if (format == Format::Csv) {
        out << "beta_rad,phi_rad,re,im,p_postselect\n"
            << format_number(beta) << ',' << format_number(phi) << ','
            << format_number(aw.real()) << ',' << format_number(aw.imag()) << ','
            << format_number(report["p_postselect"].get<double>()) << '\n';
    } else {
        out << report.dump(2) << '\n';
    }
    return kSuccess;
}

int cmd_spectrum(const RunConfig& cfg, Format format, std::ostream& out, std::ostream& err) {
    const ExperimentSetup& setup = cfg.setup;
    setup.validate();
    const double beta = cfg.spectrum.beta;
    const double field = cfg.spectrum.field_T;
    const double phi = setup.phase_at(field);

    if (!covers_probe(setup.synthesis_grid, setup.probe)) {
        err << "warning: synthesis grid covers less than lambda0 +- 4 W\n";
    }

    SpectrumGrid initial = sample_probe(setup.probe, setup.coupling, setup.synthesis_grid);
    SpectrumGrid final_spectrum = synthesize_final_spectrum(
        setup.probe, setup.coupling, beta, phi, setup.synthesis_grid, setup.weak_value_options);
    if (setup.spectrometer) {
        SpectrometerModel detector = *setup.spectrometer;
        detector.seed = derive_seed(setup.spectrometer->seed, 0);
        initial = apply_spectrometer(initial, detector);
        detector.seed = derive_seed(setup.spectrometer->seed, 1);
        final_spectrum = apply_spectrometer(final_spectrum, detector);
    }

    const GaussianFit initial_fit = converged_fit(initial, setup.fit_options, "initial");
    const GaussianFit final_fit = converged_fit(final_spectrum, setup.fit_options, "final");
    const WeakValue aw = weak_value(beta, phi, setup.weak_value_options);

    json report{
        {"beta_rad", beta},
        {"field_T", field},
        {"phi_rad", phi},
        {"weak_value", weak_value_report(aw)},
        {"initial_fit", initial_fit},
        {"final_fit", final_fit},
        {"measured_shift_nm", measured_shift(initial_fit, final_fit)},
        {"predicted_shift_nm", predicted_shift(setup.probe, aw)},
        {"peak_ratio", final_spectrum.peak() / initial.peak()},
    };

    write_spectrum_file(cfg.output_dir / "initial_spectrum", initial, format);
    write_spectrum_file(cfg.output_dir / "final_spectrum", final_spectrum, format);
    write_json_file(cfg.output_dir / "fit_report.json", report);
    out << report.dump(2) << '\n';
    return kSuccess;
}

int run_sweep(const RunConfig& cfg, const std::vector<double>& betas, const FieldSweep& sweep,
              const std::string& summary_name, Format format, std::ostream& out,
              std::ostream& err) {
    if (betas.empty()) throw ConfigError("sweep.betas_rad", "must list at least one angle");
    const std::vector<double> fields = sweep.values();

    std::vector<SensitivityResult> rows;
    for (double beta : betas) {
        const ShiftCurve curve = shift_curve(cfg.setup, beta, fields);
        const fs::path stem = cfg.output_dir / ("curve_beta_" + format_number(beta));
        if (format == Format::Json) {
            write_json_file(stem.string() + ".json", json(curve));
        } else {
            const fs::path path = stem.string() + ".csv";
            std::ofstream os = open_output(path);
            write_shift_curve_csv(os, curve);
            finish(os, path);
        }
        if (curve.points.size() >= 2) rows.push_back(sensitivity(curve));
    }

    if (rows.empty()) {
        err << "note: a single field value gives no slope; sensitivity summary skipped\n";
        return kSuccess;
    }
    if (format == Format::Json) {
        write_json_file(cfg.output_dir / (summary_name + ".json"), json(rows));
    } else {
        const fs::path path = cfg.output_dir / (summary_name + ".csv");
        std::ofstream os = open_output(path);
        write_sensitivity_csv(os, rows);
        finish(os, path);
    }
    write_sensitivity_csv(out, rows);
    return kSuccess;
}

struct DesignFlags {
    std::optional<double> i0_max, floor, resolution, accuracy;
    std::optional<double> beta_min, beta_max, beta_step;
};

int cmd_design(const RunConfig& cfg, const DesignFlags& flags, std::ostream& out) {
    const bool any_flag = flags.i0_max || flags.floor || flags.resolution || flags.accuracy;
    if (!cfg.design && !any_flag) {
        throw ConfigError("design", "no design constraints: add a [design] table or flags");
    }
    DesignConstraints c = cfg.design.value_or(DesignConstraints{cfg.setup.probe.i0});
    if (flags.i0_max) c.i0_max = *flags.i0_max;
    if (flags.floor) c.intensity_floor = *flags.floor;
    if (flags.resolution) c.wavelength_resolution_nm = *flags.resolution;
    if (flags.accuracy) c.target_field_accuracy_T = *flags.accuracy;

    BetaSearch search = cfg.beta_search;
    if (flags.beta_min) search.beta_min = *flags.beta_min;
    if (flags.beta_max) search.beta_max = *flags.beta_max;
    if (flags.beta_step) search.step = *flags.beta_step;

    const DesignRecommendation rec = recommend_design(c, cfg.setup, search, cfg.sweep);
    out << json(rec).dump(2) << '\n';
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weak-value amplified Faraday magnetometry simulator", "wvmag"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--config", g.config_path, "TOML run configuration");
    app.add_option("--out", g.out_dir, "output directory (overrides [output].dir)");
    app.add_option("--seed", g.seed, "noise seed (overrides config seed)");
    app.add_option("--format", g.format, "file format for spectra and tables")
        ->check(CLI::IsMember({"csv", "json"}));

    double wv_beta = 0.0, wv_phi = 0.0;
    auto* wv = app.add_subcommand("weak-value", "print the weak value and postselection probability");
    wv->add_option("--beta", wv_beta, "pre-selection angle [rad]")->required();
    wv->add_option("--phi", wv_phi, "total H/V phase [rad]")->required();

    std::optional<double> sp_beta, sp_field;
    auto* sp = app.add_subcommand("spectrum", "write initial/final spectra and a fit report");
    sp->add_option("--beta", sp_beta, "pre-selection angle [rad]");
    sp->add_option("--field", sp_field, "magnetic field [T]");

    std::vector<double> sw_betas;
    auto* sw = app.add_subcommand("sweep", "shift curves and sensitivities for each beta");
    sw->add_option("--betas", sw_betas, "pre-selection angles [rad] (overrides config)")
        ->delimiter(',');

    auto* t1 = app.add_subcommand("table1", "sensitivity table for beta = 0.007, 0.010, 0.013");

    DesignFlags df;
    auto* ds = app.add_subcommand("design", "recommend a pre-selection angle");
    ds->add_option("--i0-max", df.i0_max, "maximum incident peak intensity");
    ds->add_option("--floor", df.floor, "spectrometer intensity floor");
    ds->add_option("--resolution", df.resolution, "wavelength resolution [nm]");
    ds->add_option("--accuracy", df.accuracy, "target field accuracy [T]");
    ds->add_option("--beta-min", df.beta_min, "search lower bound [rad]");
    ds->add_option("--beta-max", df.beta_max, "search upper bound [rad]");
    ds->add_option("--beta-step", df.beta_step, "search step [rad]");

    for (auto* sub : {wv, sp, sw, t1, ds}) sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    const Format format = file_format(g);
    try {
        if (*wv) return cmd_weak_value(wv_beta, wv_phi, report_format(g), out);

        RunConfig cfg = resolve_config(g);
        if (*sp) {
            if (sp_beta) cfg.spectrum.beta = *sp_beta;
            if (sp_field) cfg.spectrum.field_T = *sp_field;
            return cmd_spectrum(cfg, format, out, err);
        }
        if (*sw) {
            if (sw->count("--betas") > 0) cfg.betas = sw_betas;
            return run_sweep(cfg, cfg.betas, cfg.sweep, "sensitivity", format, out, err);
        }
        if (*t1) {
            return run_sweep(cfg, {0.007, 0.010, 0.013}, FieldSweep{}, "table1", format, out, err);
        }
        return cmd_design(cfg, df, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ComputationError& e) {
        err << "error: " << e.what() << '\n';
        return kComputationError;
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kComputationError;
    }
}

}  // namespace wvmag::cli
