#include "wvmag/sensitivity.hpp"

#include "wvmag/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace wvmag {

namespace {

constexpr double kTable1Betas[] = {0.007, 0.010, 0.013};

// Slopes below this fraction of the beta-independent scale
// (4 pi W^2 / lambda0) |V| L are rounding residue, e.g. at beta = pi/4 where
// cos(2 beta) is a few ulps rather than zero.
constexpr double kZeroSensitivity = 1e-12;

double sensitivity_scale(const ExperimentSetup& setup) {
    const double w = setup.probe.w_nm;
    return 4.0 * std::numbers::pi * w * w / setup.probe.lambda0_nm *
           std::abs(setup.medium.verdet_rad_per_T_m) * interaction_length(setup.geometry);
}

std::string describe_field(double field_T) {
    std::ostringstream os;
    os << "at B = " << field_T << " T: ";
    return os.str();
}

double synthetic_shift(const ExperimentSetup& setup, double beta, double phi,
                       std::size_t point_index) {
    SpectrumGrid initial = sample_probe(setup.probe, setup.coupling, setup.synthesis_grid);
    SpectrumGrid final_spectrum =
        synthesize_final_spectrum(setup.probe, setup.coupling, beta, phi, setup.synthesis_grid,
                                  setup.weak_value_options);
    if (setup.spectrometer) {
        SpectrometerModel detector = *setup.spectrometer;
        detector.seed = derive_seed(setup.spectrometer->seed, 2 * point_index);
        initial = apply_spectrometer(initial, detector);
        detector.seed = derive_seed(setup.spectrometer->seed, 2 * point_index + 1);
        final_spectrum = apply_spectrometer(final_spectrum, detector);
    }
    const GaussianFit initial_fit = fit_gaussian(initial, setup.fit_options);
    const GaussianFit final_fit = fit_gaussian(final_spectrum, setup.fit_options);
    return measured_shift(initial_fit, final_fit);
}

}  // namespace

ExperimentSetup ExperimentSetup::reference() {
    ExperimentSetup setup;
    setup.probe = GaussianProbe{1.0, 833.0, 50.0};
    setup.coupling = CouplingModel::for_probe(setup.probe);
    setup.geometry = FiberCoil{1000, 1.0};
    setup.medium = MagnetoOpticMedium{32.0};
    setup.budget = PhaseBudget{};
    setup.readout = Readout::Analytic;
    setup.synthesis_grid = WavelengthGrid::around(setup.probe, 5.0, 4001);
    return setup;
}

void ExperimentSetup::validate() const {
    probe.validate();
    coupling.validate();
    wvmag::validate(geometry);
    medium.validate();
    if (!budget.calibrated()) {
        throw InvalidArgument("phase budget is not calibrated (phi_sbc + phi_opd != 0)");
    }
    if (spectrometer) spectrometer->validate();
    if (readout == Readout::Synthetic) synthesis_grid.validate();
}

double ExperimentSetup::phase_at(double field_T) const {
    return total_phase(budget.with_faraday_phase(faraday_phase(geometry, medium, field_T)));
}

std::vector<double> FieldSweep::values() const {
    if (steps < 1) throw InvalidArgument("field sweep needs at least one step");
    if (!std::isfinite(b_min_T) || !std::isfinite(b_max_T)) {
        throw InvalidArgument("field sweep bounds must be finite");
    }
    if (steps == 1) return {b_min_T};
    if (!(b_max_T > b_min_T)) throw InvalidArgument("field sweep needs b_max_T > b_min_T");
    std::vector<double> out(steps);
    const double step = (b_max_T - b_min_T) / static_cast<double>(steps - 1);
    for (std::size_t i = 0; i < steps; ++i) out[i] = b_min_T + static_cast<double>(i) * step;
    out.back() = b_max_T;
    return out;
}

void DesignConstraints::validate() const {
    if (!std::isfinite(i0_max) || i0_max <= 0.0) {
        throw InvalidArgument("i0_max must be > 0");
    }
    if (!std::isfinite(target_field_accuracy_T) || target_field_accuracy_T <= 0.0) {
        throw InvalidArgument("target_field_accuracy_T must be > 0");
    }
    if (!std::isfinite(intensity_floor) || intensity_floor < 0.0) {
        throw InvalidArgument("intensity_floor must be >= 0");
    }
    if (!std::isfinite(wavelength_resolution_nm) || wavelength_resolution_nm < 0.0) {
        throw InvalidArgument("wavelength_resolution_nm must be >= 0");
    }
}

std::vector<double> BetaSearch::values() const {
    validate();
    std::vector<double> out;
    const auto count =
        static_cast<std::size_t>(std::floor((beta_max - beta_min) / step + 1e-9)) + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(beta_min + static_cast<double>(i) * step);
    }
    return out;
}

void BetaSearch::validate() const {
    constexpr double quarter_pi = std::numbers::pi / 4.0;
    if (!(beta_min > 0.0) || !(beta_max < quarter_pi) || !(beta_min <= beta_max)) {
        throw InvalidArgument("beta search interval must lie within (0, pi/4)");
    }
    if (!std::isfinite(step) || step <= 0.0) throw InvalidArgument("beta step must be > 0");
}

double shift_at(const ExperimentSetup& setup, double beta, double field_T,
                std::size_t point_index) {
    const double phi = setup.phase_at(field_T);
    if (setup.readout == Readout::Analytic) {
        return predicted_shift(setup.probe, weak_value(beta, phi, setup.weak_value_options));
    }
    return synthetic_shift(setup, beta, phi, point_index);
}

ShiftCurve shift_curve(const ExperimentSetup& setup, double beta,
                       std::span<const double> fields_T) {
    if (fields_T.empty()) throw InvalidArgument("shift_curve needs at least one field value");
    for (std::size_t i = 1; i < fields_T.size(); ++i) {
        if (!(fields_T[i] > fields_T[i - 1])) {
            throw InvalidArgument("field values must be strictly increasing");
        }
    }
    setup.validate();

    ShiftCurve curve;
    curve.beta = beta;
    curve.points.reserve(fields_T.size());
    for (std::size_t i = 0; i < fields_T.size(); ++i) {
        const double field = fields_T[i];
        try {
            curve.points.push_back({field, shift_at(setup, beta, field, i)});
        } catch (const OrthogonalSelection& e) {
            throw OrthogonalSelection(describe_field(field) + e.what());
        } catch (const EmptyOverlap& e) {
            throw EmptyOverlap(describe_field(field) + e.what());
        } catch (const InsufficientSignal& e) {
            throw InsufficientSignal(describe_field(field) + e.what());
        } catch (const ComputationError& e) {
            throw ComputationError(describe_field(field) + e.what());
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(describe_field(field) + e.what());
        }
    }
    return curve;
}

SensitivityResult sensitivity(const ShiftCurve& curve) {
    const std::size_t n = curve.points.size();
    if (n < 2) throw InvalidArgument("sensitivity needs at least two points");

    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& p : curve.points) {
        mean_x += p.field_T;
        mean_y += std::abs(p.shift_nm);
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : curve.points) {
        const double dx = p.field_T - mean_x;
        const double dy = std::abs(p.shift_nm) - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw InvalidArgument("sensitivity needs distinct field values");

    SensitivityResult result;
    result.beta = curve.beta;
    result.k_nm_per_T = std::abs(sxy / sxx);
    result.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    result.postselection_probability_at_zero_field = postselection_probability(curve.beta, 0.0);
    return result;
}

SensitivityResult sensitivity_at(const ExperimentSetup& setup, double beta,
                                 const FieldSweep& sweep) {
    const std::vector<double> fields = sweep.values();
    SensitivityResult result = sensitivity(shift_curve(setup, beta, fields));
    if (result.k_nm_per_T <= kZeroSensitivity * sensitivity_scale(setup)) {
        result.k_nm_per_T = 0.0;
    }
    return result;
}

std::vector<SensitivityResult> reproduce_table1(const ExperimentSetup& setup,
                                                std::span<const double> betas,
                                                const FieldSweep& sweep) {
    std::vector<SensitivityResult> rows;
    rows.reserve(betas.size());
    for (double beta : betas) rows.push_back(sensitivity_at(setup, beta, sweep));
    return rows;
}

std::vector<SensitivityResult> reproduce_table1(const ExperimentSetup& setup) {
    return reproduce_table1(setup, kTable1Betas);
}

bool postselected_peak_detectable(const DesignConstraints& constraints, double beta) {
    return constraints.i0_max * postselection_probability(beta, 0.0) >=
           constraints.intensity_floor;
}

bool shift_resolvable(const DesignConstraints& constraints, double k_nm_per_T) {
    return k_nm_per_T * constraints.target_field_accuracy_T >=
           constraints.wavelength_resolution_nm;
}

DesignRecommendation recommend_design(const DesignConstraints& constraints,
                                      const ExperimentSetup& setup, const BetaSearch& search,
                                      const FieldSweep& sweep) {
    constraints.validate();
    setup.validate();
    const std::vector<double> betas = search.values();

    std::vector<double> k(betas.size());
    std::vector<bool> feasible(betas.size());
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        k[i] = sensitivity_at(setup, betas[i], sweep).k_nm_per_T;
        feasible[i] = postselected_peak_detectable(constraints, betas[i]) &&
                      shift_resolvable(constraints, k[i]);
        if (feasible[i] && (!best || k[i] > k[*best])) best = i;
    }

    DesignRecommendation rec;
    if (!best) return rec;

    std::size_t lo = *best, hi = *best;
    while (lo > 0 && feasible[lo - 1]) --lo;
    while (hi + 1 < betas.size() && feasible[hi + 1]) ++hi;

    rec.feasible_beta = BetaInterval{betas[lo], betas[hi]};
    rec.chosen_beta = betas[lo];
    rec.expected_k_nm_per_T = k[lo];
    rec.expected_probability = postselection_probability(betas[lo], 0.0);
    return rec;
}

double minimum_detectable_field(const ExperimentSetup& setup, double beta,
                                const DesignConstraints& constraints, const FieldSweep& sweep) {
    constraints.validate();
    const double k = sensitivity_at(setup, beta, sweep).k_nm_per_T;
    if (k <= 0.0) {
        throw NotDetectable("sensitivity is zero at beta = " + std::to_string(beta));
    }
    return constraints.wavelength_resolution_nm / k;
}

}  // namespace wvmag
