#pragma once

// Field sweeps, sensitivity extraction and pre-selection design search.

#include "wvmag/faraday.hpp"
#include "wvmag/gaussian_fit.hpp"
#include "wvmag/polarization.hpp"
#include "wvmag/spectrometer.hpp"
#include "wvmag/spectrum.hpp"

#include <optional>
#include <span>
#include <vector>

namespace wvmag {

enum class Readout {
    Analytic,   // closed-form center shift
    Synthetic,  // synthesize both spectra, fit Gaussians, subtract centers
};

struct ExperimentSetup {
    GaussianProbe probe;
    CouplingModel coupling;
    FaradayGeometry geometry = FiberCoil{1000, 1.0};
    MagnetoOpticMedium medium;
    PhaseBudget budget;  // must be calibrated
    std::optional<SpectrometerModel> spectrometer;
    Readout readout = Readout::Analytic;
    WavelengthGrid synthesis_grid;
    WeakValueOptions weak_value_options;
    FitOptions fit_options;

    // 833 nm / 50 nm Gaussian probe, 1000 m of fiber at V = 32 rad/(T m),
    // zero static phase, analytic readout, 4001 synthesis points over
    // lambda0 +- 5 W.
    static ExperimentSetup reference();

    void validate() const;
    // Total H/V phase with the Faraday phase of `field_T` inserted.
    double phase_at(double field_T) const;
};

struct FieldSweep {
    double b_min_T = 0.0;
    double b_max_T = 2e-9;
    std::size_t steps = 21;

    std::vector<double> values() const;
};

struct ShiftPoint {
    double field_T = 0.0;
    double shift_nm = 0.0;
};

struct ShiftCurve {
    double beta = 0.0;
    std::vector<ShiftPoint> points;
};

struct SensitivityResult {
    double beta = 0.0;
    double k_nm_per_T = 0.0;  // |slope| of |shift| against B
    double r2 = 0.0;
    double postselection_probability_at_zero_field = 0.0;
};

struct DesignConstraints {
    double i0_max = 1.0;
    double intensity_floor = 0.0;
    double wavelength_resolution_nm = 0.0;
    double target_field_accuracy_T = 1e-9;

    void validate() const;
};

struct BetaSearch {
    double beta_min = 1e-3;
    double beta_max = 0.05;
    double step = 1e-5;

    std::vector<double> values() const;
    void validate() const;
};

struct BetaInterval {
    double lo = 0.0;
    double hi = 0.0;
};

struct DesignRecommendation {
    std::optional<BetaInterval> feasible_beta;
    std::optional<double> chosen_beta;
    double expected_k_nm_per_T = 0.0;
    double expected_probability = 0.0;

    bool feasible() const { return feasible_beta.has_value(); }
};

// Wavelength shift in nm at one field value. `point_index` selects the noise
// stream when the setup has a noisy spectrometer.
double shift_at(const ExperimentSetup& setup, double beta, double field_T,
                std::size_t point_index = 0);

// Throws InvalidArgument for an empty or non-increasing field list; errors
// from individual points are rethrown with the offending field in the message.
ShiftCurve shift_curve(const ExperimentSetup& setup, double beta, std::span<const double> fields_T);

// Ordinary least squares of |shift| against B. Needs at least two points.
SensitivityResult sensitivity(const ShiftCurve& curve);

// k at `beta` over the given sweep.
SensitivityResult sensitivity_at(const ExperimentSetup& setup, double beta,
                                 const FieldSweep& sweep = {});

std::vector<SensitivityResult> reproduce_table1(const ExperimentSetup& setup,
                                                std::span<const double> betas,
                                                const FieldSweep& sweep = {});
std::vector<SensitivityResult> reproduce_table1(const ExperimentSetup& setup);

// The two feasibility tests used by recommend_design.
bool postselected_peak_detectable(const DesignConstraints& constraints, double beta);
bool shift_resolvable(const DesignConstraints& constraints, double k_nm_per_T);

// Grid search over the pre-selection angle. A beta is feasible when the
// attenuated peak i0_max sin^2(beta) clears the intensity floor and
// k(beta) * target accuracy clears the wavelength resolution. Returns the
// contiguous feasible run containing the highest-k feasible beta; the
// recommendation is the low end of that run. No feasible beta gives an empty
// recommendation.
DesignRecommendation recommend_design(const DesignConstraints& constraints,
                                      const ExperimentSetup& setup, const BetaSearch& search,
                                      const FieldSweep& sweep = {});

// wavelength_resolution / k(beta). Throws NotDetectable when k == 0.
double minimum_detectable_field(const ExperimentSetup& setup, double beta,
                                const DesignConstraints& constraints,
                                const FieldSweep& sweep = {});

}  // namespace wvmag
