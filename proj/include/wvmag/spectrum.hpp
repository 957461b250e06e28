#pragma once

// Probe spectra before and after postselection.

#include "wvmag/polarization.hpp"

#include <cstddef>
#include <vector>

namespace wvmag {

// How the probe width parameter W enters the intensity Gaussian.
enum class WidthConvention {
    Variance,      // exp(-(l - l0)^2 / (2 W^2)): W is the standard deviation
    SquaredWidth,  // exp(-(l - l0)^2 / W^2)
};

// How the probe momentum p is evaluated on a wavelength grid.
enum class MomentumMapping {
    // p(l) = p0 - (2 pi / l0^2) (l - l0): the tangent of 2 pi / l at l0.
    // Under this map a Gaussian probe stays Gaussian after postselection and
    // its center moves by exactly the analytic shift.
    Linearized,
    // p(l) = 2 pi / l. Agrees with the analytic shift to first order only.
    Reciprocal,
};

struct GaussianProbe {
    double i0 = 1.0;            // peak intensity
    double lambda0_nm = 833.0;  // center wavelength
    double w_nm = 50.0;         // width parameter W (see WidthConvention)

    void validate() const;
};

struct CouplingModel {
    double g_nm = 833.0;                     // coupling constant
    double p0_rad_per_nm = 0.0;              // 2 pi / lambda0
    WidthConvention convention = WidthConvention::Variance;
    MomentumMapping mapping = MomentumMapping::Linearized;

    // g = lambda0 (i.e. 2 pi / p0), p0 = 2 pi / lambda0.
    static CouplingModel for_probe(const GaussianProbe& probe,
                                   WidthConvention convention = WidthConvention::Variance,
                                   MomentumMapping mapping = MomentumMapping::Linearized);

    // g as used in the postselection exponent. The squared-width convention
    // halves the intensity variance, so g is doubled to keep the center shift
    // equal to the analytic prediction.
    double effective_g_nm() const;

    // p at wavelength lambda, per `mapping`. Needs lambda0 for the tangent.
    double momentum(double lambda_nm, double lambda0_nm) const;

    void validate() const;
};

// Uniform sampling of [min_nm, max_nm] with `points` samples, ends included.
struct WavelengthGrid {
    double min_nm = 0.0;
    double max_nm = 0.0;
    std::size_t points = 0;

    // lambda0 +- half_widths * w, `points` samples.
    static WavelengthGrid around(const GaussianProbe& probe, double half_widths,
                                 std::size_t points);

    double spacing() const { return (max_nm - min_nm) / static_cast<double>(points - 1); }
    double at(std::size_t i) const;
    void validate() const;
};

struct SpectrumGrid {
    std::vector<double> wavelengths_nm;  // strictly increasing, uniform
    std::vector<double> intensities;     // >= 0

    std::size_t size() const { return wavelengths_nm.size(); }
    double spacing() const;
    double peak() const;
    // Trapezoidal integral over wavelength.
    double integrated() const;
    void validate() const;
};

constexpr std::size_t kMinProbePoints = 32;

// I0 * Gaussian(lambda) per probe.convention.
double probe_intensity(const GaussianProbe& probe, const CouplingModel& model,
                       double lambda_nm);

// Samples the initial probe. Throws InvalidArgument for fewer than 32 points
// or a degenerate range.
SpectrumGrid sample_probe(const GaussianProbe& probe, const CouplingModel& model,
                          const WavelengthGrid& grid);

// True when the grid spans at least lambda0 +- 4 W.
bool covers_probe(const WavelengthGrid& grid, const GaussianProbe& probe);

// |<f|i>|^2 * exp(2 p(lambda) g Im A_w) * Gamma_i(lambda).
// Throws OrthogonalSelection if the weak value is undefined and
// ComputationError if the intensities overflow.
SpectrumGrid synthesize_final_spectrum(const GaussianProbe& probe, const CouplingModel& model,
                                       double beta, double phi, const WavelengthGrid& grid,
                                       const WeakValueOptions& options = {});

// delta lambda0 = -(4 pi W^2 / lambda0) Im A_w, in nm.
double predicted_shift(const GaussianProbe& probe, const WeakValue& weak_value);

}  // namespace wvmag
