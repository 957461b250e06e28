#include "wvmag/spectrum.hpp"

#include "wvmag/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace wvmag {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Largest exponent we hand to std::exp without folding in the Gaussian.
constexpr double kSafeExponent = 600.0;

void require_positive(double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw InvalidArgument(std::string(name) + " must be finite and > 0");
    }
}

// Exponent of the unit-peak probe Gaussian at lambda.
double log_profile(const GaussianProbe& probe, WidthConvention convention, double lambda_nm) {
    const double x = lambda_nm - probe.lambda0_nm;
    const double w2 = probe.w_nm * probe.w_nm;
    return convention == WidthConvention::Variance ? -x * x / (2.0 * w2) : -x * x / w2;
}

}  // namespace

void GaussianProbe::validate() const {
    require_positive(i0, "probe.i0");
    require_positive(lambda0_nm, "probe.lambda0_nm");
    require_positive(w_nm, "probe.w_nm");
}

CouplingModel CouplingModel::for_probe(const GaussianProbe& probe, WidthConvention convention,
                                       MomentumMapping mapping) {
    probe.validate();
    CouplingModel model;
    model.g_nm = probe.lambda0_nm;
    model.p0_rad_per_nm = kTwoPi / probe.lambda0_nm;
    model.convention = convention;
    model.mapping = mapping;
    return model;
}

double CouplingModel::effective_g_nm() const {
    return convention == WidthConvention::SquaredWidth ? 2.0 * g_nm : g_nm;
}

double CouplingModel::momentum(double lambda_nm, double lambda0_nm) const {
    if (mapping == MomentumMapping::Reciprocal) return kTwoPi / lambda_nm;
    // d(2 pi / l)/dl at lambda0 is -2 pi / lambda0^2 = -p0 / lambda0.
    return p0_rad_per_nm - p0_rad_per_nm / lambda0_nm * (lambda_nm - lambda0_nm);
}

void CouplingModel::validate() const {
    require_positive(g_nm, "coupling.g_nm");
    require_positive(p0_rad_per_nm, "coupling.p0_rad_per_nm");
}

WavelengthGrid WavelengthGrid::around(const GaussianProbe& probe, double half_widths,
                                      std::size_t points) {
    return {probe.lambda0_nm - half_widths * probe.w_nm,
            probe.lambda0_nm + half_widths * probe.w_nm, points};
}

double WavelengthGrid::at(std::size_t i) const {
    if (i + 1 == points) return max_nm;
    return min_nm + static_cast<double>(i) * spacing();
}

void WavelengthGrid::validate() const {
    if (points < kMinProbePoints) {
        throw InvalidArgument("wavelength grid needs at least " + std::to_string(kMinProbePoints) +
                              " points");
    }
    if (!std::isfinite(min_nm) || !std::isfinite(max_nm) || !(min_nm < max_nm)) {
        throw InvalidArgument("wavelength grid range is empty or degenerate");
    }
    if (min_nm <= 0.0) throw InvalidArgument("wavelength grid must be at positive wavelengths");
}

double SpectrumGrid::spacing() const {
    if (size() < 2) return 0.0;
    return (wavelengths_nm.back() - wavelengths_nm.front()) / static_cast<double>(size() - 1);
}

double SpectrumGrid::peak() const {
    if (intensities.empty()) return 0.0;
    return *std::max_element(intensities.begin(), intensities.end());
}

double SpectrumGrid::integrated() const {
    double sum = 0.0;
    for (std::size_t i = 1; i < size(); ++i) {
        sum += 0.5 * (intensities[i] + intensities[i - 1]) *
               (wavelengths_nm[i] - wavelengths_nm[i - 1]);
    }
    return sum;
}

void SpectrumGrid::validate() const {
    if (wavelengths_nm.size() != intensities.size()) {
        throw InvalidArgument("spectrum wavelength and intensity lengths differ");
    }
    if (size() < 2) throw InvalidArgument("spectrum needs at least two samples");
    const double h = spacing();
    if (!(h > 0.0)) throw InvalidArgument("spectrum wavelengths must be strictly increasing");
    for (std::size_t i = 1; i < size(); ++i) {
        const double step = wavelengths_nm[i] - wavelengths_nm[i - 1];
        if (std::abs(step - h) > 1e-9 * h) {
            throw InvalidArgument("spectrum wavelengths must be uniformly spaced");
        }
    }
    for (double y : intensities) {
        if (!std::isfinite(y) || y < 0.0) {
            throw InvalidArgument("spectrum intensities must be finite and >= 0");
        }
    }
}

double probe_intensity(const GaussianProbe& probe, const CouplingModel& model,
                       double lambda_nm) {
    return probe.i0 * std::exp(log_profile(probe, model.convention, lambda_nm));
}

bool covers_probe(const WavelengthGrid& grid, const GaussianProbe& probe) {
    return grid.min_nm <= probe.lambda0_nm - 4.0 * probe.w_nm &&
           grid.max_nm >= probe.lambda0_nm + 4.0 * probe.w_nm;
}

SpectrumGrid sample_probe(const GaussianProbe& probe, const CouplingModel& model,
                          const WavelengthGrid& grid) {
    probe.validate();
    grid.validate();
    SpectrumGrid out;
    out.wavelengths_nm.resize(grid.points);
    out.intensities.resize(grid.points);
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double lambda = grid.at(i);
        out.wavelengths_nm[i] = lambda;
        out.intensities[i] = probe_intensity(probe, model, lambda);
    }
    return out;
}

SpectrumGrid synthesize_final_spectrum(const GaussianProbe& probe, const CouplingModel& model,
                                       double beta, double phi, const WavelengthGrid& grid,
                                       const WeakValueOptions& options) {
    model.validate();
    const WeakValue aw = weak_value(beta, phi, options);
    const double probability = postselection_probability(beta, phi);
    const double g = model.effective_g_nm();

    SpectrumGrid out = sample_probe(probe, model, grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double lambda = out.wavelengths_nm[i];
        const double lift = 2.0 * model.momentum(lambda, probe.lambda0_nm) * g * aw.imag();
        double y;
        if (std::abs(lift) < kSafeExponent) {
            y = probability * std::exp(lift) * out.intensities[i];
        } else {
            y = probability * probe.i0 *
                std::exp(lift + log_profile(probe, model.convention, lambda));
        }
        if (!std::isfinite(y)) {
            throw ComputationError("postselected intensity overflows at " +
                                   std::to_string(lambda) + " nm");
        }
        out.intensities[i] = y;
    }
    return out;
}

double predicted_shift(const GaussianProbe& probe, const WeakValue& weak_value) {
    const double dl = probe.w_nm;
    return -(4.0 * std::numbers::pi * dl * dl / probe.lambda0_nm) * weak_value.imag();
}

}  // namespace wvmag
