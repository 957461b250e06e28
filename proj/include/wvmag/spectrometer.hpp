#pragma once

// Detector model: rebinning, seeded noise, saturation and detection floor.

#include "wvmag/spectrum.hpp"

#include <cstdint>
#include <limits>
#include <variant>

namespace wvmag {

struct NoNoise {};

// Poisson-like noise with variance proportional to intensity:
// sigma(I) = sigma_at_reference * sqrt(I / reference_intensity).
struct ShotNoise {
    double sigma_at_reference = 0.0;
    double reference_intensity = 1.0;
};

// Intensity-independent additive noise.
struct GaussianNoise {
    double sigma = 0.0;
};

using NoiseModel = std::variant<NoNoise, ShotNoise, GaussianNoise>;

struct SpectrometerModel {
    // Bin centers run from lambda_min_nm to lambda_max_nm in bin_width_nm
    // steps; each bin averages the incoming spectrum over +- bin_width_nm / 2.
    double lambda_min_nm = 0.0;
    double lambda_max_nm = 0.0;
    double bin_width_nm = 1.0;
    double intensity_floor = 0.0;  // bins below this read 0
    double saturation = std::numeric_limits<double>::infinity();
    NoiseModel noise = NoNoise{};
    std::uint64_t seed = 0;

    // A noiseless model whose bins coincide with the samples of `grid`.
    static SpectrometerModel matching(const SpectrumGrid& grid);

    std::size_t bin_count() const;
    double bin_center(std::size_t i) const;
    void validate() const;
};

// Rebins `spectrum` onto the spectrometer grid by interval averaging, adds
// noise (draw i is a pure function of (seed, i)), clips negatives to zero,
// clamps to saturation and zeroes bins below the floor.
// Throws EmptyOverlap if the spectrometer window misses the spectrum.
SpectrumGrid apply_spectrometer(const SpectrumGrid& spectrum, const SpectrometerModel& model);

// Standard normal deviate for draw `index` of stream `seed`.
double normal_draw(std::uint64_t seed, std::uint64_t index);

// Decorrelates per-point seeds derived from one configured seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace wvmag
