#include "wvmag/spectrometer.hpp"

#include "wvmag/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wvmag {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

double noise_sigma(const NoiseModel& noise, double intensity) {
    return std::visit(Overloaded{
                          [](const NoNoise&) { return 0.0; },
                          [&](const ShotNoise& n) {
                              return n.sigma_at_reference *
                                     std::sqrt(std::max(intensity, 0.0) / n.reference_intensity);
                          },
                          [](const GaussianNoise& n) { return n.sigma; },
                      },
                      noise);
}

void validate_noise(const NoiseModel& noise) {
    std::visit(Overloaded{
                   [](const NoNoise&) {},
                   [](const ShotNoise& n) {
                       if (!std::isfinite(n.sigma_at_reference) || n.sigma_at_reference < 0.0) {
                           throw InvalidArgument("shot noise sigma must be finite and >= 0");
                       }
                       if (!std::isfinite(n.reference_intensity) || n.reference_intensity <= 0.0) {
                           throw InvalidArgument("shot noise reference intensity must be > 0");
                       }
                   },
                   [](const GaussianNoise& n) {
                       if (!std::isfinite(n.sigma) || n.sigma < 0.0) {
                           throw InvalidArgument("gaussian noise sigma must be finite and >= 0");
                       }
                   },
               },
               noise);
}

}  // namespace

SpectrometerModel SpectrometerModel::matching(const SpectrumGrid& grid) {
    SpectrometerModel model;
    model.lambda_min_nm = grid.wavelengths_nm.front();
    model.lambda_max_nm = grid.wavelengths_nm.back();
    model.bin_width_nm = grid.spacing();
    return model;
}

std::size_t SpectrometerModel::bin_count() const {
    const double span = (lambda_max_nm - lambda_min_nm) / bin_width_nm;
    return static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
}

double SpectrometerModel::bin_center(std::size_t i) const {
    return lambda_min_nm + static_cast<double>(i) * bin_width_nm;
}

void SpectrometerModel::validate() const {
    if (!std::isfinite(lambda_min_nm) || !std::isfinite(lambda_max_nm) ||
        !(lambda_min_nm < lambda_max_nm)) {
        throw InvalidArgument("spectrometer requires lambda_min_nm < lambda_max_nm");
    }
    if (!std::isfinite(bin_width_nm) || bin_width_nm <= 0.0) {
        throw InvalidArgument("spectrometer bin_width_nm must be > 0");
    }
    if (!std::isfinite(intensity_floor) || intensity_floor < 0.0) {
        throw InvalidArgument("spectrometer intensity_floor must be >= 0");
    }
    if (std::isnan(saturation) || !(saturation > intensity_floor)) {
        throw InvalidArgument("spectrometer saturation must exceed intensity_floor");
    }
    validate_noise(noise);
}

double normal_draw(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    return normal(engine);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SpectrumGrid apply_spectrometer(const SpectrumGrid& spectrum, const SpectrometerModel& model) {
    spectrum.validate();
    model.validate();

    const double h = spectrum.spacing();
    const double first = spectrum.wavelengths_nm.front();
    const double support_lo = first - 0.5 * h;
    const double support_hi = spectrum.wavelengths_nm.back() + 0.5 * h;

    const std::size_t bins = model.bin_count();
    const double half_bin = 0.5 * model.bin_width_nm;
    if (model.bin_center(0) - half_bin >= support_hi ||
        model.bin_center(bins - 1) + half_bin <= support_lo) {
        throw EmptyOverlap("spectrometer window does not overlap the spectrum");
    }

    SpectrumGrid out;
    out.wavelengths_nm.resize(bins);
    out.intensities.resize(bins);

    const auto n = static_cast<std::ptrdiff_t>(spectrum.size());
    for (std::size_t j = 0; j < bins; ++j) {
        const double center = model.bin_center(j);
        const double lo = center - half_bin;
        const double hi = center + half_bin;

        // Input sample i owns the cell [w_i - h/2, w_i + h/2].
        auto i = static_cast<std::ptrdiff_t>(std::floor((lo - support_lo) / h)) - 1;
        i = std::clamp<std::ptrdiff_t>(i, 0, n);
        double sum = 0.0;
        for (; i < n; ++i) {
            const double cell_lo = spectrum.wavelengths_nm[i] - 0.5 * h;
            const double cell_hi = spectrum.wavelengths_nm[i] + 0.5 * h;
            if (cell_lo >= hi) break;
            const double overlap = std::min(hi, cell_hi) - std::max(lo, cell_lo);
            if (overlap > 0.0) sum += overlap * spectrum.intensities[i];
        }
        double y = sum / model.bin_width_nm;

        const double sigma = noise_sigma(model.noise, y);
        if (sigma > 0.0) y += sigma * normal_draw(model.seed, j);
        y = std::clamp(y, 0.0, model.saturation);
        if (y < model.intensity_floor) y = 0.0;

        out.wavelengths_nm[j] = center;
        out.intensities[j] = y;
    }
    return out;
}

}  // namespace wvmag
