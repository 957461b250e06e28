#include "wvmag/gaussian_fit.hpp"

#include "wvmag/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace wvmag {

namespace {

using Params = Eigen::Vector4d;  // amplitude, center, width, baseline
enum { kAmp = 0, kCenter = 1, kWidth = 2, kBase = 3 };

// The fit runs on u = (lambda - offset) / scale_x, z = (y - y_min) / scale_y so
// that all four parameters are O(1).
struct Normalized {
    std::vector<double> u;
    std::vector<double> z;
    double offset = 0.0;
    double scale_x = 1.0;
    double y_min = 0.0;
    double scale_y = 1.0;
};

double model(const Params& q, double u) {
    const double d = (u - q[kCenter]) / q[kWidth];
    return q[kBase] + q[kAmp] * std::exp(-0.5 * d * d);
}

double residual_sum(const Normalized& data, const Params& q) {
    double rss = 0.0;
    for (std::size_t i = 0; i < data.u.size(); ++i) {
        const double r = data.z[i] - model(q, data.u[i]);
        rss += r * r;
    }
    return rss;
}

Params moment_seed(const Normalized& data) {
    // z is already baseline (minimum) subtracted.
    double total = 0.0, first = 0.0;
    for (std::size_t i = 0; i < data.u.size(); ++i) {
        total += data.z[i];
        first += data.z[i] * data.u[i];
    }
    const double centroid = first / total;
    double second = 0.0;
    for (std::size_t i = 0; i < data.u.size(); ++i) {
        const double d = data.u[i] - centroid;
        second += data.z[i] * d * d;
    }
    const double width = std::sqrt(second / total);
    return {*std::max_element(data.z.begin(), data.z.end()), centroid, width, 0.0};
}

}  // namespace

double GaussianFit::evaluate(double lambda_nm) const {
    const double d = (lambda_nm - center_nm) / width_nm;
    return baseline + amplitude * std::exp(-0.5 * d * d);
}

GaussianFit fit_gaussian(const SpectrumGrid& spectrum, const FitOptions& options) {
    spectrum.validate();

    const auto [lo_it, hi_it] =
        std::minmax_element(spectrum.intensities.begin(), spectrum.intensities.end());
    const double y_min = *lo_it;
    const double y_max = *hi_it;
    const double threshold = 10.0 * std::numeric_limits<double>::epsilon() * std::abs(y_max);
    const auto above = std::count_if(spectrum.intensities.begin(), spectrum.intensities.end(),
                                     [&](double y) { return y - y_min > threshold; });
    if (y_max <= 0.0 || above < 5) {
        throw InsufficientSignal("spectrum has fewer than 5 points above the noise floor");
    }

    Normalized data;
    data.offset = 0.5 * (spectrum.wavelengths_nm.front() + spectrum.wavelengths_nm.back());
    data.scale_x = 0.5 * (spectrum.wavelengths_nm.back() - spectrum.wavelengths_nm.front());
    data.y_min = y_min;
    data.scale_y = y_max - y_min;
    data.u.reserve(spectrum.size());
    data.z.reserve(spectrum.size());
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        data.u.push_back((spectrum.wavelengths_nm[i] - data.offset) / data.scale_x);
        data.z.push_back((spectrum.intensities[i] - y_min) / data.scale_y);
    }

    Params q = moment_seed(data);
    double rss = residual_sum(data, q);
    double damping = options.initial_damping;
    bool converged = false;
    std::size_t iteration = 0;

    Eigen::Matrix4d normal;
    Eigen::Vector4d gradient;
    while (iteration < options.max_iterations) {
        ++iteration;

        normal.setZero();
        gradient.setZero();
        for (std::size_t i = 0; i < data.u.size(); ++i) {
            const double d = (data.u[i] - q[kCenter]) / q[kWidth];
            const double e = std::exp(-0.5 * d * d);
            Eigen::Vector4d jac;
            jac[kAmp] = e;
            jac[kCenter] = q[kAmp] * e * d / q[kWidth];
            jac[kWidth] = q[kAmp] * e * d * d / q[kWidth];
            jac[kBase] = 1.0;
            const double r = data.z[i] - (q[kBase] + q[kAmp] * e);
            normal.noalias() += jac * jac.transpose();
            gradient.noalias() += jac * r;
        }

        Eigen::Matrix4d damped = normal;
        damped.diagonal() += damping * normal.diagonal();
        const Params step = damped.ldlt().solve(gradient);
        const Params trial = q + step;
        const double change = step.norm() / q.norm();

        const bool valid = step.allFinite() && trial[kWidth] > 0.0;
        const double trial_rss = valid ? residual_sum(data, trial)
                                       : std::numeric_limits<double>::infinity();
        if (trial_rss < rss) {
            q = trial;
            rss = trial_rss;
            damping *= options.damping_decrease;
        } else {
            damping *= options.damping_increase;
        }
        if (valid && change < options.relative_tolerance) {
            converged = true;
            break;
        }
    }

    GaussianFit fit;
    fit.amplitude = q[kAmp] * data.scale_y;
    fit.center_nm = data.offset + q[kCenter] * data.scale_x;
    fit.width_nm = q[kWidth] * data.scale_x;
    fit.baseline = data.y_min + q[kBase] * data.scale_y;
    fit.rss = rss * data.scale_y * data.scale_y;
    fit.converged = converged;
    fit.iterations = iteration;
    return fit;
}

double measured_shift(const GaussianFit& initial, const GaussianFit& final_fit) {
    if (!initial.converged || !final_fit.converged) {
        throw InvalidArgument("measured_shift needs two converged fits");
    }
    return final_fit.center_nm - initial.center_nm;
}

}  // namespace wvmag
