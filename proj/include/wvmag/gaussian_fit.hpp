#pragma once

#include "wvmag/spectrum.hpp"

#include <cstddef>

namespace wvmag {

// baseline + amplitude * exp(-(lambda - center)^2 / (2 width^2))
struct GaussianFit {
    double center_nm = 0.0;
    double width_nm = 0.0;  // standard deviation
    double amplitude = 0.0;
    double baseline = 0.0;
    double rss = 0.0;  // residual sum of squares, intensity^2
    bool converged = false;
    std::size_t iterations = 0;

    double evaluate(double lambda_nm) const;
};

struct FitOptions {
    double relative_tolerance = 1e-10;  // on the parameter step
    std::size_t max_iterations = 100;
    double initial_damping = 1e-3;
    double damping_decrease = 0.3;  // after an accepted step
    double damping_increase = 10.0; // after a rejected step
};

// Moment seed followed by Levenberg-Marquardt refinement of
// (amplitude, center, width, baseline).
//
// Throws InsufficientSignal when fewer than five samples rise above the
// minimum by more than 10 machine epsilons of the peak. Running out of
// iterations is not an error: the best parameters so far are returned with
// converged == false.
GaussianFit fit_gaussian(const SpectrumGrid& spectrum, const FitOptions& options = {});

// final.center - initial.center. Throws InvalidArgument unless both converged.
double measured_shift(const GaussianFit& initial, const GaussianFit& final_fit);

}  // namespace wvmag
