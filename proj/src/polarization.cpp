#include "wvmag/polarization.hpp"

#include "wvmag/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace wvmag {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw InvalidArgument(std::string(name) + " must be finite");
    }
}

void require_not_orthogonal(double beta, double phi, const WeakValueOptions& options) {
    const double p = postselection_probability(beta, phi);
    if (p < options.orthogonality_epsilon) {
        std::ostringstream os;
        os << "pre- and post-selection are orthogonal (|<f|i>|^2 = " << p << ")";
        throw OrthogonalSelection(os.str());
    }
}

}  // namespace

Observable Observable::half_stokes_q() {
    Observable a;
    a.m = {Complex{0.5, 0.0}, Complex{}, Complex{}, Complex{-0.5, 0.0}};
    return a;
}

bool Observable::is_hermitian() const {
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            if ((*this)(r, c) != std::conj((*this)(c, r))) return false;
        }
    }
    return true;
}

Observable Observable::scaled(double factor) const {
    Observable out = *this;
    for (auto& x : out.m) x *= factor;
    return out;
}

PolarizationState preselect(double beta) {
    require_finite(beta, "beta");
    const double angle = beta + std::numbers::pi / 4.0;
    return {Complex{std::sin(angle), 0.0}, kI * std::cos(angle)};
}

PolarizationState postselect(double phi) {
    require_finite(phi, "phi");
    const double amp = std::numbers::sqrt2 / 2.0;
    const Complex forward = std::polar(1.0, phi);
    return {kI * amp * forward, amp * std::conj(forward)};
}

Complex inner_product(const PolarizationState& a, const PolarizationState& b) {
    return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

Complex matrix_element(const PolarizationState& a, const Observable& op,
                       const PolarizationState& b) {
    const Complex bh = op(0, 0) * b.h + op(0, 1) * b.v;
    const Complex bv = op(1, 0) * b.h + op(1, 1) * b.v;
    return std::conj(a.h) * bh + std::conj(a.v) * bv;
}

WeakValue weak_value(double beta, double phi, const WeakValueOptions& options) {
    require_finite(beta, "beta");
    require_finite(phi, "phi");
    require_not_orthogonal(beta, phi, options);

    const double sp = std::sin(phi), cp = std::cos(phi);
    const double sb = std::sin(beta), cb = std::cos(beta);
    const Complex numerator{sp * sb, cp * cb};
    const Complex denominator{sp * cb, sb * cp};
    return {numerator / denominator, beta, phi};
}

WeakValue weak_value_from_states(double beta, double phi, const WeakValueOptions& options) {
    require_not_orthogonal(beta, phi, options);
    const PolarizationState initial = preselect(beta);
    const PolarizationState final_state = postselect(phi);
    const Observable a = Observable::half_stokes_q().scaled(2.0);
    return {matrix_element(final_state, a, initial) / inner_product(final_state, initial), beta,
            phi};
}

double postselection_probability(double beta, double phi) {
    const double sp = std::sin(phi), cp = std::cos(phi);
    const double sb = std::sin(beta), cb = std::cos(beta);
    return sp * sp * cb * cb + sb * sb * cp * cp;
}

}  // namespace wvmag
