#pragma once

// Two-mode (H/V) polarization algebra for circular pre-/post-selection.
//
// The pre-selected state is parameterized by the pre-selection angle beta,
//     |i> = sin(beta + pi/4)|H> + i cos(beta + pi/4)|V>,
// the post-selected state by the total H/V phase phi,
//     |f> = i sin(pi/4) e^{i phi}|H> + cos(pi/4) e^{-i phi}|V>.
// For small beta the two are nearly orthogonal, which is what makes the weak
// value large.

#include <array>
#include <complex>

namespace wvmag {

using Complex = std::complex<double>;

struct PolarizationState {
    Complex h;  // coefficient of |H>
    Complex v;  // coefficient of |V>

    double norm_squared() const { return std::norm(h) + std::norm(v); }
};

// 2x2 complex operator on (H, V), row-major.
struct Observable {
    std::array<Complex, 4> m{};

    // diag(+1/2, -1/2): the H/V population difference, halved.
    static Observable half_stokes_q();

    Complex operator()(int row, int col) const { return m[row * 2 + col]; }
    bool is_hermitian() const;
    Observable scaled(double factor) const;
};

struct WeakValue {
    Complex value;
    double beta = 0.0;  // radians
    double phi = 0.0;   // radians

    double real() const { return value.real(); }
    double imag() const { return value.imag(); }
};

struct WeakValueOptions {
    // Smallest admissible |<f|i>|^2 before the selection counts as orthogonal.
    double orthogonality_epsilon = 1e-30;
};

PolarizationState preselect(double beta);
PolarizationState postselect(double phi);

// <a|b> = conj(a.h) b.h + conj(a.v) b.v
Complex inner_product(const PolarizationState& a, const PolarizationState& b);

// <a|op|b>
Complex matrix_element(const PolarizationState& a, const Observable& op,
                       const PolarizationState& b);

// Closed form
//   A_w = [sin(phi) sin(beta) + i cos(phi) cos(beta)]
//       / [sin(phi) cos(beta) + i sin(beta) cos(phi)].
// Throws OrthogonalSelection when |<f|i>|^2 < options.orthogonality_epsilon,
// InvalidArgument for non-finite angles.
WeakValue weak_value(double beta, double phi, const WeakValueOptions& options = {});

// <f|A|i>/<f|i> evaluated from the states themselves. With the +-1/2
// observable this is exactly half the closed form; the result is rescaled by
// 2 so both paths share the closed-form normalization.
WeakValue weak_value_from_states(double beta, double phi,
                                 const WeakValueOptions& options = {});

// |<f|i>|^2 = sin^2(phi) cos^2(beta) + sin^2(beta) cos^2(phi)
double postselection_probability(double beta, double phi);

}  // namespace wvmag
