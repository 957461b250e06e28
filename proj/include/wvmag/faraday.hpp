#pragma once

// Faraday phase for a uniform longitudinal field, plus the H/V phase budget.

#include <variant>

namespace wvmag {

struct MagnetoOpticMedium {
    double verdet_rad_per_T_m = 32.0;  // signed; must be finite and nonzero

    void validate() const;
};

// Light crosses a slab of thickness length_m once.
struct SinglePass {
    double length_m = 0.0;
};

// Light is reflected back and forth `passes` times through the slab; the
// rotation accumulates because the Faraday effect is nonreciprocal.
struct MultiReflection {
    int passes = 1;
    double length_m = 0.0;
};

// `turns` loops of fiber, each of circumference turn_length_m.
struct FiberCoil {
    int turns = 1;
    double turn_length_m = 0.0;
};

using FaradayGeometry = std::variant<SinglePass, MultiReflection, FiberCoil>;

void validate(const FaradayGeometry& geometry);

// Total magneto-optic interaction length in meters (D, N*D or M*L).
double interaction_length(const FaradayGeometry& geometry);

// phi_MOM = V * B * (interaction length). Sign follows B (and V).
double faraday_phase(const FaradayGeometry& geometry, const MagnetoOpticMedium& medium,
                     double field_T);

struct PhaseBudget {
    double phi_sbc = 0.0;  // compensator retardance
    double phi_opd = 0.0;  // static optical path difference
    double phi_mom = 0.0;  // magneto-optic (Faraday) phase

    bool calibrated() const { return phi_sbc + phi_opd == 0.0; }
    PhaseBudget with_faraday_phase(double phi) const { return {phi_sbc, phi_opd, phi}; }

    friend bool operator==(const PhaseBudget&, const PhaseBudget&) = default;
};

// Sets phi_sbc = -phi_opd, leaving phi_mom alone.
PhaseBudget calibrate_sbc(const PhaseBudget& budget);

double total_phase(const PhaseBudget& budget);

}  // namespace wvmag
