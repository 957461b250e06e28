#include "wvmag/faraday.hpp"

#include "wvmag/error.hpp"

#include <cmath>
#include <string>

namespace wvmag {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

void require_positive_length(double length, const char* name) {
    if (!std::isfinite(length) || length <= 0.0) {
        throw InvalidArgument(std::string(name) + " must be a positive length");
    }
}

void require_count(int count, const char* name) {
    if (count < 1) throw InvalidArgument(std::string(name) + " must be >= 1");
}

}  // namespace

void MagnetoOpticMedium::validate() const {
    if (!std::isfinite(verdet_rad_per_T_m) || verdet_rad_per_T_m == 0.0) {
        throw InvalidArgument("Verdet constant must be finite and nonzero");
    }
}

void validate(const FaradayGeometry& geometry) {
    std::visit(Overloaded{
                   [](const SinglePass& g) { require_positive_length(g.length_m, "length_m"); },
                   [](const MultiReflection& g) {
                       require_count(g.passes, "passes");
                       require_positive_length(g.length_m, "length_m");
                   },
                   [](const FiberCoil& g) {
                       require_count(g.turns, "turns");
                       require_positive_length(g.turn_length_m, "turn_length_m");
                   },
               },
               geometry);
}

double interaction_length(const FaradayGeometry& geometry) {
    validate(geometry);
    return std::visit(Overloaded{
                          [](const SinglePass& g) { return g.length_m; },
                          [](const MultiReflection& g) { return g.passes * g.length_m; },
                          [](const FiberCoil& g) { return g.turns * g.turn_length_m; },
                      },
                      geometry);
}

double faraday_phase(const FaradayGeometry& geometry, const MagnetoOpticMedium& medium,
                     double field_T) {
    medium.validate();
    if (!std::isfinite(field_T)) throw InvalidArgument("field must be finite");
    return medium.verdet_rad_per_T_m * field_T * interaction_length(geometry);
}

PhaseBudget calibrate_sbc(const PhaseBudget& budget) {
    return {-budget.phi_opd, budget.phi_opd, budget.phi_mom};
}

double total_phase(const PhaseBudget& budget) {
    return budget.phi_sbc + budget.phi_opd + budget.phi_mom;
}

}  // namespace wvmag
