#pragma once

// CSV and JSON forms of the library's result types.
//
//   spectrum     CSV  wavelength_nm,intensity
//   shift curve  CSV  B_tesla,shift_nm
//   sensitivity  CSV  beta_rad,k_nm_per_T,r2,p_postselect
//   GaussianFit  JSON {center_nm, width_nm, amplitude, baseline, rss, converged, iterations}
//
// Numbers are written in shortest round-trip form, so output is byte-stable
// for identical inputs.

#include "wvmag/gaussian_fit.hpp"
#include "wvmag/polarization.hpp"
#include "wvmag/sensitivity.hpp"
#include "wvmag/spectrum.hpp"

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

namespace wvmag {

std::string format_number(double value);

void write_spectrum_csv(std::ostream& os, const SpectrumGrid& spectrum);
// Throws InvalidArgument on a malformed header or row.
SpectrumGrid read_spectrum_csv(std::istream& is);

void write_shift_curve_csv(std::ostream& os, const ShiftCurve& curve);
void write_sensitivity_csv(std::ostream& os, std::span<const SensitivityResult> rows);

void to_json(nlohmann::json& j, const GaussianFit& fit);
void from_json(const nlohmann::json& j, GaussianFit& fit);
void to_json(nlohmann::json& j, const SensitivityResult& row);
void to_json(nlohmann::json& j, const ShiftCurve& curve);
void to_json(nlohmann::json& j, const DesignRecommendation& rec);
void to_json(nlohmann::json& j, const SpectrumGrid& spectrum);

// Re/Im of A_w plus the postselection probability.
nlohmann::json weak_value_report(const WeakValue& weak_value);

}  // namespace wvmag
