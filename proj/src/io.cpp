#include "wvmag/io.hpp"

#include "wvmag/error.hpp"

#include <fmt/format.h>

#include <istream>
#include <ostream>

namespace wvmag {

namespace {

constexpr const char* kSpectrumHeader = "wavelength_nm,intensity";

double parse_double(const std::string& text, std::size_t line) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw InvalidArgument("line " + std::to_string(line) + ": not a number: '" + text + "'");
    }
    return value;
}

}  // namespace

std::string format_number(double value) { return fmt::format("{}", value); }

void write_spectrum_csv(std::ostream& os, const SpectrumGrid& spectrum) {
    os << kSpectrumHeader << '\n';
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        os << format_number(spectrum.wavelengths_nm[i]) << ','
           << format_number(spectrum.intensities[i]) << '\n';
    }
}

SpectrumGrid read_spectrum_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kSpectrumHeader) {
        throw InvalidArgument(std::string("spectrum CSV must start with '") + kSpectrumHeader +
                              "'");
    }
    SpectrumGrid out;
    std::size_t number = 1;
    while (std::getline(is, line)) {
        ++number;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw InvalidArgument("line " + std::to_string(number) + ": expected two columns");
        }
        out.wavelengths_nm.push_back(parse_double(line.substr(0, comma), number));
        out.intensities.push_back(parse_double(line.substr(comma + 1), number));
    }
    out.validate();
    return out;
}

void write_shift_curve_csv(std::ostream& os, const ShiftCurve& curve) {
    os << "B_tesla,shift_nm\n";
    for (const auto& p : curve.points) {
        os << format_number(p.field_T) << ',' << format_number(p.shift_nm) << '\n';
    }
}

void write_sensitivity_csv(std::ostream& os, std::span<const SensitivityResult> rows) {
    os << "beta_rad,k_nm_per_T,r2,p_postselect\n";
    for (const auto& r : rows) {
        os << format_number(r.beta) << ',' << format_number(r.k_nm_per_T) << ','
           << format_number(r.r2) << ',' << format_number(r.postselection_probability_at_zero_field)
           << '\n';
    }
}

void to_json(nlohmann::json& j, const GaussianFit& fit) {
    j = nlohmann::json{{"center_nm", fit.center_nm}, {"width_nm", fit.width_nm},
                       {"amplitude", fit.amplitude}, {"baseline", fit.baseline},
                       {"rss", fit.rss},             {"converged", fit.converged},
                       {"iterations", fit.iterations}};
}

void from_json(const nlohmann::json& j, GaussianFit& fit) {
    j.at("center_nm").get_to(fit.center_nm);
    j.at("width_nm").get_to(fit.width_nm);
    j.at("amplitude").get_to(fit.amplitude);
    j.at("baseline").get_to(fit.baseline);
    j.at("rss").get_to(fit.rss);
    j.at("converged").get_to(fit.converged);
    j.at("iterations").get_to(fit.iterations);
}

void to_json(nlohmann::json& j, const SensitivityResult& row) {
    j = nlohmann::json{{"beta_rad", row.beta},
                       {"k_nm_per_T", row.k_nm_per_T},
                       {"r2", row.r2},
                       {"p_postselect", row.postselection_probability_at_zero_field}};
}

void to_json(nlohmann::json& j, const ShiftCurve& curve) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : curve.points) {
        points.push_back({{"B_tesla", p.field_T}, {"shift_nm", p.shift_nm}});
    }
    j = nlohmann::json{{"beta_rad", curve.beta}, {"points", std::move(points)}};
}

void to_json(nlohmann::json& j, const DesignRecommendation& rec) {
    j = nlohmann::json{{"feasible", rec.feasible()}};
    if (rec.feasible_beta) {
        j["feasible_beta"] = {{"lo", rec.feasible_beta->lo}, {"hi", rec.feasible_beta->hi}};
        j["chosen_beta"] = *rec.chosen_beta;
        j["expected_k_nm_per_T"] = rec.expected_k_nm_per_T;
        j["expected_probability"] = rec.expected_probability;
    } else {
        j["feasible_beta"] = nullptr;
        j["chosen_beta"] = nullptr;
    }
}

void to_json(nlohmann::json& j, const SpectrumGrid& spectrum) {
    j = nlohmann::json{{"wavelength_nm", spectrum.wavelengths_nm},
                       {"intensity", spectrum.intensities}};
}

nlohmann::json weak_value_report(const WeakValue& weak_value) {
    return {{"beta_rad", weak_value.beta},
            {"phi_rad", weak_value.phi},
            {"re", weak_value.real()},
            {"im", weak_value.imag()},
            {"p_postselect", postselection_probability(weak_value.beta, weak_value.phi)}};
}

}  // namespace wvmag
