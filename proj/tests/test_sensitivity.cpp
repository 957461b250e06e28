#include "wvmag/error.hpp"
#include "wvmag/sensitivity.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

using namespace wvmag;

namespace {

// k(beta) = (4 pi W^2 / lambda0) (cos 2beta / sin^2 beta) V L to first order in phi.
double first_order_k(double beta) {
    return 37.714197522086353 * std::cos(2 * beta) / std::pow(std::sin(beta), 2) * 32.0 * 1000.0;
}

}  // namespace

TEST_CASE("shift_curve") {
    const auto setup = ExperimentSetup::reference();

    const std::vector<double> zero{0.0};
    const auto c0 = shift_curve(setup, 0.010, zero);
    REQUIRE(c0.points.size() == 1);
    CHECK(c0.points[0].field_T == 0.0);
    CHECK(c0.points[0].shift_nm == 0.0);

    const std::vector<double> fields{-1e-9, 1e-9};
    const auto c = shift_curve(setup, 0.010, fields);
    CHECK(c.beta == 0.010);
    CHECK(c.points[0].shift_nm == doctest::Approx(12.066408243581075).epsilon(1e-10));
    CHECK(c.points[1].shift_nm == doctest::Approx(-12.066408243581075).epsilon(1e-10));

    CHECK_THROWS_AS(shift_curve(setup, 0.010, std::vector<double>{}), InvalidArgument);
    CHECK_THROWS_AS(shift_curve(setup, 0.010, std::vector<double>{1e-9, 1e-9}), InvalidArgument);
    CHECK_THROWS_AS(shift_curve(setup, 0.010, std::vector<double>{1e-9, 0.0}), InvalidArgument);

    SUBCASE("orthogonal selection names the field") {
        try {
            shift_curve(setup, 0.0, zero);
            FAIL("expected OrthogonalSelection");
        } catch (const OrthogonalSelection& e) {
            CHECK(std::string(e.what()).find("B = 0") != std::string::npos);
        }
    }

    SUBCASE("uncalibrated budget is rejected") {
        auto bad = setup;
        bad.budget = PhaseBudget{0.1, 0.0, 0.0};
        CHECK_THROWS_AS(shift_curve(bad, 0.010, zero), InvalidArgument);
    }

    SUBCASE("calibrated static phases do not move the spectrum") {
        auto offset = setup;
        offset.budget = calibrate_sbc({0.0, 0.37, 0.0});
        CHECK(shift_curve(offset, 0.010, fields).points[1].shift_nm ==
              doctest::Approx(c.points[1].shift_nm).epsilon(1e-12));
    }
}

TEST_CASE("sensitivity regression") {
    ShiftCurve line{0.01, {{0.0, 0.0}, {1.0, -2.0}, {2.0, -4.0}}};
    const auto r = sensitivity(line);
    CHECK(r.k_nm_per_T == doctest::Approx(2.0));
    CHECK(r.r2 == doctest::Approx(1.0));
    CHECK(r.postselection_probability_at_zero_field == doctest::Approx(std::pow(std::sin(0.01), 2)));

    ShiftCurve flat{0.01, {{0.0, 0.0}, {1.0, 0.0}}};
    CHECK(sensitivity(flat).k_nm_per_T == 0.0);
    CHECK(sensitivity(flat).r2 == 1.0);

    ShiftCurve one{0.01, {{0.0, 0.0}}};
    CHECK_THROWS_AS(sensitivity(one), InvalidArgument);
    CHECK_THROWS_AS(sensitivity(ShiftCurve{0.01, {}}), InvalidArgument);

    CHECK_THROWS_AS(FieldSweep({1e-9, 1e-9, 5}).values(), InvalidArgument);
    CHECK(FieldSweep{}.values().size() == 21);
    CHECK(FieldSweep{}.values().back() == 2e-9);
}

TEST_CASE("reference sensitivity table") {
    const auto setup = ExperimentSetup::reference();
    const auto rows = reproduce_table1(setup);
    REQUIRE(rows.size() == 3);

    const double paper_k[] = {2.46e10, 1.20e10, 0.71e10};
    const double paper_p[] = {4.9e-5, 1.0e-4, 1.69e-4};
    const double oracle_k[] = {24627668594.498318, 12066531791.245612, 7139138416.396984};
    for (std::size_t i = 0; i < 3; ++i) {
        CAPTURE(i);
        CHECK(std::abs(rows[i].k_nm_per_T - paper_k[i]) <= 0.015 * paper_k[i]);
        CHECK(std::abs(rows[i].postselection_probability_at_zero_field - paper_p[i]) <= 1e-6);
        // Slope of the exact curve against the first-order derivative at B = 0.
        CHECK(rows[i].k_nm_per_T == doctest::Approx(oracle_k[i]).epsilon(1e-4));
        CHECK(rows[i].r2 >= 0.9999);
    }

    SUBCASE("halving the fiber halves k") {
        auto half = setup;
        half.geometry = FiberCoil{1000, 0.5};
        const auto halved = reproduce_table1(half);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(halved[i].k_nm_per_T == doctest::Approx(0.5 * rows[i].k_nm_per_T).epsilon(1e-4));
        }
    }

    SUBCASE("null-amplification row") {
        const double betas[] = {0.007, 0.010, 0.013, std::numbers::pi / 4};
        const auto extended = reproduce_table1(setup, betas);
        REQUIRE(extended.size() == 4);
        CHECK(extended[3].k_nm_per_T == 0.0);
        CHECK(extended[0].k_nm_per_T == rows[0].k_nm_per_T);
    }
}

TEST_CASE("analytic and synthetic readouts agree") {
    auto synthetic = ExperimentSetup::reference();
    synthetic.readout = Readout::Synthetic;
    const FieldSweep sweep{0.0, 2e-9, 5};
    for (double beta : {0.007, 0.010, 0.013}) {
        CAPTURE(beta);
        const auto a = sensitivity_at(ExperimentSetup::reference(), beta, sweep);
        const auto s = sensitivity_at(synthetic, beta, sweep);
        CHECK(std::abs(s.k_nm_per_T - a.k_nm_per_T) <= 0.01 * a.k_nm_per_T);
        CHECK(s.r2 >= 0.9999);
    }
}

TEST_CASE("trade-off monotonicity") {
    const auto setup = ExperimentSetup::reference();
    double prev_k = std::numeric_limits<double>::infinity();
    double prev_p = 0.0;
    for (int i = 0; i <= 470; ++i) {
        const double beta = 0.003 + 1e-4 * i;
        CAPTURE(beta);
        const auto r = sensitivity_at(setup, beta);
        REQUIRE(r.k_nm_per_T < prev_k);
        REQUIRE(r.postselection_probability_at_zero_field > prev_p);
        prev_k = r.k_nm_per_T;
        prev_p = r.postselection_probability_at_zero_field;
    }
}

TEST_CASE("recommend_design") {
    const auto setup = ExperimentSetup::reference();
    const BetaSearch search{1e-3, 0.05, 1e-5};

    SUBCASE("reference constraints") {
        const DesignConstraints c{1.0, 1e-5, 0.1, 1e-11};
        const auto rec = recommend_design(c, setup, search);
        REQUIRE(rec.feasible());
        REQUIRE(rec.chosen_beta.has_value());
        // beta_lo = asin(sqrt(1e-5)); beta_hi solves k(beta) = 1e10 nm/T.
        CHECK(std::abs(rec.feasible_beta->lo - 0.0031622829306548635) <= search.step);
        CHECK(std::abs(rec.feasible_beta->hi - 0.010984587480359791) <= search.step);
        CHECK(*rec.chosen_beta == rec.feasible_beta->lo);
        CHECK(rec.expected_probability >= 1e-5);
        CHECK(rec.expected_k_nm_per_T == doctest::Approx(first_order_k(*rec.chosen_beta)).epsilon(1e-3));

        // Every grid point is classified consistently with the two inequalities.
        for (double beta : search.values()) {
            const bool ok = postselected_peak_detectable(c, beta) &&
                            shift_resolvable(c, sensitivity_at(setup, beta).k_nm_per_T);
            const bool inside = beta >= rec.feasible_beta->lo && beta <= rec.feasible_beta->hi;
            CAPTURE(beta);
            REQUIRE(ok == inside);
        }
        CHECK_FALSE(postselected_peak_detectable(c, rec.feasible_beta->lo - search.step));
        CHECK_FALSE(shift_resolvable(c, sensitivity_at(setup, rec.feasible_beta->hi + search.step)
                                             .k_nm_per_T));
    }

    SUBCASE("absurd resolution is infeasible") {
        const DesignConstraints c{1.0, 1e-5, 1e6, 1e-11};
        const auto rec = recommend_design(c, setup, {1e-3, 0.05, 1e-3});
        CHECK_FALSE(rec.feasible());
        CHECK_FALSE(rec.chosen_beta.has_value());
    }

    SUBCASE("vacuous constraints accept the whole search") {
        const DesignConstraints c{1.0, 0.0, 0.0, 1e-9};
        const BetaSearch coarse{1e-3, 0.05, 1e-3};
        const auto rec = recommend_design(c, setup, coarse);
        REQUIRE(rec.feasible());
        CHECK(rec.feasible_beta->lo == 1e-3);
        CHECK(rec.feasible_beta->hi == doctest::Approx(0.05));
        CHECK(*rec.chosen_beta == 1e-3);
    }

    SUBCASE("invalid inputs") {
        CHECK_THROWS_AS(recommend_design({0.0, 0.0, 0.0, 1e-9}, setup, search), InvalidArgument);
        CHECK_THROWS_AS(recommend_design({1.0, -1.0, 0.0, 1e-9}, setup, search), InvalidArgument);
        CHECK_THROWS_AS(recommend_design({1.0, 0.0, 0.0, 0.0}, setup, search), InvalidArgument);
        CHECK_THROWS_AS(recommend_design({}, setup, {0.0, 0.05, 1e-3}), InvalidArgument);
        CHECK_THROWS_AS(recommend_design({}, setup, {1e-3, 1.0, 1e-3}), InvalidArgument);
        CHECK_THROWS_AS(recommend_design({}, setup, {1e-3, 0.05, 0.0}), InvalidArgument);
    }
}

TEST_CASE("minimum_detectable_field") {
    const auto setup = ExperimentSetup::reference();
    CHECK(minimum_detectable_field(setup, 0.010, {1.0, 0.0, 0.1, 1e-9}) ==
          doctest::Approx(8.2873854501051404e-12).epsilon(1e-4));
    const double b = minimum_detectable_field(setup, 0.007, {1.0, 0.0, 1.0, 1e-9});
    CHECK(b == doctest::Approx(4.0604736748138407e-11).epsilon(1e-4));
    CHECK(b < 1e-10);
    CHECK_THROWS_AS(minimum_detectable_field(setup, std::numbers::pi / 4, {1.0, 0.0, 0.1, 1e-9}),
                    NotDetectable);
}
