#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "vmerge/longitudinal_control.hpp"

using namespace vmerge;
using Catch::Approx;

TEST_CASE("weight vectors") {
    SECTION("equal, N=3") {
        const auto w = make_weights(WeightScheme::Equal, 3);
        REQUIRE(w.alpha_b == std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
        REQUIRE(w.alpha_f == w.alpha_b);
        REQUIRE(w.gamma_b == w.alpha_b);
    }
    SECTION("geometric, N=3") {
        const auto w = make_weights(WeightScheme::Geometric, 3);
        REQUIRE(w.alpha_b == std::vector<double>{0.5, 0.25, 0.25});
    }
    SECTION("geometric, N=1") {
        REQUIRE(make_weights(WeightScheme::Geometric, 1).alpha_b == std::vector<double>{1.0});
    }
    SECTION("N=0 is rejected") {
        REQUIRE_THROWS_AS(make_weights(WeightScheme::Equal, 0), std::invalid_argument);
    }
    SECTION("sums are 1 within 1e-12 for N up to 64") {
        for (auto scheme : {WeightScheme::Equal, WeightScheme::Geometric}) {
            for (int n = 1; n <= 64; ++n) {
                const auto w = make_weights(scheme, n);
                double sum = 0.0;
                for (double x : w.alpha_b) {
                    REQUIRE(x > 0.0);
                    REQUIRE(x <= 1.0);
                    sum += x;
                }
                REQUIRE(sum == Approx(1.0).margin(1e-12));
            }
        }
    }
}

TEST_CASE("desired spacing follows the rank-scaled headway") {
    ControllerConfig cfg;
    REQUIRE(desired_spacing(1, 20.0, cfg) == Approx(25.0));
    REQUIRE(desired_spacing(3, 0.0, cfg) == Approx(15.0));
    cfg.tau = 0.5;
    REQUIRE(desired_spacing(2, 10.0, cfg) == Approx(20.0));
}

TEST_CASE("spacing error") {
    ControllerConfig cfg; // tau = 1, L = 5
    SECTION("equilibrium gap gives zero") {
        const auto w = make_weights(WeightScheme::Equal, 1);
        const std::vector<double> preds = {25.0};
        REQUIRE(spacing_error(0.0, 20.0, preds, w, cfg) == Approx(0.0));
    }
    SECTION("single predecessor, 30 m gap") {
        const auto w = make_weights(WeightScheme::Equal, 1);
        const std::vector<double> preds = {30.0};
        REQUIRE(spacing_error(0.0, 20.0, preds, w, cfg) == Approx(5.0));
    }
    SECTION("two predecessors, equal weights") {
        const auto w = make_weights(WeightScheme::Equal, 2);
        const std::vector<double> preds = {30.0, 55.0};
        REQUIRE(spacing_error(0.0, 20.0, preds, w, cfg) == Approx(5.0));
    }
    SECTION("translation invariance") {
        const auto w = make_weights(WeightScheme::Geometric, 2);
        const std::vector<double> preds = {28.0, 51.0};
        const std::vector<double> shifted = {28.0 + 1234.5, 51.0 + 1234.5};
        REQUIRE(spacing_error(0.0, 19.0, preds, w, cfg) ==
                Approx(spacing_error(1234.5, 19.0, shifted, w, cfg)));
    }
}

TEST_CASE("velocity deviation") {
    SECTION("uniform speeds give zero") {
        const auto w = make_weights(WeightScheme::Equal, 2);
        const std::vector<double> preds = {20.0, 20.0};
        REQUIRE(velocity_deviation(20.0, preds, w) == Approx(0.0));
    }
    SECTION("two equal-weight predecessors at 20") {
        const auto w = make_weights(WeightScheme::Equal, 2);
        const std::vector<double> preds = {20.0, 20.0};
        REQUIRE(velocity_deviation(21.0, preds, w) == Approx(1.0));
    }
    SECTION("geometric N=2 halves both") {
        const auto w = make_weights(WeightScheme::Geometric, 2);
        const std::vector<double> preds = {20.0, 22.0};
        REQUIRE(velocity_deviation(19.0, preds, w) == Approx(-2.0));
    }
}

TEST_CASE("control command") {
    ControllerConfig cfg; // omega_e = 1.4, omega_v = 0.3, clamp +-3
    const auto w1 = make_weights(WeightScheme::Equal, 1);
    SECTION("equilibrium is exactly zero") {
        const std::vector<double> a = {0.0};
        REQUIRE(control_command(0.0, 0.0, a, w1, cfg) == 0.0);
    }
    SECTION("large spacing error saturates") {
        const std::vector<double> a = {0.0};
        REQUIRE(control_command(5.0, 0.0, a, w1, cfg) == Approx(3.0));
        REQUIRE(control_command(-5.0, 0.0, a, w1, cfg) == Approx(-3.0));
    }
    SECTION("pure feedforward passes the predecessor acceleration") {
        const std::vector<double> a = {-2.0};
        REQUIRE(control_command(0.0, 0.0, a, w1, cfg) == Approx(-2.0));
    }
    SECTION("affine scaling below saturation") {
        const auto w = make_weights(WeightScheme::Equal, 2);
        const std::vector<double> a = {0.2, -0.1};
        const double u1 = control_command(0.3, 0.25, a, w, cfg);
        const std::vector<double> a2 = {0.4, -0.2};
        const double u2 = control_command(0.6, 0.5, a2, w, cfg);
        REQUIRE(u2 == Approx(2.0 * u1));
    }
    SECTION("velocity term enters with a positive sign") {
        const std::vector<double> a = {0.0};
        REQUIRE(control_command(0.0, 1.0, a, w1, cfg) == Approx(0.3));
        ControllerConfig flipped = cfg;
        flipped.flip_velocity_gain = true;
        REQUIRE(control_command(0.0, 1.0, a, w1, flipped) == Approx(-0.3));
    }
    SECTION("non-finite inputs are rejected") {
        const std::vector<double> a = {std::nan("")};
        REQUIRE_THROWS_AS(control_command(0.0, 0.0, a, w1, cfg), std::invalid_argument);
    }
}

TEST_CASE("config invariants") {
    ControllerConfig cfg;
    cfg.tau = -1.0;
    REQUIRE_THROWS_WITH(cfg.validate(), "tau must be > 0");
    cfg = ControllerConfig{};
    cfg.u_min = 1.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ControllerConfig{};
    cfg.omega_e = 0.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
}
