#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "vmerge/stability_analysis.hpp"

using namespace vmerge;
using Catch::Approx;

TEST_CASE("q_eval limits and spot values") {
    SECTION("zero frequency equals the position weight") {
        for (auto scheme : {WeightScheme::Equal, WeightScheme::Geometric}) {
            const auto spec = TransferSpec::make(scheme, 1.4, 0.3, 1.0, 3);
            for (int k = 1; k <= 3; ++k) {
                const auto q = q_eval(spec, k, 0.0);
                REQUIRE(q.real() == Approx(spec.weights.alpha_b[k - 1]));
                REQUIRE(q.imag() == Approx(0.0));
            }
        }
    }
    SECTION("high-frequency limit equals the feedforward weight") {
        const auto spec = TransferSpec::make(WeightScheme::Geometric, 1.4, 0.3, 1.0, 4);
        for (int k = 1; k <= 4; ++k)
            REQUIRE(std::abs(q_eval(spec, k, 1e6)) ==
                    Approx(spec.weights.alpha_f[k - 1]).epsilon(1e-9).margin(1e-9));
    }
    SECTION("imaginary-axis cancellation point") {
        const auto spec = TransferSpec::make(WeightScheme::Equal, 0.4, 0.3, 1.0, 1);
        const double w = std::sqrt(0.4);
        REQUIRE(std::abs(q_eval(spec, 1, w)) == Approx(3.0).epsilon(1e-9));
    }
    SECTION("rank bounds") {
        const auto spec = TransferSpec::make(WeightScheme::Equal, 1.4, 0.3, 1.0, 2);
        REQUIRE_THROWS_AS(q_eval(spec, 0, 1.0), std::out_of_range);
        REQUIRE_THROWS_AS(q_eval(spec, 3, 1.0), std::out_of_range);
    }
}

TEST_CASE("hinf_norm pinned values") {
    SECTION("default gains, N=1: norm 1 at the frequency limits") {
        const auto spec = TransferSpec::make(WeightScheme::Equal, 1.4, 0.3, 1.0, 1);
        const auto h = hinf_norm(spec, 1);
        REQUIRE(h.value == Approx(1.0).margin(1e-9));
        REQUIRE(h.argmax_omega == 0.0);
    }
    SECTION("string-unstable gains, N=1: norm 3 near 0.6325 rad/s") {
        const auto spec = TransferSpec::make(WeightScheme::Equal, 0.4, 0.3, 1.0, 1);
        const auto h = hinf_norm(spec, 1);
        REQUIRE(h.value == Approx(3.0).margin(1e-3));
        REQUIRE(h.argmax_omega == Approx(std::sqrt(0.4)).margin(1e-3));
    }
    SECTION("stable N=2 equal: each rank contributes 1/2") {
        const auto spec = TransferSpec::make(WeightScheme::Equal, 1.4, 0.3, 1.0, 2);
        REQUIRE(hinf_norm(spec, 1).value == Approx(0.5).margin(1e-9));
        REQUIRE(hinf_norm(spec, 2).value == Approx(0.5).margin(1e-9));
    }
    SECTION("imaginary-axis pole reports +inf") {
        // omega_e * tau_bar == omega_v puts the J zero on the axis.
        TransferSpec spec;
        spec.omega_e = 1.0;
        spec.omega_v = 1.0;
        spec.tau = 1.0;
        spec.weights = make_weights(WeightScheme::Equal, 1);
        REQUIRE(std::isinf(hinf_norm(spec, 1).value));
        REQUIRE(std::isinf(sum_condition(spec).value));
    }
}

TEST_CASE("closed-form conditions") {
    SECTION("default gains, N=1 equal") {
        const auto r = closed_form_condition(WeightScheme::Equal, 1.4, 0.3, 1.0, 1);
        REQUIRE(r.holds);
        REQUIRE(r.margin == Approx(0.4));
    }
    SECTION("geometric N=2 uses theta = 1.5") {
        const auto r = closed_form_condition(WeightScheme::Geometric, 1.4, 0.3, 1.0, 2);
        REQUIRE(r.holds);
        REQUIRE(r.margin == Approx(1.4 * 1.5 - 0.6));
    }
    SECTION("weak spacing gain fails") {
        const auto r = closed_form_condition(WeightScheme::Equal, 0.4, 0.3, 1.0, 1);
        REQUIRE(!r.holds);
        REQUIRE(r.margin == Approx(-0.1));
    }
}

TEST_CASE("sum condition") {
    SECTION("default gains, N=1") {
        const auto spec = TransferSpec::make(WeightScheme::Equal, 1.4, 0.3, 1.0, 1);
        const auto r = sum_condition(spec);
        REQUIRE(r.holds);
        REQUIRE(r.value == Approx(1.0).margin(1e-9));
    }
    SECTION("stable N=2 equal sums to 1") {
        const auto spec = TransferSpec::make(WeightScheme::Equal, 1.4, 0.3, 1.0, 2);
        const auto r = sum_condition(spec);
        REQUIRE(r.holds);
        REQUIRE(r.value == Approx(1.0).margin(1e-9));
    }
    SECTION("failing gains exceed 1") {
        const auto spec = TransferSpec::make(WeightScheme::Equal, 0.4, 0.3, 1.0, 1);
        const auto r = sum_condition(spec);
        REQUIRE(!r.holds);
        REQUIRE(r.value == Approx(3.0).margin(1e-3));
    }
}

TEST_CASE("margin sign predicts the numeric norms") {
    std::mt19937_64 gen(99);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    };
    const double taus[] = {0.5, 1.0, 1.5};
    for (auto scheme : {WeightScheme::Equal, WeightScheme::Geometric}) {
        for (int trial = 0; trial < 150; ++trial) {
            const double we = uniform(1e-3, 3.0);
            const double wv = uniform(0.0, 1.5);
            const double tau = taus[gen() % 3];
            const int n = 1 + static_cast<int>(gen() % 6);
            const auto cf = closed_form_condition(scheme, we, wv, tau, n);
            if (std::abs(cf.margin) < 1e-4) continue;
            const auto spec = TransferSpec::make(scheme, we, wv, tau, n);
            bool numeric_ok = true;
            if (scheme == WeightScheme::Equal) {
                double worst = 0.0;
                for (int k = 1; k <= n; ++k) worst = std::max(worst, hinf_norm(spec, k).value);
                numeric_ok = n * worst <= 1.0 + 1e-6;
            } else {
                numeric_ok = sum_condition(spec).value <= 1.0 + 1e-6;
            }
            INFO("scheme=" << int(scheme) << " we=" << we << " wv=" << wv << " tau=" << tau
                           << " n=" << n << " margin=" << cf.margin);
            REQUIRE(numeric_ok == cf.holds);
        }
    }
}

TEST_CASE("local stability check") {
    REQUIRE(locally_stable(TransferSpec::make(WeightScheme::Equal, 1.4, 0.3, 1.0, 1)));
    // omega_e * tau_bar < omega_v: Routh fails although omega_e > 0.
    REQUIRE(!locally_stable(TransferSpec::make(WeightScheme::Equal, 0.4, 0.5, 1.0, 1)));
    const auto rep = analyze_gains(WeightScheme::Equal, 0.4, 0.5, 1.0, 1);
    REQUIRE(!rep.locally_stable);
}

TEST_CASE("feasible region grids") {
    SECTION("boundary passes through (1, 0.5) for tau=1, N=1") {
        const auto g = feasible_region(WeightScheme::Equal, 1.0, 1, 3.0, 1.5, 60, 30);
        REQUIRE(g.boundary_slope == Approx(0.5));
        // Cell centers just below/above the line.
        REQUIRE(closed_form_condition(WeightScheme::Equal, 1.0, 0.49, 1.0, 1).holds);
        REQUIRE(!closed_form_condition(WeightScheme::Equal, 1.0, 0.51, 1.0, 1).holds);
    }
    SECTION("region grows with N and tau") {
        double prev = -1.0;
        for (int n = 1; n <= 6; ++n) {
            const auto g = feasible_region(WeightScheme::Equal, 1.0, n);
            REQUIRE(g.area_fraction() >= prev);
            prev = g.area_fraction();
        }
        prev = -1.0;
        for (double tau : {0.5, 1.0, 1.5}) {
            const auto g = feasible_region(WeightScheme::Geometric, tau, 3);
            REQUIRE(g.area_fraction() >= prev);
            prev = g.area_fraction();
        }
    }
    SECTION("geometric region is contained in the equal region for N >= 2") {
        for (int n = 2; n <= 6; ++n) {
            const auto ge = feasible_region(WeightScheme::Equal, 1.0, n);
            const auto gg = feasible_region(WeightScheme::Geometric, 1.0, n);
            for (std::size_t i = 0; i < ge.feasible.size(); ++i)
                if (gg.feasible[i]) REQUIRE(ge.feasible[i]);
        }
    }
    SECTION("degenerate grids are rejected") {
        REQUIRE_THROWS_AS(feasible_region(WeightScheme::Equal, 1.0, 1, 3.0, 1.5, 0, 10),
                          std::invalid_argument);
    }
}

TEST_CASE("energy report basics") {
    const auto topo = build_topology({Lane::Mainline, Lane::Mainline, Lane::Mainline});
    SECTION("constant equal speeds make the inequality tight") {
        const std::vector<std::vector<double>> speeds(3, std::vector<double>(100, 20.0));
        const auto rep = energy_report(0.01, speeds, {20.0, 20.0, 20.0}, topo);
        REQUIRE(rep.energy_abs[0] == Approx(rep.energy_abs[1]));
        REQUIRE(rep.all_verdicts_abs);
        REQUIRE(rep.energy_dev[2] == Approx(0.0));
    }
    SECTION("a noisier follower fails the verdict") {
        std::vector<std::vector<double>> speeds(2, std::vector<double>(100, 20.0));
        for (std::size_t i = 0; i < 100; ++i) speeds[1][i] = 20.0 + ((i % 2) ? 2.0 : -2.0);
        const auto topo2 = build_topology({Lane::Mainline, Lane::Mainline});
        const auto rep = energy_report(0.01, speeds, {20.0, 20.0}, topo2);
        REQUIRE(!rep.verdict_abs[1]);
        REQUIRE(!rep.all_verdicts_abs);
    }
    SECTION("short traces are rejected") {
        const std::vector<std::vector<double>> speeds(3, std::vector<double>(1, 20.0));
        REQUIRE_THROWS_AS(energy_report(0.01, speeds, {20, 20, 20}, topo),
                          std::invalid_argument);
    }
}
