#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "stirap/pulses_frame.hpp"

namespace {

using namespace stirap;
constexpr double pi = std::numbers::pi;

PulseParams defaults() { return PulseParams::symmetric(10.0, 1.0, 5.0); }

SystemBathParams with_delta(double delta) {
    SystemBathParams s;
    s.set_detuning(delta);
    return s;
}

TEST(Pulses, PumpShape) {
    const auto p = defaults();
    EXPECT_DOUBLE_EQ(pulse_omega1(1.0, p), 10.0);
    EXPECT_NEAR(pulse_omega1(-1.0, p), 10.0 * std::exp(-4.0), 1e-15);
    EXPECT_NEAR(pulse_omega1(-5.0, p), 10.0 * std::exp(-36.0), 1e-25);
}

TEST(Pulses, StokesShape) {
    const auto p = defaults();
    EXPECT_DOUBLE_EQ(pulse_omega2(-1.0, p), 10.0);
    EXPECT_NEAR(pulse_omega2(0.0, p), 10.0 * std::exp(-1.0), 1e-14);
    EXPECT_DOUBLE_EQ(pulse_omega2(0.0, p), pulse_omega1(0.0, p));
    EXPECT_NEAR(pulse_omega2(5.0, p), 10.0 * std::exp(-36.0), 1e-25);
}

TEST(Pulses, MirrorSymmetryAndNonNegativity) {
    const PulseParams p = PulseParams::symmetric(7.0, 0.8, 4.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> t(-4.0, 4.0);
    for (int i = 0; i < 200; ++i) {
        const double x = t(rng);
        EXPECT_DOUBLE_EQ(pulse_omega2(x, p), pulse_omega1(-x, p));
        EXPECT_GE(pulse_omega1(x, p), 0.0);
        const double ol = omega_l(x, p);
        EXPECT_DOUBLE_EQ(ol * ol, pulse_omega1(x, p) * pulse_omega1(x, p) + pulse_omega2(x, p) * pulse_omega2(x, p));
    }
}

TEST(PulseParams, Validation) {
    EXPECT_THROW(PulseParams::symmetric(0.0, 1.0, 5.0), std::invalid_argument);
    EXPECT_THROW(PulseParams::symmetric(10.0, -1.0, 5.0), std::invalid_argument);
    EXPECT_THROW(PulseParams::symmetric(10.0, 1.0, 0.5), std::invalid_argument);
    PulseParams skew{10.0, 1.0, -4.0, 5.0};
    EXPECT_THROW(skew.validate(), std::invalid_argument);
}

TEST(SystemBathParams, DerivedQuantities) {
    SystemBathParams s;
    s.nu = 10.0;
    s.nu_prime = 9.5;
    EXPECT_DOUBLE_EQ(s.delta(), 0.5);
    s.set_detuning(-0.25);
    EXPECT_DOUBLE_EQ(s.nu_prime, 10.25);
    s.lambda_weights = {1.0, 0.5, 2.0};
    EXPECT_DOUBLE_EQ(s.Lambda(), 1.0 + 0.25 + 4.0);
    EXPECT_EQ(s.L(), 3u);
    EXPECT_GE(s.Lambda(), 1.0);
    s.lambda_weights = {0.9};
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.lambda_weights = {};
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(SpinCouplings, ScaledByLambdaAndRatio) {
    SystemBathParams s;
    s.eta = 0.2;
    s.r_eta = -3.0;
    s.lambda_weights = {1.0, 0.5};
    const auto c = SpinCouplings::from(s);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_DOUBLE_EQ(c.to_g1[1], 0.1);
    EXPECT_DOUBLE_EQ(c.to_g2[0], -0.6);
}

TEST(MixingTheta, Examples) {
    const auto p = defaults();
    EXPECT_NEAR(mixing_theta(0.0, p), pi / 4, 1e-15);
    EXPECT_LT(mixing_theta(-5.0, p), 1e-8);
    EXPECT_NEAR(mixing_theta(-5.0, p), std::exp(-20.0), 1e-20);
    EXPECT_LT(pi / 2 - mixing_theta(5.0, p), 1e-8);
}

TEST(MixingTheta, DegenerateInputUsesEndpointLimit) {
    const auto p = PulseParams::symmetric(1.0, 1.0, 40.0);
    const auto early = mixing_theta_sample(-40.0, p);
    const auto late = mixing_theta_sample(40.0, p);
    EXPECT_TRUE(early.degenerate);
    EXPECT_TRUE(late.degenerate);
    EXPECT_EQ(early.theta, 0.0);
    EXPECT_EQ(late.theta, pi / 2);
    EXPECT_FALSE(mixing_theta_sample(0.0, p).degenerate);
    const FrameGeometry geo(p, 0.0, 81);
    EXPECT_GT(geo.degenerate_samples(), 0u);
}

TEST(MixingTheta, MonotoneOverWindow) {
    const auto p = defaults();
    double prev = -1.0;
    for (int i = 0; i <= 2000; ++i) {
        const double th = mixing_theta(-5.0 + 0.005 * i, p);
        EXPECT_GE(th, prev);
        EXPECT_GE(th, 0.0);
        EXPECT_LE(th, pi / 2);
        prev = th;
    }
}

TEST(MixingPhi, Examples) {
    const auto p = defaults();
    EXPECT_NEAR(mixing_phi(0.3, p, with_delta(0.0)), pi / 4, 1e-15);
    EXPECT_EQ(mixing_phi_from(0.0, 2.0), 0.0);
    EXPECT_NEAR(mixing_phi_from(1.0, 2.0), pi / 8, 1e-15);
}

TEST(MixingPhi, RangeForNonNegativeDetuning) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ol(0.0, 20.0), d(0.0, 10.0);
    for (int i = 0; i < 500; ++i) {
        const double phi = mixing_phi_from(ol(rng), d(rng));
        EXPECT_GE(phi, 0.0);
        EXPECT_LE(phi, pi / 4);
    }
    EXPECT_LT(mixing_phi_from(1.0, -3.0), pi / 2);
    EXPECT_GT(mixing_phi_from(1.0, -3.0), pi / 4);
}

TEST(Eigenvalues, Examples) {
    auto ev = eigenvalues_from(0.0, 2.0);
    EXPECT_EQ(ev.e0, 0.0);
    EXPECT_DOUBLE_EQ(ev.e_plus, 2.0);
    EXPECT_EQ(ev.e_minus, 0.0);
    ev = eigenvalues_from(1.7, 0.0);
    EXPECT_DOUBLE_EQ(ev.e_plus, 1.7);
    EXPECT_DOUBLE_EQ(ev.e_minus, -1.7);
    ev = eigenvalues_from(2.0, 3.0);
    EXPECT_DOUBLE_EQ(ev.e_plus, 4.0);
    EXPECT_DOUBLE_EQ(ev.e_minus, -1.0);
}

TEST(Eigenvalues, ProductSignsAndSplitting) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ol(0.0, 30.0), d(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const double o = ol(rng), dl = d(rng);
        const auto ev = eigenvalues_from(o, dl);
        EXPECT_LE(ev.e_minus, 0.0);
        EXPECT_GE(ev.e_plus, 0.0);
        EXPECT_NEAR(ev.e_plus * ev.e_minus, -o * o, 1e-12 * std::max(1.0, o * o));
        EXPECT_NEAR(ev.e_plus - ev.e_minus, std::sqrt(dl * dl + 4 * o * o), 1e-12 * (1 + std::abs(dl) + o));
    }
    // tiny coupling against a large detuning keeps relative precision
    const auto ev = eigenvalues_from(1e-6, 10.0);
    EXPECT_NEAR(ev.e_minus, -1e-13, 1e-25);
}

TEST(FrameGeometry, TwoNodeGrid) {
    const FrameGeometry geo = build_frame_geometry(defaults(), with_delta(0.3), 2);
    ASSERT_EQ(geo.size(), 2u);
    EXPECT_EQ(geo.grid()[0], -5.0);
    EXPECT_EQ(geo.grid()[1], 5.0);
    EXPECT_EQ(geo.a_plus()[0], 0.0);
    EXPECT_EQ(geo.a_minus()[0], 0.0);
}

TEST(FrameGeometry, RejectsTooFewNodes) {
    EXPECT_THROW(build_frame_geometry(defaults(), with_delta(0.0), 1), std::invalid_argument);
}

TEST(FrameGeometry, ZeroDetuningPhasesCancel) {
    const FrameGeometry geo = build_frame_geometry(defaults(), with_delta(0.0), 2001);
    EXPECT_DOUBLE_EQ(geo.a_plus().back(), -geo.a_minus().back());
}

TEST(FrameGeometry, PhaseIntegralMatchesRefinedGrid) {
    const auto s = with_delta(0.0);
    const FrameGeometry coarse = build_frame_geometry(defaults(), s, 10001);
    const FrameGeometry fine = build_frame_geometry(defaults(), s, 100001);
    EXPECT_NEAR(coarse.a_plus().back() / fine.a_plus().back(), 1.0, 1e-8);
}

TEST(FrameGeometry, SimpsonOrderOnRefinement) {
    // interior nodes; A(T) itself converges faster because E± flattens at both ends
    const auto s = with_delta(0.7);
    for (double t : {-1.0, 0.5, 2.0}) {
        auto at = [&](std::size_t n) {
            const auto geo = build_frame_geometry(defaults(), s, n);
            return geo.a_plus()[static_cast<std::size_t>(std::llround((t - geo.t0()) / geo.step()))];
        };
        const double a1 = at(201), a2 = at(401), a3 = at(801);
        EXPECT_NEAR((a1 - a2) / (a2 - a3), 16.0, 16.0 * 0.2) << t;
    }
    const double end_coarse = build_frame_geometry(defaults(), s, 201).a_plus().back();
    const double end_fine = build_frame_geometry(defaults(), s, 401).a_plus().back();
    EXPECT_LE(std::abs(end_coarse - end_fine), 1e3 * std::pow(201.0, -4.0));
}

TEST(FrameGeometry, InvariantsOnGrid) {
    const FrameGeometry geo = build_frame_geometry(defaults(), with_delta(0.4), 4001);
    const auto t = geo.grid();
    for (std::size_t i = 0; i < geo.size(); ++i) {
        if (i > 0) {
            EXPECT_GT(t[i], t[i - 1]);
            EXPECT_GE(geo.a_plus()[i], geo.a_plus()[i - 1]);
            EXPECT_LE(geo.a_minus()[i], geo.a_minus()[i - 1]);
        }
        EXPECT_GE(geo.theta()[i], 0.0);
        EXPECT_LE(geo.theta()[i], pi / 2);
        EXPECT_GE(geo.phi()[i], 0.0);
        EXPECT_LE(geo.phi()[i], pi / 4);
        EXPECT_LE(geo.e_minus()[i], 0.0);
        EXPECT_GE(geo.e_plus()[i], 0.0);
    }
    EXPECT_LT(geo.theta().front(), 1e-8);
    EXPECT_LT(pi / 2 - geo.theta().back(), 1e-8);
}

TEST(FrameGeometry, OffGridInterpolation) {
    const auto s = with_delta(0.4);
    const FrameGeometry geo = build_frame_geometry(defaults(), s, 20001);
    const FrameGeometry ref = build_frame_geometry(defaults(), s, 200001);
    EXPECT_NEAR(geo.a_plus_at(geo.grid()[137]), geo.a_plus()[137], 1e-15);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        const double x = u(rng);
        EXPECT_NEAR(geo.a_plus_at(x), ref.a_plus_at(x), 1e-9);
        EXPECT_NEAR(geo.a_minus_at(x), ref.a_minus_at(x), 1e-9);
        EXPECT_DOUBLE_EQ(geo.theta_at(x), mixing_theta(x, geo.pulses()));
    }
    EXPECT_THROW(geo.a_plus_at(5.5), std::invalid_argument);
    EXPECT_THROW(geo.theta_at(-6.0), std::invalid_argument);
}

} // namespace
