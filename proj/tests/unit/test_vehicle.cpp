#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "uuvsim/angles.hpp"
#include "uuvsim/vehicle.hpp"

using namespace uuvsim;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Angles, WrapIntoHalfOpenInterval)
{
    EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
    EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
    EXPECT_NEAR(wrap_angle(3.0 * kPi), kPi, 1e-12);
    EXPECT_NEAR(wrap_angle(2.0 * kPi + 0.25), 0.25, 1e-12);
    EXPECT_NEAR(angle_diff(kPi - 0.1, -kPi + 0.1), -0.2, 1e-12);
}

TEST(Vehicle, PoseHeadingIsNormalized)
{
    const Pose p{1.0, 2.0, 2.0 * kPi + 0.5};
    EXPECT_NEAR(p.psi, 0.5, 1e-12);
}

TEST(Vehicle, BodyToInertialExamples)
{
    auto r = body_to_inertial(0.0, {1.0, 0.0, 0.0});
    EXPECT_DOUBLE_EQ(r.x_dot, 1.0);
    EXPECT_DOUBLE_EQ(r.y_dot, 0.0);
    EXPECT_DOUBLE_EQ(r.psi_dot, 0.0);

    r = body_to_inertial(kPi / 2.0, {1.0, 0.0, 0.0});
    EXPECT_NEAR(r.x_dot, 0.0, 1e-15);
    EXPECT_NEAR(r.y_dot, 1.0, 1e-15);

    // 0.4 * sqrt(2) along the diagonal gives 0.4 m/s on each inertial axis.
    r = body_to_inertial(kPi / 4.0, {0.4 * std::sqrt(2.0), 0.0, 0.0});
    EXPECT_NEAR(r.x_dot, 0.4, 1e-12);
    EXPECT_NEAR(r.y_dot, 0.4, 1e-12);
    r = body_to_inertial(kPi / 4.0, {0.5657, 0.0, 0.0});
    EXPECT_NEAR(r.x_dot, 0.4, 1e-4);
    EXPECT_NEAR(r.y_dot, 0.4, 1e-4);
}

TEST(Vehicle, InertialToBodyExamples)
{
    auto v = inertial_to_body(0.0, {1.0, 0.0, 0.0});
    EXPECT_DOUBLE_EQ(v.u, 1.0);
    v = inertial_to_body(kPi / 2.0, {0.0, 1.0, 0.0});
    EXPECT_NEAR(v.u, 1.0, 1e-15);
    EXPECT_NEAR(v.v, 0.0, 1e-15);
}

TEST(Vehicle, RotationIsAnIsometryAndInvertible)
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const BodyVelocity v{d(gen), d(gen), d(gen)};
        const double psi = d(gen);
        const PoseRate r = body_to_inertial(psi, v);
        EXPECT_NEAR(std::hypot(r.x_dot, r.y_dot), std::hypot(v.u, v.v), 1e-12);
        const BodyVelocity back = inertial_to_body(psi, r);
        EXPECT_NEAR(back.u, v.u, 1e-12);
        EXPECT_NEAR(back.v, v.v, 1e-12);
        EXPECT_DOUBLE_EQ(back.r, v.r);
    }
}

TEST(Vehicle, AccelerationExamples)
{
    const VehicleParams p;
    auto a = acceleration(p, {}, {});
    EXPECT_EQ(a.u_dot, 0.0);
    EXPECT_EQ(a.v_dot, 0.0);
    EXPECT_EQ(a.r_dot, 0.0);

    a = acceleration(p, {1.0, 0.0, 0.0}, {});
    EXPECT_NEAR(a.u_dot, -0.50617, 1e-5);
    EXPECT_NEAR(a.u_dot, -(17.51 + 10.0) / 54.35, 1e-15);

    a = acceleration(p, {0.0, 0.0, 0.5}, {});
    EXPECT_NEAR(a.r_dot, -0.88083, 1e-5);
}

TEST(Vehicle, DampingIsOddInVelocity)
{
    const VehicleParams p;
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const BodyVelocity v{d(gen), d(gen), d(gen)};
        const BodyVelocity mv{-v.u, -v.v, -v.r};
        EXPECT_TRUE((damping_force(p, v) + damping_force(p, mv)).isZero(1e-12));
    }
}

TEST(Vehicle, UnforcedMotionDissipatesEnergy)
{
    const VehicleParams p;
    VehicleState s{Pose{}, BodyVelocity{1.0, -0.7, 0.5}};
    double e = kinetic_energy(p, s.vel);
    for (int k = 0; k < 2000; ++k) {
        s = integrate_rk4(p, s, {}, 0.01);
        const double next = kinetic_energy(p, s.vel);
        ASSERT_LT(next, e);
        e = next;
    }
}

TEST(Vehicle, Rk4MatchesFineEulerOnOpenLoopDecay)
{
    const VehicleParams p;
    const VehicleState s0{Pose{}, BodyVelocity{1.0, 1.0, 0.5}};
    VehicleState a = s0;
    for (int k = 0; k < 100; ++k) a = integrate_rk4(p, a, {}, 0.01);
    VehicleState b = s0;
    for (int k = 0; k < 100000; ++k) b = integrate_euler(p, b, {}, 1e-5);
    EXPECT_NEAR(a.pose.x, b.pose.x, 1e-4);
    EXPECT_NEAR(a.pose.y, b.pose.y, 1e-4);
    EXPECT_NEAR(a.pose.psi, b.pose.psi, 1e-4);
    EXPECT_NEAR(a.vel.u, b.vel.u, 1e-4);
    EXPECT_NEAR(a.vel.v, b.vel.v, 1e-4);
    EXPECT_NEAR(a.vel.r, b.vel.r, 1e-4);
}

TEST(Vehicle, SteadyStateSurgeUnderConstantThrust)
{
    // Balance d u + q u^2 = tau, so u* = (-d + sqrt(d^2 + 4 q tau)) / (2 q).
    const VehicleParams p;
    const double tau = 27.51;
    VehicleState s;
    for (int k = 0; k < 5000; ++k) s = integrate_rk4(p, s, {tau, 0.0, 0.0}, 0.01);
    EXPECT_NEAR(s.vel.u, 1.0, 1e-9);
}

TEST(Vehicle, ParamsValidate)
{
    VehicleParams p;
    EXPECT_NO_THROW(p.validate());
    p.m_r = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = VehicleParams{};
    p.q_u = -1.0;
    EXPECT_THROW(p.validate(), ConfigError);
}
