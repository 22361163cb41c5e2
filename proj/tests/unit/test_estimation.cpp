#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "uuvsim/estimation.hpp"

using namespace uuvsim;
using Eigen::Vector3d;

TEST(Noise, ZeroNoiseMeasurementEqualsTruth)
{
    NoiseConfig cfg;
    cfg.q_vel.setZero();
    cfg.q_pos.setZero();
    RandomStream rng(5);
    const VehicleState truth{Pose{1.0, 2.0, 0.3}, BodyVelocity{0.4, -0.1, 0.02}};
    const Measurement m = inject_noise(truth, cfg, rng);
    EXPECT_EQ(m.pose.vec(), truth.pose.vec());
    EXPECT_EQ(m.vel.vec(), truth.vel.vec());
}

TEST(Noise, SameSeedSameSequence)
{
    RandomStream a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.standard_normal();
        EXPECT_EQ(x, b.standard_normal());
        differs = differs || x != c.standard_normal();
    }
    EXPECT_TRUE(differs);
}

TEST(Noise, SplitStreamsAreDistinctAndReproducible)
{
    const RandomStream base(9);
    auto s1 = base.split(1), s1b = base.split(1), s2 = base.split(2);
    const double a = s1.standard_normal();
    EXPECT_EQ(a, s1b.standard_normal());
    EXPECT_NE(a, s2.standard_normal());
}

TEST(Noise, SampleVarianceMatchesConfiguration)
{
    NoiseConfig cfg;
    RandomStream rng(123);
    const VehicleState truth{};
    const int n = 100000;
    Vector3d sum_p = Vector3d::Zero(), sum_v = Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
        const Measurement m = inject_noise(truth, cfg, rng);
        sum_p += m.pose.vec().cwiseProduct(m.pose.vec());
        sum_v += m.vel.vec().cwiseProduct(m.vel.vec());
    }
    const Vector3d var_p = sum_p / n, var_v = sum_v / n;
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(var_p[i] / cfg.r_pos()[i], 1.0, 0.05);
        EXPECT_NEAR(var_v[i] / cfg.r_vel()[i], 1.0, 0.05);
    }
}

TEST(Estimation, ZeroNoiseFilterTracksTruthExactly)
{
    NoiseConfig cfg;
    cfg.q_vel.setZero();
    cfg.q_pos.setZero();
    const VehicleParams p;
    StateEstimator est(cfg, p);
    VehicleState truth{Pose{0.0, 0.0, 0.1}, BodyVelocity{0.5, 0.1, 0.05}};
    est.initialize({truth.pose, truth.vel});
    const Torque tau{10.0, -3.0, 0.4};
    for (int k = 0; k < 2000; ++k) {
        truth = integrate_rk4(p, truth, tau, 0.01);
        est.step({truth.pose, truth.vel}, tau, 0.01);
        ASSERT_NEAR(est.pose().x, truth.pose.x, 1e-9);
        ASSERT_NEAR(est.pose().psi, truth.pose.psi, 1e-9);
        ASSERT_NEAR(est.velocity().u, truth.vel.u, 1e-9);
        ASSERT_NEAR(est.velocity().r, truth.vel.r, 1e-9);
    }
}

TEST(Estimation, StationaryVehicleVarianceReduction)
{
    // Many independent 100-step episodes: spread of the final estimate vs spread of a raw measurement.
    NoiseConfig cfg;
    const VehicleParams p;
    const VehicleState truth{};
    const int episodes = 400;
    double se_est = 0.0, se_raw = 0.0, se_est_u = 0.0, se_raw_u = 0.0;
    for (int ep = 0; ep < episodes; ++ep) {
        RandomStream rng(1000 + ep);
        StateEstimator est(cfg, p);
        Measurement m = inject_noise(truth, cfg, rng);
        est.initialize(m);
        for (int k = 0; k < 100; ++k) {
            m = inject_noise(truth, cfg, rng);
            est.step(m, {}, 0.01);
        }
        se_est += est.pose().x * est.pose().x;
        se_raw += m.pose.x * m.pose.x;
        se_est_u += est.velocity().u * est.velocity().u;
        se_raw_u += m.vel.u * m.vel.u;
    }
    EXPECT_LT(se_est, se_raw);
    EXPECT_LT(se_est_u, se_raw_u);
}

TEST(Estimation, CovarianceStaysSymmetricPsd)
{
    NoiseConfig cfg;
    const VehicleParams p;
    RandomStream proc(1), meas(2);
    StateEstimator est(cfg, p);
    VehicleState truth{Pose{}, BodyVelocity{0.3, 0.0, 0.05}};
    est.initialize(inject_noise(truth, cfg, meas));
    const Torque tau{8.0, 1.0, 0.2};
    for (int k = 0; k < 10000; ++k) {
        truth = apply_process_noise(integrate_rk4(p, truth, tau, 0.01), cfg, proc);
        est.step(inject_noise(truth, cfg, meas), tau, 0.01);
        ASSERT_TRUE(is_symmetric_psd(est.state().cov)) << "step " << k;
    }
}

TEST(Estimation, JacobianMatchesCentralDifferences)
{
    const VehicleParams p;
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    const Torque tau{3.0, -1.0, 0.2};
    for (int i = 0; i < 100; ++i) {
        const Vector3d v(d(gen), d(gen), d(gen));
        const Vector3d J = acceleration_jacobian(p, BodyVelocity::from(v));
        for (int a = 0; a < 3; ++a) {
            const double h = 1e-6 * std::max(1.0, std::abs(v[a]));
            Vector3d vp = v, vm = v;
            vp[a] += h;
            vm[a] -= h;
            const Vector3d fd = (acceleration(p, BodyVelocity::from(vp), tau).vec() -
                                 acceleration(p, BodyVelocity::from(vm), tau).vec()) /
                                (2.0 * h);
            for (int b = 0; b < 3; ++b) {
                const double exact = a == b ? J[a] : 0.0;
                EXPECT_NEAR(fd[b], exact, 1e-6 * std::max(1.0, std::abs(exact)));
            }
        }
    }
    EXPECT_NEAR(acceleration_jacobian(p, BodyVelocity{0.5, 0.0, 0.0})[0], -(17.51 + 10.0) / 54.35, 1e-12);
}

TEST(Estimation, NonFiniteMeasurementFails)
{
    FilterBlock est;
    est.cov = Eigen::Matrix3d::Identity() * 1e-3;
    const Pose bad{std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
    EXPECT_THROW(kf_pose_step(est, bad, {}, 0.01, Vector3d::Constant(1e-5), Vector3d::Constant(1e-4)),
                 NumericalFailure);
}

TEST(Estimation, NoiseConfigValidate)
{
    NoiseConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.q_pos[0] = -1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}
