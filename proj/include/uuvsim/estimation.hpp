#pragma once

// Noise injection and state estimation.
//
// System noise is added to the true state as per-step Gaussian increments;
// measurements are truth plus Gaussian noise with variance r_scale * q.
// Two decoupled filters track the state: a Kalman filter on the pose (the
// body velocity estimate is treated as a known input through J(psi)) and an
// extended Kalman filter on the body velocity through the decoupled drag model.

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "uuvsim/angles.hpp"
#include "uuvsim/errors.hpp"
#include "uuvsim/vehicle.hpp"

namespace uuvsim {

struct NoiseConfig
{
    Eigen::Vector3d q_vel{1e-3, 1e-3, 1e-4};  ///< per-step variance of (u, v, r)
    Eigen::Vector3d q_pos{1e-5, 1e-5, 1e-6};  ///< per-step variance of (x, y, psi)
    double r_scale{10.0};                     ///< measurement variance = r_scale * q
    std::uint64_t seed{1};

    void validate() const
    {
        if ((q_vel.array() < 0.0).any() || (q_pos.array() < 0.0).any()) {
            throw ConfigError("noise variances must be >= 0");
        }
        if (!(r_scale > 0.0)) throw ConfigError("noise.r_scale must be > 0");
    }

    Eigen::Vector3d r_pos() const { return r_scale * q_pos; }
    Eigen::Vector3d r_vel() const { return r_scale * q_vel; }
};

/// Seedable, splittable Gaussian source. A stream is identified by
/// (seed, stream id); `split` derives an independent child stream.
class RandomStream
{
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    RandomStream split(std::uint64_t id) const
    {
        // splitmix64 finalizer over (stream, id)
        std::uint64_t z = stream_ * 0x9E3779B97F4A7C15ULL + id + 1;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return RandomStream(seed_, z ^ (z >> 31));
    }

    double standard_normal() { return normal_(engine_); }

    /// Zero-mean Gaussian vector with the given per-channel variances.
    Eigen::Vector3d gaussian(const Eigen::Vector3d& variance)
    {
        Eigen::Vector3d out;
        for (int i = 0; i < 3; ++i) {
            out[i] = std::sqrt(variance[i]) * standard_normal();
        }
        return out;
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Measurement
{
    Pose pose;
    BodyVelocity vel;
};

/// truth + N(0, r_scale * q) on every channel.
inline Measurement inject_noise(const VehicleState& truth, const NoiseConfig& cfg, RandomStream& rng)
{
    const Eigen::Vector3d dp = rng.gaussian(cfg.r_pos());
    const Eigen::Vector3d dv = rng.gaussian(cfg.r_vel());
    return {Pose{truth.pose.x + dp[0], truth.pose.y + dp[1], truth.pose.psi + dp[2]},
            BodyVelocity::from(truth.vel.vec() + dv)};
}

/// truth + N(0, q): per-step system noise on the simulated vehicle.
inline VehicleState apply_process_noise(const VehicleState& truth, const NoiseConfig& cfg, RandomStream& rng)
{
    const Eigen::Vector3d dp = rng.gaussian(cfg.q_pos);
    const Eigen::Vector3d dv = rng.gaussian(cfg.q_vel);
    return {Pose{truth.pose.x + dp[0], truth.pose.y + dp[1], truth.pose.psi + dp[2]},
            BodyVelocity::from(truth.vel.vec() + dv)};
}

/// Mean and covariance of one 3-state filter.
struct FilterBlock
{
    Eigen::Vector3d mean{Eigen::Vector3d::Zero()};
    Eigen::Matrix3d cov{Eigen::Matrix3d::Zero()};
};

/// Full 6-state estimate (x, y, psi, u, v, r); the two blocks are independent.
struct EstimatorState
{
    Eigen::Matrix<double, 6, 1> mean{Eigen::Matrix<double, 6, 1>::Zero()};
    Eigen::Matrix<double, 6, 6> cov{Eigen::Matrix<double, 6, 6>::Zero()};
};

template <class Derived>
bool is_symmetric_psd(const Eigen::MatrixBase<Derived>& m, double tol = 1e-10)
{
    if (!m.allFinite()) return false;
    if (!m.isApprox(m.transpose(), 1e-12) && (m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
    using Matrix = Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m.eval());
    return solver.eigenvalues().minCoeff() >= -tol;
}

/// Added to the prior covariance diagonal so that a channel configured with
/// zero process and measurement noise is treated as exactly measured.
inline constexpr double kCovarianceFloor = 1e-12;

namespace detail {

/// Measurement update with H = I. `wrap_index` >= 0 wraps that innovation component.
inline FilterBlock identity_update(const FilterBlock& prior, const Eigen::Vector3d& z, const Eigen::Vector3d& r,
                                   int wrap_index)
{
    Eigen::Vector3d innovation = z - prior.mean;
    if (wrap_index >= 0) innovation[wrap_index] = wrap_angle(innovation[wrap_index]);

    const Eigen::Matrix3d R = r.asDiagonal();
    const Eigen::Matrix3d S = prior.cov + R;
    Eigen::LLT<Eigen::Matrix3d> llt(S);
    if (!S.allFinite() || llt.info() != Eigen::Success) {
        throw NumericalFailure("innovation covariance is not positive definite");
    }
    // K = P S^-1 (S symmetric)
    const Eigen::Matrix3d K = llt.solve(prior.cov).transpose();
    const Eigen::Matrix3d IK = Eigen::Matrix3d::Identity() - K;

    FilterBlock post;
    post.mean = prior.mean + K * innovation;
    post.cov = IK * prior.cov * IK.transpose() + K * R * K.transpose();  // Joseph form
    post.cov = 0.5 * (post.cov + post.cov.transpose());
    if (!post.mean.allFinite() || !post.cov.allFinite()) {
        throw NumericalFailure("filter produced non-finite values");
    }
    return post;
}

}  // namespace detail

/// Pose Kalman filter step: predict through J(psi_hat) * vel_est, update with the pose measurement.
inline FilterBlock kf_pose_step(const FilterBlock& est, const Pose& meas, const BodyVelocity& vel_est, double dt,
                                const Eigen::Vector3d& q_pos, const Eigen::Vector3d& r_pos)
{
    FilterBlock prior;
    const PoseRate rate = body_to_inertial(est.mean[2], vel_est);
    prior.mean = est.mean + dt * rate.vec();
    prior.mean[2] = wrap_angle(prior.mean[2]);
    prior.cov = est.cov;
    prior.cov.diagonal() += q_pos + Eigen::Vector3d::Constant(kCovarianceFloor);

    FilterBlock post = detail::identity_update(prior, meas.vec(), r_pos, 2);
    post.mean[2] = wrap_angle(post.mean[2]);
    return post;
}

/// EKF step on the body velocity: RK4 mean propagation through the decoupled
/// dynamics, covariance through F = I + dt * diag(d accel / d vel).
inline FilterBlock ekf_velocity_step(const FilterBlock& est, const BodyVelocity& meas, const Torque& tau_applied,
                                     const VehicleParams& params, double dt, const Eigen::Vector3d& q_vel,
                                     const Eigen::Vector3d& r_vel)
{
    const auto f = [&](const Eigen::Vector3d& v) { return acceleration(params, BodyVelocity::from(v), tau_applied).vec(); };
    const Eigen::Vector3d v0 = est.mean;
    const Eigen::Vector3d k1 = f(v0);
    const Eigen::Vector3d k2 = f(v0 + 0.5 * dt * k1);
    const Eigen::Vector3d k3 = f(v0 + 0.5 * dt * k2);
    const Eigen::Vector3d k4 = f(v0 + dt * k3);

    FilterBlock prior;
    prior.mean = v0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const Eigen::Matrix3d F =
        (Eigen::Vector3d::Ones() + dt * acceleration_jacobian(params, BodyVelocity::from(v0))).asDiagonal();
    prior.cov = F * est.cov * F.transpose();
    prior.cov.diagonal() += q_vel + Eigen::Vector3d::Constant(kCovarianceFloor);

    return detail::identity_update(prior, meas.vec(), r_vel, -1);
}

/// Pose KF + velocity EKF pair. Initialized from the first measurement with
/// covariance diag(10 q).
class StateEstimator
{
public:
    StateEstimator(const NoiseConfig& noise, const VehicleParams& params) : noise_(noise), params_(params)
    {
        noise_.validate();
        params_.validate();
    }

    void initialize(const Measurement& first)
    {
        pose_.mean = first.pose.vec();
        pose_.cov = (10.0 * noise_.q_pos).asDiagonal();
        vel_.mean = first.vel.vec();
        vel_.cov = (10.0 * noise_.q_vel).asDiagonal();
        initialized_ = true;
    }

    /// One filter cycle: `tau_applied` is the torque held over the elapsed step.
    void step(const Measurement& meas, const Torque& tau_applied, double dt)
    {
        if (!initialized_) {
            initialize(meas);
            return;
        }
        const BodyVelocity vel_prev = BodyVelocity::from(vel_.mean);
        pose_ = kf_pose_step(pose_, meas.pose, vel_prev, dt, noise_.q_pos, noise_.r_pos());
        vel_ = ekf_velocity_step(vel_, meas.vel, tau_applied, params_, dt, noise_.q_vel, noise_.r_vel());
    }

    Pose pose() const { return Pose::from(pose_.mean); }
    BodyVelocity velocity() const { return BodyVelocity::from(vel_.mean); }
    const FilterBlock& pose_block() const { return pose_; }
    const FilterBlock& velocity_block() const { return vel_; }
    bool initialized() const { return initialized_; }

    EstimatorState state() const
    {
        EstimatorState s;
        s.mean << pose_.mean, vel_.mean;
        s.cov.topLeftCorner<3, 3>() = pose_.cov;
        s.cov.bottomRightCorner<3, 3>() = vel_.cov;
        return s;
    }

private:
    NoiseConfig noise_;
    VehicleParams params_;
    FilterBlock pose_;
    FilterBlock vel_;
    bool initialized_{false};
};

}  // namespace uuvsim
