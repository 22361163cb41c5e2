#pragma once

// Horizontal-plane UUV plant: 3-DOF kinematics and the decoupled
// surge/sway/yaw dynamics
//
//   m_u u' + d_u u + q_u u|u| = tau_x
//   m_v v' + d_v v + q_v v|v| = tau_y
//   m_r r' + d_r r + q_r r|r| = tau_n
//
// No gravity/buoyancy term (neutral buoyancy) and no Coriolis coupling.

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "uuvsim/angles.hpp"
#include "uuvsim/errors.hpp"

namespace uuvsim {

/// Inertial posture. The heading is normalized to (-pi, pi] on construction.
struct Pose
{
    double x{0.0};
    double y{0.0};
    double psi{0.0};

    Pose() = default;
    Pose(double x_, double y_, double psi_) : x(x_), y(y_), psi(wrap_angle(psi_)) {}

    Eigen::Vector3d vec() const { return {x, y, psi}; }
    static Pose from(const Eigen::Vector3d& p) { return {p[0], p[1], p[2]}; }
};

/// Inertial-frame rate of the posture (x', y', psi').
struct PoseRate
{
    double x_dot{0.0};
    double y_dot{0.0};
    double psi_dot{0.0};

    Eigen::Vector3d vec() const { return {x_dot, y_dot, psi_dot}; }
};

/// Body-frame velocity: surge, sway, yaw rate.
struct BodyVelocity
{
    double u{0.0};
    double v{0.0};
    double r{0.0};

    Eigen::Vector3d vec() const { return {u, v, r}; }
    static BodyVelocity from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
    bool finite() const { return std::isfinite(u) && std::isfinite(v) && std::isfinite(r); }
};

struct BodyAccel
{
    double u_dot{0.0};
    double v_dot{0.0};
    double r_dot{0.0};

    Eigen::Vector3d vec() const { return {u_dot, v_dot, r_dot}; }
    static BodyAccel from(const Eigen::Vector3d& a) { return {a[0], a[1], a[2]}; }
};

/// Control force (surge, sway) and yaw moment.
struct Torque
{
    double x{0.0};
    double y{0.0};
    double n{0.0};

    Eigen::Vector3d vec() const { return {x, y, n}; }
    static Torque from(const Eigen::Vector3d& t) { return {t[0], t[1], t[2]}; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(n); }
};

/// Hydrodynamic coefficients of the decoupled plant. m_* include added mass.
struct VehicleParams
{
    double m_u{54.35};
    double m_v{54.35};
    double m_r{1.93};
    double d_u{17.51};
    double d_v{17.51};
    double d_r{2.4};
    double q_u{10.0};
    double q_v{10.0};
    double q_r{2.0};

    Eigen::Vector3d mass() const { return {m_u, m_v, m_r}; }
    Eigen::Vector3d linear_drag() const { return {d_u, d_v, d_r}; }
    Eigen::Vector3d quadratic_drag() const { return {q_u, q_v, q_r}; }

    /// Every coefficient multiplied by `factor` (model-mismatch experiments).
    VehicleParams scaled(double factor) const
    {
        return {m_u * factor, m_v * factor, m_r * factor, d_u * factor, d_v * factor,
                d_r * factor, q_u * factor, q_v * factor, q_r * factor};
    }

    void validate() const
    {
        const double all[] = {m_u, m_v, m_r, d_u, d_v, d_r, q_u, q_v, q_r};
        const char* names[] = {"m_u", "m_v", "m_r", "d_u", "d_v", "d_r", "q_u", "q_v", "q_r"};
        for (int i = 0; i < 9; ++i) {
            if (!(all[i] > 0.0) || !std::isfinite(all[i])) {
                throw ConfigError(std::string("vehicle.") + names[i] + " must be finite and > 0");
            }
        }
    }
};

/// Body-to-inertial rotation of the velocity (kinematic transform J(eta)).
inline PoseRate body_to_inertial(double psi, const BodyVelocity& vel)
{
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    return {vel.u * c - vel.v * s, vel.u * s + vel.v * c, vel.r};
}

inline BodyVelocity inertial_to_body(double psi, const PoseRate& rate)
{
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    return {rate.x_dot * c + rate.y_dot * s, -rate.x_dot * s + rate.y_dot * c, rate.psi_dot};
}

/// Hydrodynamic damping d*v + q*v|v|, per axis.
inline Eigen::Vector3d damping_force(const VehicleParams& p, const BodyVelocity& vel)
{
    const Eigen::Vector3d v = vel.vec();
    return p.linear_drag().cwiseProduct(v) + p.quadratic_drag().cwiseProduct(v.cwiseProduct(v.cwiseAbs()));
}

inline BodyAccel acceleration(const VehicleParams& p, const BodyVelocity& vel, const Torque& tau)
{
    return BodyAccel::from((tau.vec() - damping_force(p, vel)).cwiseQuotient(p.mass()));
}

/// Diagonal of d(acceleration)/d(velocity): -(d + 2 q |v|) / m per axis.
inline Eigen::Vector3d acceleration_jacobian(const VehicleParams& p, const BodyVelocity& vel)
{
    const Eigen::Vector3d v = vel.vec();
    return -(p.linear_drag() + 2.0 * p.quadratic_drag().cwiseProduct(v.cwiseAbs())).cwiseQuotient(p.mass());
}

/// Combined kinematic + dynamic plant state.
struct VehicleState
{
    Pose pose;
    BodyVelocity vel;
};

namespace detail {

using State6 = Eigen::Matrix<double, 6, 1>;

inline State6 plant_derivative(const VehicleParams& p, const State6& s, const Torque& tau)
{
    const BodyVelocity vel{s[3], s[4], s[5]};
    const PoseRate rate = body_to_inertial(s[2], vel);
    const BodyAccel acc = acceleration(p, vel, tau);
    State6 d;
    d << rate.x_dot, rate.y_dot, rate.psi_dot, acc.u_dot, acc.v_dot, acc.r_dot;
    return d;
}

inline State6 pack(const VehicleState& st)
{
    State6 s;
    s << st.pose.x, st.pose.y, st.pose.psi, st.vel.u, st.vel.v, st.vel.r;
    return s;
}

inline VehicleState unpack(const State6& s) { return {Pose{s[0], s[1], s[2]}, BodyVelocity{s[3], s[4], s[5]}}; }

}  // namespace detail

/// One classical RK4 step with the torque held constant over the step.
inline VehicleState integrate_rk4(const VehicleParams& p, const VehicleState& st, const Torque& tau, double dt)
{
    using detail::plant_derivative;
    const detail::State6 s = detail::pack(st);
    const detail::State6 k1 = plant_derivative(p, s, tau);
    const detail::State6 k2 = plant_derivative(p, s + 0.5 * dt * k1, tau);
    const detail::State6 k3 = plant_derivative(p, s + 0.5 * dt * k2, tau);
    const detail::State6 k4 = plant_derivative(p, s + dt * k3, tau);
    return detail::unpack(s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

inline VehicleState integrate_euler(const VehicleParams& p, const VehicleState& st, const Torque& tau, double dt)
{
    const detail::State6 s = detail::pack(st);
    return detail::unpack(s + dt * detail::plant_derivative(p, s, tau));
}

/// 1/2 (m_u u^2 + m_v v^2 + m_r r^2).
inline double kinetic_energy(const VehicleParams& p, const BodyVelocity& vel)
{
    const Eigen::Vector3d v = vel.vec();
    return 0.5 * p.mass().dot(v.cwiseProduct(v));
}

}  // namespace uuvsim
