#pragma once

// Reference trajectories with analytic derivatives.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

#include "uuvsim/errors.hpp"
#include "uuvsim/kinematic_control.hpp"
#include "uuvsim/vehicle.hpp"

namespace uuvsim {

/// x = x0 + speed_x t, y = y0 + speed_y t, constant heading.
struct StraightLine
{
    double x0{3.0};
    double y0{0.0};
    double speed_x{0.4};
    double speed_y{0.4};
    double heading{std::numbers::pi / 4.0};
};

/// x = cx + R cos(w t + phase), y = cy + R sin(w t + phase), psi = w t + phase + heading_offset.
struct Circle
{
    double radius{5.0};
    double center_x{0.0};
    double center_y{7.0};
    double angular_rate{0.1};
    double phase{0.0};
    double heading_offset{0.0};
};

/// Sampled trajectory, linearly interpolated. Heading samples may be unwrapped.
struct TableTrajectory
{
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> psi;

    void validate() const
    {
        const auto n = t.size();
        if (n < 2 || x.size() != n || y.size() != n || psi.size() != n) {
            throw ConfigError("table trajectory needs >= 2 samples and equal-length t, x, y, psi");
        }
        for (std::size_t i = 1; i < n; ++i) {
            if (!(t[i] > t[i - 1])) throw ConfigError("table trajectory times must be strictly increasing");
        }
    }
};

using Trajectory = std::variant<StraightLine, Circle, TableTrajectory>;

namespace detail {

/// Derivative of the body-frame reference velocity given inertial rate/accel.
inline BodyAccel body_reference_accel(double psi, const PoseRate& rate, double x_dd, double y_dd, double psi_dd,
                                      const BodyVelocity& vel)
{
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    return {c * x_dd + s * y_dd + rate.psi_dot * vel.v, -s * x_dd + c * y_dd - rate.psi_dot * vel.u, psi_dd};
}

inline ReferenceState make_reference(double x, double y, double psi, const PoseRate& rate, double x_dd, double y_dd,
                                     double psi_dd)
{
    ReferenceState ref;
    ref.pose = Pose{x, y, psi};
    ref.rate = rate;
    ref.vel = reference_body_velocity(rate, psi);
    ref.accel = body_reference_accel(psi, rate, x_dd, y_dd, psi_dd, ref.vel);
    return ref;
}

}  // namespace detail

inline ReferenceState reference_at(const StraightLine& s, double t)
{
    const PoseRate rate{s.speed_x, s.speed_y, 0.0};
    return detail::make_reference(s.x0 + s.speed_x * t, s.y0 + s.speed_y * t, s.heading, rate, 0.0, 0.0, 0.0);
}

inline ReferenceState reference_at(const Circle& c, double t)
{
    const double w = c.angular_rate;
    const double th = w * t + c.phase;
    const double R = c.radius;
    const PoseRate rate{-R * w * std::sin(th), R * w * std::cos(th), w};
    return detail::make_reference(c.center_x + R * std::cos(th), c.center_y + R * std::sin(th),
                                  th + c.heading_offset, rate, -R * w * w * std::cos(th), -R * w * w * std::sin(th),
                                  0.0);
}

inline ReferenceState reference_at(const TableTrajectory& tab, double t)
{
    tab.validate();
    const double tol = 1e-9 * std::max(1.0, std::abs(tab.t.back()));
    if (t < tab.t.front() - tol || t > tab.t.back() + tol) {
        throw RangeError("time " + std::to_string(t) + " outside table trajectory range");
    }
    auto it = std::upper_bound(tab.t.begin(), tab.t.end(), t);
    std::size_t i = static_cast<std::size_t>(std::distance(tab.t.begin(), it));
    i = std::clamp<std::size_t>(i, 1, tab.t.size() - 1);
    const std::size_t j = i - 1;
    const double h = tab.t[i] - tab.t[j];
    const double a = std::clamp((t - tab.t[j]) / h, 0.0, 1.0);
    const auto lerp = [&](const std::vector<double>& v) { return v[j] + a * (v[i] - v[j]); };
    const auto slope = [&](const std::vector<double>& v) { return (v[i] - v[j]) / h; };
    const PoseRate rate{slope(tab.x), slope(tab.y), slope(tab.psi)};
    return detail::make_reference(lerp(tab.x), lerp(tab.y), lerp(tab.psi), rate, 0.0, 0.0, 0.0);
}

inline ReferenceState reference_at(const Trajectory& traj, double t)
{
    return std::visit([t](const auto& tr) { return reference_at(tr, t); }, traj);
}

}  // namespace uuvsim
