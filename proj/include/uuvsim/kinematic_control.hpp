#pragma once

// Kinematic (outer-loop) backstepping controllers.
//
// Both laws share the structure
//
//   u_c = k_a ( f_x cos psi + f_y sin psi) + u_r cos e_psi - v_r sin e_psi
//   v_c = k_a (-f_x sin psi + f_y cos psi) + u_r sin e_psi + v_r cos e_psi
//   r_c = r_r + k_b f_psi
//
// where (f_x, f_y, f_psi) are the inertial tracking errors (conventional law)
// or the shunting activities driven by those errors (bioinspired law).

#include <array>
#include <cmath>
#include <string>

#include "uuvsim/angles.hpp"
#include "uuvsim/errors.hpp"
#include "uuvsim/shunting.hpp"
#include "uuvsim/vehicle.hpp"

namespace uuvsim {

struct TrackingErrorInertial
{
    double e_x{0.0};
    double e_y{0.0};
    double e_psi{0.0};  ///< wrap-normalized
};

struct TrackingErrorBody
{
    double e1{0.0};
    double e2{0.0};
    double e3{0.0};
};

struct KinematicGains
{
    double k_a{2.0};
    double k_b{1.0};

    void validate() const
    {
        if (!(k_a > 0.0) || !(k_b > 0.0)) {
            throw ConfigError("kinematic gains k_a, k_b must be > 0");
        }
    }
};

struct VelocityCommand
{
    double u_c{0.0};
    double v_c{0.0};
    double r_c{0.0};

    Eigen::Vector3d vec() const { return {u_c, v_c, r_c}; }
    BodyVelocity as_velocity() const { return {u_c, v_c, r_c}; }
    friend VelocityCommand operator+(const VelocityCommand& a, const VelocityCommand& b)
    {
        return {a.u_c + b.u_c, a.v_c + b.v_c, a.r_c + b.r_c};
    }
};

/// Reference posture and its derivatives at one instant.
struct ReferenceState
{
    Pose pose;
    PoseRate rate;      ///< inertial rate of the reference posture
    BodyVelocity vel;   ///< (u_r, v_r, r_r)
    BodyAccel accel;    ///< time derivative of vel; diagnostics only
};

/// Which feedforward the surge command uses. `corrected` makes zero error an
/// equilibrium; `as_printed` keeps the u_r sin(e_psi) - v_r cos(e_psi) variant.
enum class Feedforward { corrected, as_printed };

inline std::string to_string(Feedforward f) { return f == Feedforward::corrected ? "corrected" : "as_printed"; }

inline Feedforward parse_feedforward(const std::string& s)
{
    if (s == "corrected") return Feedforward::corrected;
    if (s == "as_printed") return Feedforward::as_printed;
    throw ConfigError("unknown feedforward '" + s + "' (expected corrected|as_printed)");
}

/// Reference body velocity: rotate (x_r', y_r') by -psi_r, r_r = psi_r'.
inline BodyVelocity reference_body_velocity(const PoseRate& rate_r, double psi_r)
{
    return inertial_to_body(psi_r, rate_r);
}

inline TrackingErrorInertial inertial_error(const Pose& pose, const Pose& pose_r)
{
    return {pose_r.x - pose.x, pose_r.y - pose.y, angle_diff(pose_r.psi, pose.psi)};
}

inline TrackingErrorBody body_error(const Pose& pose, const Pose& pose_r)
{
    const TrackingErrorInertial e = inertial_error(pose, pose_r);
    const double c = std::cos(pose.psi);
    const double s = std::sin(pose.psi);
    return {c * e.e_x + s * e.e_y, -s * e.e_x + c * e.e_y, e.e_psi};
}

/// Error-feedback part of the command for feedback signals (f_x, f_y, f_psi).
inline VelocityCommand error_feedback(double f_x, double f_y, double f_psi, double psi, const KinematicGains& g)
{
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    return {g.k_a * (f_x * c + f_y * s), g.k_a * (-f_x * s + f_y * c), g.k_b * f_psi};
}

inline VelocityCommand reference_feedforward(const BodyVelocity& vel_r, double e_psi,
                                             Feedforward ff = Feedforward::corrected)
{
    const double c = std::cos(e_psi);
    const double s = std::sin(e_psi);
    const double u = ff == Feedforward::corrected ? vel_r.u * c - vel_r.v * s : vel_r.u * s - vel_r.v * c;
    return {u, vel_r.u * s + vel_r.v * c, vel_r.r};
}

inline VelocityCommand backstepping_conventional(const TrackingErrorInertial& err, const ReferenceState& ref,
                                                 double psi, const KinematicGains& gains,
                                                 Feedforward ff = Feedforward::corrected)
{
    return error_feedback(err.e_x, err.e_y, err.e_psi, psi, gains) + reference_feedforward(ref.vel, err.e_psi, ff);
}

/// Bioinspired law: the shunting activities L1..L3 replace the raw errors in the feedback.
inline VelocityCommand backstepping_bioinspired(double L1, double L2, double L3, const ReferenceState& ref,
                                                double psi, const KinematicGains& gains,
                                                Feedforward ff = Feedforward::corrected)
{
    const double e_psi = angle_diff(ref.pose.psi, psi);
    return error_feedback(L1, L2, L3, psi, gains) + reference_feedforward(ref.vel, e_psi, ff);
}

/// V_p = 1/2 |e|^2 + sum_i k_i/(2 B_i) L_i^2 with k = (k_a, k_a, k_b).
inline double kinematic_lyapunov(const TrackingErrorInertial& err, const std::array<double, 3>& L,
                                 const std::array<ShuntingParams, 3>& shunt, const KinematicGains& g)
{
    const double errors = 0.5 * (err.e_x * err.e_x + err.e_y * err.e_y + err.e_psi * err.e_psi);
    const double k[3] = {g.k_a, g.k_a, g.k_b};
    double activity = 0.0;
    for (int i = 0; i < 3; ++i) {
        activity += k[i] / (2.0 * shunt[i].B) * L[i] * L[i];
    }
    return errors + activity;
}

enum class KinematicLaw { conventional, bioinspired };

/// Stateful outer-loop controller. The bioinspired law owns three shunting
/// channels driven by (e_x, e_y, e_psi); the command at a tick uses the
/// activities at that tick, which are then advanced over the step.
class KinematicController
{
public:
    struct Output
    {
        TrackingErrorInertial error;
        VelocityCommand command;
        VelocityCommand feedback;
        std::array<double, 3> activity{};  ///< L1..L3 used for this command (zero for conventional)
    };

    KinematicController(KinematicLaw law, const KinematicGains& gains, const std::array<ShuntingParams, 3>& shunt,
                        Feedforward ff = Feedforward::corrected)
        : law_(law), gains_(gains), ff_(ff), bank_(shunt)
    {
        gains_.validate();
    }

    Output update(const Pose& pose, const ReferenceState& ref, double dt)
    {
        Output out;
        out.error = inertial_error(pose, ref.pose);
        const auto& e = out.error;
        if (law_ == KinematicLaw::conventional) {
            out.feedback = error_feedback(e.e_x, e.e_y, e.e_psi, pose.psi, gains_);
        } else {
            out.activity = bank_.outputs();
            out.feedback = error_feedback(out.activity[0], out.activity[1], out.activity[2], pose.psi, gains_);
            bank_.step({e.e_x, e.e_y, e.e_psi}, dt);
        }
        out.command = out.feedback + reference_feedforward(ref.vel, e.e_psi, ff_);
        return out;
    }

    void reset() { bank_.reset(); }

    KinematicLaw law() const { return law_; }
    const KinematicGains& gains() const { return gains_; }
    const std::array<ShuntingParams, 3>& shunting() const { return bank_.params(); }

private:
    KinematicLaw law_;
    KinematicGains gains_;
    Feedforward ff_;
    ShuntingBank<3> bank_;
};

}  // namespace uuvsim
