#pragma once

// Dynamic (inner-loop) sliding mode controllers.
//
// Velocity error e = V_c - V_a, sliding surface S = e' + 2 Gamma e + Gamma^2 int(e).
// Equivalent control with e'' replaced by the acceleration feedback k_s e':
//
//   tau_eq = M (V_c' + k_s e' / (2 Gamma) + Gamma e / 2) + D(V_a) V_a
//
// followed by one of three reaching terms: k sgn(S), Sat(S) or the shunting
// activity L4 driven by S.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "uuvsim/errors.hpp"
#include "uuvsim/shunting.hpp"
#include "uuvsim/vehicle.hpp"

namespace uuvsim {

struct DynamicGains
{
    double gamma{1.0};
    Eigen::Vector3d k{2.0, 2.0, 0.2};  ///< sign-law gains
    double k_s{1.0};                   ///< acceleration-feedback coefficient
    double sat_k_s{3.0};               ///< slope of the saturation law
    Eigen::Vector3d sat_B{1.0, 1.0, 0.03};
    Eigen::Vector3d sat_D{1.0, 1.0, 0.03};
    std::array<ShuntingParams, 3> shunt{{{3.0, 1.0, 1.0}, {3.0, 1.0, 1.0}, {3.0, 1.0, 1.0}}};

    void validate() const
    {
        if (!(gamma > 0.0)) throw ConfigError("dynamic.gamma must be > 0");
        if ((k.array() < 0.0).any()) throw ConfigError("dynamic.k must be >= 0");
        if (!(k_s >= 0.0) || !(sat_k_s >= 0.0)) throw ConfigError("dynamic.k_s and dynamic.sat_k_s must be >= 0");
        if ((sat_B.array() <= 0.0).any() || (sat_D.array() <= 0.0).any()) {
            throw ConfigError("dynamic.sat_B and dynamic.sat_D must be > 0");
        }
        for (const auto& p : shunt) p.validate();
    }
};

/// Per-axis sliding-surface bookkeeping for one control tick.
struct SlidingState
{
    Eigen::Vector3d e{Eigen::Vector3d::Zero()};
    Eigen::Vector3d e_dot{Eigen::Vector3d::Zero()};
    Eigen::Vector3d e_int{Eigen::Vector3d::Zero()};
    Eigen::Vector3d S{Eigen::Vector3d::Zero()};
};

inline Eigen::Vector3d sliding_surface(const Eigen::Vector3d& e, const Eigen::Vector3d& e_dot,
                                       const Eigen::Vector3d& e_int, double gamma)
{
    return e_dot + 2.0 * gamma * e + gamma * gamma * e_int;
}

inline Torque tau_equivalent(const VehicleParams& params, const BodyVelocity& V_a, const BodyAccel& Vc_dot,
                             const Eigen::Vector3d& e, const Eigen::Vector3d& e_dot, const DynamicGains& g)
{
    const Eigen::Vector3d inner = Vc_dot.vec() + (g.k_s / (2.0 * g.gamma)) * e_dot + (g.gamma / 2.0) * e;
    return Torque::from(params.mass().cwiseProduct(inner) + damping_force(params, V_a));
}

/// sgn with sgn(0) = 0.
inline double signum(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

inline Torque smc_sign(const Torque& tau_eq, const Eigen::Vector3d& S, const Eigen::Vector3d& k)
{
    const Eigen::Vector3d sgn = S.unaryExpr([](double s) { return signum(s); });
    return Torque::from(tau_eq.vec() + k.cwiseProduct(sgn));
}

/// Sat(S) = clamp(k_s S, -D4, B4) per axis.
inline Eigen::Vector3d saturation_term(const Eigen::Vector3d& S, const DynamicGains& g)
{
    Eigen::Vector3d out;
    for (int i = 0; i < 3; ++i) {
        out[i] = std::clamp(g.sat_k_s * S[i], -g.sat_D[i], g.sat_B[i]);
    }
    return out;
}

inline Torque smc_saturation(const Torque& tau_eq, const Eigen::Vector3d& S, const DynamicGains& g)
{
    return Torque::from(tau_eq.vec() + saturation_term(S, g));
}

/// Advances the three L4 channels with input S and adds their activity to tau_eq.
inline std::pair<Torque, ShuntingBank<3>> smc_bioinspired(const Torque& tau_eq, ShuntingBank<3> channels,
                                                          const Eigen::Vector3d& S, double dt)
{
    const auto& L4 = channels.step({S[0], S[1], S[2]}, dt);
    return {Torque{tau_eq.x + L4[0], tau_eq.y + L4[1], tau_eq.n + L4[2]}, std::move(channels)};
}

/// V_z = 1/2 S.S + sum_i L4_i^2 / (2 B4_i).
inline double dynamic_lyapunov(const Eigen::Vector3d& S, const std::array<double, 3>& L4,
                               const std::array<ShuntingParams, 3>& shunt)
{
    double v = 0.5 * S.squaredNorm();
    for (int i = 0; i < 3; ++i) {
        v += L4[i] * L4[i] / (2.0 * shunt[i].B);
    }
    return v;
}

enum class ReachingLaw { sign, saturation, bioinspired };

/// Stateful inner-loop controller.
///
/// V_c' and e' are first-order backward differences (zero on the first tick),
/// int(e) is a trapezoidal accumulation starting at zero.
class SlidingModeController
{
public:
    struct Output
    {
        SlidingState sliding;
        BodyAccel command_rate;
        Torque tau_eq;
        Torque tau;
        std::array<double, 3> activity{};  ///< L4 after this tick (zero for sign/saturation)
    };

    SlidingModeController(ReachingLaw law, const VehicleParams& model, const DynamicGains& gains)
        : law_(law), model_(model), gains_(gains), bank_(gains.shunt)
    {
        model_.validate();
        gains_.validate();
    }

    Output update(const BodyVelocity& V_c, const BodyVelocity& V_a, double dt)
    {
        Output out;
        auto& s = out.sliding;
        const Eigen::Vector3d vc = V_c.vec();
        s.e = vc - V_a.vec();
        Eigen::Vector3d vc_dot = Eigen::Vector3d::Zero();
        if (started_) {
            s.e_dot = (s.e - prev_e_) / dt;
            vc_dot = (vc - prev_vc_) / dt;
            e_int_ += 0.5 * dt * (s.e + prev_e_);
        }
        s.e_int = e_int_;
        s.S = sliding_surface(s.e, s.e_dot, s.e_int, gains_.gamma);
        out.command_rate = BodyAccel::from(vc_dot);
        out.tau_eq = tau_equivalent(model_, V_a, out.command_rate, s.e, s.e_dot, gains_);

        switch (law_) {
        case ReachingLaw::sign:
            out.tau = smc_sign(out.tau_eq, s.S, gains_.k);
            break;
        case ReachingLaw::saturation:
            out.tau = smc_saturation(out.tau_eq, s.S, gains_);
            break;
        case ReachingLaw::bioinspired: {
            auto [tau, bank] = smc_bioinspired(out.tau_eq, bank_, s.S, dt);
            out.tau = tau;
            bank_ = std::move(bank);
            out.activity = bank_.outputs();
            break;
        }
        }

        prev_e_ = s.e;
        prev_vc_ = vc;
        started_ = true;
        return out;
    }

    void reset()
    {
        started_ = false;
        e_int_.setZero();
        prev_e_.setZero();
        prev_vc_.setZero();
        bank_.reset();
    }

    ReachingLaw law() const { return law_; }
    const DynamicGains& gains() const { return gains_; }

private:
    ReachingLaw law_;
    VehicleParams model_;
    DynamicGains gains_;
    ShuntingBank<3> bank_;
    bool started_{false};
    Eigen::Vector3d e_int_{Eigen::Vector3d::Zero()};
    Eigen::Vector3d prev_e_{Eigen::Vector3d::Zero()};
    Eigen::Vector3d prev_vc_{Eigen::Vector3d::Zero()};
};

}  // namespace uuvsim
