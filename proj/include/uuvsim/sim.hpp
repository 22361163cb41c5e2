#pragma once

// Closed-loop simulation: reference -> kinematic controller -> sliding mode
// controller -> actuator lag -> plant (RK4) -> optional noise and estimator.
// Controllers run once per step with a zero-order hold.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "uuvsim/dynamic_control.hpp"
#include "uuvsim/errors.hpp"
#include "uuvsim/estimation.hpp"
#include "uuvsim/kinematic_control.hpp"
#include "uuvsim/shunting.hpp"
#include "uuvsim/trajectory.hpp"
#include "uuvsim/vehicle.hpp"

namespace uuvsim {

enum class ControllerVariant { conv_sign, conv_sat, bio_bio, bio_sign, bio_sat, conv_bio };

inline constexpr std::array<ControllerVariant, 6> kAllVariants = {
    ControllerVariant::conv_sign, ControllerVariant::conv_sat, ControllerVariant::bio_bio,
    ControllerVariant::bio_sign,  ControllerVariant::bio_sat,  ControllerVariant::conv_bio};

inline std::string to_string(ControllerVariant v)
{
    switch (v) {
    case ControllerVariant::conv_sign: return "conv_bs+sign_smc";
    case ControllerVariant::conv_sat: return "conv_bs+sat_smc";
    case ControllerVariant::bio_bio: return "bio_bs+bio_smc";
    case ControllerVariant::bio_sign: return "bio_bs+sign_smc";
    case ControllerVariant::bio_sat: return "bio_bs+sat_smc";
    case ControllerVariant::conv_bio: return "conv_bs+bio_smc";
    }
    return "?";
}

inline ControllerVariant parse_variant(const std::string& s)
{
    for (auto v : kAllVariants) {
        if (to_string(v) == s) return v;
    }
    throw ConfigError("unknown controller '" + s + "'");
}

inline KinematicLaw kinematic_law(ControllerVariant v)
{
    switch (v) {
    case ControllerVariant::conv_sign:
    case ControllerVariant::conv_sat:
    case ControllerVariant::conv_bio: return KinematicLaw::conventional;
    default: return KinematicLaw::bioinspired;
    }
}

inline ReachingLaw reaching_law(ControllerVariant v)
{
    switch (v) {
    case ControllerVariant::conv_sign:
    case ControllerVariant::bio_sign: return ReachingLaw::sign;
    case ControllerVariant::conv_sat:
    case ControllerVariant::bio_sat: return ReachingLaw::saturation;
    default: return ReachingLaw::bioinspired;
    }
}

enum class ActuatorMode {
    global,  ///< tau_c(t) = tau(t) (1 - exp(-t / sigma)), t from simulation start
    filter   ///< per-step first-order lag with time constant sigma
};

struct ActuatorLag
{
    double sigma{0.5};
    ActuatorMode mode{ActuatorMode::global};

    void validate() const
    {
        if (!(sigma > 0.0)) throw ConfigError("actuator.sigma must be > 0");
    }
};

inline Torque actuator_response(const Torque& raw, const ActuatorLag& lag, double t)
{
    const double factor = 1.0 - std::exp(-t / lag.sigma);
    return Torque::from(factor * raw.vec());
}

/// Applies either actuator reading; the filter state starts at zero torque.
class Actuator
{
public:
    explicit Actuator(const ActuatorLag& lag) : lag_(lag) { lag_.validate(); }

    Torque apply(const Torque& raw, double t, double dt)
    {
        if (lag_.mode == ActuatorMode::global) {
            return actuator_response(raw, lag_, t);
        }
        if (t > 0.0) {
            const double alpha = 1.0 - std::exp(-dt / lag_.sigma);
            state_ = state_ + alpha * (raw.vec() - state_);
        }
        return Torque::from(state_);
    }

private:
    ActuatorLag lag_;
    Eigen::Vector3d state_{Eigen::Vector3d::Zero()};
};

struct Scenario
{
    std::string name{"custom"};
    Trajectory trajectory{StraightLine{}};
    Pose initial_pose{};
    BodyVelocity initial_vel{};
    double duration{50.0};
    double dt{0.01};
    ControllerVariant controller{ControllerVariant::bio_bio};
    std::optional<NoiseConfig> noise;
    bool estimator{false};

    std::size_t steps() const { return static_cast<std::size_t>(std::llround(duration / dt)); }

    void validate() const
    {
        if (!(dt > 0.0)) throw ConfigError("scenario.dt must be > 0");
        if (!(duration >= dt)) throw ConfigError("scenario.duration must be >= dt");
        if (estimator && !noise) throw ConfigError("scenario.estimator requires noise to be enabled");
        if (noise) noise->validate();
        if (const auto* tab = std::get_if<TableTrajectory>(&trajectory)) {
            tab->validate();
            if (tab->t.front() > 0.0 || tab->t.back() < duration) {
                throw ConfigError("table trajectory must cover [0, duration]");
            }
        }
    }
};

struct KinematicConfig
{
    KinematicGains gains{};
    std::array<ShuntingParams, 3> shunt{{{4.0, 1.0, 1.0}, {4.0, 1.0, 1.0}, {4.0, 1.0, 1.0}}};
    Feedforward feedforward{Feedforward::corrected};
};

struct DynamicConfig
{
    DynamicGains gains{};
    double model_scale{1.0};  ///< coefficient scaling of the controller's internal model
};

struct DiagnosticsConfig
{
    bool check_invariants{true};
    bool lyapunov{true};  ///< requires B == D on every shunting channel
    double divergence_limit{1e3};
    double lyapunov_tolerance{1e-6};
    double lyapunov_window{2.0};
    double settle_threshold{0.1};
};

/// Everything a run depends on.
struct SimSetup
{
    Scenario scenario{};
    VehicleParams vehicle{};
    KinematicConfig kinematic{};
    DynamicConfig dynamic{};
    ActuatorLag actuator{};
    DiagnosticsConfig diagnostics{};

    void validate() const
    {
        scenario.validate();
        vehicle.validate();
        kinematic.gains.validate();
        for (const auto& p : kinematic.shunt) p.validate();
        dynamic.gains.validate();
        if (!(dynamic.model_scale > 0.0)) throw ConfigError("dynamic.model_scale must be > 0");
        actuator.validate();
        if (diagnostics.lyapunov) {
            for (const auto& p : kinematic.shunt) {
                if (p.B != p.D) throw ConfigError("lyapunov diagnostics require kinematic shunting B == D");
            }
            for (const auto& p : dynamic.gains.shunt) {
                if (p.B != p.D) throw ConfigError("lyapunov diagnostics require dynamic shunting B == D");
            }
        }
    }
};

/// One sample of the closed loop at time t.
struct TraceRow
{
    double t{0.0};
    ReferenceState ref;
    VehicleState truth;
    Measurement measured;  ///< raw measurement (equals truth when noiseless)
    VehicleState observed; ///< state fed to the controllers
    TrackingErrorInertial error;
    VelocityCommand command;
    VelocityCommand feedback;  ///< error-feedback part of the command
    Torque tau_raw;
    Torque tau;  ///< applied (after actuator lag)
    Eigen::Vector3d sliding{Eigen::Vector3d::Zero()};
    std::array<double, 3> L_kin{};
    std::array<double, 3> L4{};
    double V_p{0.0};
    double V_z{0.0};
};

struct SimTrace
{
    double dt{0.01};
    ControllerVariant controller{ControllerVariant::bio_bio};
    std::optional<std::uint64_t> seed;
    std::vector<TraceRow> rows;

    double duration() const { return rows.empty() ? 0.0 : rows.back().t - rows.front().t; }
};

namespace detail {

inline void check_row(const TraceRow& row, std::size_t k, const SimSetup& setup)
{
    const double lim = setup.diagnostics.divergence_limit;
    const auto bounded = [lim](const Eigen::Vector3d& v) { return v.allFinite() && v.cwiseAbs().maxCoeff() <= lim; };
    if (!bounded(row.truth.pose.vec()) || !bounded(row.truth.vel.vec())) {
        throw InvariantViolation(k, "vehicle state diverged beyond " + std::to_string(lim));
    }
    if (!bounded(row.command.vec())) throw InvariantViolation(k, "velocity command diverged");
    if (!row.tau_raw.finite()) throw InvariantViolation(k, "raw torque is not finite");
    // The raw torque may spike for a step when the command derivative jumps;
    // divergence is judged on the torque that actually reaches the plant.
    if (!bounded(row.tau.vec())) throw InvariantViolation(k, "applied torque diverged");

    if (kinematic_law(setup.scenario.controller) == KinematicLaw::bioinspired) {
        // |L_i| < max(B_i, D_i), so |fb_u|, |fb_v| < k_a (bound_1 + bound_2) and |fb_r| < k_b bound_3.
        const auto& g = setup.kinematic.gains;
        const auto& s = setup.kinematic.shunt;
        const auto bound = [](const ShuntingParams& p) { return std::max(p.B, p.D); };
        const double lin = g.k_a * (bound(s[0]) + bound(s[1]));
        if (!(std::abs(row.feedback.u_c) < lin) || !(std::abs(row.feedback.v_c) < lin) ||
            !(std::abs(row.feedback.r_c) < g.k_b * bound(s[2]))) {
            throw InvariantViolation(k, "bioinspired velocity feedback exceeded its shunting bound");
        }
    }
    if (reaching_law(setup.scenario.controller) == ReachingLaw::bioinspired) {
        for (int i = 0; i < 3; ++i) {
            if (!setup.dynamic.gains.shunt[i].contains(row.L4[i])) {
                throw InvariantViolation(k, "L4 activity left its bounds");
            }
        }
    }
}

}  // namespace detail

inline SimTrace run(const SimSetup& setup)
{
    setup.validate();
    const Scenario& sc = setup.scenario;
    const double dt = sc.dt;
    const std::size_t n = sc.steps();

    KinematicController kin(kinematic_law(sc.controller), setup.kinematic.gains, setup.kinematic.shunt,
                            setup.kinematic.feedforward);
    SlidingModeController smc(reaching_law(sc.controller), setup.vehicle.scaled(setup.dynamic.model_scale),
                              setup.dynamic.gains);
    Actuator actuator(setup.actuator);

    SimTrace trace;
    trace.dt = dt;
    trace.controller = sc.controller;
    trace.rows.reserve(n + 1);

    VehicleState truth{sc.initial_pose, sc.initial_vel};
    Measurement meas{truth.pose, truth.vel};

    std::optional<RandomStream> process_rng;
    std::optional<RandomStream> meas_rng;
    std::optional<StateEstimator> estimator;
    if (sc.noise) {
        trace.seed = sc.noise->seed;
        const RandomStream base(sc.noise->seed);
        process_rng = base.split(1);
        meas_rng = base.split(2);
        meas = inject_noise(truth, *sc.noise, *meas_rng);
        if (sc.estimator) {
            estimator.emplace(*sc.noise, setup.vehicle);
            estimator->initialize(meas);
        }
    }

    for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * dt;
        TraceRow row;
        row.t = t;
        row.ref = reference_at(sc.trajectory, t);
        row.truth = truth;
        row.measured = meas;
        if (estimator) {
            row.observed = {estimator->pose(), estimator->velocity()};
        } else if (sc.noise) {
            row.observed = {meas.pose, meas.vel};
        } else {
            row.observed = truth;
        }

        const auto kout = kin.update(row.observed.pose, row.ref, dt);
        row.error = kout.error;
        row.command = kout.command;
        row.feedback = kout.feedback;
        row.L_kin = kout.activity;

        const auto dout = smc.update(kout.command.as_velocity(), row.observed.vel, dt);
        row.sliding = dout.sliding.S;
        row.L4 = dout.activity;
        row.tau_raw = dout.tau;
        row.tau = actuator.apply(dout.tau, t, dt);

        row.V_p = kinematic_lyapunov(row.error, row.L_kin, setup.kinematic.shunt, setup.kinematic.gains);
        row.V_z = dynamic_lyapunov(row.sliding, row.L4, setup.dynamic.gains.shunt);

        if (setup.diagnostics.check_invariants) {
            detail::check_row(row, k, setup);
        }
        trace.rows.push_back(row);
        if (k == n) break;

        truth = integrate_rk4(setup.vehicle, truth, row.tau, dt);
        if (sc.noise) {
            truth = apply_process_noise(truth, *sc.noise, *process_rng);
            meas = inject_noise(truth, *sc.noise, *meas_rng);
            if (estimator) {
                estimator->step(meas, row.tau, dt);
                if (setup.diagnostics.check_invariants && !is_symmetric_psd(estimator->state().cov)) {
                    throw InvariantViolation(k + 1, "estimator covariance lost symmetry/PSD");
                }
            }
        } else {
            meas = {truth.pose, truth.vel};
        }
    }
    return trace;
}

/// Runs independent setups on up to `workers` threads; results keep input order.
inline std::vector<SimTrace> run_batch(const std::vector<SimSetup>& setups, unsigned workers = 0)
{
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<SimTrace> out(setups.size());
    std::size_t next = 0;
    while (next < setups.size()) {
        const std::size_t end = std::min(setups.size(), next + workers);
        std::vector<std::future<SimTrace>> pending;
        for (std::size_t i = next; i < end; ++i) {
            pending.push_back(std::async(std::launch::async, [&setups, i] { return run(setups[i]); }));
        }
        for (std::size_t i = next; i < end; ++i) {
            out[i] = pending[i - next].get();
        }
        next = end;
    }
    return out;
}

}  // namespace uuvsim
