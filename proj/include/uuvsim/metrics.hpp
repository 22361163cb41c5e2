#pragma once

// Post-processing of a simulation trace: tracking error, speed jumps,
// chattering (total variation per unit time) and Lyapunov monotonicity.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "uuvsim/angles.hpp"
#include "uuvsim/sim.hpp"

namespace uuvsim {

/// Sum_k |x_{k+1} - x_k| / ((n - 1) dt), per axis.
inline Eigen::Vector3d chattering_index(std::span<const Eigen::Vector3d> series, double dt)
{
    if (series.size() < 2) throw std::invalid_argument("chattering_index needs at least two samples");
    Eigen::Vector3d tv = Eigen::Vector3d::Zero();
    for (std::size_t k = 1; k < series.size(); ++k) {
        tv += (series[k] - series[k - 1]).cwiseAbs();
    }
    return tv / (static_cast<double>(series.size() - 1) * dt);
}

/// Largest one-step increment of any command axis. The first increment is
/// measured from `before_start` (the vehicle velocity when control begins).
inline double peak_command_jump(std::span<const Eigen::Vector3d> commands,
                                const Eigen::Vector3d& before_start = Eigen::Vector3d::Zero())
{
    double peak = 0.0;
    Eigen::Vector3d prev = before_start;
    for (const auto& c : commands) {
        peak = std::max(peak, (c - prev).cwiseAbs().maxCoeff());
        prev = c;
    }
    return peak;
}

inline std::vector<Eigen::Vector3d> applied_torque_series(const SimTrace& tr)
{
    std::vector<Eigen::Vector3d> out;
    out.reserve(tr.rows.size());
    for (const auto& r : tr.rows) out.push_back(r.tau.vec());
    return out;
}

inline std::vector<Eigen::Vector3d> command_series(const SimTrace& tr)
{
    std::vector<Eigen::Vector3d> out;
    out.reserve(tr.rows.size());
    for (const auto& r : tr.rows) out.push_back(r.command.vec());
    return out;
}

struct LyapunovSeries
{
    std::vector<double> V_p;
    std::vector<double> V_z;
    std::size_t violations_p{0};
    std::size_t violations_z{0};
};

/// Counts steps whose discrete increase exceeds `tolerance`, ignoring
/// differences that start before `window` seconds.
inline LyapunovSeries lyapunov_series(const SimTrace& tr, double tolerance = 1e-6, double window = 2.0)
{
    LyapunovSeries out;
    out.V_p.reserve(tr.rows.size());
    out.V_z.reserve(tr.rows.size());
    for (std::size_t k = 0; k < tr.rows.size(); ++k) {
        const auto& r = tr.rows[k];
        out.V_p.push_back(r.V_p);
        out.V_z.push_back(r.V_z);
        if (k == 0 || tr.rows[k - 1].t < window - 1e-12) continue;
        if (out.V_p[k] - out.V_p[k - 1] > tolerance) ++out.violations_p;
        if (out.V_z[k] - out.V_z[k - 1] > tolerance) ++out.violations_z;
    }
    return out;
}

inline double position_error(const TraceRow& r)
{
    return std::hypot(r.ref.pose.x - r.truth.pose.x, r.ref.pose.y - r.truth.pose.y);
}

/// First time after which the position error stays below `threshold`.
inline std::optional<double> settle_time(const SimTrace& tr, double threshold)
{
    std::optional<double> settled;
    for (auto it = tr.rows.rbegin(); it != tr.rows.rend(); ++it) {
        if (!(position_error(*it) < threshold)) break;
        settled = it->t;
    }
    return settled;
}

struct RunMetrics
{
    double pos_rmse{0.0};
    double heading_rmse{0.0};
    double peak_cmd_jump{0.0};
    Eigen::Vector3d chattering_index{Eigen::Vector3d::Zero()};  ///< applied torque, per axis [N/s, N m/s]
    Eigen::Vector3d command_chattering{Eigen::Vector3d::Zero()};  ///< velocity command, per axis
    std::size_t lyapunov_violations_p{0};
    std::size_t lyapunov_violations_z{0};
    std::optional<double> settle_time;
};

inline RunMetrics compute_metrics(const SimTrace& tr, const DiagnosticsConfig& diag = {})
{
    RunMetrics m;
    if (tr.rows.empty()) return m;
    double se_pos = 0.0;
    double se_psi = 0.0;
    for (const auto& r : tr.rows) {
        const double ep = position_error(r);
        const double eh = angle_diff(r.ref.pose.psi, r.truth.pose.psi);
        se_pos += ep * ep;
        se_psi += eh * eh;
    }
    const double n = static_cast<double>(tr.rows.size());
    m.pos_rmse = std::sqrt(se_pos / n);
    m.heading_rmse = std::sqrt(se_psi / n);

    const auto cmds = command_series(tr);
    m.peak_cmd_jump = peak_command_jump(cmds, tr.rows.front().truth.vel.vec());
    if (tr.rows.size() >= 2) {
        m.chattering_index = chattering_index(applied_torque_series(tr), tr.dt);
        m.command_chattering = chattering_index(cmds, tr.dt);
    }
    const auto ly = lyapunov_series(tr, diag.lyapunov_tolerance, diag.lyapunov_window);
    m.lyapunov_violations_p = ly.violations_p;
    m.lyapunov_violations_z = ly.violations_z;
    m.settle_time = settle_time(tr, diag.settle_threshold);
    return m;
}

}  // namespace uuvsim
