#pragma once

// Shunting neural dynamics
//
//   L' = -A L + (B - L) max(e, 0) - (D + L) max(-e, 0)
//
// For any input history the activity L stays inside (-D, B). With the input
// held over a step the equation is linear in L,
//
//   L' = -(A + |e|) L + B max(e, 0) - D max(-e, 0),
//
// so one RK4 step maps L to L* + R(z) (L - L*), where L* is the frozen-input
// equilibrium (always inside the bounds), z = -(A + |e|) dt and R is the RK4
// stability polynomial. R(z) > 0 for all real z and R(z) <= 1 for
// z >= -kRk4UnitGainLimit, which keeps the discrete state inside the bounds.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "uuvsim/errors.hpp"

namespace uuvsim {

/// Real root of z^3 + 4z^2 + 12z + 24, i.e. where the RK4 polynomial returns to 1.
inline constexpr double kRk4UnitGainLimit = 2.785293563405281;

struct ShuntingParams
{
    double A{1.0};  ///< passive decay rate [1/s]
    double B{1.0};  ///< upper bound
    double D{1.0};  ///< lower-bound magnitude

    void validate() const
    {
        if (!(A > 0.0 && B > 0.0 && D > 0.0) || !std::isfinite(A) || !std::isfinite(B) || !std::isfinite(D)) {
            throw ConfigError("shunting parameters A, B, D must be finite and > 0");
        }
    }

    bool contains(double L) const { return L > -D && L < B; }
};

struct ShuntingState
{
    double L{0.0};
};

inline double shunting_derivative(const ShuntingParams& p, double L, double e)
{
    const double excite = std::max(e, 0.0);
    const double inhibit = std::max(-e, 0.0);
    return -p.A * L + (p.B - L) * excite - (p.D + L) * inhibit;
}

/// Steady state for a constant input: B e/(A+e) for e >= 0, D e/(A-e) for e <= 0.
inline double shunting_equilibrium(const ShuntingParams& p, double e)
{
    return e >= 0.0 ? p.B * e / (p.A + e) : p.D * e / (p.A - e);
}

/// Largest step the RK4 scheme can take for input magnitude |e| without leaving the bounds.
inline double shunting_max_step(const ShuntingParams& p, double e) { return kRk4UnitGainLimit / (p.A + std::abs(e)); }

/// Advance the activity by one RK4 step with the input held constant.
/// Throws StepTooLarge when (A + |e|) dt exceeds the RK4 unit-gain limit.
inline ShuntingState shunting_step(ShuntingState state, const ShuntingParams& p, double e, double dt)
{
    if (!(dt > 0.0)) {
        throw StepTooLarge("shunting step requires dt > 0");
    }
    if (!std::isfinite(e) || (p.A + std::abs(e)) * dt > kRk4UnitGainLimit) {
        std::ostringstream msg;
        msg << "shunting step dt=" << dt << " too large for A=" << p.A << ", |e|=" << std::abs(e)
            << " (limit " << shunting_max_step(p, e) << ")";
        throw StepTooLarge(msg.str());
    }
    const double L = state.L;
    const double k1 = shunting_derivative(p, L, e);
    const double k2 = shunting_derivative(p, L + 0.5 * dt * k1, e);
    const double k3 = shunting_derivative(p, L + 0.5 * dt * k2, e);
    const double k4 = shunting_derivative(p, L + dt * k3, e);
    const double next = L + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!p.contains(next)) {
        throw InvariantViolation(0, "shunting activity left (-D, B)");
    }
    return {next};
}

/// A fixed set of independent shunting channels advanced together.
template <std::size_t N>
class ShuntingBank
{
public:
    using Array = std::array<double, N>;

    ShuntingBank() = default;
    explicit ShuntingBank(const std::array<ShuntingParams, N>& params) : params_(params)
    {
        for (const auto& p : params_) {
            p.validate();
        }
    }

    /// Advances every channel with its own input; returns the new activities.
    const Array& step(const Array& inputs, double dt)
    {
        for (std::size_t i = 0; i < N; ++i) {
            states_[i] = shunting_step(states_[i], params_[i], inputs[i], dt);
            outputs_[i] = states_[i].L;
        }
        return outputs_;
    }

    void reset()
    {
        states_.fill(ShuntingState{});
        outputs_.fill(0.0);
    }

    const Array& outputs() const { return outputs_; }
    const std::array<ShuntingParams, N>& params() const { return params_; }
    const ShuntingParams& params(std::size_t i) const { return params_[i]; }

private:
    std::array<ShuntingParams, N> params_{};
    std::array<ShuntingState, N> states_{};
    Array outputs_{};
};

}  // namespace uuvsim
