#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "uuvsim/errors.hpp"
#include "uuvsim/shunting.hpp"

using namespace uuvsim;

namespace {

double settle(const ShuntingParams& p, double e, double dt = 0.01, int steps = 20000)
{
    ShuntingState s;
    for (int k = 0; k < steps; ++k) s = shunting_step(s, p, e, dt);
    return s.L;
}

}  // namespace

TEST(Shunting, DerivativeExamples)
{
    const ShuntingParams p{4.0, 1.0, 1.0};
    EXPECT_EQ(shunting_derivative(p, 0.0, 0.0), 0.0);
    // At the upper bound the excitatory term vanishes and only the decay is left.
    EXPECT_DOUBLE_EQ(shunting_derivative(p, p.B, 3.0), -p.A * p.B);
    EXPECT_DOUBLE_EQ(shunting_derivative(p, -p.D, -3.0), p.A * p.D);
}

TEST(Shunting, ZeroStaysZero)
{
    const ShuntingParams p{4.0, 1.0, 1.0};
    for (double dt : {1e-4, 0.01, 0.5}) {
        EXPECT_EQ(shunting_step({0.0}, p, 0.0, dt).L, 0.0);
    }
}

TEST(Shunting, EquilibriumMatchesClosedForm)
{
    const ShuntingParams p{4.0, 1.0, 1.0};
    EXPECT_NEAR(settle(p, 1.0), 0.2, 1e-12);
    EXPECT_NEAR(shunting_equilibrium(p, 1.0), 0.2, 1e-15);

    const ShuntingParams q{2.0, 3.0, 0.5};
    for (double e : {-5.0, -1.0, -0.1, 0.3, 2.0, 7.0}) {
        EXPECT_NEAR(settle(q, e), shunting_equilibrium(q, e), 1e-10) << "e=" << e;
    }
}

TEST(Shunting, SignIsPreserved)
{
    const ShuntingParams p{1.5, 2.0, 0.7};
    EXPECT_GT(settle(p, 0.5), 0.0);
    EXPECT_LT(settle(p, -0.5), 0.0);
    EXPECT_EQ(settle(p, 0.0), 0.0);
}

TEST(Shunting, RandomInputsStayInsideBounds)
{
    const ShuntingParams p{4.0, 1.0, 1.0};
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> d(-10.0, 10.0);
    ShuntingState s;
    for (int k = 0; k < 100000; ++k) {
        s = shunting_step(s, p, d(gen), 0.01);
        ASSERT_GT(s.L, -p.D);
        ASSERT_LT(s.L, p.B);
    }
}

TEST(Shunting, ActsAsLowPassOnSinusoids)
{
    // Small-signal gain B/A at DC, rolling off above the corner at A rad/s.
    const ShuntingParams p{4.0, 1.0, 1.0};
    const double amp = 0.01;
    std::vector<double> peak;
    for (double w : {0.4, 4.0, 40.0}) {
        ShuntingState s;
        double hi = 0.0;
        const double dt = 0.001;
        const int n = static_cast<int>(60.0 / dt);
        for (int k = 0; k < n; ++k) {
            s = shunting_step(s, p, amp * std::sin(w * k * dt), dt);
            if (k * dt > 40.0) hi = std::max(hi, std::abs(s.L));
        }
        peak.push_back(hi / amp);
    }
    EXPECT_NEAR(peak[0], 0.25 / std::sqrt(1.0 + 0.01), 2e-3);
    EXPECT_NEAR(peak[1], 0.25 / std::sqrt(2.0), 2e-3);
    EXPECT_NEAR(peak[2], 0.25 / std::sqrt(101.0), 2e-3);
    EXPECT_GT(peak[0], peak[1]);
    EXPECT_GT(peak[1], peak[2]);
}

TEST(Shunting, RejectsUnstableStep)
{
    const ShuntingParams p{4.0, 1.0, 1.0};
    EXPECT_THROW(shunting_step({0.0}, p, 1e4, 0.01), StepTooLarge);
    EXPECT_THROW(shunting_step({0.0}, p, 1.0, 0.0), StepTooLarge);
    EXPECT_THROW(shunting_step({0.0}, p, std::nan(""), 0.01), StepTooLarge);
    EXPECT_NO_THROW(shunting_step({0.0}, p, 100.0, 0.9 * shunting_max_step(p, 100.0)));
}

TEST(Shunting, ParamsValidate)
{
    EXPECT_THROW((ShuntingParams{0.0, 1.0, 1.0}.validate()), ConfigError);
    EXPECT_THROW((ShuntingParams{1.0, -1.0, 1.0}.validate()), ConfigError);
    EXPECT_NO_THROW((ShuntingParams{1.0, 1.0, 1.0}.validate()));
}

TEST(Shunting, BankStepsChannelsIndependently)
{
    ShuntingBank<3> bank({ShuntingParams{4.0, 1.0, 1.0}, ShuntingParams{1.0, 2.0, 2.0}, ShuntingParams{3.0, 1.0, 1.0}});
    for (int k = 0; k < 20000; ++k) bank.step({1.0, -1.0, 0.0}, 0.01);
    EXPECT_NEAR(bank.outputs()[0], 0.2, 1e-10);
    EXPECT_NEAR(bank.outputs()[1], -1.0, 1e-10);  // D e / (A - e) with e = -1
    EXPECT_EQ(bank.outputs()[2], 0.0);
    bank.reset();
    EXPECT_EQ(bank.outputs()[0], 0.0);
}
