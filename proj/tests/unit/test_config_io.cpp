#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "uuvsim/config.hpp"
#include "uuvsim/io.hpp"

using namespace uuvsim;

TEST(Presets, Straight)
{
    const Scenario s = preset("straight");
    const auto* line = std::get_if<StraightLine>(&s.trajectory);
    ASSERT_NE(line, nullptr);
    EXPECT_EQ(line->x0, 3.0);
    EXPECT_EQ(line->speed_x, 0.4);
    EXPECT_EQ(line->speed_y, 0.4);
    EXPECT_EQ(s.initial_pose.x, 0.0);
    EXPECT_EQ(s.initial_pose.y, 0.0);
    EXPECT_EQ(s.initial_pose.psi, 0.0);
    EXPECT_FALSE(s.noise.has_value());
}

TEST(Presets, Circle)
{
    const Scenario s = preset("circle");
    const auto* c = std::get_if<Circle>(&s.trajectory);
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->radius, 5.0);
    EXPECT_EQ(c->center_x, 0.0);
    EXPECT_EQ(c->center_y, 7.0);
    EXPECT_EQ(c->angular_rate, 0.1);
}

TEST(Presets, CircleNoisy)
{
    const Scenario s = preset("circle_noisy");
    EXPECT_TRUE(std::holds_alternative<Circle>(s.trajectory));
    ASSERT_TRUE(s.noise.has_value());
    EXPECT_TRUE(s.estimator);
    EXPECT_THROW(preset("square"), UnknownPreset);
}

TEST(Config, RoundTripIsExact)
{
    for (const auto& name : preset_names()) {
        const SimSetup s = preset_setup(name);
        const json j = to_json(s);
        const json back = to_json(from_json(json::parse(j.dump())));
        EXPECT_EQ(j, back) << name;
    }
}

TEST(Config, UnknownKeysRejected)
{
    json j = to_json(preset_setup("straight"));
    j["dynamic"]["gama"] = 1.0;
    try {
        from_json(j);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("dynamic.gama"), std::string::npos) << e.what();
    }
}

TEST(Config, OmittedKeysTakeDefaults)
{
    const json partial = json::parse(R"({"scenario": {"controller": "conv_bs+sat_smc", "duration": 20}})");
    const SimSetup s = from_json(partial, preset_setup("circle"));
    EXPECT_EQ(s.scenario.controller, ControllerVariant::conv_sat);
    EXPECT_EQ(s.scenario.duration, 20.0);
    EXPECT_TRUE(std::holds_alternative<Circle>(s.scenario.trajectory));
    EXPECT_EQ(s.vehicle.m_u, 54.35);
    EXPECT_EQ(s.dynamic.gains.k[2], 0.2);
}

TEST(Config, InvalidValuesNameTheKey)
{
    json j = to_json(preset_setup("straight"));
    j["actuator"]["sigma"] = -1.0;
    EXPECT_THROW(from_json(j), ConfigError);
    j = to_json(preset_setup("straight"));
    j["scenario"]["controller"] = "pid";
    EXPECT_THROW(from_json(j), ConfigError);
    j = to_json(preset_setup("straight"));
    j["scenario"]["dt"] = "fast";
    EXPECT_THROW(from_json(j), ConfigError);
}

TEST(Config, DottedOverrides)
{
    ResolveRequest req;
    req.preset = "circle";
    req.overrides = {"dynamic.gamma=1.5", "scenario.trajectory.radius=8", "kinematic.shunting.A=[5,5,5]"};
    req.controller = "conv_bs+sign_smc";
    const SimSetup s = resolve(req);
    EXPECT_EQ(s.dynamic.gains.gamma, 1.5);
    EXPECT_EQ(std::get<Circle>(s.scenario.trajectory).radius, 8.0);
    EXPECT_EQ(s.kinematic.shunt[1].A, 5.0);
    EXPECT_EQ(s.scenario.controller, ControllerVariant::conv_sign);

    req.overrides = {"dynamic.nope=1"};
    EXPECT_THROW(resolve(req), ConfigError);
    req.overrides = {"dynamic=1"};
    EXPECT_THROW(resolve(req), ConfigError);
    req.overrides = {"no_equals_sign"};
    EXPECT_THROW(resolve(req), ConfigError);
}

TEST(Config, SwitchingTrajectoryTypeResetsItsFields)
{
    ResolveRequest req;
    req.preset = "straight";
    req.overrides = {"scenario.trajectory.type=circle"};
    const SimSetup s = resolve(req);
    const auto& c = std::get<Circle>(s.scenario.trajectory);
    EXPECT_EQ(c.radius, Circle{}.radius);
}

TEST(Config, SeedFlagEnablesNoiseOnlyWhenPresent)
{
    ResolveRequest req;
    req.preset = "circle_noisy";
    req.seed = 77;
    EXPECT_EQ(resolve(req).scenario.noise->seed, 77u);
}

TEST(TraceCsv, HeaderDocumentsSeedConfigAndUnits)
{
    SimSetup s = preset_setup("circle_noisy");
    s.scenario.duration = 1.0;
    const auto tr = run(s);
    std::ostringstream out;
    write_trace_csv(out, tr, to_json(s));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, kTraceMagic);
    std::getline(in, line);
    EXPECT_EQ(line, "# seed: 1");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# config: {", 0), 0u);
    std::getline(in, line);
    EXPECT_EQ(line.rfind("t[s],ref_x[m],", 0), 0u);
    EXPECT_NE(line.find("tau_n[N m]"), std::string::npos);
}

TEST(TraceCsv, ReadBackIsLossless)
{
    SimSetup s = preset_setup("circle_noisy");
    s.scenario.duration = 2.0;
    const auto tr = run(s);
    const json cfg = to_json(s);
    std::ostringstream out;
    write_trace_csv(out, tr, cfg);
    std::istringstream in(out.str());
    const TraceTable table = read_trace_csv(in);
    EXPECT_EQ(table.config, cfg);
    ASSERT_EQ(table.seed, std::optional<std::uint64_t>(1));
    ASSERT_EQ(table.rows.size(), tr.rows.size());
    ASSERT_EQ(table.columns.size(), kTraceColumnCount);
    for (std::size_t k = 0; k < tr.rows.size(); ++k) {
        const auto flat = flatten(tr.rows[k]);
        for (std::size_t c = 0; c < flat.size(); ++c) ASSERT_EQ(table.rows[k][c], flat[c]);
    }
}

TEST(TraceCsv, ResimulatingFromHeaderReproducesFile)
{
    ResolveRequest req;
    req.preset = "circle_noisy";
    req.overrides = {"scenario.duration=5", "dynamic.gamma=1.25"};
    req.seed = 31;
    const SimSetup s = resolve(req);
    std::ostringstream first;
    write_trace_csv(first, run(s), to_json(s));

    std::istringstream in(first.str());
    const TraceTable table = read_trace_csv(in);
    const SimSetup again = from_json(table.config);
    std::ostringstream second;
    write_trace_csv(second, run(again), to_json(again));
    EXPECT_EQ(first.str(), second.str());
}

TEST(TraceCsv, RejectsForeignFiles)
{
    std::istringstream in("a,b,c\n1,2,3\n");
    EXPECT_THROW(read_trace_csv(in), Error);
}

TEST(Io, ShortestRoundTripFormatting)
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.4, std::numbers::pi}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(Io, MetricsDocumentCarriesSchemaAndConfig)
{
    SimSetup s = preset_setup("straight");
    s.scenario.duration = 3.0;
    const auto tr = run(s);
    const json doc = metrics_document(compute_metrics(tr), tr, to_json(s));
    EXPECT_EQ(doc["schema"], kMetricsSchema);
    EXPECT_EQ(doc["controller"], "bio_bs+bio_smc");
    EXPECT_TRUE(doc["seed"].is_null());
    EXPECT_EQ(doc["config"], to_json(s));
    EXPECT_EQ(doc["metrics"]["chattering_index"].size(), 3u);
}

TEST(Io, SvgHasFourPanels)
{
    SimSetup s = preset_setup("circle");
    s.scenario.duration = 5.0;
    const std::string svg = render_svg(to_table(run(s), to_json(s)), "a<b");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    std::size_t panels = 0;
    for (auto p = svg.find("<g>"); p != std::string::npos; p = svg.find("<g>", p + 1)) ++panels;
    EXPECT_EQ(panels, 4u);
    EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
}
