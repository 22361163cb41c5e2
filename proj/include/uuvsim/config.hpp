#pragma once

// Run configuration: JSON (de)serialization of SimSetup, scenario presets and
// flat dotted-key overrides. Parsing is strict: unknown keys are rejected.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uuvsim/errors.hpp"
#include "uuvsim/sim.hpp"

namespace uuvsim {

using json = nlohmann::json;

inline constexpr const char* kConfigSchema = "uuvsim.config/1";

/// Names of the built-in presets, in listing order.
inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"straight", "circle", "circle_noisy"};
    return names;
}

inline std::string preset_description(const std::string& name)
{
    if (name == "straight") return "straight line x = 3 + 0.4t, y = 0.4t, heading 45 deg; start (0, 0, 0)";
    if (name == "circle") return "circle radius 5 about (0, 7), rate 0.1 rad/s, heading 0.1t; start (0, 0, 0)";
    if (name == "circle_noisy") return "circle with system/measurement noise and KF/EKF estimation";
    throw UnknownPreset(name);
}

inline Scenario preset(const std::string& name)
{
    Scenario sc;
    sc.name = name;
    sc.initial_pose = Pose{0.0, 0.0, 0.0};
    sc.initial_vel = BodyVelocity{};
    sc.duration = 100.0;
    sc.dt = 0.01;
    sc.controller = ControllerVariant::bio_bio;
    if (name == "straight") {
        sc.trajectory = StraightLine{3.0, 0.0, 0.4, 0.4, std::numbers::pi / 4.0};
    } else if (name == "circle") {
        sc.trajectory = Circle{5.0, 0.0, 7.0, 0.1, 0.0, 0.0};
    } else if (name == "circle_noisy") {
        sc.trajectory = Circle{5.0, 0.0, 7.0, 0.1, 0.0, 0.0};
        sc.noise = NoiseConfig{};
        sc.estimator = true;
    } else {
        throw UnknownPreset(name);
    }
    return sc;
}

inline SimSetup preset_setup(const std::string& name)
{
    SimSetup s;
    s.scenario = preset(name);
    return s;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline json vec3(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

inline json shunting_json(const std::array<ShuntingParams, 3>& p)
{
    return {{"A", {p[0].A, p[1].A, p[2].A}}, {"B", {p[0].B, p[1].B, p[2].B}}, {"D", {p[0].D, p[1].D, p[2].D}}};
}

inline json trajectory_json(const Trajectory& traj)
{
    struct Visitor
    {
        json operator()(const StraightLine& s) const
        {
            return {{"type", "straight"}, {"x0", s.x0},           {"y0", s.y0},
                    {"speed_x", s.speed_x}, {"speed_y", s.speed_y}, {"heading", s.heading}};
        }
        json operator()(const Circle& c) const
        {
            return {{"type", "circle"},           {"radius", c.radius}, {"center_x", c.center_x},
                    {"center_y", c.center_y},     {"angular_rate", c.angular_rate},
                    {"phase", c.phase},           {"heading_offset", c.heading_offset}};
        }
        json operator()(const TableTrajectory& t) const
        {
            return {{"type", "table"}, {"t", t.t}, {"x", t.x}, {"y", t.y}, {"psi", t.psi}};
        }
    };
    return std::visit(Visitor{}, traj);
}

inline std::string to_string(ActuatorMode m) { return m == ActuatorMode::global ? "global" : "filter"; }

}  // namespace detail

/// Canonical, fully resolved JSON form of a setup.
inline json to_json(const SimSetup& s)
{
    const auto& sc = s.scenario;
    const NoiseConfig noise = sc.noise.value_or(NoiseConfig{});
    const auto& v = s.vehicle;
    const auto& kg = s.kinematic;
    const auto& dg = s.dynamic.gains;
    const auto& dia = s.diagnostics;
    json j;
    j["schema"] = kConfigSchema;
    j["scenario"] = {
        {"name", sc.name},
        {"trajectory", detail::trajectory_json(sc.trajectory)},
        {"initial_pose", {{"x", sc.initial_pose.x}, {"y", sc.initial_pose.y}, {"psi", sc.initial_pose.psi}}},
        {"initial_velocity", {{"u", sc.initial_vel.u}, {"v", sc.initial_vel.v}, {"r", sc.initial_vel.r}}},
        {"duration", sc.duration},
        {"dt", sc.dt},
        {"controller", to_string(sc.controller)},
        {"noise",
         {{"enabled", sc.noise.has_value()},
          {"q_vel", detail::vec3(noise.q_vel)},
          {"q_pos", detail::vec3(noise.q_pos)},
          {"r_scale", noise.r_scale},
          {"seed", noise.seed}}},
        {"estimator", sc.estimator},
    };
    j["vehicle"] = {{"m_u", v.m_u}, {"m_v", v.m_v}, {"m_r", v.m_r}, {"d_u", v.d_u}, {"d_v", v.d_v},
                    {"d_r", v.d_r}, {"q_u", v.q_u}, {"q_v", v.q_v}, {"q_r", v.q_r}};
    j["kinematic"] = {{"k_a", kg.gains.k_a},
                      {"k_b", kg.gains.k_b},
                      {"feedforward", to_string(kg.feedforward)},
                      {"shunting", detail::shunting_json(kg.shunt)}};
    j["dynamic"] = {{"gamma", dg.gamma},
                    {"k", detail::vec3(dg.k)},
                    {"k_s", dg.k_s},
                    {"sat_k_s", dg.sat_k_s},
                    {"sat_B", detail::vec3(dg.sat_B)},
                    {"sat_D", detail::vec3(dg.sat_D)},
                    {"shunting", detail::shunting_json(dg.shunt)},
                    {"model_scale", s.dynamic.model_scale}};
    j["actuator"] = {{"mode", detail::to_string(s.actuator.mode)}, {"sigma", s.actuator.sigma}};
    j["diagnostics"] = {{"check_invariants", dia.check_invariants},
                        {"lyapunov", dia.lyapunov},
                        {"divergence_limit", dia.divergence_limit},
                        {"lyapunov_tolerance", dia.lyapunov_tolerance},
                        {"lyapunov_window", dia.lyapunov_window},
                        {"settle_threshold", dia.settle_threshold}};
    return j;
}

// ---------------------------------------------------------------------------
// Strict parsing

namespace detail {

class Reader
{
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
    }

    /// Rejects any key not listed.
    void allow_only(std::initializer_list<const char*> keys) const
    {
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, _] : obj_.items()) {
            if (!allowed.count(k)) throw ConfigError("unknown key '" + join(k) + "'");
        }
    }

    bool has(const char* key) const { return obj_.contains(key); }

    template <class T>
    void get(const char* key, T& out) const
    {
        if (!obj_.contains(key)) return;
        try {
            out = obj_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError("invalid value for '" + join(key) + "': " + e.what());
        }
    }

    void get_vec3(const char* key, Eigen::Vector3d& out) const
    {
        if (!obj_.contains(key)) return;
        std::array<double, 3> a{};
        get(key, a);
        out = {a[0], a[1], a[2]};
    }

    Reader child(const char* key) const { return Reader(obj_.at(key), join(key)); }
    const json& raw(const char* key) const { return obj_.at(key); }
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json& obj_;
    std::string path_;
};

inline void read_shunting(const Reader& r, std::array<ShuntingParams, 3>& p)
{
    r.allow_only({"A", "B", "D"});
    std::array<double, 3> A{p[0].A, p[1].A, p[2].A}, B{p[0].B, p[1].B, p[2].B}, D{p[0].D, p[1].D, p[2].D};
    r.get("A", A);
    r.get("B", B);
    r.get("D", D);
    for (int i = 0; i < 3; ++i) p[i] = {A[i], B[i], D[i]};
}

inline const char* trajectory_type(const Trajectory& t)
{
    if (std::holds_alternative<StraightLine>(t)) return "straight";
    if (std::holds_alternative<Circle>(t)) return "circle";
    return "table";
}

/// Fields missing from `r` keep the value of `base` when the type is unchanged,
/// and the type's defaults otherwise.
inline Trajectory read_trajectory(const Reader& r, const Trajectory& base)
{
    std::string type = trajectory_type(base);
    r.get("type", type);
    const bool same = type == trajectory_type(base);
    if (type == "straight") {
        r.allow_only({"type", "x0", "y0", "speed_x", "speed_y", "heading"});
        StraightLine s = same ? std::get<StraightLine>(base) : StraightLine{};
        r.get("x0", s.x0);
        r.get("y0", s.y0);
        r.get("speed_x", s.speed_x);
        r.get("speed_y", s.speed_y);
        r.get("heading", s.heading);
        return s;
    }
    if (type == "circle") {
        r.allow_only({"type", "radius", "center_x", "center_y", "angular_rate", "phase", "heading_offset"});
        Circle c = same ? std::get<Circle>(base) : Circle{};
        r.get("radius", c.radius);
        r.get("center_x", c.center_x);
        r.get("center_y", c.center_y);
        r.get("angular_rate", c.angular_rate);
        r.get("phase", c.phase);
        r.get("heading_offset", c.heading_offset);
        return c;
    }
    if (type == "table") {
        r.allow_only({"type", "t", "x", "y", "psi"});
        TableTrajectory t = same ? std::get<TableTrajectory>(base) : TableTrajectory{};
        r.get("t", t.t);
        r.get("x", t.x);
        r.get("y", t.y);
        r.get("psi", t.psi);
        t.validate();
        return t;
    }
    throw ConfigError("unknown trajectory type '" + type + "' (expected straight|circle|table)");
}

inline ActuatorMode parse_actuator_mode(const std::string& s)
{
    if (s == "global") return ActuatorMode::global;
    if (s == "filter") return ActuatorMode::filter;
    throw ConfigError("unknown actuator mode '" + s + "' (expected global|filter)");
}

}  // namespace detail

/// Parses a config tree on top of `base`. Missing keys keep the base value.
inline SimSetup from_json(const json& j, SimSetup base = {})
{
    using detail::Reader;
    Reader root(j, "");
    root.allow_only({"schema", "scenario", "vehicle", "kinematic", "dynamic", "actuator", "diagnostics"});
    if (root.has("schema")) {
        std::string schema;
        root.get("schema", schema);
        if (schema != kConfigSchema) throw ConfigError("unsupported config schema '" + schema + "'");
    }
    SimSetup s = std::move(base);

    if (root.has("scenario")) {
        const Reader r = root.child("scenario");
        r.allow_only({"name", "trajectory", "initial_pose", "initial_velocity", "duration", "dt", "controller",
                      "noise", "estimator"});
        auto& sc = s.scenario;
        r.get("name", sc.name);
        if (r.has("trajectory")) sc.trajectory = detail::read_trajectory(r.child("trajectory"), sc.trajectory);
        if (r.has("initial_pose")) {
            const Reader p = r.child("initial_pose");
            p.allow_only({"x", "y", "psi"});
            double x = sc.initial_pose.x, y = sc.initial_pose.y, psi = sc.initial_pose.psi;
            p.get("x", x);
            p.get("y", y);
            p.get("psi", psi);
            sc.initial_pose = Pose{x, y, psi};
        }
        if (r.has("initial_velocity")) {
            const Reader v = r.child("initial_velocity");
            v.allow_only({"u", "v", "r"});
            v.get("u", sc.initial_vel.u);
            v.get("v", sc.initial_vel.v);
            v.get("r", sc.initial_vel.r);
        }
        r.get("duration", sc.duration);
        r.get("dt", sc.dt);
        if (r.has("controller")) {
            std::string c;
            r.get("controller", c);
            sc.controller = parse_variant(c);
        }
        if (r.has("noise")) {
            const Reader n = r.child("noise");
            n.allow_only({"enabled", "q_vel", "q_pos", "r_scale", "seed"});
            NoiseConfig cfg = sc.noise.value_or(NoiseConfig{});
            bool enabled = sc.noise.has_value();
            n.get("enabled", enabled);
            n.get_vec3("q_vel", cfg.q_vel);
            n.get_vec3("q_pos", cfg.q_pos);
            n.get("r_scale", cfg.r_scale);
            n.get("seed", cfg.seed);
            sc.noise = enabled ? std::optional<NoiseConfig>(cfg) : std::nullopt;
        }
        r.get("estimator", sc.estimator);
    }

    if (root.has("vehicle")) {
        const Reader r = root.child("vehicle");
        r.allow_only({"m_u", "m_v", "m_r", "d_u", "d_v", "d_r", "q_u", "q_v", "q_r"});
        auto& v = s.vehicle;
        r.get("m_u", v.m_u);
        r.get("m_v", v.m_v);
        r.get("m_r", v.m_r);
        r.get("d_u", v.d_u);
        r.get("d_v", v.d_v);
        r.get("d_r", v.d_r);
        r.get("q_u", v.q_u);
        r.get("q_v", v.q_v);
        r.get("q_r", v.q_r);
    }

    if (root.has("kinematic")) {
        const Reader r = root.child("kinematic");
        r.allow_only({"k_a", "k_b", "feedforward", "shunting"});
        r.get("k_a", s.kinematic.gains.k_a);
        r.get("k_b", s.kinematic.gains.k_b);
        if (r.has("feedforward")) {
            std::string ff;
            r.get("feedforward", ff);
            s.kinematic.feedforward = parse_feedforward(ff);
        }
        if (r.has("shunting")) detail::read_shunting(r.child("shunting"), s.kinematic.shunt);
    }

    if (root.has("dynamic")) {
        const Reader r = root.child("dynamic");
        r.allow_only({"gamma", "k", "k_s", "sat_k_s", "sat_B", "sat_D", "shunting", "model_scale"});
        auto& g = s.dynamic.gains;
        r.get("gamma", g.gamma);
        r.get_vec3("k", g.k);
        r.get("k_s", g.k_s);
        r.get("sat_k_s", g.sat_k_s);
        r.get_vec3("sat_B", g.sat_B);
        r.get_vec3("sat_D", g.sat_D);
        if (r.has("shunting")) detail::read_shunting(r.child("shunting"), g.shunt);
        r.get("model_scale", s.dynamic.model_scale);
    }

    if (root.has("actuator")) {
        const Reader r = root.child("actuator");
        r.allow_only({"mode", "sigma"});
        if (r.has("mode")) {
            std::string m;
            r.get("mode", m);
            s.actuator.mode = detail::parse_actuator_mode(m);
        }
        r.get("sigma", s.actuator.sigma);
    }

    if (root.has("diagnostics")) {
        const Reader r = root.child("diagnostics");
        r.allow_only({"check_invariants", "lyapunov", "divergence_limit", "lyapunov_tolerance", "lyapunov_window",
                      "settle_threshold"});
        auto& d = s.diagnostics;
        r.get("check_invariants", d.check_invariants);
        r.get("lyapunov", d.lyapunov);
        r.get("divergence_limit", d.divergence_limit);
        r.get("lyapunov_tolerance", d.lyapunov_tolerance);
        r.get("lyapunov_window", d.lyapunov_window);
        r.get("settle_threshold", d.settle_threshold);
    }

    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// Overrides

/// Default trajectory object for a type, used when an override switches type.
inline json default_trajectory_json(const std::string& type)
{
    if (type == "straight") return detail::trajectory_json(StraightLine{});
    if (type == "circle") return detail::trajectory_json(Circle{});
    if (type == "table") {
        return detail::trajectory_json(TableTrajectory{{0.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
    }
    throw ConfigError("unknown trajectory type '" + type + "'");
}

/// Applies `dotted.key=value` to a resolved config tree. The key must already
/// exist; the value is parsed as JSON and falls back to a plain string.
inline void apply_override(json& tree, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' must look like key.path=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }

    json* node = &tree;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!node->is_object() || !node->contains(parts[i])) {
            throw ConfigError("unknown key '" + key + "'");
        }
        node = &(*node)[parts[i]];
    }
    if (key == "scenario.trajectory.type") {
        if (!value.is_string()) throw ConfigError("scenario.trajectory.type must be a string");
        tree["scenario"]["trajectory"] = default_trajectory_json(value.get<std::string>());
        return;
    }
    if (node->is_object()) throw ConfigError("override '" + key + "' must target a leaf value");
    *node = value;
}

inline json load_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
}

/// Resolution order: preset, config file, --set overrides, then explicit
/// controller/seed flags. Returns the validated setup.
struct ResolveRequest
{
    std::string preset{"straight"};
    std::optional<std::filesystem::path> config_file;
    std::vector<std::string> overrides;
    std::optional<std::string> controller;
    std::optional<std::uint64_t> seed;
};

inline SimSetup resolve(const ResolveRequest& req)
{
    SimSetup setup = preset_setup(req.preset);
    if (req.config_file) setup = from_json(load_json_file(*req.config_file), setup);
    json tree = to_json(setup);
    for (const auto& o : req.overrides) apply_override(tree, o);
    if (req.controller) tree["scenario"]["controller"] = *req.controller;
    if (req.seed) tree["scenario"]["noise"]["seed"] = *req.seed;
    return from_json(tree, SimSetup{});
}

}  // namespace uuvsim
