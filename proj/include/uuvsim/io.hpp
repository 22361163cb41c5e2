#pragma once

// Trace export (CSV), metrics export (JSON) and static SVG plots.
//
// trace.csv layout (version 1):
//   # uuvsim trace v1
//   # seed: <integer|none>
//   # config: <resolved config, compact JSON on one line>
//   t[s],ref_x[m],...            column header, name[unit]
//   <one row per step>           shortest round-trip decimal doubles

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "uuvsim/errors.hpp"
#include "uuvsim/metrics.hpp"
#include "uuvsim/sim.hpp"

namespace uuvsim {

inline constexpr const char* kTraceMagic = "# uuvsim trace v1";
inline constexpr const char* kMetricsSchema = "uuvsim.metrics/1";

struct Column
{
    const char* name;
    const char* unit;
};

// Order is part of the file format.
inline constexpr Column kTraceColumns[] = {
    {"t", "s"},           {"ref_x", "m"},       {"ref_y", "m"},       {"ref_psi", "rad"},   {"ref_u", "m/s"},
    {"ref_v", "m/s"},     {"ref_r", "rad/s"},   {"x", "m"},           {"y", "m"},           {"psi", "rad"},
    {"u", "m/s"},         {"v", "m/s"},         {"r", "rad/s"},       {"meas_x", "m"},      {"meas_y", "m"},
    {"meas_psi", "rad"},  {"meas_u", "m/s"},    {"meas_v", "m/s"},    {"meas_r", "rad/s"},  {"est_x", "m"},
    {"est_y", "m"},       {"est_psi", "rad"},   {"est_u", "m/s"},     {"est_v", "m/s"},     {"est_r", "rad/s"},
    {"e_x", "m"},         {"e_y", "m"},         {"e_psi", "rad"},     {"u_c", "m/s"},       {"v_c", "m/s"},
    {"r_c", "rad/s"},     {"fb_u", "m/s"},      {"fb_v", "m/s"},      {"fb_r", "rad/s"},    {"tau_raw_x", "N"},
    {"tau_raw_y", "N"},   {"tau_raw_n", "N m"}, {"tau_x", "N"},       {"tau_y", "N"},       {"tau_n", "N m"},
    {"S_u", "m/s"},       {"S_v", "m/s"},       {"S_r", "rad/s"},     {"L1", "-"},          {"L2", "-"},
    {"L3", "-"},          {"L4_u", "N"},        {"L4_v", "N"},        {"L4_r", "N m"},      {"V_p", "-"},
    {"V_z", "-"},
};

inline constexpr std::size_t kTraceColumnCount = sizeof(kTraceColumns) / sizeof(kTraceColumns[0]);

/// Column-oriented view of a trace; what the CSV stores and the plotter reads.
struct TraceTable
{
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    nlohmann::json config;
    std::optional<std::uint64_t> seed;

    std::size_t index(const std::string& name) const
    {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) throw Error("trace has no column '" + name + "'");
        return static_cast<std::size_t>(it - columns.begin());
    }

    std::vector<double> column(const std::string& name) const
    {
        const std::size_t i = index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[i]);
        return out;
    }
};

inline std::vector<double> flatten(const TraceRow& r)
{
    return {r.t,
            r.ref.pose.x, r.ref.pose.y, r.ref.pose.psi, r.ref.vel.u, r.ref.vel.v, r.ref.vel.r,
            r.truth.pose.x, r.truth.pose.y, r.truth.pose.psi, r.truth.vel.u, r.truth.vel.v, r.truth.vel.r,
            r.measured.pose.x, r.measured.pose.y, r.measured.pose.psi, r.measured.vel.u, r.measured.vel.v,
            r.measured.vel.r,
            r.observed.pose.x, r.observed.pose.y, r.observed.pose.psi, r.observed.vel.u, r.observed.vel.v,
            r.observed.vel.r,
            r.error.e_x, r.error.e_y, r.error.e_psi,
            r.command.u_c, r.command.v_c, r.command.r_c,
            r.feedback.u_c, r.feedback.v_c, r.feedback.r_c,
            r.tau_raw.x, r.tau_raw.y, r.tau_raw.n,
            r.tau.x, r.tau.y, r.tau.n,
            r.sliding[0], r.sliding[1], r.sliding[2],
            r.L_kin[0], r.L_kin[1], r.L_kin[2],
            r.L4[0], r.L4[1], r.L4[2],
            r.V_p, r.V_z};
}

inline TraceTable to_table(const SimTrace& trace, const nlohmann::json& config)
{
    TraceTable t;
    for (const auto& c : kTraceColumns) t.columns.emplace_back(c.name);
    t.rows.reserve(trace.rows.size());
    for (const auto& r : trace.rows) t.rows.push_back(flatten(r));
    t.config = config;
    t.seed = trace.seed;
    return t;
}

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline void write_trace_csv(std::ostream& out, const TraceTable& table)
{
    out << kTraceMagic << '\n';
    out << "# seed: " << (table.seed ? std::to_string(*table.seed) : std::string("none")) << '\n';
    out << "# config: " << table.config.dump() << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << table.columns[i];
        if (i < kTraceColumnCount && table.columns[i] == kTraceColumns[i].name) out << '[' << kTraceColumns[i].unit << ']';
    }
    out << '\n';
    std::string line;
    for (const auto& row : table.rows) {
        line.clear();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += ',';
            line += format_double(row[i]);
        }
        line += '\n';
        out << line;
    }
}

inline void write_trace_csv(std::ostream& out, const SimTrace& trace, const nlohmann::json& config)
{
    write_trace_csv(out, to_table(trace, config));
}

inline TraceTable read_trace_csv(std::istream& in)
{
    TraceTable t;
    std::string line;
    if (!std::getline(in, line) || line != kTraceMagic) throw Error("not a uuvsim trace (bad magic line)");
    while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
        if (line.rfind("# seed: ", 0) == 0) {
            const std::string s = line.substr(8);
            if (s != "none") t.seed = std::stoull(s);
        } else if (line.rfind("# config: ", 0) == 0) {
            t.config = nlohmann::json::parse(line.substr(10));
        }
    }
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            t.columns.push_back(cell.substr(0, cell.find('[')));
        }
    }
    if (t.columns.empty()) throw Error("trace has no column header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(t.columns.size());
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p <= end) {
            const char* comma = std::find(p, end, ',');
            double v = 0.0;
            const auto res = std::from_chars(p, comma, v);
            if (res.ec != std::errc()) throw Error("malformed number in trace row " + std::to_string(t.rows.size()));
            row.push_back(v);
            p = comma + 1;
        }
        if (row.size() != t.columns.size()) {
            throw Error("trace row " + std::to_string(t.rows.size()) + " has the wrong number of fields");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Metrics

inline nlohmann::json metrics_json(const RunMetrics& m)
{
    const auto v3 = [](const Eigen::Vector3d& v) { return nlohmann::json::array({v[0], v[1], v[2]}); };
    nlohmann::json j;
    j["pos_rmse"] = m.pos_rmse;
    j["heading_rmse"] = m.heading_rmse;
    j["peak_cmd_jump"] = m.peak_cmd_jump;
    j["chattering_index"] = v3(m.chattering_index);
    j["command_chattering"] = v3(m.command_chattering);
    j["lyapunov_violations"] = {{"V_p", m.lyapunov_violations_p}, {"V_z", m.lyapunov_violations_z}};
    j["settle_time"] = m.settle_time ? nlohmann::json(*m.settle_time) : nlohmann::json(nullptr);
    return j;
}

/// Structured metrics document: schema tag, run identity, resolved config and metric values.
inline nlohmann::json metrics_document(const RunMetrics& m, const SimTrace& trace, const nlohmann::json& config)
{
    nlohmann::json j;
    j["schema"] = kMetricsSchema;
    j["controller"] = to_string(trace.controller);
    j["scenario"] = config.at("scenario").at("name");
    j["seed"] = trace.seed ? nlohmann::json(*trace.seed) : nlohmann::json(nullptr);
    j["steps"] = trace.rows.size();
    j["metrics"] = metrics_json(m);
    j["config"] = config;
    return j;
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

struct Series
{
    std::vector<double> x;
    std::vector<double> y;
    const char* color;
    const char* label;
    bool dashed{false};
};

inline std::string svg_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string fmt_tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

/// One panel at (ox, oy) of size (w, h). `equal_axes` keeps x/y scale equal.
inline void svg_panel(std::ostringstream& out, double ox, double oy, double w, double h, const std::string& title,
                      const std::vector<Series>& series, bool equal_axes = false)
{
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
        for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
    }
    if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
    if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
    const double pad_y = 0.05 * (ymax - ymin);
    ymin -= pad_y;
    ymax += pad_y;

    const double ml = 55, mr = 10, mt = 22, mb = 28;
    const double pw = w - ml - mr, ph = h - mt - mb;
    double sx = pw / (xmax - xmin), sy = ph / (ymax - ymin);
    if (equal_axes) {
        const double s = std::min(sx, sy);
        sx = sy = s;
    }
    const auto X = [&](double v) { return ox + ml + (v - xmin) * sx; };
    const auto Y = [&](double v) { return oy + mt + ph - (v - ymin) * sy; };

    out << "<g>\n";
    out << "<rect x=\"" << fmt(ox + ml) << "\" y=\"" << fmt(oy + mt) << "\" width=\"" << fmt(pw) << "\" height=\""
        << fmt(ph) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    out << "<text x=\"" << fmt(ox + ml) << "\" y=\"" << fmt(oy + 15) << "\" font-size=\"13\">" << svg_escape(title)
        << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        out << "<text x=\"" << fmt(ox + 2) << "\" y=\"" << fmt(Y(yv) + 4) << "\" font-size=\"10\">" << fmt_tick(yv)
            << "</text>\n";
        out << "<text x=\"" << fmt(X(xv) - 10) << "\" y=\"" << fmt(oy + h - 8) << "\" font-size=\"10\">"
            << fmt_tick(xv) << "</text>\n";
    }
    double legend_x = ox + ml + pw - 150;
    double legend_y = oy + mt + 14;
    for (const auto& s : series) {
        // Decimate long series to keep files small.
        const std::size_t n = s.x.size();
        const std::size_t stride = std::max<std::size_t>(1, n / 2000);
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\"";
        if (s.dashed) out << " stroke-dasharray=\"5,3\"";
        out << " points=\"";
        for (std::size_t i = 0; i < n; i += stride) out << fmt(X(s.x[i])) << ',' << fmt(Y(s.y[i])) << ' ';
        if (n > 0 && (n - 1) % stride != 0) out << fmt(X(s.x[n - 1])) << ',' << fmt(Y(s.y[n - 1]));
        out << "\"/>\n";
        out << "<text x=\"" << fmt(legend_x) << "\" y=\"" << fmt(legend_y) << "\" font-size=\"10\" fill=\"" << s.color
            << "\">" << svg_escape(s.label) << "</text>\n";
        legend_y += 12;
    }
    out << "</g>\n";
}

}  // namespace detail

/// Four panels: trajectory overlay, velocity commands, applied torque, position error.
inline std::string render_svg(const TraceTable& t, const std::string& title = "")
{
    using detail::Series;
    const auto time = t.column("t");
    std::ostringstream out;
    const double W = 1000, H = 760;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
        << ' ' << H << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        out << "<text x=\"10\" y=\"18\" font-size=\"15\">" << detail::svg_escape(title) << "</text>\n";
    }

    detail::svg_panel(out, 0, 25, W / 2, (H - 25) / 2, "trajectory [m]",
                      {Series{t.column("ref_x"), t.column("ref_y"), "#1f77b4", "reference", true},
                       Series{t.column("x"), t.column("y"), "#d62728", "vehicle"}},
                      true);
    detail::svg_panel(out, W / 2, 25, W / 2, (H - 25) / 2, "velocity commands vs t [s]",
                      {Series{time, t.column("u_c"), "#d62728", "u_c [m/s]"},
                       Series{time, t.column("v_c"), "#2ca02c", "v_c [m/s]"},
                       Series{time, t.column("r_c"), "#9467bd", "r_c [rad/s]"}});
    detail::svg_panel(out, 0, 25 + (H - 25) / 2, W / 2, (H - 25) / 2, "applied torque vs t [s]",
                      {Series{time, t.column("tau_x"), "#d62728", "tau_x [N]"},
                       Series{time, t.column("tau_y"), "#2ca02c", "tau_y [N]"},
                       Series{time, t.column("tau_n"), "#9467bd", "tau_n [N m]"}});
    std::vector<double> err;
    const auto ex = t.column("ref_x"), x = t.column("x"), ey = t.column("ref_y"), y = t.column("y");
    err.reserve(ex.size());
    for (std::size_t i = 0; i < ex.size(); ++i) err.push_back(std::hypot(ex[i] - x[i], ey[i] - y[i]));
    detail::svg_panel(out, W / 2, 25 + (H - 25) / 2, W / 2, (H - 25) / 2, "position error vs t [s]",
                      {Series{time, err, "#ff7f0e", "|e| [m]"}});
    out << "</svg>\n";
    return out.str();
}

}  // namespace uuvsim
