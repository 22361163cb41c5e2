// uuvsim command-line harness: run, compare, sweep, plot, presets.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uuvsim/uuvsim.hpp"

namespace fs = std::filesystem;
using namespace uuvsim;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kInvariant = 3 };

struct CommonOptions
{
    std::string preset{"straight"};
    std::string config_file;
    std::vector<std::string> overrides;
    std::string controller;
    std::uint64_t seed{0};
    bool seed_given{false};
    std::string out;
    bool no_csv{false};
    bool no_svg{false};
    bool no_metrics{false};
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_controller = true)
{
    cmd->add_option("-p,--preset", o.preset, "Scenario preset (see `presets`)")->capture_default_str();
    cmd->add_option("-c,--config", o.config_file, "JSON config file applied on top of the preset")
        ->check(CLI::ExistingFile);
    cmd->add_option("-s,--set", o.overrides, "Override a config value, e.g. --set dynamic.k_s=1.5");
    if (with_controller) cmd->add_option("--controller", o.controller, "Controller variant, e.g. bio_bs+bio_smc");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&o](std::uint64_t s) { o.seed = s, o.seed_given = true; }, "Noise seed");
    cmd->add_option("-o,--out", o.out, "Output directory (default: $UUVSIM_OUT_DIR or ./uuvsim_out)");
    cmd->add_flag("--no-csv", o.no_csv, "Do not write trace.csv");
    cmd->add_flag("--no-svg", o.no_svg, "Do not write plot.svg");
    cmd->add_flag("--no-metrics", o.no_metrics, "Do not write metrics.json");
}

ResolveRequest request_from(const CommonOptions& o)
{
    ResolveRequest r;
    r.preset = o.preset;
    if (!o.config_file.empty()) r.config_file = o.config_file;
    r.overrides = o.overrides;
    if (!o.controller.empty()) r.controller = o.controller;
    if (o.seed_given) r.seed = o.seed;
    return r;
}

fs::path output_dir(const CommonOptions& o)
{
    if (!o.out.empty()) return o.out;
    if (const char* env = std::getenv("UUVSIM_OUT_DIR"); env && *env) return env;
    return "uuvsim_out";
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    f << content;
    if (!f) throw Error("failed writing '" + path.string() + "'");
}

/// Writes the enabled artifacts for one finished run into `dir`.
RunMetrics export_run(const SimSetup& setup, const SimTrace& trace, const fs::path& dir, const CommonOptions& o)
{
    fs::create_directories(dir);
    const json config = to_json(setup);
    const RunMetrics m = compute_metrics(trace, setup.diagnostics);
    if (!o.no_csv) {
        std::ostringstream csv;
        write_trace_csv(csv, trace, config);
        write_file(dir / "trace.csv", csv.str());
    }
    if (!o.no_metrics) write_file(dir / "metrics.json", metrics_document(m, trace, config).dump(2) + "\n");
    if (!o.no_svg) {
        const std::string title = setup.scenario.name + " / " + to_string(setup.scenario.controller);
        write_file(dir / "plot.svg", render_svg(to_table(trace, config), title));
    }
    return m;
}

std::string fmt_opt(const std::optional<double>& v)
{
    if (!v) return "never";
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << *v;
    return s.str();
}

void print_table_header(const std::string& first)
{
    std::cout << std::left << std::setw(20) << first << std::right << std::setw(11) << "pos_rmse" << std::setw(11)
              << "settle[s]" << std::setw(11) << "cmd_jump" << std::setw(12) << "chat_x" << std::setw(12)
              << "chat_y" << std::setw(12) << "chat_n" << std::setw(8) << "dV_p+" << std::setw(8) << "dV_z+" << '\n';
}

void print_table_row(const std::string& first, const RunMetrics& m)
{
    std::cout << std::left << std::setw(20) << first << std::right << std::setprecision(4) << std::setw(11)
              << m.pos_rmse << std::setw(11) << fmt_opt(m.settle_time) << std::setw(11) << m.peak_cmd_jump
              << std::setw(12) << m.chattering_index[0] << std::setw(12) << m.chattering_index[1] << std::setw(12)
              << m.chattering_index[2] << std::setw(8) << m.lyapunov_violations_p << std::setw(8)
              << m.lyapunov_violations_z << '\n';
}

int cmd_run(const CommonOptions& o)
{
    const SimSetup setup = resolve(request_from(o));
    const SimTrace trace = run(setup);
    const fs::path dir = output_dir(o);
    const RunMetrics m = export_run(setup, trace, dir, o);
    print_table_header("controller");
    print_table_row(to_string(setup.scenario.controller), m);
    std::cout << "artifacts: " << dir.string() << '\n';
    return kOk;
}

std::vector<ControllerVariant> parse_controller_list(const std::string& spec)
{
    if (spec == "all") return {kAllVariants.begin(), kAllVariants.end()};
    std::vector<ControllerVariant> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_variant(item));
    if (out.empty()) throw ConfigError("--controllers is empty");
    return out;
}

/// Directory-safe label: '+' and '=' are fine on POSIX but awkward in shells.
std::string dir_label(std::string s)
{
    for (char& c : s) {
        if (c == '+' || c == '=' || c == '/' || c == ' ') c = '_';
    }
    return s;
}

int cmd_compare(const CommonOptions& o, const std::string& controllers, unsigned jobs)
{
    const auto variants = parse_controller_list(controllers);
    std::vector<SimSetup> setups;
    for (auto v : variants) {
        ResolveRequest req = request_from(o);
        req.controller = to_string(v);
        setups.push_back(resolve(req));
    }
    const auto traces = run_batch(setups, jobs);
    const fs::path root = output_dir(o);

    std::vector<RunMetrics> metrics;
    json summary = json::array();
    for (std::size_t i = 0; i < setups.size(); ++i) {
        const std::string name = to_string(setups[i].scenario.controller);
        metrics.push_back(export_run(setups[i], traces[i], root / dir_label(name), o));
        summary.push_back({{"controller", name}, {"metrics", metrics_json(metrics.back())}});
    }
    // Rank by torque chattering summed over axes.
    std::vector<std::size_t> order(setups.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return metrics[a].chattering_index.sum() < metrics[b].chattering_index.sum();
    });
    std::cout << "scenario " << setups.front().scenario.name << ", ranked by chattering_index (applied torque)\n";
    print_table_header("controller");
    for (std::size_t i : order) print_table_row(to_string(setups[i].scenario.controller), metrics[i]);

    if (!o.no_metrics) {
        fs::create_directories(root);
        json doc{{"schema", kMetricsSchema},
                 {"kind", "compare"},
                 {"scenario", setups.front().scenario.name},
                 {"runs", summary}};
        write_file(root / "compare.json", doc.dump(2) + "\n");
    }
    return kOk;
}

int cmd_sweep(const CommonOptions& o, const std::string& param, const std::vector<std::string>& values, unsigned jobs)
{
    std::vector<SimSetup> setups;
    for (const auto& v : values) {
        ResolveRequest req = request_from(o);
        req.overrides.push_back(param + "=" + v);
        setups.push_back(resolve(req));
    }
    const auto traces = run_batch(setups, jobs);
    const fs::path root = output_dir(o);

    json summary = json::array();
    std::cout << "sweep " << param << " on " << setups.front().scenario.name << '\n';
    print_table_header(param);
    for (std::size_t i = 0; i < setups.size(); ++i) {
        const RunMetrics m = export_run(setups[i], traces[i], root / dir_label(param + "=" + values[i]), o);
        print_table_row(values[i], m);
        summary.push_back({{"value", json::parse(values[i], nullptr, false).is_discarded()
                                         ? json(values[i])
                                         : json::parse(values[i])},
                           {"metrics", metrics_json(m)}});
    }
    if (!o.no_metrics) {
        fs::create_directories(root);
        json doc{{"schema", kMetricsSchema}, {"kind", "sweep"}, {"param", param}, {"runs", summary}};
        write_file(root / "sweep.json", doc.dump(2) + "\n");
    }
    return kOk;
}

int cmd_plot(const std::string& trace_path, const std::string& out_path)
{
    std::ifstream in(trace_path);
    if (!in) throw Error("cannot open trace '" + trace_path + "'");
    const TraceTable table = read_trace_csv(in);
    std::string title;
    if (table.config.contains("scenario")) {
        title = table.config["scenario"].value("name", "") + " / " + table.config["scenario"].value("controller", "");
    }
    const fs::path out = out_path.empty() ? fs::path(trace_path).replace_extension(".svg") : fs::path(out_path);
    write_file(out, render_svg(table, title));
    std::cout << "wrote " << out.string() << '\n';
    return kOk;
}

int cmd_presets(const std::string& show)
{
    if (!show.empty()) {
        std::cout << to_json(preset_setup(show)).dump(2) << '\n';
        return kOk;
    }
    for (const auto& name : preset_names()) {
        std::cout << std::left << std::setw(14) << name << preset_description(name) << '\n';
    }
    std::cout << "\ncontrollers:";
    for (auto v : kAllVariants) std::cout << ' ' << to_string(v);
    std::cout << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"uuvsim: planar underwater vehicle tracking-control simulator"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and export trace/metrics/plot");
    add_common(run_cmd, run_opts);

    CommonOptions cmp_opts;
    std::string controllers = "all";
    unsigned cmp_jobs = 0;
    auto* cmp_cmd = app.add_subcommand("compare", "Run several controllers on one scenario and rank them");
    add_common(cmp_cmd, cmp_opts, false);
    cmp_cmd->add_option("--controllers", controllers, "Comma-separated variants or 'all'")->capture_default_str();
    cmp_cmd->add_option("-j,--jobs", cmp_jobs, "Worker threads (0 = hardware concurrency)");

    CommonOptions sweep_opts;
    std::string param;
    std::vector<std::string> values;
    unsigned sweep_jobs = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Vary one config key over a list of values");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--param", param, "Dotted config key, e.g. dynamic.gamma")->required();
    sweep_cmd->add_option("--values", values, "Values to try")->required()->delimiter(',');
    sweep_cmd->add_option("-j,--jobs", sweep_jobs, "Worker threads (0 = hardware concurrency)");

    std::string trace_path, plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "Render plot.svg from an existing trace.csv");
    plot_cmd->add_option("--trace", trace_path, "trace.csv to read")->required()->check(CLI::ExistingFile);
    plot_cmd->add_option("-o,--out", plot_out, "SVG path (default: trace path with .svg)");

    std::string show;
    auto* presets_cmd = app.add_subcommand("presets", "List presets and controller variants");
    presets_cmd->add_option("--show", show, "Print the fully resolved config of one preset");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return cmd_run(run_opts);
        if (*cmp_cmd) return cmd_compare(cmp_opts, controllers, cmp_jobs);
        if (*sweep_cmd) return cmd_sweep(sweep_opts, param, values, sweep_jobs);
        if (*plot_cmd) return cmd_plot(trace_path, plot_out);
        if (*presets_cmd) return cmd_presets(show);
    } catch (const InvariantViolation& e) {
        std::cerr << "uuvsim: invariant violation: " << e.what() << '\n';
        return kInvariant;
    } catch (const ConfigError& e) {
        std::cerr << "uuvsim: config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "uuvsim: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
