#pragma once

// Command-line front end. Exit codes: 0 success / covered, 1 not covered
// (decide only), 2 input error, 3 solver failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coverage.hpp"
#include "design.hpp"
#include "error.hpp"
#include "io.hpp"
#include "optimize.hpp"

namespace pupilcover::cli {

enum ExitCode : int { ok = 0, not_covered = 1, input_error = 2, solver_failure = 3 };

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::invalid_input, "config: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return static_cast<bool>(out);
}

inline bool is_solver_failure(ErrorCode c) {
    return c == ErrorCode::infeasible || c == ErrorCode::unbounded || c == ErrorCode::iteration_limit ||
           c == ErrorCode::singular_system || c == ErrorCode::no_coverage;
}

struct Options {
    std::string config_path;
    std::string out_path;
    bool area = false;
    std::optional<double> min_radius, max_radius, epsilon, theta;
    std::optional<int> max_iterations, iterations;
    bool forbid_overlap = false;
    std::string gauge;
    double objective_radius = 0.0;
    double pupil_radius = 0.0;
    std::string layers = "objective,pupils,acs,diagram";
};

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Design and analyse pupil sets whose autocorrelation support covers a disk"};
    app.require_subcommand(1);
    detail::Options o;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("config", o.config_path, "JSON config file")->required();
        sub->add_option("-o,--out", o.out_path, "Write the report here instead of stdout");
    };
    auto add_radius_flags = [&](CLI::App* sub) {
        sub->add_option("--min-radius", o.min_radius, "Lower bound on every radius");
        sub->add_option("--max-radius", o.max_radius, "Upper bound on every radius");
        sub->add_flag("--forbid-overlap", o.forbid_overlap, "Pupils may not overlap");
        sub->add_option("--epsilon", o.epsilon, "Stop when the decrease falls below this");
        sub->add_option("--max-iterations", o.max_iterations, "Iteration cap");
    };

    auto* decide_cmd = app.add_subcommand("decide", "Is the objective covered?");
    add_config(decide_cmd);
    auto* alpha_cmd = app.add_subcommand("alpha", "Uniform and per-disk enlargements");
    add_config(alpha_cmd);
    auto* minsum_cmd = app.add_subcommand("minsum", "Minimize the sum of radii with fixed centers");
    add_config(minsum_cmd);
    add_radius_flags(minsum_cmd);
    minsum_cmd->add_flag("--area", o.area, "Minimize total area instead");
    auto* minarea_cmd = app.add_subcommand("minarea", "Minimize the total area with fixed centers");
    add_config(minarea_cmd);
    add_radius_flags(minarea_cmd);
    auto* move_cmd = app.add_subcommand("move", "Relocate fixed-radius pupils");
    add_config(move_cmd);
    move_cmd->add_option("--iterations", o.iterations, "Relocation steps");
    move_cmd->add_option("--gauge", o.gauge, "fix_centroid or fix_first_center")
        ->check(CLI::IsMember({"fix_centroid", "fix_first_center"}));
    auto* exhaustive_cmd = app.add_subcommand("exhaustive", "Grid search over radii multiples of theta");
    add_config(exhaustive_cmd);
    exhaustive_cmd->add_option("--theta", o.theta, "Radius grid step");
    auto* maxobj_cmd = app.add_subcommand("maxobj", "Largest covered objective radius");
    add_config(maxobj_cmd);
    auto* three_cmd = app.add_subcommand("design-three", "Optimal three-pupil design");
    three_cmd->add_option("--objective-radius", o.objective_radius)->required();
    three_cmd->add_option("-o,--out", o.out_path);
    auto* prime_cmd = app.add_subcommand("design-prime", "Equal-radius prime difference-cover design");
    prime_cmd->add_option("--objective-radius", o.objective_radius)->required();
    prime_cmd->add_option("--pupil-radius", o.pupil_radius)->required();
    prime_cmd->add_option("-o,--out", o.out_path);
    auto* render_cmd = app.add_subcommand("render", "SVG picture of pupils, ACS, diagram points, objective");
    render_cmd->add_option("config", o.config_path)->required();
    render_cmd->add_option("-o,--out", o.out_path, "SVG output path")->required();
    render_cmd->add_option("--layers", o.layers, "Comma list of objective,pupils,acs,diagram");

    std::vector<const char*> argv{"pupilcover"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return input_error;
    }

    const auto started = std::chrono::steady_clock::now();
    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    json report = {{"schema", 1}, {"command", command}, {"args", args}};
    json result = json::object();
    int code = ok;

    auto emit = [&]() -> int {
        report["result"] = result;
        report["runtime_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        const std::string text = report.dump(2) + "\n";
        if (o.out_path.empty()) {
            out << text;
        } else if (!detail::write_file(o.out_path, text)) {
            err << "error: --out: cannot write '" << o.out_path << "'\n";
            return input_error;
        }
        return code;
    };

    try {
        if (command == "render") {
            const std::string text = detail::read_file(o.config_path);
            const ConfigFile file = parse_config(text);
            std::set<Layer> layers;
            std::stringstream ss(o.layers);
            for (std::string item; std::getline(ss, item, ',');) {
                if (item == "objective") layers.insert(Layer::objective);
                else if (item == "pupils") layers.insert(Layer::pupils);
                else if (item == "acs") layers.insert(Layer::acs);
                else if (item == "diagram") layers.insert(Layer::diagram);
                else throw Error(ErrorCode::invalid_input, "--layers: unknown layer '" + item + "'");
            }
            if (layers.contains(Layer::diagram) && build_acs(file.config).size() > 150) {
                err << "warning: diagram layer skipped for more than 150 ACS disks\n";
                layers.erase(Layer::diagram);
            }
            if (!detail::write_file(o.out_path, render_svg(file.config, layers, file.settings))) {
                err << "error: --out: cannot write '" << o.out_path << "'\n";
                return input_error;
            }
            return ok;
        }

        if (command == "design-three") {
            report["input_digest"] = digest("design-three:" + std::to_string(o.objective_radius));
            const PupilConfig cfg = three_pupil_optimal(o.objective_radius);
            result = {{"config", to_json(cfg)}, {"sum_of_radii", sum_of_radii(cfg)}};
            return emit();
        }
        if (command == "design-prime") {
            report["input_digest"] = digest("design-prime:" + std::to_string(o.objective_radius) + ":" +
                                            std::to_string(o.pupil_radius));
            const PrimeDesign d = prime_design(o.objective_radius, o.pupil_radius);
            double bound = 8.0 * std::numbers::sqrt2 * d.objective_radius / d.pupil_radius;
            bound = std::abs(bound - std::round(bound)) <= 1e-6 * bound ? std::round(bound) : std::ceil(bound);
            result = {{"p", d.p},
                      {"scale", d.scale},
                      {"pupil_count", d.pupils.size()},
                      {"lower_bound", std::ceil(d.objective_radius / d.pupil_radius - 1e-9)},
                      {"approximation_ratio", d.approximation_ratio()},
                      {"upper_bound_formula", bound},
                      {"config", to_json(d.config())}};
            return emit();
        }

        const std::string text = detail::read_file(o.config_path);
        report["input_digest"] = digest(text);
        ConfigFile file = parse_config(text);
        OptimizerConfig& opt = file.options;
        if (o.min_radius) opt.min_radius = *o.min_radius;
        if (o.max_radius) opt.max_radius = *o.max_radius;
        if (o.forbid_overlap) opt.forbid_overlap = true;
        if (o.epsilon) opt.epsilon = *o.epsilon;
        if (o.max_iterations) opt.max_iterations = *o.max_iterations;
        if (o.iterations) opt.relocation_iterations = *o.iterations;
        if (o.theta) opt.theta = *o.theta;
        if (o.gauge == "fix_first_center") opt.gauge = Gauge::fix_first_center;
        else if (o.gauge == "fix_centroid") opt.gauge = Gauge::fix_centroid;
        validate(opt);
        const PupilConfig& cfg = file.config;
        const Settings& s = file.settings;

        if (command == "decide") {
            const Decision d = decide(cfg, s);
            result = {{"covered", d.covered}, {"witness", point_json(d.witness)}};
            code = d.covered ? ok : not_covered;
        } else if (command == "alpha") {
            const double a = alpha_star(cfg, s);
            result = {{"alpha_star", a}, {"per_disk_alpha", to_json(per_disk_alpha(cfg, s))}};
        } else if (command == "minsum" || command == "minarea") {
            const bool area = o.area || command == "minarea";
            try {
                const OptimizerTrace t = area ? minimize_area(cfg, opt, s) : minimize_sum_radii(cfg, opt, s);
                result = {{"objective", area ? "area" : "sum"}, {"trace", to_json(t)}};
            } catch (const OptimizerError& e) {
                result = {{"objective", area ? "area" : "sum"}, {"trace", to_json(e.trace())}};
                throw;
            }
        } else if (command == "move") {
            const OptimizerTrace t = move_pupils(cfg, opt, s);
            result = {{"trace", to_json(t)}};
        } else if (command == "exhaustive") {
            std::vector<Point> centers;
            for (const auto& p : cfg.pupils) centers.push_back(p.center);
            const PupilConfig best = exhaustive_search(centers, cfg.objective_radius, opt, s);
            const double sum = sum_of_radii(best);
            result = {{"config", to_json(best)},
                      {"theta", opt.theta},
                      {"sum_of_radii", sum},
                      {"continuous_lower_bound", sum - static_cast<double>(best.size()) * opt.theta}};
        } else if (command == "maxobj") {
            result = {{"r_star", max_objective(cfg, s)}};
        }
        return emit();
    } catch (const Error& e) {
        report["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
        if (detail::is_solver_failure(e.code())) {
            code = solver_failure;
            const int written = emit();
            return written == input_error ? input_error : solver_failure;
        }
        err << "error: " << e.what() << "\n";
        return input_error;
    }
}

} // namespace pupilcover::cli
