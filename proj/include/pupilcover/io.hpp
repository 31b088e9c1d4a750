#pragma once

// JSON config files, report helpers and SVG rendering.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "apollonius.hpp"
#include "coverage.hpp"
#include "error.hpp"
#include "geom.hpp"
#include "optimize.hpp"

namespace pupilcover {

using json = nlohmann::json;

struct ConfigFile {
    PupilConfig config;
    OptimizerConfig options;
    Settings settings;
};

namespace detail {

inline void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto k : keys) known = known || key == k;
        if (!known) throw Error(ErrorCode::invalid_input, std::string(where) + key + ": unknown key");
    }
}

inline double number(const json& obj, const std::string& key, std::string_view where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw Error(ErrorCode::invalid_input, std::string(where) + key + ": expected a number");
    return v.get<double>();
}

inline std::string_view gauge_name(Gauge g) {
    return g == Gauge::fix_centroid ? "fix_centroid" : "fix_first_center";
}

} // namespace detail

inline ConfigFile parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::invalid_input, std::string("config: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::invalid_input, "config: expected a JSON object");
    detail::reject_unknown(doc, "", {"objective_radius", "objective_center", "pupils", "options"});

    ConfigFile out;
    if (!doc.contains("objective_radius")) throw Error(ErrorCode::invalid_input, "objective_radius: missing");
    out.config.objective_radius = detail::number(doc, "objective_radius", "");

    if (doc.contains("objective_center")) {
        const auto& c = doc["objective_center"];
        if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
            throw Error(ErrorCode::invalid_input, "objective_center: expected [x, y]");
        if (c[0].get<double>() != 0.0 || c[1].get<double>() != 0.0)
            throw Error(ErrorCode::invalid_input, "objective_center: the objective must be centered at the origin");
    }

    if (!doc.contains("pupils") || !doc["pupils"].is_array())
        throw Error(ErrorCode::invalid_input, "pupils: expected an array");
    std::size_t k = 0;
    for (const auto& p : doc["pupils"]) {
        const std::string where = "pupils[" + std::to_string(k++) + "].";
        if (!p.is_object()) throw Error(ErrorCode::invalid_input, where + ": expected an object");
        detail::reject_unknown(p, where, {"x", "y", "r"});
        for (const char* key : {"x", "y", "r"})
            if (!p.contains(key)) throw Error(ErrorCode::invalid_input, where + key + ": missing");
        out.config.pupils.push_back(
            {{detail::number(p, "x", where), detail::number(p, "y", where)}, detail::number(p, "r", where)});
    }

    if (doc.contains("options")) {
        const auto& o = doc["options"];
        if (!o.is_object()) throw Error(ErrorCode::invalid_input, "options: expected an object");
        detail::reject_unknown(o, "options.",
                               {"epsilon", "theta", "max_iterations", "min_radius", "max_radius",
                                "forbid_overlap", "relocation_iterations", "gauge", "tolerance",
                                "boundary_samples"});
        auto& opt = out.options;
        if (o.contains("epsilon")) opt.epsilon = detail::number(o, "epsilon", "options.");
        if (o.contains("theta")) opt.theta = detail::number(o, "theta", "options.");
        if (o.contains("max_iterations"))
            opt.max_iterations = static_cast<int>(detail::number(o, "max_iterations", "options."));
        if (o.contains("min_radius")) opt.min_radius = detail::number(o, "min_radius", "options.");
        if (o.contains("max_radius") && !o["max_radius"].is_null())
            opt.max_radius = detail::number(o, "max_radius", "options.");
        if (o.contains("forbid_overlap")) {
            if (!o["forbid_overlap"].is_boolean())
                throw Error(ErrorCode::invalid_input, "options.forbid_overlap: expected a boolean");
            opt.forbid_overlap = o["forbid_overlap"].get<bool>();
        }
        if (o.contains("relocation_iterations"))
            opt.relocation_iterations = static_cast<int>(detail::number(o, "relocation_iterations", "options."));
        if (o.contains("gauge")) {
            const auto& g = o["gauge"];
            if (g == "fix_centroid") opt.gauge = Gauge::fix_centroid;
            else if (g == "fix_first_center") opt.gauge = Gauge::fix_first_center;
            else throw Error(ErrorCode::invalid_input, "options.gauge: expected fix_centroid or fix_first_center");
        }
        if (o.contains("tolerance")) out.settings.tau = detail::number(o, "tolerance", "options.");
        if (o.contains("boundary_samples"))
            out.settings.boundary_samples = static_cast<int>(detail::number(o, "boundary_samples", "options."));
        if (!(out.settings.tau > 0.0)) throw Error(ErrorCode::invalid_input, "options.tolerance: must be > 0");
        if (out.settings.boundary_samples < 16)
            throw Error(ErrorCode::invalid_input, "options.boundary_samples: must be >= 16");
        validate(opt);
    }
    validate(out.config);
    return out;
}

inline json to_json(const PupilConfig& cfg) {
    json pupils = json::array();
    for (const auto& p : cfg.pupils) pupils.push_back({{"x", p.center.x}, {"y", p.center.y}, {"r", p.radius}});
    return {{"objective_radius", cfg.objective_radius}, {"pupils", std::move(pupils)}};
}

inline json to_json(const ConfigFile& file) {
    json doc = to_json(file.config);
    const auto& o = file.options;
    doc["options"] = {{"epsilon", o.epsilon},
                      {"theta", o.theta},
                      {"max_iterations", o.max_iterations},
                      {"min_radius", o.min_radius},
                      {"max_radius", o.max_radius ? json(*o.max_radius) : json(nullptr)},
                      {"forbid_overlap", o.forbid_overlap},
                      {"relocation_iterations", o.relocation_iterations},
                      {"gauge", detail::gauge_name(o.gauge)},
                      {"tolerance", file.settings.tau},
                      {"boundary_samples", file.settings.boundary_samples}};
    return doc;
}

inline json to_json(const OptimizerTrace& trace) {
    json entries = json::array();
    for (const auto& e : trace.iterations) {
        json j = {{"sum_of_radii", e.sum_of_radii}, {"total_area", e.total_area}, {"covered", e.covered}};
        if (e.relocation_before) j["relocation_before"] = *e.relocation_before;
        if (e.relocation_after) j["relocation_after"] = *e.relocation_after;
        entries.push_back(std::move(j));
    }
    return {{"iterations", std::move(entries)},
            {"final_config", to_json(trace.final_config)},
            {"singular_system", trace.singular_system}};
}

inline json to_json(const AlphaTable& table) {
    json out = json::array();
    for (std::size_t i = 0; i < table.size(); ++i)
        for (std::size_t j = 0; j < table.size(); ++j) {
            const auto& v = table.at(i, j);
            out.push_back({{"i", i}, {"j", j}, {"alpha", v ? json(*v) : json("unconstrained")}});
        }
    return out;
}

inline json point_json(const std::optional<Point>& p) {
    return p ? json::array({p->x, p->y}) : json(nullptr);
}

/// FNV-1a 64-bit digest, hex encoded.
inline std::string digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

enum class Layer { objective, pupils, acs, diagram };

/// Deterministic SVG 1.1; [-1.2R, 1.2R]^2 maps onto a 1000 x 1000 canvas, y up.
inline std::string render_svg(const PupilConfig& cfg, const std::set<Layer>& layers, const Settings& s = {}) {
    validate(cfg);
    const double R = cfg.objective_radius;
    const double k = 1000.0 / (2.4 * R);
    auto fmt = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", v);
        std::string out = buf;
        return out == "-0.000" ? std::string("0.000") : out;
    };
    auto sx = [&](double x) { return fmt((x + 1.2 * R) * k); };
    auto sy = [&](double y) { return fmt((1.2 * R - y) * k); };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"1000\" height=\"1000\" "
           "viewBox=\"0 0 1000 1000\">\n"
        << "<rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n";

    const bool want_acs = layers.contains(Layer::acs), want_diagram = layers.contains(Layer::diagram);
    Acs acs;
    if (want_acs || want_diagram) acs = build_acs(cfg);
    if (want_acs) {
        svg << "<g id=\"acs\">\n";
        for (const auto& d : acs.disks)
            svg << "<circle class=\"acs\" cx=\"" << sx(d.disk.center.x) << "\" cy=\"" << sy(d.disk.center.y)
                << "\" r=\"" << fmt(d.disk.radius * k) << "\" fill=\"#cc6677\" fill-opacity=\"0.15\" "
                << "stroke=\"#cc6677\" stroke-width=\"1.5\"/>\n";
        svg << "</g>\n";
    }
    if (layers.contains(Layer::pupils)) {
        svg << "<g id=\"pupils\">\n";
        for (const auto& p : cfg.pupils)
            svg << "<circle class=\"pupil\" cx=\"" << sx(p.center.x) << "\" cy=\"" << sy(p.center.y) << "\" r=\""
                << fmt(std::max(p.radius * k, 2.0)) << "\" fill=\"#4477aa\" fill-opacity=\"0.8\"/>\n";
        svg << "</g>\n";
    }
    if (layers.contains(Layer::objective))
        svg << "<circle class=\"objective\" cx=\"" << sx(0.0) << "\" cy=\"" << sy(0.0) << "\" r=\"" << fmt(R * k)
            << "\" fill=\"none\" stroke=\"black\" stroke-width=\"6\"/>\n";
    if (want_diagram) {
        svg << "<g id=\"diagram\">\n";
        std::vector<Point> marks;
        for (const auto& set : vertex_sets(acs, R, s))
            for (const auto& w : set.points) {
                bool seen = false;
                for (Point m : marks) seen = seen || distance(m, w.point) <= 1e-9 * std::max(1.0, R);
                if (seen) continue;
                marks.push_back(w.point);
                const double a = 6.0 / k;
                svg << "<path class=\"vertex\" d=\"M" << sx(w.point.x - a) << ' ' << sy(w.point.y - a) << " L"
                    << sx(w.point.x + a) << ' ' << sy(w.point.y + a) << " M" << sx(w.point.x - a) << ' '
                    << sy(w.point.y + a) << " L" << sx(w.point.x + a) << ' ' << sy(w.point.y - a)
                    << "\" stroke=\"#222222\" stroke-width=\"2\"/>\n";
            }
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace pupilcover
