#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "error.hpp"

namespace pupilcover {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator-(Point a) { return {-a.x, -a.y}; }
    friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend constexpr Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Point, Point) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline bool is_finite(Point a) { return std::isfinite(a.x) && std::isfinite(a.y); }

struct Disk {
    Point center;
    double radius = 0.0;
};

struct Pupil {
    Point center;
    double radius = 0.0;
};

/// Numerical knobs shared by every module. `tau` is the boundary classification
/// tolerance in length units; `boundary_samples` is the angular grid used when
/// scanning the objective circle for cell-boundary crossings.
struct Settings {
    double tau = 1e-9;
    int boundary_samples = 720;
};

/// Pupils plus the radius of the objective disk, which sits at the origin.
struct PupilConfig {
    std::vector<Pupil> pupils;
    double objective_radius = 1.0;

    std::size_t size() const { return pupils.size(); }
};

inline void validate(const PupilConfig& cfg) {
    if (cfg.pupils.empty())
        throw Error(ErrorCode::invalid_input, "pupils: at least one pupil is required");
    if (!(std::isfinite(cfg.objective_radius) && cfg.objective_radius > 0.0))
        throw Error(ErrorCode::invalid_input, "objective_radius: must be finite and > 0");
    for (std::size_t k = 0; k < cfg.pupils.size(); ++k) {
        const auto& p = cfg.pupils[k];
        if (!is_finite(p.center))
            throw Error(ErrorCode::invalid_input,
                        "pupils[" + std::to_string(k) + "]: center must be finite");
        if (!(std::isfinite(p.radius) && p.radius >= 0.0))
            throw Error(ErrorCode::invalid_input,
                        "pupils[" + std::to_string(k) + "].r: radius must be finite and >= 0");
    }
}

inline double sum_of_radii(const PupilConfig& cfg) {
    return std::accumulate(cfg.pupils.begin(), cfg.pupils.end(), 0.0,
                           [](double s, const Pupil& p) { return s + p.radius; });
}

inline double total_area(const PupilConfig& cfg) {
    return std::accumulate(cfg.pupils.begin(), cfg.pupils.end(), 0.0, [](double s, const Pupil& p) {
        return s + std::numbers::pi * p.radius * p.radius;
    });
}

inline double max_radius(const PupilConfig& cfg) {
    double m = 0.0;
    for (const auto& p : cfg.pupils) m = std::max(m, p.radius);
    return m;
}

/// Signed additive distance from x to the circle of d: negative inside.
inline double delta(const Disk& d, Point x) { return distance(x, d.center) - d.radius; }

/// P - Q for two disks: center difference, radius sum.
inline Disk minkowski_diff(const Pupil& p, const Pupil& q) {
    return {p.center - q.center, p.radius + q.radius};
}

struct Label {
    std::size_t i = 0;
    std::size_t j = 0;
    friend constexpr bool operator==(Label, Label) = default;
    friend constexpr auto operator<=>(Label, Label) = default;
};

struct AcsDisk {
    Label label;
    Disk disk;
    std::vector<Label> merged_from;  // labels absorbed by this disk, excluding `label`
};

/// Autocorrelation support: the deduplicated Minkowski-difference disks of a pupil set.
struct Acs {
    std::vector<AcsDisk> disks;
    std::size_t n = 0;

    std::size_t size() const { return disks.size(); }
    const Disk& operator[](std::size_t k) const { return disks[k].disk; }
};

struct NearestDisk {
    double value = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
};

/// Minimum additive distance over the disks; ties go to the lowest index.
inline NearestDisk delta_min(const Acs& acs, Point x) {
    NearestDisk best;
    for (std::size_t k = 0; k < acs.size(); ++k) {
        const double d = delta(acs[k], x);
        if (d < best.value) best = {d, k};
    }
    return best;
}

inline NearestDisk delta_min(std::span<const Disk> disks, Point x) {
    NearestDisk best;
    for (std::size_t k = 0; k < disks.size(); ++k) {
        const double d = delta(disks[k], x);
        if (d < best.value) best = {d, k};
    }
    return best;
}

/// All n^2 disks D_ij in row-major order, without deduplication.
inline std::vector<Disk> all_difference_disks(const PupilConfig& cfg) {
    std::vector<Disk> out;
    out.reserve(cfg.size() * cfg.size());
    for (const auto& p : cfg.pupils)
        for (const auto& q : cfg.pupils) out.push_back(minkowski_diff(p, q));
    return out;
}

/// Builds the ACS. Disks with centers equal within `center_tolerance` are merged
/// into the largest one; groups are emitted in order of their smallest label.
inline Acs build_acs(const PupilConfig& cfg, double center_tolerance = 1e-12) {
    const std::size_t n = cfg.size();
    const std::vector<Disk> raw = all_difference_disks(cfg);

    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Point pa = raw[a].center, pb = raw[b].center;
        if (pa.x != pb.x) return pa.x < pb.x;
        if (pa.y != pb.y) return pa.y < pb.y;
        return a < b;
    });

    // Group by sweeping in x; within the x window compare y.
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> group(raw.size(), none);
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t s = 0; s < order.size(); ++s) {
        const std::size_t a = order[s];
        if (group[a] != none) continue;
        group[a] = groups.size();
        groups.push_back({a});
        for (std::size_t t = s + 1; t < order.size(); ++t) {
            const std::size_t b = order[t];
            if (raw[b].center.x - raw[a].center.x > center_tolerance) break;
            if (group[b] == none && std::abs(raw[b].center.y - raw[a].center.y) <= center_tolerance) {
                group[b] = group[a];
                groups.back().push_back(b);
            }
        }
    }

    for (auto& g : groups) std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    Acs acs;
    acs.n = n;
    acs.disks.reserve(groups.size());
    for (const auto& g : groups) {
        std::size_t rep = g.front();
        for (std::size_t k : g)
            if (raw[k].radius > raw[rep].radius) rep = k;
        AcsDisk d;
        d.label = {rep / n, rep % n};
        d.disk = raw[rep];
        for (std::size_t k : g)
            if (k != rep) d.merged_from.push_back({k / n, k % n});
        acs.disks.push_back(std::move(d));
    }
    return acs;
}

} // namespace pupilcover
