#pragma once

// Coverage of the objective disk by the ACS: the vertex-set decision test,
// uniform and per-disk enlargements, the largest covered objective, and a
// grid-sampling oracle that does not depend on the diagram.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "apollonius.hpp"
#include "error.hpp"
#include "geom.hpp"

namespace pupilcover {

struct Decision {
    bool covered = false;
    std::optional<Point> witness;  // uncovered point when covered == false
};

/// Per-label enlargements alpha_ij; nullopt marks a disk whose cell misses the objective.
class AlphaTable {
public:
    explicit AlphaTable(std::size_t n = 0) : n_(n), values_(n * n) {}

    std::size_t size() const { return n_; }
    const std::optional<double>& at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
    std::optional<double>& at(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }

    double max() const {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& v : values_)
            if (v) m = std::max(m, *v);
        return m;
    }

private:
    std::size_t n_;
    std::vector<std::optional<double>> values_;
};

struct CoverageReport {
    bool covered = false;
    std::optional<Point> witness;
    double alpha_star = 0.0;
    AlphaTable per_disk_alpha;
    std::optional<double> r_star;  // empty when the ACS has no interior around the origin
};

/// Points of (cell of disk k) intersected with the objective at which the
/// signed distance to disk k is maximal: the vertex set, plus the point of the
/// objective circle farthest from the disk center when it lies in the cell.
/// The latter closes the gap when a cell's arc of the circle bulges away from
/// the disk (and covers the empty-V cases such as a single pupil).
struct CellWitnesses {
    Acs acs;
    std::vector<std::vector<Point>> points;  // indexed by ACS disk
};

inline Point far_boundary_point(const Disk& d, double R, double tau) {
    const double len = norm(d.center);
    if (len <= tau) return {R, 0.0};
    return (-R / len) * d.center;
}

inline CellWitnesses cell_witnesses(const PupilConfig& cfg, const Settings& s = {}) {
    CellWitnesses out;
    out.acs = build_acs(cfg);
    const double R = cfg.objective_radius;
    const auto sets = vertex_sets(out.acs, R, s);
    out.points.resize(out.acs.size());
    for (std::size_t k = 0; k < out.acs.size(); ++k) {
        for (const auto& w : sets[k].points) out.points[k].push_back(w.point);
        const Point far = far_boundary_point(out.acs[k], R, s.tau);
        if (delta(out.acs[k], far) <= delta_min(out.acs, far).value + s.tau) out.points[k].push_back(far);
    }
    return out;
}

/// Decides whether the ACS covers the objective.
inline Decision decide(const PupilConfig& cfg, const Settings& s = {}) {
    validate(cfg);
    const double R = cfg.objective_radius;
    for (const auto& p : cfg.pupils)
        if (2.0 * p.radius >= R - s.tau) return {true, std::nullopt};

    const CellWitnesses cw = cell_witnesses(cfg, s);
    double worst = -std::numeric_limits<double>::infinity();
    std::optional<Point> witness;
    for (std::size_t k = 0; k < cw.points.size(); ++k)
        for (Point p : cw.points[k]) {
            const double d = delta(cw.acs[k], p);
            if (d > worst) {
                worst = d;
                witness = p;
            }
        }
    if (worst > s.tau) return {false, witness};
    return {true, std::nullopt};
}

/// Grid oracle: resolution^2 cell-centred samples over [-R, R]^2; samples
/// within R - 2R/resolution of the origin are tested against all n^2 disks.
/// An uncovered sample is definitive; `covered == true` holds only up to the grid.
inline Decision coverage_oracle(const PupilConfig& cfg, int resolution, const Settings& s = {}) {
    validate(cfg);
    if (resolution < 16) throw Error(ErrorCode::invalid_input, "resolution must be >= 16");
    const double R = cfg.objective_radius;
    const double h = 2.0 * R / resolution;
    const double limit = R - 2.0 * R / resolution;
    const auto res = static_cast<std::size_t>(resolution);
    auto coord = [&](std::size_t i) { return -R + (static_cast<double>(i) + 0.5) * h; };

    std::vector<char> covered(res * res, 0);
    for (const Disk& d : all_difference_disks(cfg)) {
        const double reach = d.radius + s.tau;
        auto lo_index = [&](double v) {
            return static_cast<std::size_t>(std::clamp(std::floor((v + R) / h - 0.5), 0.0, double(res - 1)));
        };
        auto hi_index = [&](double v) {
            return static_cast<std::size_t>(std::clamp(std::ceil((v + R) / h - 0.5), 0.0, double(res - 1)));
        };
        const std::size_t x0 = lo_index(d.center.x - reach), x1 = hi_index(d.center.x + reach);
        const std::size_t y0 = lo_index(d.center.y - reach), y1 = hi_index(d.center.y + reach);
        if (d.center.x + reach < -R || d.center.x - reach > R || d.center.y + reach < -R ||
            d.center.y - reach > R)
            continue;
        for (std::size_t iy = y0; iy <= y1; ++iy)
            for (std::size_t ix = x0; ix <= x1; ++ix) {
                char& c = covered[iy * res + ix];
                if (!c && delta(d, {coord(ix), coord(iy)}) <= s.tau) c = 1;
            }
    }
    for (std::size_t iy = 0; iy < res; ++iy)
        for (std::size_t ix = 0; ix < res; ++ix) {
            const Point x{coord(ix), coord(iy)};
            if (norm(x) > limit) continue;
            if (!covered[iy * res + ix]) return {false, x};
        }
    return {true, std::nullopt};
}

/// Smallest uniform enlargement of the ACS disk radii that covers the objective
/// (negative when there is slack). Pupils grow by half of it.
inline double alpha_star(const PupilConfig& cfg, const Settings& s = {}) {
    validate(cfg);
    const CellWitnesses cw = cell_witnesses(cfg, s);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cw.points.size(); ++k)
        for (Point p : cw.points[k]) best = std::max(best, delta(cw.acs[k], p));
    return best;
}

/// alpha for every label (i, j); merged labels inherit their representative's value.
inline AlphaTable per_disk_alpha(const PupilConfig& cfg, const Settings& s = {}) {
    validate(cfg);
    const CellWitnesses cw = cell_witnesses(cfg, s);
    AlphaTable table(cfg.size());
    for (std::size_t k = 0; k < cw.points.size(); ++k) {
        if (cw.points[k].empty()) continue;
        double a = -std::numeric_limits<double>::infinity();
        for (Point p : cw.points[k]) a = std::max(a, delta(cw.acs[k], p));
        const AcsDisk& d = cw.acs.disks[k];
        table.at(d.label.i, d.label.j) = a;
        for (Label l : d.merged_from) table.at(l.i, l.j) = a;
    }
    return table;
}

namespace detail {

inline std::vector<Point> circle_intersections(const Disk& a, const Disk& b, double tol) {
    const Point d = b.center - a.center;
    const double len = norm(d);
    if (len <= tol) return {};
    if (len > a.radius + b.radius + tol || len < std::abs(a.radius - b.radius) - tol) return {};
    const double along = (len * len + a.radius * a.radius - b.radius * b.radius) / (2.0 * len);
    const double h2 = a.radius * a.radius - along * along;
    const Point u = (1.0 / len) * d;
    const Point mid = a.center + along * u;
    if (h2 <= 0.0) return {mid};
    const double h = std::sqrt(h2);
    const Point normal{-u.y, u.x};
    return {mid + h * normal, mid - h * normal};
}

} // namespace detail

/// Largest objective radius covered by the fixed pupils: the nearest point of
/// the union's boundary to the origin. Candidates are the origin disk's circle
/// (when some of it is exposed), pairwise circle intersections on the boundary,
/// and each circle's point nearest to the origin.
inline double max_objective(const PupilConfig& cfg, const Settings& s = {}) {
    if (cfg.pupils.empty()) throw Error(ErrorCode::invalid_input, "pupils: at least one pupil is required");
    const Acs acs = build_acs(cfg);
    const double tol = s.tau;
    auto on_boundary = [&](Point x) { return delta_min(acs, x).value >= -tol; };

    double best = std::numeric_limits<double>::infinity();
    const double inner = 2.0 * max_radius(cfg);

    const int samples = std::max(s.boundary_samples, 16);
    for (int m = 0; m < samples; ++m) {
        const double th = 2.0 * std::numbers::pi * m / samples;
        if (on_boundary({inner * std::cos(th), inner * std::sin(th)})) {
            best = inner;
            break;
        }
    }
    for (std::size_t a = 0; a < acs.size(); ++a) {
        const Disk& da = acs[a];
        const double len = norm(da.center);
        if (len > tol) {
            const Point nearest = da.center - (da.radius / len) * da.center;
            if (on_boundary(nearest)) best = std::min(best, norm(nearest));
        }
        for (std::size_t b = a + 1; b < acs.size(); ++b)
            for (Point x : detail::circle_intersections(da, acs[b], tol))
                if (on_boundary(x)) best = std::min(best, norm(x));
    }
    if (!(best > tol))
        throw Error(ErrorCode::no_coverage, "the ACS has empty interior around the origin");
    return best;
}

inline CoverageReport coverage_report(const PupilConfig& cfg, const Settings& s = {}) {
    CoverageReport r;
    const Decision d = decide(cfg, s);
    r.covered = d.covered;
    r.witness = d.witness;
    r.alpha_star = alpha_star(cfg, s);
    r.per_disk_alpha = per_disk_alpha(cfg, s);
    try {
        r.r_star = max_objective(cfg, s);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::no_coverage) throw;
    }
    return r;
}

} // namespace pupilcover
