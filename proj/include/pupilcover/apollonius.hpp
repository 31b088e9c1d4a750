#pragma once

// Additively weighted (Apollonius) diagram of the ACS disks, restricted to what
// the coverage test needs: bisectors, vertices and crossings with the objective
// circle. Construction is brute force over disk triples and pairs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "geom.hpp"
#include "solver.hpp"

namespace pupilcover {

/// One branch of the hyperbola |x - c_a| - |x - c_b| = rho_a - rho_b.
///
/// The canonical frame puts c_a at (-c, 0) and c_b at (c, 0). A point with
/// parameter t has canonical coordinates (side * a * sqrt(1 + t^2 / b^2), t)
/// where b^2 = c^2 - a^2, so t = 0 is the apex and equal radii give the line X = 0.
struct Bisector {
    std::size_t disk_a = 0;
    std::size_t disk_b = 0;
    double semi_axis = 0.0;     // a = |rho_b - rho_a| / 2
    double focal_half = 0.0;    // c = |c_b - c_a| / 2
    double eccentricity = std::numeric_limits<double>::infinity();
    Point origin;               // midpoint of the two centers
    Point axis;                 // unit vector from c_a towards c_b
    double side = 0.0;          // -1: branch wraps c_a (rho_a < rho_b), +1: wraps c_b, 0: line

    bool is_line() const { return side == 0.0; }
    double minor_axis() const { return std::sqrt(focal_half * focal_half - semi_axis * semi_axis); }

    Point to_plane(double cx, double cy) const {
        const Point normal{-axis.y, axis.x};
        return origin + cx * axis + cy * normal;
    }

    /// Canonical abscissa of a plane point.
    double abscissa(Point p) const { return dot(p - origin, axis); }
};

inline Bisector bisector(const Disk& da, const Disk& db, double tau = Settings{}.tau) {
    const Point d = db.center - da.center;
    const double len = norm(d);
    if (len <= tau) throw Error(ErrorCode::concentric_disks, "bisector of concentric disks is empty");
    Bisector b;
    b.semi_axis = std::abs(db.radius - da.radius) / 2.0;
    b.focal_half = len / 2.0;
    if (b.semi_axis >= b.focal_half)
        throw Error(ErrorCode::nested_disks, "one disk contains the other; bisector is empty");
    b.origin = 0.5 * (da.center + db.center);
    b.axis = (1.0 / len) * d;
    if (da.radius < db.radius) b.side = -1.0;
    else if (da.radius > db.radius) b.side = 1.0;
    if (!b.is_line()) b.eccentricity = b.focal_half / b.semi_axis;
    return b;
}

inline Bisector bisector(const Acs& acs, std::size_t a, std::size_t b, double tau = Settings{}.tau) {
    Bisector out = bisector(acs[a], acs[b], tau);
    out.disk_a = a;
    out.disk_b = b;
    return out;
}

inline Point bisector_point(const Bisector& b, double t) {
    if (b.is_line()) return b.to_plane(0.0, t);
    const double minor = b.minor_axis();
    const double x = b.side * b.semi_axis * std::sqrt(1.0 + (t / minor) * (t / minor));
    return b.to_plane(x, t);
}

struct TriVertex {
    Point point;
    double distance = 0.0;  // common additive distance r (negative inside the disks)
};

namespace detail {

inline double tri_residual(const std::array<Disk, 3>& d, Point x, double r) {
    double worst = 0.0;
    for (const auto& disk : d) worst = std::max(worst, std::abs(delta(disk, x) - r));
    return worst;
}

/// Newton iterations on F_k = |x - c_k| - rho_k - r; keeps the best iterate.
inline void polish(const std::array<Disk, 3>& d, Point& x, double& r) {
    double best = tri_residual(d, x, r);
    for (int it = 0; it < 8 && best > 1e-15; ++it) {
        Matrix jac(3, 3);
        std::vector<double> f(3);
        bool ok = true;
        for (std::size_t k = 0; k < 3; ++k) {
            const Point v = x - d[k].center;
            const double len = norm(v);
            if (len < 1e-300) {
                ok = false;
                break;
            }
            jac(k, 0) = v.x / len;
            jac(k, 1) = v.y / len;
            jac(k, 2) = -1.0;
            f[k] = -(len - d[k].radius - r);
        }
        if (!ok) return;
        std::vector<double> step;
        try {
            step = solve_dense(jac, f, 1e-14);
        } catch (const Error&) {
            return;
        }
        const Point nx{x.x + step[0], x.y + step[1]};
        const double nr = r + step[2];
        const double res = tri_residual(d, nx, nr);
        if (!(res < best)) return;
        x = nx;
        r = nr;
        best = res;
    }
}

} // namespace detail

/// Points equidistant (additively) from three disks: all (x, r) with
/// |x - c_k| - rho_k = r for k = 1..3.
///
/// Subtracting the squared equations pairwise leaves two linear equations in
/// (x, y, r); their solution line is substituted into the first squared equation.
inline std::vector<TriVertex> tri_disk_vertices(const Disk& d1, const Disk& d2, const Disk& d3,
                                                double tau = Settings{}.tau) {
    const std::array<Disk, 3> disks{d1, d2, d3};
    const Point base = d1.center;
    const Point p2 = d2.center - base, p3 = d3.center - base;
    const double r1 = d1.radius;

    // Rows: 2 p_k . x + 2 (rho_k - rho_1) r = |p_k|^2 - (rho_k^2 - rho_1^2), normalized.
    std::array<std::array<double, 3>, 2> a{};
    std::array<double, 2> rhs{};
    const std::array<const Disk*, 2> others{&d2, &d3};
    const std::array<Point, 2> offs{p2, p3};
    for (std::size_t k = 0; k < 2; ++k) {
        a[k] = {2.0 * offs[k].x, 2.0 * offs[k].y, 2.0 * (others[k]->radius - r1)};
        rhs[k] = dot(offs[k], offs[k]) - (others[k]->radius * others[k]->radius - r1 * r1);
        const double len = std::sqrt(a[k][0] * a[k][0] + a[k][1] * a[k][1] + a[k][2] * a[k][2]);
        if (len == 0.0) throw Error(ErrorCode::degenerate_triple, "coincident disks");
        for (double& v : a[k]) v /= len;
        rhs[k] /= len;
    }
    const std::array<double, 3> nv{a[0][1] * a[1][2] - a[0][2] * a[1][1],
                                   a[0][2] * a[1][0] - a[0][0] * a[1][2],
                                   a[0][0] * a[1][1] - a[0][1] * a[1][0]};
    const double nlen = std::sqrt(nv[0] * nv[0] + nv[1] * nv[1] + nv[2] * nv[2]);
    if (nlen <= 1e-12) throw Error(ErrorCode::degenerate_triple, "rank-deficient tri-disk system");

    // Least-norm particular solution p0 = A^T (A A^T)^{-1} rhs.
    const double g00 = 1.0, g11 = 1.0;
    const double g01 = a[0][0] * a[1][0] + a[0][1] * a[1][1] + a[0][2] * a[1][2];
    const double det = g00 * g11 - g01 * g01;
    const double m0 = (g11 * rhs[0] - g01 * rhs[1]) / det;
    const double m1 = (g00 * rhs[1] - g01 * rhs[0]) / det;
    std::array<double, 3> p0{};
    for (std::size_t j = 0; j < 3; ++j) p0[j] = a[0][j] * m0 + a[1][j] * m1;
    std::array<double, 3> dir{nv[0] / nlen, nv[1] / nlen, nv[2] / nlen};

    // |P + s N|^2 - (pr + s nr)^2 = 0 with pr = p0_r + rho_1.
    const double px = p0[0], py = p0[1], pr = p0[2] + r1;
    const double qa = dir[0] * dir[0] + dir[1] * dir[1] - dir[2] * dir[2];
    const double qb = 2.0 * (px * dir[0] + py * dir[1] - pr * dir[2]);
    const double qc = px * px + py * py - pr * pr;

    std::vector<double> roots;
    const double scale = std::max({1.0, std::abs(qb), std::abs(qc)});
    if (std::abs(qa) <= 1e-14 * scale) {
        if (std::abs(qb) > 1e-300) roots.push_back(-qc / qb);
    } else {
        double disc = qb * qb - 4.0 * qa * qc;
        const double disc_floor = -1e-12 * (qb * qb + std::abs(4.0 * qa * qc));
        if (disc < 0.0 && disc >= disc_floor) disc = 0.0;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double qq = -0.5 * (qb + std::copysign(sq, qb));
            if (qq != 0.0) {
                roots.push_back(qq / qa);
                roots.push_back(qc / qq);
            } else {
                roots.push_back(-qb / (2.0 * qa));
            }
        }
    }

    std::vector<TriVertex> out;
    for (double s : roots) {
        Point x{base.x + px + s * dir[0], base.y + py + s * dir[1]};
        double r = p0[2] + s * dir[2];
        bool valid = true;
        for (const auto& d : disks)
            if (r + d.radius < -std::sqrt(tau)) valid = false;
        if (!valid) continue;
        detail::polish(disks, x, r);
        const double scale_len = 1.0 + std::abs(r) + norm(x - base);
        if (detail::tri_residual(disks, x, r) > tau * scale_len) continue;
        bool dup = false;
        for (const auto& v : out)
            if (distance(v.point, x) <= 10.0 * tau * scale_len) dup = true;
        if (!dup) out.push_back({x, r});
    }
    return out;
}

/// True when no disk of the ACS is strictly closer to x than r (within tau).
inline bool is_global_vertex(const Acs& acs, Point x, double r, double tau = Settings{}.tau) {
    for (std::size_t k = 0; k < acs.size(); ++k)
        if (delta(acs[k], x) < r - tau) return false;
    return true;
}

enum class PointKind { interior_vertex, boundary_crossing };

struct WitnessPoint {
    Point point;
    PointKind kind = PointKind::interior_vertex;
};

/// V for one ACS disk: its cell's vertices inside the objective plus the
/// crossings of the cell boundary with the objective circle.
struct VertexSet {
    std::size_t disk = 0;
    std::vector<WitnessPoint> points;
};

namespace detail {

/// Samples of every disk's additive distance around the objective circle.
struct CircleTable {
    double radius = 0.0;
    int samples = 0;
    std::vector<double> values;  // disk-major: values[k * samples + m]
    std::vector<double> minimum;

    Point at(double theta) const { return {radius * std::cos(theta), radius * std::sin(theta)}; }
    double step() const { return 2.0 * std::numbers::pi / samples; }
    double value(std::size_t k, int m) const { return values[k * samples + (m % samples)]; }
};

inline CircleTable circle_table(const Acs& acs, double R, int samples) {
    CircleTable t;
    t.radius = R;
    t.samples = samples;
    t.values.resize(acs.size() * static_cast<std::size_t>(samples));
    t.minimum.assign(static_cast<std::size_t>(samples), std::numeric_limits<double>::infinity());
    for (int m = 0; m < samples; ++m) {
        const Point x = t.at(m * t.step());
        for (std::size_t k = 0; k < acs.size(); ++k) {
            const double d = delta(acs[k], x);
            t.values[k * samples + m] = d;
            t.minimum[m] = std::min(t.minimum[m], d);
        }
    }
    return t;
}

struct CrossingScan {
    const Acs& acs;
    const Disk& da;
    const Disk& db;
    double R;
    double tau;
    std::vector<double>& roots;
    int budget = 4096;

    double f(double th) const {
        const Point x{R * std::cos(th), R * std::sin(th)};
        return delta(da, x) - delta(db, x);
    }

    double bisect(double lo, double hi, double flo) const {
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (fm == 0.0) return mid;
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    // Interval [lo, hi] with cached values. gap_* = delta_disk - delta_min at the ends.
    void interval(double lo, double hi, double flo, double fhi, double gal, double gah, double gbl,
                  double gbh, int depth) {
        const double lip = 2.0 * R * (hi - lo);  // every difference of two deltas is 2-Lipschitz
        if (gal + gah > lip + tau || gbl + gbh > lip + tau) return;  // a or b never minimal here
        if (flo == 0.0) {
            roots.push_back(lo);
            return;
        }
        if ((flo < 0.0) != (fhi < 0.0) && fhi != 0.0) {
            roots.push_back(bisect(lo, hi, flo));
            return;
        }
        if (fhi == 0.0) return;  // reported by the next interval
        if (std::abs(flo) + std::abs(fhi) > lip) return;
        // No sign change but a double root is possible: split.
        if (depth >= 24 || --budget <= 0) {
            const double best = std::abs(flo) <= std::abs(fhi) ? lo : hi;
            if (std::min(std::abs(flo), std::abs(fhi)) <= tau) roots.push_back(best);
            return;
        }
        const double mid = 0.5 * (lo + hi);
        const Point x{R * std::cos(mid), R * std::sin(mid)};
        const double dmin = delta_min(acs, x).value;
        const double va = delta(da, x), vb = delta(db, x);
        interval(lo, mid, flo, va - vb, gal, va - dmin, gbl, vb - dmin, depth + 1);
        interval(mid, hi, va - vb, fhi, va - dmin, gah, vb - dmin, gbh, depth + 1);
    }
};

inline std::vector<Point> crossings_from_table(const Acs& acs, const CircleTable& t, std::size_t a,
                                               std::size_t b, double tau) {
    std::vector<double> roots;
    CrossingScan scan{acs, acs[a], acs[b], t.radius, tau, roots};
    const double h = t.step();
    for (int m = 0; m < t.samples; ++m) {
        const double va0 = t.value(a, m), va1 = t.value(a, m + 1);
        const double vb0 = t.value(b, m), vb1 = t.value(b, m + 1);
        const double mn0 = t.minimum[static_cast<std::size_t>(m)];
        const double mn1 = t.minimum[static_cast<std::size_t>((m + 1) % t.samples)];
        scan.interval(m * h, (m + 1) * h, va0 - vb0, va1 - vb1, va0 - mn0, va1 - mn1, vb0 - mn0,
                      vb1 - mn1, 0);
    }
    // A root sitting on a sample can be reported by both neighbouring intervals.
    const double merge = 10.0 * tau * std::max(1.0, t.radius);
    std::vector<Point> out;
    for (double th : roots) {
        const Point x = t.at(th);
        const double da = delta(acs[a], x), db = delta(acs[b], x);
        const double dmin = delta_min(acs, x).value;
        if (std::abs(da - db) > tau || std::max(da, db) > dmin + tau) continue;
        if (std::none_of(out.begin(), out.end(), [&](Point p) { return distance(p, x) <= merge; }))
            out.push_back(x);
    }
    return out;
}

} // namespace detail

/// Points of the objective circle where the cells of disks a and b meet.
inline std::vector<Point> boundary_crossings(const Acs& acs, std::size_t a, std::size_t b, double R,
                                             const Settings& s = {}) {
    const auto table = detail::circle_table(acs, R, s.boundary_samples);
    return detail::crossings_from_table(acs, table, a, b, s.tau);
}

/// V sets for every ACS disk, in disk order; points sorted by polar angle.
inline std::vector<VertexSet> vertex_sets(const Acs& acs, double R, const Settings& s = {}) {
    const std::size_t n = acs.size();
    std::vector<VertexSet> sets(n);
    for (std::size_t k = 0; k < n; ++k) sets[k].disk = k;
    const double merge_tol = 10.0 * s.tau * std::max(1.0, R);

    auto add = [&](Point x, PointKind kind) {
        const double dmin = delta_min(acs, x).value;
        for (std::size_t k = 0; k < n; ++k) {
            if (delta(acs[k], x) > dmin + s.tau) continue;
            auto& pts = sets[k].points;
            auto it = std::find_if(pts.begin(), pts.end(),
                                   [&](const WitnessPoint& w) { return distance(w.point, x) <= merge_tol; });
            if (it == pts.end()) pts.push_back({x, kind});
            else if (kind == PointKind::boundary_crossing) it->kind = kind;
        }
    };

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                std::vector<TriVertex> found;
                try {
                    found = tri_disk_vertices(acs[i], acs[j], acs[k], s.tau);
                } catch (const Error&) {
                    continue;  // no isolated vertex
                }
                for (const auto& v : found) {
                    const double rn = norm(v.point);
                    if (rn > R + s.tau) continue;
                    if (!is_global_vertex(acs, v.point, v.distance, s.tau)) continue;
                    add(v.point, std::abs(rn - R) <= s.tau ? PointKind::boundary_crossing
                                                           : PointKind::interior_vertex);
                }
            }

    if (n > 1) {
        const auto table = detail::circle_table(acs, R, s.boundary_samples);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                for (Point x : detail::crossings_from_table(acs, table, a, b, s.tau))
                    add(x, PointKind::boundary_crossing);
    }

    for (auto& set : sets)
        std::sort(set.points.begin(), set.points.end(), [](const WitnessPoint& p, const WitnessPoint& q) {
            const double ap = std::atan2(p.point.y, p.point.x), aq = std::atan2(q.point.y, q.point.x);
            if (ap != aq) return ap < aq;
            return norm(p.point) < norm(q.point);
        });
    return sets;
}

} // namespace pupilcover
