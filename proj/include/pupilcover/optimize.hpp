#pragma once

// Radius optimizers for fixed centers (sum of radii via LP, total area via QP,
// exhaustive grid search) and the fixed-radius center relocation heuristic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include "apollonius.hpp"
#include "coverage.hpp"
#include "error.hpp"
#include "geom.hpp"
#include "solver.hpp"

namespace pupilcover {

enum class Gauge { fix_first_center, fix_centroid };

struct OptimizerConfig {
    double epsilon = 1e-6;
    double theta = 0.05;
    int max_iterations = 100;
    double min_radius = 0.0;
    std::optional<double> max_radius;
    bool forbid_overlap = false;
    int relocation_iterations = 25;
    Gauge gauge = Gauge::fix_centroid;
};

inline void validate(const OptimizerConfig& o) {
    if (!(o.epsilon > 0.0)) throw Error(ErrorCode::invalid_input, "epsilon: must be > 0");
    if (!(o.theta > 0.0)) throw Error(ErrorCode::invalid_input, "theta: must be > 0");
    if (o.max_iterations < 1) throw Error(ErrorCode::invalid_input, "max_iterations: must be >= 1");
    if (o.relocation_iterations < 0)
        throw Error(ErrorCode::invalid_input, "relocation_iterations: must be >= 0");
    if (!(o.min_radius >= 0.0)) throw Error(ErrorCode::invalid_input, "min_radius: must be >= 0");
    if (o.max_radius && !(*o.max_radius >= o.min_radius))
        throw Error(ErrorCode::invalid_input, "max_radius: must be >= min_radius");
}

struct TraceEntry {
    double sum_of_radii = 0.0;
    double total_area = 0.0;
    bool covered = false;
    // Relocation only: least-squares objective before/after the step, on the same V sets.
    std::optional<double> relocation_before;
    std::optional<double> relocation_after;
};

struct OptimizerTrace {
    std::vector<TraceEntry> iterations;
    PupilConfig final_config;
    bool singular_system = false;  // relocation found no V points at all
};

class OptimizerError : public Error {
public:
    OptimizerError(ErrorCode code, const std::string& what, OptimizerTrace trace)
        : Error(code, what), trace_(std::move(trace)) {}
    const OptimizerTrace& trace() const noexcept { return trace_; }

private:
    OptimizerTrace trace_;
};

namespace detail {

inline TraceEntry entry_for(const PupilConfig& cfg) {
    return {sum_of_radii(cfg), total_area(cfg), false, std::nullopt, std::nullopt};
}

struct CellAnalysis {
    AlphaTable alpha;
    bool covered = false;
};

inline CellAnalysis analyze_cells(const PupilConfig& cfg, const Settings& s) {
    CellAnalysis out{AlphaTable(cfg.size()), false};
    const CellWitnesses cw = cell_witnesses(cfg, s);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cw.points.size(); ++k) {
        if (cw.points[k].empty()) continue;
        double a = -std::numeric_limits<double>::infinity();
        for (Point p : cw.points[k]) a = std::max(a, delta(cw.acs[k], p));
        worst = std::max(worst, a);
        const AcsDisk& d = cw.acs.disks[k];
        out.alpha.at(d.label.i, d.label.j) = a;
        for (Label l : d.merged_from) out.alpha.at(l.i, l.j) = a;
    }
    out.covered = worst <= s.tau;
    for (const auto& p : cfg.pupils)
        if (2.0 * p.radius >= cfg.objective_radius - s.tau) out.covered = true;
    return out;
}

/// Coverage rows rho*_i + rho*_j >= rho_i + rho_j + alpha_ij plus the optional
/// overlap rows; (i, j) and (j, i) are folded into one row with the larger bound.
inline std::vector<Constraint> radius_constraints(const PupilConfig& cfg, const AlphaTable& alpha,
                                                  const OptimizerConfig& o) {
    const std::size_t n = cfg.size();
    std::vector<Constraint> rows;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            std::optional<double> a = alpha.at(i, j);
            if (const auto& b = alpha.at(j, i); b && (!a || *b > *a)) a = b;
            if (!a) continue;
            Constraint c{std::vector<double>(n, 0.0), cfg.pupils[i].radius + cfg.pupils[j].radius + *a};
            c.coefficients[i] += 1.0;
            c.coefficients[j] += 1.0;
            rows.push_back(std::move(c));
        }
    if (o.forbid_overlap)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                Constraint c{std::vector<double>(n, 0.0),
                             -distance(cfg.pupils[i].center, cfg.pupils[j].center)};
                c.coefficients[i] = -1.0;
                c.coefficients[j] = -1.0;
                rows.push_back(std::move(c));
            }
    return rows;
}

enum class RadiusObjective { sum, area };

inline OptimizerTrace optimize_radii(const PupilConfig& cfg, const OptimizerConfig& o,
                                     RadiusObjective objective, const Settings& s) {
    validate(cfg);
    validate(o);
    const std::size_t n = cfg.size();
    PupilConfig cur = cfg;
    OptimizerTrace trace;

    std::vector<double> lb(n, o.min_radius);
    std::optional<std::vector<double>> ub;
    if (o.max_radius) ub = std::vector<double>(n, *o.max_radius);

    auto fail = [&](ErrorCode code, const std::string& msg) {
        trace.final_config = cur;
        throw OptimizerError(code, msg, trace);
    };

    for (int iter = 1; iter <= o.max_iterations; ++iter) {
        const CellAnalysis cells = analyze_cells(cur, s);
        if (!trace.iterations.empty()) trace.iterations.back().covered = cells.covered;

        std::vector<Constraint> rows = radius_constraints(cur, cells.alpha, o);
        std::vector<double> next;
        try {
            if (objective == RadiusObjective::sum) {
                next = solve_lp({std::vector<double>(n, 1.0), std::move(rows), lb, ub});
            } else {
                QuadraticProgram qp{Matrix::identity(n, 2.0 * std::numbers::pi), std::vector<double>(n, 0.0),
                                    std::move(rows), lb, ub};
                next = solve_qp(qp);
            }
        } catch (const Error& e) {
            fail(e.code(), e.what());
        }

        PupilConfig proposed = cur;
        for (std::size_t k = 0; k < n; ++k) {
            double r = std::max(next[k], o.min_radius);
            if (o.max_radius) r = std::min(r, *o.max_radius);
            proposed.pupils[k].radius = r;
        }
        const double err = objective == RadiusObjective::sum
                               ? sum_of_radii(cur) - sum_of_radii(proposed)
                               : total_area(cur) - total_area(proposed);
        cur = std::move(proposed);
        trace.iterations.push_back(entry_for(cur));
        if (iter > 1 && err < o.epsilon) {
            trace.iterations.back().covered = decide(cur, s).covered;
            trace.final_config = cur;
            return trace;
        }
    }
    trace.iterations.back().covered = decide(cur, s).covered;
    fail(ErrorCode::iteration_limit, "no convergence within max_iterations");
    return trace;
}

} // namespace detail

/// Iteratively re-solves the LP  min sum rho*  s.t. rho*_i + rho*_j >= rho_i + rho_j + alpha_ij,
/// with alpha recomputed from the current diagram, until the decrease drops below
/// epsilon (never after the first pass). Centers stay fixed.
inline OptimizerTrace minimize_sum_radii(const PupilConfig& cfg, const OptimizerConfig& o = {},
                                         const Settings& s = {}) {
    return detail::optimize_radii(cfg, o, detail::RadiusObjective::sum, s);
}

/// Same loop with objective pi * sum rho*^2; convergence is measured on the area.
inline OptimizerTrace minimize_area(const PupilConfig& cfg, const OptimizerConfig& o = {},
                                    const Settings& s = {}) {
    return detail::optimize_radii(cfg, o, detail::RadiusObjective::area, s);
}

/// One residual (c*_i - c*_j) - p of the relocation least-squares problem.
struct RelocationTerm {
    std::size_t i = 0;
    std::size_t j = 0;
    Point target;
};

inline std::vector<RelocationTerm> relocation_terms(const PupilConfig& cfg, const Settings& s = {}) {
    const Acs acs = build_acs(cfg);
    const auto sets = vertex_sets(acs, cfg.objective_radius, s);
    std::vector<RelocationTerm> terms;
    for (std::size_t k = 0; k < acs.size(); ++k) {
        std::vector<Label> labels{acs.disks[k].label};
        labels.insert(labels.end(), acs.disks[k].merged_from.begin(), acs.disks[k].merged_from.end());
        for (Label l : labels)
            for (const auto& w : sets[k].points) terms.push_back({l.i, l.j, w.point});
    }
    return terms;
}

inline double relocation_objective(std::span<const Point> centers, std::span<const RelocationTerm> terms) {
    double total = 0.0;
    for (const auto& t : terms) {
        const Point r = (centers[t.i] - centers[t.j]) - t.target;
        total += dot(r, r);
    }
    return total;
}

/// Exact minimizer of relocation_objective over the centers. Each connected
/// component of the term graph is pinned by the gauge; pupils without terms stay put.
inline std::vector<Point> solve_relocation(std::span<const Point> centers,
                                           std::span<const RelocationTerm> terms, Gauge gauge) {
    const std::size_t n = centers.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
        return parent[v] == v ? v : parent[v] = find(parent[v]);
    };
    Matrix lap(n, n);
    std::vector<double> bx(n, 0.0), by(n, 0.0);
    for (const auto& t : terms) {
        if (t.i == t.j) continue;
        lap(t.i, t.i) += 1.0;
        lap(t.j, t.j) += 1.0;
        lap(t.i, t.j) -= 1.0;
        lap(t.j, t.i) -= 1.0;
        bx[t.i] += t.target.x;
        bx[t.j] -= t.target.x;
        by[t.i] += t.target.y;
        by[t.j] -= t.target.y;
        parent[find(t.i)] = find(t.j);
    }

    std::vector<Point> out(centers.begin(), centers.end());
    std::vector<std::vector<std::size_t>> comps(n);
    for (std::size_t v = 0; v < n; ++v) comps[find(v)].push_back(v);
    for (const auto& comp : comps) {
        if (comp.size() < 2) continue;
        const std::size_t m = comp.size();
        if (gauge == Gauge::fix_centroid) {
            Matrix a(m, m);
            std::vector<double> rx(m), ry(m);
            Point sum{};
            for (std::size_t v : comp) sum = sum + centers[v];
            for (std::size_t r = 0; r < m; ++r) {
                for (std::size_t c = 0; c < m; ++c) a(r, c) = lap(comp[r], comp[c]) + 1.0 / m;
                rx[r] = bx[comp[r]] + sum.x / m;
                ry[r] = by[comp[r]] + sum.y / m;
            }
            const auto xs = solve_dense(a, rx), ys = solve_dense(a, ry);
            for (std::size_t r = 0; r < m; ++r) out[comp[r]] = {xs[r], ys[r]};
        } else {
            const std::size_t pin = comp.front();
            Matrix a(m - 1, m - 1);
            std::vector<double> rx(m - 1), ry(m - 1);
            for (std::size_t r = 1; r < m; ++r) {
                for (std::size_t c = 1; c < m; ++c) a(r - 1, c - 1) = lap(comp[r], comp[c]);
                rx[r - 1] = bx[comp[r]] - lap(comp[r], pin) * centers[pin].x;
                ry[r - 1] = by[comp[r]] - lap(comp[r], pin) * centers[pin].y;
            }
            const auto xs = solve_dense(a, rx), ys = solve_dense(a, ry);
            for (std::size_t r = 1; r < m; ++r) out[comp[r]] = {xs[r - 1], ys[r - 1]};
        }
    }
    return out;
}

/// Fixed-radius relocation: repeatedly moves the pupils so that each difference
/// c*_i - c*_j sits at the least-squares barycenter of the current V_ij points.
/// Coverage is not guaranteed; each entry reports it.
inline OptimizerTrace move_pupils(const PupilConfig& cfg, const OptimizerConfig& o = {},
                                  const Settings& s = {}) {
    validate(cfg);
    validate(o);
    PupilConfig cur = cfg;
    OptimizerTrace trace;
    for (int iter = 0; iter < o.relocation_iterations; ++iter) {
        const auto terms = relocation_terms(cur, s);
        if (terms.empty()) {
            trace.singular_system = true;
            break;
        }
        std::vector<Point> centers;
        for (const auto& p : cur.pupils) centers.push_back(p.center);
        const double before = relocation_objective(centers, terms);
        const auto moved = solve_relocation(centers, terms, o.gauge);
        const double after = relocation_objective(moved, terms);
        for (std::size_t k = 0; k < cur.size(); ++k) cur.pupils[k].center = moved[k];
        TraceEntry e = detail::entry_for(cur);
        e.covered = decide(cur, s).covered;
        e.relocation_before = before;
        e.relocation_after = after;
        trace.iterations.push_back(e);
    }
    trace.final_config = cur;
    return trace;
}

/// Radii restricted to {0, theta, ..., K theta} with K = ceil(R / (2 theta)).
/// Vectors are visited by increasing sum, lexicographically within a sum; the
/// first covering one is returned.
inline PupilConfig exhaustive_search(std::span<const Point> centers, double R, const OptimizerConfig& o = {},
                                     const Settings& s = {}) {
    validate(o);
    if (centers.empty()) throw Error(ErrorCode::invalid_input, "centers: at least one center is required");
    if (!(R > 0.0)) throw Error(ErrorCode::invalid_input, "objective_radius: must be > 0");
    const std::size_t n = centers.size();
    const auto steps = static_cast<long long>(std::ceil(R / (2.0 * o.theta) - 1e-9));
    const double grid = std::pow(static_cast<double>(steps + 1), static_cast<double>(n));
    if (grid > 1e8)
        throw Error(ErrorCode::search_space_too_large,
                    "grid has " + std::to_string(grid) + " radius vectors (limit 1e8)");

    PupilConfig cfg;
    cfg.objective_radius = R;
    for (Point c : centers) cfg.pupils.push_back({c, 0.0});
    validate(cfg);

    std::vector<long long> k(n, 0);
    // Lexicographic compositions of `total` into positions [pos, n) with parts <= steps.
    std::function<bool(std::size_t, long long)> visit = [&](std::size_t pos, long long left) -> bool {
        if (pos + 1 == n) {
            if (left > steps) return false;
            k[pos] = left;
            for (std::size_t q = 0; q < n; ++q) cfg.pupils[q].radius = static_cast<double>(k[q]) * o.theta;
            return decide(cfg, s).covered;
        }
        const long long rest = static_cast<long long>(n - pos - 1) * steps;
        for (long long v = std::max(0LL, left - rest); v <= std::min(steps, left); ++v) {
            k[pos] = v;
            if (visit(pos + 1, left - v)) return true;
        }
        return false;
    };
    for (long long total = 0; total <= static_cast<long long>(n) * steps; ++total)
        if (visit(0, total)) return cfg;
    throw Error(ErrorCode::infeasible, "no radius vector on the grid covers the objective");
}

} // namespace pupilcover
