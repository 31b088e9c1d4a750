#pragma once

// Small dense LP / convex QP solvers. Problem sizes here are a few dozen
// variables and a few hundred rows, so everything is tableau / dense LU.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "error.hpp"

namespace pupilcover {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n, double scale = 1.0) {
        Matrix m(n, n);
        for (std::size_t k = 0; k < n; ++k) m(k, k) = scale;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline std::vector<double> multiply(const Matrix& a, const std::vector<double>& x) {
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) y[r] += a(r, c) * x[c];
    return y;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

/// Gaussian elimination with partial pivoting. Throws SingularSystem when a
/// pivot falls below `rel_tol` times the largest entry of the matrix.
inline std::vector<double> solve_dense(Matrix a, std::vector<double> b, double rel_tol = 1e-13) {
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::abs(a(r, c)));
    if (scale == 0.0 && n > 0) throw Error(ErrorCode::singular_system, "zero matrix");

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) <= rel_tol * scale)
            throw Error(ErrorCode::singular_system, "matrix is singular to working precision");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
        x[r] = s / a(r, r);
    }
    return x;
}

/// a . x >= bound
struct Constraint {
    std::vector<double> coefficients;
    double bound = 0.0;
};

/// minimize objective . x subject to the rows, x >= lower_bounds (empty means
/// all zero, -inf entries mean free) and x <= upper_bounds when present.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<Constraint> constraints;
    std::vector<double> lower_bounds;
    std::optional<std::vector<double>> upper_bounds;
};

/// minimize 1/2 x'Qx + linear . x under the same constraint shape as LinearProgram.
struct QuadraticProgram {
    Matrix q;
    std::vector<double> linear;
    std::vector<Constraint> constraints;
    std::vector<double> lower_bounds;
    std::optional<std::vector<double>> upper_bounds;
};

namespace detail {

inline void check_shape(std::size_t n, const std::vector<Constraint>& rows,
                        const std::vector<double>& lb, const std::optional<std::vector<double>>& ub) {
    for (const auto& row : rows)
        if (row.coefficients.size() != n)
            throw Error(ErrorCode::invalid_input, "constraint row dimension mismatch");
    if (!lb.empty() && lb.size() != n)
        throw Error(ErrorCode::invalid_input, "lower_bounds dimension mismatch");
    if (ub && ub->size() != n) throw Error(ErrorCode::invalid_input, "upper_bounds dimension mismatch");
}

inline std::vector<double> effective_lower(std::size_t n, const std::vector<double>& lb) {
    return lb.empty() ? std::vector<double>(n, 0.0) : lb;
}

/// Two-phase dense tableau simplex over y >= 0 with rows A y >= b, Bland's rule.
class Simplex {
public:
    Simplex(const Matrix& a, const std::vector<double>& b, const std::vector<double>& c)
        : m_(a.rows()), ny_(a.cols()), a_(a), b_(b), c_(c) {}

    std::vector<double> solve() {
        build();
        if (num_art_ > 0) {
            std::vector<double> cost(cols_, 0.0);
            for (std::size_t j = art_begin_; j < cols_; ++j) cost[j] = 1.0;
            run(cost, /*allow_art=*/true);
            double infeas = 0.0;
            for (std::size_t r = 0; r < rows_; ++r)
                if (basis_[r] >= art_begin_) infeas += t_(r, cols_);
            double bscale = 1.0;
            for (double v : b_) bscale = std::max(bscale, std::abs(v));
            if (infeas > 1e-9 * bscale) throw Error(ErrorCode::infeasible, "linear program is infeasible");
            drive_out_artificials();
        }
        std::vector<double> cost(cols_, 0.0);
        for (std::size_t j = 0; j < ny_; ++j) cost[j] = c_[j];
        run(cost, /*allow_art=*/false);
        return extract();
    }

private:
    void build() {
        // Columns: y (ny), surplus (m), artificials (as needed). Last column is rhs.
        std::vector<bool> needs_art(m_);
        num_art_ = 0;
        for (std::size_t r = 0; r < m_; ++r) {
            needs_art[r] = b_[r] >= 0.0;
            if (needs_art[r]) ++num_art_;
        }
        art_begin_ = ny_ + m_;
        cols_ = art_begin_ + num_art_;
        rows_ = m_;
        t_ = Matrix(rows_, cols_ + 1);
        basis_.assign(rows_, 0);
        row_alive_.assign(rows_, true);
        std::size_t art = art_begin_;
        for (std::size_t r = 0; r < m_; ++r) {
            const double sign = needs_art[r] ? 1.0 : -1.0;
            for (std::size_t j = 0; j < ny_; ++j) t_(r, j) = sign * a_(r, j);
            t_(r, ny_ + r) = -sign;
            t_(r, cols_) = sign * b_[r];
            if (needs_art[r]) {
                t_(r, art) = 1.0;
                basis_[r] = art++;
            } else {
                basis_[r] = ny_ + r;
            }
        }
    }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = t_(pr, pc);
        for (std::size_t j = 0; j <= cols_; ++j) t_(pr, j) /= p;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr || !row_alive_[r]) continue;
            const double f = t_(r, pc);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) t_(r, j) -= f * t_(pr, j);
            t_(r, pc) = 0.0;
        }
        basis_[pr] = pc;
    }

    void run(const std::vector<double>& cost, bool allow_art) {
        constexpr double eps = 1e-11;
        const std::size_t limit = 50 * (rows_ + cols_) + 1000;
        for (std::size_t iter = 0; iter < limit; ++iter) {
            // Reduced costs from the current canonical tableau.
            std::optional<std::size_t> enter;
            for (std::size_t j = 0; j < cols_ && !enter; ++j) {
                if (!allow_art && j >= art_begin_) continue;
                if (is_basic(j)) continue;
                double rc = cost[j];
                for (std::size_t r = 0; r < rows_; ++r)
                    if (row_alive_[r]) rc -= cost[basis_[r]] * t_(r, j);
                if (rc < -eps) enter = j;
            }
            if (!enter) return;
            std::optional<std::size_t> leave;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < rows_; ++r) {
                if (!row_alive_[r]) continue;
                const double coef = t_(r, *enter);
                if (coef <= eps) continue;
                const double ratio = t_(r, cols_) / coef;
                if (ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 && leave && basis_[r] < basis_[*leave])) {
                    best = ratio;
                    leave = r;
                }
            }
            if (!leave) throw Error(ErrorCode::unbounded, "linear program is unbounded");
            pivot(*leave, *enter);
        }
        throw Error(ErrorCode::iteration_limit, "simplex iteration limit reached");
    }

    bool is_basic(std::size_t j) const {
        for (std::size_t r = 0; r < rows_; ++r)
            if (row_alive_[r] && basis_[r] == j) return true;
        return false;
    }

    void drive_out_artificials() {
        for (std::size_t r = 0; r < rows_; ++r) {
            if (!row_alive_[r] || basis_[r] < art_begin_) continue;
            std::optional<std::size_t> col;
            for (std::size_t j = 0; j < art_begin_ && !col; ++j)
                if (!is_basic(j) && std::abs(t_(r, j)) > 1e-9) col = j;
            if (col)
                pivot(r, *col);
            else
                row_alive_[r] = false;  // redundant row
        }
    }

    std::vector<double> extract() {
        std::vector<double> y(ny_, 0.0);
        // Recompute basic values from the original rows for accuracy.
        std::vector<std::size_t> live;
        for (std::size_t r = 0; r < rows_; ++r)
            if (row_alive_[r]) live.push_back(r);
        const std::size_t k = live.size();
        Matrix basis(k, k);
        std::vector<double> rhs(k);
        for (std::size_t s = 0; s < k; ++s) {
            const std::size_t row = live[s];
            rhs[s] = b_[row];
            for (std::size_t q = 0; q < k; ++q) {
                const std::size_t col = basis_[live[q]];
                if (col < ny_) basis(s, q) = a_(row, col);
                else if (col < art_begin_) basis(s, q) = (col - ny_ == row) ? -1.0 : 0.0;
            }
        }
        std::vector<double> values;
        try {
            values = solve_dense(basis, rhs, 1e-14);
        } catch (const Error&) {
            values.assign(k, 0.0);
            for (std::size_t q = 0; q < k; ++q) values[q] = t_(live[q], cols_);
        }
        for (std::size_t q = 0; q < k; ++q) {
            const std::size_t col = basis_[live[q]];
            if (col < ny_) y[col] = std::max(0.0, values[q]);
        }
        return y;
    }

    std::size_t m_, ny_;
    Matrix a_;
    std::vector<double> b_, c_;
    Matrix t_;
    std::size_t rows_ = 0, cols_ = 0, art_begin_ = 0, num_art_ = 0;
    std::vector<std::size_t> basis_;
    std::vector<bool> row_alive_;
};

struct Rows {
    Matrix a;
    std::vector<double> b;
};

/// Every constraint, finite bound and upper bound as a single a.x >= b list.
inline Rows all_rows(std::size_t n, const std::vector<Constraint>& constraints,
                     const std::vector<double>& lb, const std::optional<std::vector<double>>& ub) {
    std::size_t count = constraints.size();
    for (double v : lb)
        if (std::isfinite(v)) ++count;
    if (ub)
        for (double v : *ub)
            if (std::isfinite(v)) ++count;
    Rows rows{Matrix(count, n), std::vector<double>(count)};
    std::size_t r = 0;
    for (const auto& c : constraints) {
        for (std::size_t j = 0; j < n; ++j) rows.a(r, j) = c.coefficients[j];
        rows.b[r++] = c.bound;
    }
    for (std::size_t j = 0; j < lb.size(); ++j)
        if (std::isfinite(lb[j])) {
            rows.a(r, j) = 1.0;
            rows.b[r++] = lb[j];
        }
    if (ub)
        for (std::size_t j = 0; j < ub->size(); ++j)
            if (std::isfinite((*ub)[j])) {
                rows.a(r, j) = -1.0;
                rows.b[r++] = -(*ub)[j];
            }
    return rows;
}

} // namespace detail

/// Optimal vertex of a dense LP. Deterministic: Bland's rule throughout.
inline std::vector<double> solve_lp(const LinearProgram& lp) {
    const std::size_t n = lp.objective.size();
    detail::check_shape(n, lp.constraints, lp.lower_bounds, lp.upper_bounds);
    const std::vector<double> lb = detail::effective_lower(n, lp.lower_bounds);

    // x_i = lb_i + y_k for finite bounds, x_i = y_k - y_{k+1} for free ones.
    std::vector<std::size_t> first(n);
    std::vector<bool> split(n);
    std::size_t ny = 0;
    for (std::size_t i = 0; i < n; ++i) {
        first[i] = ny;
        split[i] = !std::isfinite(lb[i]);
        ny += split[i] ? 2 : 1;
    }
    std::size_t m = lp.constraints.size();
    if (lp.upper_bounds)
        for (double v : *lp.upper_bounds)
            if (std::isfinite(v)) ++m;

    Matrix a(m, ny);
    std::vector<double> b(m), c(ny, 0.0);
    auto put_row = [&](std::size_t r, const std::vector<double>& coef, double bound) {
        double rhs = bound;
        for (std::size_t i = 0; i < n; ++i) {
            a(r, first[i]) = coef[i];
            if (split[i]) a(r, first[i] + 1) = -coef[i];
            else rhs -= coef[i] * lb[i];
        }
        b[r] = rhs;
    };
    std::size_t r = 0;
    for (const auto& con : lp.constraints) put_row(r++, con.coefficients, con.bound);
    if (lp.upper_bounds)
        for (std::size_t i = 0; i < n; ++i)
            if (std::isfinite((*lp.upper_bounds)[i])) {
                std::vector<double> coef(n, 0.0);
                coef[i] = -1.0;
                put_row(r++, coef, -(*lp.upper_bounds)[i]);
            }
    for (std::size_t i = 0; i < n; ++i) {
        c[first[i]] = lp.objective[i];
        if (split[i]) c[first[i] + 1] = -lp.objective[i];
    }

    const std::vector<double> y = detail::Simplex(a, b, c).solve();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = split[i] ? y[first[i]] - y[first[i] + 1] : lb[i] + y[first[i]];
    return x;
}

/// Primal active-set method; Q must be positive definite on the null space of
/// every working set encountered (always true for the diagonal forms used here).
inline std::vector<double> solve_qp(const QuadraticProgram& qp) {
    const std::size_t n = qp.linear.size();
    if (qp.q.rows() != n || qp.q.cols() != n)
        throw Error(ErrorCode::invalid_input, "Q dimension mismatch");
    detail::check_shape(n, qp.constraints, qp.lower_bounds, qp.upper_bounds);
    for (std::size_t r = 0; r < n; ++r) {
        if (qp.q(r, r) < 0.0) throw Error(ErrorCode::invalid_input, "Q has a negative diagonal entry");
        for (std::size_t c = r + 1; c < n; ++c)
            if (std::abs(qp.q(r, c) - qp.q(c, r)) > 1e-12 * (1.0 + std::abs(qp.q(r, c))))
                throw Error(ErrorCode::invalid_input, "Q is not symmetric");
    }

    std::vector<double> lb = qp.lower_bounds;
    if (lb.empty()) lb.assign(n, -std::numeric_limits<double>::infinity());
    const detail::Rows rows = detail::all_rows(n, qp.constraints, lb, qp.upper_bounds);
    const std::size_t m = rows.a.rows();

    if (m == 0) {
        std::vector<double> rhs(n);
        for (std::size_t k = 0; k < n; ++k) rhs[k] = -qp.linear[k];
        return solve_dense(qp.q, rhs);
    }

    // Feasible starting vertex from a zero-objective LP over the same set.
    LinearProgram phase1{std::vector<double>(n, 0.0), qp.constraints, lb, qp.upper_bounds};
    std::vector<double> x = solve_lp(phase1);

    auto row_dot = [&](std::size_t r, const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += rows.a(r, j) * v[j];
        return s;
    };

    // Initial working set: linearly independent active rows (Gram-Schmidt test).
    std::vector<std::size_t> work;
    {
        std::vector<std::vector<double>> basis;
        for (std::size_t r = 0; r < m && basis.size() < n; ++r) {
            if (std::abs(row_dot(r, x) - rows.b[r]) > 1e-9 * (1.0 + std::abs(rows.b[r]))) continue;
            std::vector<double> v(n);
            double len0 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                v[j] = rows.a(r, j);
                len0 += v[j] * v[j];
            }
            for (const auto& e : basis) {
                const double d = dot(v, e);
                for (std::size_t j = 0; j < n; ++j) v[j] -= d * e[j];
            }
            const double len = std::sqrt(dot(v, v));
            if (len <= 1e-9 * std::sqrt(len0)) continue;
            for (double& vj : v) vj /= len;
            basis.push_back(std::move(v));
            work.push_back(r);
        }
    }

    const std::size_t limit = 50 * (m + n) + 200;
    for (std::size_t iter = 0; iter < limit; ++iter) {
        std::vector<double> g = multiply(qp.q, x);
        for (std::size_t j = 0; j < n; ++j) g[j] += qp.linear[j];

        const std::size_t w = work.size();
        Matrix kkt(n + w, n + w);
        std::vector<double> rhs(n + w, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) kkt(r, c) = qp.q(r, c);
            rhs[r] = -g[r];
        }
        for (std::size_t k = 0; k < w; ++k)
            for (std::size_t j = 0; j < n; ++j) {
                kkt(n + k, j) = rows.a(work[k], j);
                kkt(j, n + k) = -rows.a(work[k], j);
            }
        const std::vector<double> sol = solve_dense(kkt, rhs, 1e-15);

        double pnorm = 0.0, xnorm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            pnorm = std::max(pnorm, std::abs(sol[j]));
            xnorm = std::max(xnorm, std::abs(x[j]));
        }
        if (pnorm <= 1e-12 * (1.0 + xnorm)) {
            std::optional<std::size_t> drop;
            double most = -1e-12;
            for (std::size_t k = 0; k < w; ++k)
                if (sol[n + k] < most) {
                    most = sol[n + k];
                    drop = k;
                }
            if (!drop) return x;
            work.erase(work.begin() + static_cast<std::ptrdiff_t>(*drop));
            continue;
        }

        double step = 1.0;
        std::optional<std::size_t> blocking;
        for (std::size_t r = 0; r < m; ++r) {
            if (std::find(work.begin(), work.end(), r) != work.end()) continue;
            const double ap = row_dot(r, std::vector<double>(sol.begin(), sol.begin() + n));
            if (ap >= -1e-14) continue;
            const double t = std::max(0.0, (rows.b[r] - row_dot(r, x)) / ap);
            if (t < step) {
                step = t;
                blocking = r;
            }
        }
        for (std::size_t j = 0; j < n; ++j) x[j] += step * sol[j];
        if (blocking) work.push_back(*blocking);
    }
    throw Error(ErrorCode::iteration_limit, "active-set iteration limit reached");
}

} // namespace pupilcover
