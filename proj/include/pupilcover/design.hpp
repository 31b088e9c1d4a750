#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "geom.hpp"

namespace pupilcover {

/// One pupil of radius R/2 at the origin and two point pupils at (+-R, 0).
/// Any placement is optimal for three pupils; this one is the documented default.
inline PupilConfig three_pupil_optimal(double R) {
    if (!(R > 0.0)) throw Error(ErrorCode::invalid_input, "objective_radius: must be > 0");
    PupilConfig cfg;
    cfg.objective_radius = R;
    cfg.pupils = {{{0.0, 0.0}, R / 2.0}, {{R, 0.0}, 0.0}, {{-R, 0.0}, 0.0}};
    return cfg;
}

inline bool is_prime(std::int64_t k) {
    if (k < 2) return false;
    if (k < 4) return true;
    if (k % 2 == 0) return false;
    for (std::int64_t d = 3; d * d <= k; d += 2)
        if (k % d == 0) return false;
    return true;
}

inline std::int64_t next_prime(std::int64_t k) {
    if (k <= 2) return 2;
    while (!is_prime(k)) ++k;
    return k;
}

struct DifferenceCoverSequence {
    std::int64_t p = 0;
    std::vector<std::int64_t> values;
};

/// x_k = k p + (k(k+1)/2 mod p) for k < 2p, and x_{k+2p} = x_k + p.
/// Pairwise differences contain every integer of absolute value below p^2.
inline DifferenceCoverSequence difference_cover_sequence(std::int64_t p) {
    if (!is_prime(p)) throw Error(ErrorCode::not_prime, std::to_string(p) + " is not prime");
    DifferenceCoverSequence seq;
    seq.p = p;
    seq.values.resize(static_cast<std::size_t>(4 * p));
    for (std::int64_t k = 0; k < 2 * p; ++k) {
        const std::int64_t x = k * p + (k * (k + 1) / 2) % p;
        seq.values[static_cast<std::size_t>(k)] = x;
        seq.values[static_cast<std::size_t>(k + 2 * p)] = x + p;
    }
    return seq;
}

/// Brute force: every integer in (-p^2, p^2) must be some x_i - x_j.
inline bool verify_difference_cover(const DifferenceCoverSequence& seq) {
    const std::int64_t span = seq.p * seq.p;
    std::vector<bool> hit(static_cast<std::size_t>(2 * span - 1), false);
    for (std::int64_t a : seq.values)
        for (std::int64_t b : seq.values) {
            const std::int64_t d = a - b;
            if (d > -span && d < span) hit[static_cast<std::size_t>(d + span - 1)] = true;
        }
    for (bool h : hit)
        if (!h) return false;
    return true;
}

struct PrimeDesign {
    std::int64_t p = 0;
    double scale = 0.0;
    double pupil_radius = 0.0;
    double objective_radius = 0.0;
    std::vector<Pupil> pupils;

    PupilConfig config() const { return {pupils, objective_radius}; }

    /// Pupil count over the trivial lower bound ceil(R / rho).
    double approximation_ratio() const {
        return static_cast<double>(pupils.size()) / std::ceil(objective_radius / pupil_radius - 1e-9);
    }
};

/// 16 p^2 equal pupils on the grid (x_{i / 4p}, x_{i mod 4p}) scaled by s = rho * sqrt(2),
/// with p the smallest prime such that p^2 >= R / s.
inline PrimeDesign prime_design(double R, double rho) {
    if (!(R > 0.0)) throw Error(ErrorCode::invalid_input, "objective_radius: must be > 0");
    if (!(rho > 0.0) || rho > R / 2.0)
        throw Error(ErrorCode::invalid_radius, "pupil radius must lie in (0, R/2]");
    PrimeDesign d;
    d.scale = rho * std::numbers::sqrt2;
    d.pupil_radius = rho;
    d.objective_radius = R;
    double root = std::sqrt(R / d.scale);
    // Inputs like rho = 0.70710678 are meant to hit R / s = p^2 exactly.
    if (std::abs(root - std::round(root)) <= 1e-6 * root) root = std::round(root);
    d.p = next_prime(static_cast<std::int64_t>(std::ceil(root)));
    const auto seq = difference_cover_sequence(d.p);
    const auto width = static_cast<std::size_t>(4 * d.p);
    d.pupils.reserve(width * width);
    for (std::size_t i = 0; i < width * width; ++i) {
        const Point c{static_cast<double>(seq.values[i / width]), static_cast<double>(seq.values[i % width])};
        d.pupils.push_back({d.scale * c, rho});
    }
    return d;
}

} // namespace pupilcover
