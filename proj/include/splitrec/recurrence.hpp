#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "splitrec/types.hpp"

namespace splitrec {

/// Coefficient windows a_k, b_k, f_k of the scalar second-order recurrence
///
///     y_{k+1} + a_k y_k + b_k y_{k-1} = f_k.
///
/// Immutable after construction. b_k must stay away from zero so that
/// backward and inverse sweeps remain well defined; a constructor flag
/// relaxes the check for forward-only use.
class RecurrenceCoefficients {
public:
    RecurrenceCoefficients(long first_index, std::vector<cx> a, std::vector<cx> b,
                           std::vector<cx> f, bool allow_zero_b = false)
        : first_(first_index), a_(std::move(a)), b_(std::move(b)), f_(std::move(f)) {
        if (a_.empty() || a_.size() != b_.size() || a_.size() != f_.size())
            throw Error("RecurrenceCoefficients: a, b, f must have equal length >= 1");
        if (!allow_zero_b) {
            for (std::size_t i = 0; i < b_.size(); ++i)
                if (std::abs(b_[i]) <= 1e-300)
                    throw Error("RecurrenceCoefficients: b vanishes at index " +
                                std::to_string(first_ + static_cast<long>(i)));
        }
    }

    long first_index() const { return first_; }
    long last_index() const { return first_ + static_cast<long>(a_.size()) - 1; }
    std::size_t size() const { return a_.size(); }
    bool covers(long k) const { return k >= first_ && k <= last_index(); }

    cx a(long k) const { return fetch(a_, k); }
    cx b(long k) const { return fetch(b_, k); }
    cx f(long k) const { return fetch(f_, k); }

private:
    cx fetch(const std::vector<cx>& v, long k) const {
        if (!covers(k))
            throw IndexOutOfRange("RecurrenceCoefficients: index " + std::to_string(k) +
                                  " outside coefficient window [" + std::to_string(first_) +
                                  ", " + std::to_string(last_index()) + "]");
        return v[static_cast<std::size_t>(k - first_)];
    }

    long first_;
    std::vector<cx> a_, b_, f_;
};

/// Direct iteration of the recurrence from Cauchy data y1 (at `start`) and
/// y2 (at `start`+1). Serves as the oracle every matrix form is checked
/// against.
inline GridFunction solve_cauchy(const RecurrenceCoefficients& coeffs, cx y1, cx y2,
                                 long count, long start) {
    if (count < 2)
        throw Error("solve_cauchy: count must be >= 2");
    if (count > 2 && (!coeffs.covers(start + 1) || !coeffs.covers(start + count - 2)))
        throw InsufficientCoefficients(
            "solve_cauchy: coefficient window does not cover indices " +
            std::to_string(start + 1) + ".." + std::to_string(start + count - 2));

    std::vector<cx> y(static_cast<std::size_t>(count));
    y[0] = y1;
    y[1] = y2;
    for (long k = start + 1; k + 1 <= start + count - 1; ++k) {
        const std::size_t i = static_cast<std::size_t>(k - start);
        y[i + 1] = coeffs.f(k) - coeffs.a(k) * y[i] - coeffs.b(k) * y[i - 1];
    }
    return GridFunction(start, std::move(y));
}

inline GridFunction solve_cauchy(const RecurrenceCoefficients& coeffs, cx y1, cx y2,
                                 long count) {
    return solve_cauchy(coeffs, y1, y2, count, coeffs.first_index());
}

/// One step of the standard companion form: state (y_k, y_{k-1}) maps to
/// (y_{k+1}, y_k) through T_k = [[-a_k, -b_k], [1, 0]] plus forcing
/// (f_k, 0).
inline std::array<cx, 2> companion_step(const RecurrenceCoefficients& coeffs, long k,
                                        const std::array<cx, 2>& state) {
    return {coeffs.f(k) - coeffs.a(k) * state[0] - coeffs.b(k) * state[1], state[0]};
}

/// Casoratian (discrete Wronskian) of two grid functions at node k:
/// ya_k yb_{k+1} - yb_k ya_{k+1}. Nonzero iff the pair is linearly
/// independent at that node.
inline cx casoratian(const GridFunction& ya, const GridFunction& yb, long k) {
    return ya[k] * yb[k + 1] - yb[k] * ya[k + 1];
}

struct BoundarySolution {
    cx c1;
    cx c2;
    GridFunction y;
};

/// First-kind boundary problem: find C1, C2 with
/// C1 basis1 + C2 basis2 matching y_left at the first node and y_right at
/// the last node of the shared window.
inline BoundarySolution solve_boundary_first_kind(const GridFunction& basis1,
                                                  const GridFunction& basis2, cx y_left,
                                                  cx y_right) {
    if (basis1.first_index() != basis2.first_index() || basis1.size() != basis2.size())
        throw Error("solve_boundary_first_kind: basis windows differ");

    const long lo = basis1.first_index();
    const long hi = basis1.last_index();
    const cx m11 = basis1[lo], m12 = basis2[lo];
    const cx m21 = basis1[hi], m22 = basis2[hi];

    const cx det = m11 * m22 - m12 * m21;
    const double norm = std::max({std::abs(m11 * m22), std::abs(m12 * m21), 1e-300});
    if (std::abs(det) < 1e-12 * norm)
        throw SingularBoundarySystem("solve_boundary_first_kind: boundary system singular");

    const cx c1 = (y_left * m22 - y_right * m12) / det;
    const cx c2 = (m11 * y_right - m21 * y_left) / det;

    std::vector<cx> y(basis1.size());
    for (long k = lo; k <= hi; ++k)
        y[static_cast<std::size_t>(k - lo)] = c1 * basis1[k] + c2 * basis2[k];
    return {c1, c2, GridFunction(lo, std::move(y))};
}

}  // namespace splitrec
