#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "splitrec/recurrence.hpp"
#include "splitrec/split.hpp"
#include "splitrec/types.hpp"

namespace splitrec {

/// Divergence thresholds for Riccati iterations. A trace crossing either
/// bound is flagged, not rejected: blow-up is data about the stationary
/// point's stability.
constexpr double kRiccatiUpper = 1e6;
constexpr double kRiccatiLower = 1e-12;

/// A splitting sequence generated by Riccati iteration. Values are finite
/// up to diverged_at; iteration stops once a value crosses the thresholds.
struct RiccatiTrace {
    long first_index;
    std::vector<cx> rho;
    std::optional<long> diverged_at;

    long last_index() const { return first_index + static_cast<long>(rho.size()) - 1; }
    bool covers(long k) const { return k >= first_index && k <= last_index(); }
    cx at(long k) const {
        if (!covers(k))
            throw IndexOutOfRange("RiccatiTrace: index " + std::to_string(k) +
                                  " outside trace");
        return rho[static_cast<std::size_t>(k - first_index)];
    }
    bool diverged() const { return diverged_at.has_value(); }
};

namespace detail {
inline bool rho_out_of_range(cx rho) {
    const double m = std::abs(rho);
    return !(m <= kRiccatiUpper) || m < kRiccatiLower;  // catches NaN too
}
}  // namespace detail

/// Forward Riccati iteration rho_{k+1} = -b_{k+1}/rho_k - a_{k+1} from a
/// seed at node from_k. Produces up to `count` values.
inline RiccatiTrace riccati_forward(const RecurrenceCoefficients& coeffs, cx seed,
                                    long from_k, long count) {
    RiccatiTrace t{from_k, {}, std::nullopt};
    t.rho.reserve(static_cast<std::size_t>(count));
    cx rho = seed;
    for (long k = from_k; k < from_k + count; ++k) {
        t.rho.push_back(rho);
        if (detail::rho_out_of_range(rho)) {
            t.diverged_at = k;
            break;
        }
        if (k + 1 < from_k + count)
            rho = -coeffs.b(k + 1) / rho - coeffs.a(k + 1);
    }
    return t;
}

/// Downward Riccati iteration rho_k = -b_{k+1} / (rho_{k+1} + a_{k+1}),
/// the exact inverse of riccati_forward, seeded at node from_k and run for
/// `count` values ending there. Values are stored in ascending index order.
inline RiccatiTrace riccati_inverse(const RecurrenceCoefficients& coeffs, cx seed,
                                    long from_k, long count) {
    std::vector<cx> rho;
    rho.reserve(static_cast<std::size_t>(count));
    std::optional<long> diverged;
    cx value = seed;
    for (long k = from_k; k > from_k - count; --k) {
        rho.push_back(value);
        if (detail::rho_out_of_range(value)) {
            diverged = k;
            break;
        }
        if (k - 1 > from_k - count) {
            const cx den = value + coeffs.a(k);
            if (std::abs(den) < 1e-300)
                throw PoleHit("riccati_inverse: rho + a vanishes at index " +
                              std::to_string(k));
            value = -coeffs.b(k) / den;
        }
    }
    std::reverse(rho.begin(), rho.end());
    const long first = from_k - static_cast<long>(rho.size()) + 1;
    return {first, std::move(rho), diverged};
}

namespace detail {
/// Ordering rule for a root pair: larger imaginary part first; for a real
/// pair the larger modulus first, ties broken by the larger real part.
inline std::pair<cx, cx> order_roots(cx r1, cx r2) {
    bool swap = false;
    if (r1.imag() != r2.imag())
        swap = r2.imag() > r1.imag();
    else if (std::abs(r1) != std::abs(r2))
        swap = std::abs(r2) > std::abs(r1);
    else
        swap = r2.real() > r1.real();
    return swap ? std::pair<cx, cx>{r2, r1} : std::pair<cx, cx>{r1, r2};
}
}  // namespace detail

/// Both roots of rho^2 + a rho + b = 0. The larger-magnitude root is formed
/// from the quadratic formula and the other from b / rho (Citardauq), so
/// neither suffers cancellation. Ordered per detail::order_roots. A double
/// root is returned twice.
inline std::pair<cx, cx> characteristic_roots(cx a, cx b) {
    const cx disc = std::sqrt(a * a - 4.0 * b);
    const cx s = (std::abs(-a + disc) >= std::abs(-a - disc)) ? disc : -disc;
    const cx big = (-a + s) / 2.0;
    const cx small = (std::abs(big) > 0.0) ? b / big : big;
    return detail::order_roots(big, small);
}

/// Decoupled propagation y1_{k+1} = rho1_k y1_k, y2_{k+1} = rho2_k y2_k,
/// valid when both traces solve the same Riccati equation (diagonal
/// transfer matrix).
inline std::vector<SplitState> diagonal_propagate(const RiccatiTrace& trace1,
                                                  const RiccatiTrace& trace2,
                                                  SplitState initial, long count,
                                                  long from_k) {
    std::vector<SplitState> states;
    states.reserve(static_cast<std::size_t>(count));
    SplitState s = initial;
    states.push_back(s);
    for (long k = from_k; k < from_k + count - 1; ++k) {
        const cx r1 = trace1.at(k), r2 = trace2.at(k);
        if (!rho_distinct(r1, r2))
            throw DegenerateSplit("diagonal_propagate: traces collide at index " +
                                  std::to_string(k));
        s = {r1 * s.y1, r2 * s.y2};
        states.push_back(s);
    }
    return states;
}

inline std::vector<SplitState> diagonal_propagate(const RiccatiTrace& trace1,
                                                  const RiccatiTrace& trace2,
                                                  SplitState initial, long count) {
    return diagonal_propagate(trace1, trace2, initial, count, trace1.first_index);
}

/// Coefficients b making a prescribed constant rho_star an exact Riccati
/// solution of rho^2 + a rho + b = 0 pointwise: b_k = -rho_star a_k - rho_star^2.
inline std::vector<cx> proportional_coefficients(const std::vector<cx>& a, cx rho_star) {
    std::vector<cx> b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        b[i] = -rho_star * a[i] - rho_star * rho_star;
    return b;
}

}  // namespace splitrec
