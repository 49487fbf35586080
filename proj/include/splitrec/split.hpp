#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "splitrec/recurrence.hpp"
#include "splitrec/types.hpp"

namespace splitrec {

/// Default relative margin below which a rho pair counts as coincident.
constexpr double kDistinctnessTol = 1e-10;

/// The pair of auxiliary grid-function values (y1_k, y2_k) with
/// y_k = y1_k + y2_k and y_{k+1} = rho1_k y1_k + rho2_k y2_k.
struct SplitState {
    cx y1{};
    cx y2{};
};

inline bool rho_distinct(cx rho1, cx rho2, double tol = kDistinctnessTol) {
    return std::abs(rho1 - rho2) >
           tol * std::max({1.0, std::abs(rho1), std::abs(rho2)});
}

/// Per-node splitting constants rho1_k, rho2_k. Arbitrary complex sequences,
/// only required to be pointwise distinct.
class SplitSequences {
public:
    SplitSequences(long first_index, std::vector<cx> rho1, std::vector<cx> rho2,
                   double tol = kDistinctnessTol)
        : first_(first_index), rho1_(std::move(rho1)), rho2_(std::move(rho2)), tol_(tol) {
        if (rho1_.empty() || rho1_.size() != rho2_.size())
            throw Error("SplitSequences: rho1, rho2 must have equal length >= 1");
        for (std::size_t i = 0; i < rho1_.size(); ++i)
            if (!rho_distinct(rho1_[i], rho2_[i], tol_))
                throw DegenerateSplit("SplitSequences: rho1 == rho2 at index " +
                                      std::to_string(first_ + static_cast<long>(i)));
    }

    static SplitSequences constant(long first_index, std::size_t count, cx rho1, cx rho2,
                                   double tol = kDistinctnessTol) {
        return SplitSequences(first_index, std::vector<cx>(count, rho1),
                              std::vector<cx>(count, rho2), tol);
    }

    long first_index() const { return first_; }
    long last_index() const { return first_ + static_cast<long>(rho1_.size()) - 1; }
    std::size_t size() const { return rho1_.size(); }
    bool covers(long k) const { return k >= first_ && k <= last_index(); }
    double tolerance() const { return tol_; }

    cx rho1(long k) const { return fetch(rho1_, k); }
    cx rho2(long k) const { return fetch(rho2_, k); }

private:
    cx fetch(const std::vector<cx>& v, long k) const {
        if (!covers(k))
            throw IndexOutOfRange("SplitSequences: index " + std::to_string(k) +
                                  " outside window");
        return v[static_cast<std::size_t>(k - first_)];
    }

    long first_;
    std::vector<cx> rho1_, rho2_;
    double tol_;
};

/// Unique split of (y_k, y_{k+1}) into the two branches:
///   y1 =  (y_{k+1} - rho2 y_k) / (rho1 - rho2)
///   y2 = -(y_{k+1} - rho1 y_k) / (rho1 - rho2)
inline SplitState decompose(cx y_k, cx y_k_plus_1, cx rho1, cx rho2,
                            double tol = kDistinctnessTol) {
    if (!rho_distinct(rho1, rho2, tol))
        throw DegenerateSplit("decompose: rho1 and rho2 coincide");
    const cx d = rho1 - rho2;
    return {(y_k_plus_1 - rho2 * y_k) / d, -(y_k_plus_1 - rho1 * y_k) / d};
}

/// Inverse of decompose: y_k = y1 + y2, y_{k+1} = rho1 y1 + rho2 y2.
inline std::pair<cx, cx> recombine(const SplitState& state, cx rho1, cx rho2) {
    return {state.y1 + state.y2, rho1 * state.y1 + rho2 * state.y2};
}

/// Split state at node k (the second Cauchy node) from Cauchy data
/// y1 = y_{k-1}, y2 = y_k, using the coefficients a_k, b_k, f_k.
/// Equivalent to one recurrence step followed by decompose.
inline SplitState initial_split(const RecurrenceCoefficients& coeffs, cx y1, cx y2,
                                cx rho1, cx rho2, long k,
                                double tol = kDistinctnessTol) {
    if (!rho_distinct(rho1, rho2, tol))
        throw DegenerateSplit("initial_split: rho1 and rho2 coincide");
    const cx d = rho1 - rho2;
    const cx rhs = coeffs.f(k) - y1 * coeffs.b(k);
    return {(rhs - (rho2 + coeffs.a(k)) * y2) / d, -(rhs - (rho1 + coeffs.a(k)) * y2) / d};
}

inline SplitState initial_split(const RecurrenceCoefficients& coeffs, cx y1, cx y2,
                                cx rho1, cx rho2) {
    return initial_split(coeffs, y1, y2, rho1, rho2, coeffs.first_index() + 1);
}

}  // namespace splitrec
