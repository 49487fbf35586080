#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "splitrec/split.hpp"
#include "splitrec/types.hpp"

namespace splitrec {

/// Any split-state component above this magnitude marks a divergent
/// transfer sweep.
constexpr double kOverflowThreshold = 1e100;

enum class MatrixForm { Transfer, Scatter };

/// One index step in either formalism.
///
/// Transfer: (y1_{k+1}, y2_{k+1}) = M (y1_k, y2_k) + (forcing, -forcing).
/// Scatter:  (y2_k, y1_{k+1})     = M (y1_k, y2_{k+1}) + (forcing, forcing2),
/// where forcing2 = rho2_k * forcing (re-derived from the transfer form;
/// see scatter_step).
struct StepMatrix {
    cx m11, m12, m21, m22;
    cx forcing;
    cx forcing2;
    MatrixForm form;
};

/// Transfer matrix for the step k -> k+1:
///   T11 = -[b_{k+1} + (rho2_{k+1} + a_{k+1}) rho1_k] / (rho1_{k+1} - rho2_{k+1})
///   T12 = -[b_{k+1} + (rho2_{k+1} + a_{k+1}) rho2_k] / (rho1_{k+1} - rho2_{k+1})
///   T21 =  [b_{k+1} + (rho1_{k+1} + a_{k+1}) rho1_k] / (rho1_{k+1} - rho2_{k+1})
///   T22 =  [b_{k+1} + (rho1_{k+1} + a_{k+1}) rho2_k] / (rho1_{k+1} - rho2_{k+1})
/// with forcing f_{k+1} / (rho1_{k+1} - rho2_{k+1}).
inline StepMatrix transfer_matrix(const RecurrenceCoefficients& coeffs,
                                  const SplitSequences& split, long k) {
    const cx a = coeffs.a(k + 1), b = coeffs.b(k + 1), f = coeffs.f(k + 1);
    const cx r1k = split.rho1(k), r2k = split.rho2(k);
    const cx r1n = split.rho1(k + 1), r2n = split.rho2(k + 1);
    if (!rho_distinct(r1n, r2n, split.tolerance()))
        throw DegenerateSplit("transfer_matrix: rho pair coincides at index " +
                              std::to_string(k + 1));
    const cx d = r1n - r2n;
    const cx fo = f / d;
    return {-(b + (r2n + a) * r1k) / d, -(b + (r2n + a) * r2k) / d,
            (b + (r1n + a) * r1k) / d,  (b + (r1n + a) * r2k) / d,
            fo, -fo, MatrixForm::Transfer};
}

/// Result of a transfer sweep. When a component exceeds kOverflowThreshold,
/// the offending state is the last one recorded and overflow_at holds its
/// node index.
struct TransferRun {
    long first_index;
    std::vector<SplitState> states;
    std::optional<long> overflow_at;

    bool overflowed() const { return overflow_at.has_value(); }
};

/// Forward sweep of the normal system state_{k+1} = T_k state_k + (F, -F)
/// starting from `initial` at node from_k, producing `count` states.
inline TransferRun propagate_transfer(const RecurrenceCoefficients& coeffs,
                                      const SplitSequences& split, SplitState initial,
                                      long count, long from_k) {
    TransferRun run{from_k, {}, std::nullopt};
    run.states.reserve(static_cast<std::size_t>(count));
    run.states.push_back(initial);
    SplitState s = initial;
    for (long k = from_k; k < from_k + count - 1; ++k) {
        const StepMatrix t = transfer_matrix(coeffs, split, k);
        s = {t.m11 * s.y1 + t.m12 * s.y2 + t.forcing,
             t.m21 * s.y1 + t.m22 * s.y2 + t.forcing2};
        run.states.push_back(s);
        if (std::abs(s.y1) > kOverflowThreshold || std::abs(s.y2) > kOverflowThreshold) {
            run.overflow_at = k + 1;
            break;
        }
    }
    return run;
}

inline TransferRun propagate_transfer(const RecurrenceCoefficients& coeffs,
                                      const SplitSequences& split, SplitState initial,
                                      long count) {
    return propagate_transfer(coeffs, split, initial, count, coeffs.first_index() + 1);
}

/// Scatter matrix for the step k -> k+1, D = b_{k+1} + rho2_k (rho1_{k+1} + a_{k+1}):
///   S11 = -[b_{k+1} + rho1_k (rho1_{k+1} + a_{k+1})] / D
///   S12 =  (rho1_{k+1} - rho2_{k+1}) / D
///   S21 =  (rho1_k - rho2_k) b_{k+1} / D
///   S22 = -[b_{k+1} + rho2_k (rho2_{k+1} + a_{k+1})] / D
/// with forcing f_{k+1} / D. The second offset component is
/// +rho2_k * forcing, which is what elimination of the transfer form gives.
inline StepMatrix scatter_step(const RecurrenceCoefficients& coeffs,
                               const SplitSequences& split, long k) {
    const cx a = coeffs.a(k + 1), b = coeffs.b(k + 1), f = coeffs.f(k + 1);
    const cx r1k = split.rho1(k), r2k = split.rho2(k);
    const cx r1n = split.rho1(k + 1), r2n = split.rho2(k + 1);
    const cx den = b + r2k * (r1n + a);
    const double scale = std::max({std::abs(b), std::abs(r2k * (r1n + a)), 1.0});
    if (std::abs(den) < 1e-14 * scale)
        throw SingularScatterDenominator(
            "scatter_step: denominator vanishes at index " + std::to_string(k));
    const cx fo = f / den;
    return {-(b + r1k * (r1n + a)) / den, (r1n - r2n) / den,
            (r1k - r2k) * b / den,        -(b + r2k * (r2n + a)) / den,
            fo, r2k * fo, MatrixForm::Scatter};
}

/// Affine scattering relation for a span of nodes:
///   (out_left, out_right) = [[s11, s12], [s21, s22]] (in_left, in_right) + (c1, c2)
/// where in_left is the y1 component entering at the left edge, in_right
/// the y2 component entering at the right edge, out_left the y2 component
/// leaving at the left edge and out_right the y1 component leaving at the
/// right edge. Defaults to the identity span (perfect transmission).
struct CumulativeScatter {
    cx s11{0.0}, s12{1.0};
    cx s21{1.0}, s22{0.0};
    cx c1{0.0}, c2{0.0};

    static CumulativeScatter from_step(const StepMatrix& s) {
        if (s.form != MatrixForm::Scatter)
            throw Error("CumulativeScatter: step matrix is not in scatter form");
        return {s.m11, s.m12, s.m21, s.m22, s.forcing, s.forcing2};
    }
};

/// Redheffer star product of two adjacent spans (A on the left, B on the
/// right), including the affine forcing offsets. Associative up to roundoff.
inline CumulativeScatter star_product(const CumulativeScatter& a,
                                      const CumulativeScatter& b) {
    const cx delta = 1.0 - a.s22 * b.s11;
    if (std::abs(delta) < 1e-14)
        throw StarProductSingular("star_product: 1 - A22 B11 vanishes");
    const cx inner = (a.c2 + a.s22 * b.c1) / delta;  // interface y1 for zero inputs
    CumulativeScatter r;
    r.s11 = a.s11 + a.s12 * b.s11 * a.s21 / delta;
    r.s12 = a.s12 * b.s12 / delta;
    r.s21 = b.s21 * a.s21 / delta;
    r.s22 = b.s22 + b.s21 * a.s22 * b.s12 / delta;
    r.c1 = a.c1 + a.s12 * (b.s11 * inner + b.c1);
    r.c2 = b.c2 + b.s21 * inner;
    return r;
}

/// Left-to-right fold of per-step scatter matrices into one cumulative span.
inline CumulativeScatter cascade_scatter(std::span<const StepMatrix> steps) {
    CumulativeScatter acc;
    for (const StepMatrix& s : steps)
        acc = star_product(acc, CumulativeScatter::from_step(s));
    return acc;
}

/// Backward-substitution solve of the homogeneous two-point problem over
/// `steps.size() + 1` nodes: y1 at the first node equals in_left, and the
/// ratio y2/y1 at the last node equals r_terminal. Stable through
/// exponentially growing regions (no transfer sweep involved).
inline std::vector<SplitState> scatter_two_point(std::span<const StepMatrix> steps,
                                                 cx in_left, cx r_terminal) {
    const std::size_t n = steps.size() + 1;
    std::vector<cx> r(n);
    r[n - 1] = r_terminal;
    for (std::size_t k = n - 1; k-- > 0;) {
        const StepMatrix& s = steps[k];
        if (s.form != MatrixForm::Scatter)
            throw Error("scatter_two_point: step matrix is not in scatter form");
        const cx delta = 1.0 - s.m22 * r[k + 1];
        if (std::abs(delta) < 1e-14)
            throw StarProductSingular("scatter_two_point: reflection sweep singular");
        r[k] = s.m11 + s.m12 * r[k + 1] * s.m21 / delta;
    }
    std::vector<SplitState> states(n);
    cx y1 = in_left;
    states[0] = {y1, r[0] * y1};
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const StepMatrix& s = steps[k];
        y1 = s.m21 * y1 / (1.0 - s.m22 * r[k + 1]);
        states[k + 1] = {y1, r[k + 1] * y1};
    }
    return states;
}

}  // namespace splitrec
