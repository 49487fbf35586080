#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "splitrec/matrix_forms.hpp"
#include "splitrec/riccati.hpp"
#include "splitrec/types.hpp"

namespace splitrec {

/// Node-indexed permittivity grid for the 1-D wave equation
/// y'' + eps(xi) y = 0 discretized with step h (node k sits at
/// xi = (k-1) h). Markers n1 < n2 <= n3 delimit the left vacuum lead, the
/// slab, and the right vacuum tail.
struct SlabProfile {
    double h;
    std::vector<cx> eps;  // eps[i] is node i+1
    long n1, n2, n3;

    SlabProfile(double step, std::vector<cx> permittivity, long m1, long m2, long m3)
        : h(step), eps(std::move(permittivity)), n1(m1), n2(m2), n3(m3) {
        if (!(h > 0.0))
            throw Error("SlabProfile: grid step must be positive");
        if (!(1 <= n1 && n1 < n2 && n2 <= n3 && n3 <= static_cast<long>(eps.size())))
            throw Error("SlabProfile: markers must satisfy 1 <= N1 < N2 <= N3 <= length");
        for (const cx& e : eps)
            if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
                throw Error("SlabProfile: permittivity must be finite");
    }

    cx eps_at(long k) const {
        if (k < 1 || k > static_cast<long>(eps.size()))
            throw IndexOutOfRange("SlabProfile: node " + std::to_string(k));
        return eps[static_cast<std::size_t>(k - 1)];
    }
};

/// Homogeneous slab grid: vacuum up to n1, eps2 on (n1, n2], vacuum beyond.
inline SlabProfile homogeneous_slab(cx eps2, double h, long n1, long n2, long n3) {
    std::vector<cx> eps(static_cast<std::size_t>(n3), cx{1.0});
    for (long k = n1 + 1; k <= n2; ++k)
        eps[static_cast<std::size_t>(k - 1)] = eps2;
    return SlabProfile(h, std::move(eps), n1, n2, n3);
}

/// Linear ramp grid: eps drops from ~1 at n1 to ~-1 at n2 (half-cell
/// offset included), vacuum elsewhere. Past the midpoint the medium is
/// evanescent, which is what makes transfer sweeps blow up.
inline SlabProfile ramp_slab(double h, long n1, long n2, long n3) {
    std::vector<cx> eps(static_cast<std::size_t>(n3), cx{1.0});
    for (long k = n1; k <= n2; ++k)
        eps[static_cast<std::size_t>(k - 1)] =
            1.0 - 2.0 * (static_cast<double>(k - n1) + 0.5) / static_cast<double>(n2 - n1);
    return SlabProfile(h, std::move(eps), n1, n2, n3);
}

/// Tight-binding form of the discrete wave equation
/// y_{k+1} + y_{k-1} - (2 - h^2 eps_k) y_k = 0, i.e.
/// a_k = -(2 - h^2 eps_k), b_k = 1, f_k = 0.
inline RecurrenceCoefficients discretize(const SlabProfile& p) {
    const std::size_t n = static_cast<std::size_t>(p.n3);
    std::vector<cx> a(n), b(n, cx{1.0}), f(n, cx{0.0});
    for (std::size_t i = 0; i < n; ++i)
        a[i] = -(2.0 - p.h * p.h * p.eps[i]);
    return RecurrenceCoefficients(1, std::move(a), std::move(b), std::move(f));
}

/// Roots of the local characteristic equation
/// rho^2 - (2 - h^2 eps) rho + 1 = 0, computed as
/// (1 - h^2 eps / 2) +- sqrt((1 - h^2 eps / 2)^2 - 1) with the principal
/// square root and the argument kept exactly in this form (branch
/// continuity with the vacuum limit). rho1 rho2 = 1. Under the exp(-i w t)
/// convention rho1, the root with the larger imaginary part, is the
/// forward propagating wave; for a real evanescent pair rho1 is the
/// growing one.
inline std::pair<cx, cx> local_roots(cx eps_k, double h) {
    const cx w = 1.0 - h * h * eps_k / 2.0;
    const cx s = std::sqrt(w * w - 1.0);
    return detail::order_roots(w + s, w - s);
}

/// Closed-form reflection/transmission of the continuous homogeneous slab
/// (mode matching), with principal sqrt(eps2). Used as the analytic oracle
/// for the grid solvers.
inline std::pair<cx, cx> analytic_slab_rt(cx eps2, double xi1, double xi2) {
    const cx i{0.0, 1.0};
    const cx s = std::sqrt(eps2);
    const double d = xi2 - xi1;
    const cx den = (s + 1.0) * (s + 1.0) * std::exp(-i * s * d) -
                   (s - 1.0) * (s - 1.0) * std::exp(i * s * d);
    const cx r = (eps2 - 1.0) * 2.0 * i * std::sin(s * d) *
                 std::exp(i * (2.0 * xi1 + xi2)) / den;
    const cx t = 4.0 * s * std::exp(i * (xi1 - xi2)) / den;
    return {r, t};
}

/// Splitting-sequence policy for the slab solvers: per-node local
/// characteristic roots, or a constant pair (c, 1/c).
struct RhoChoice {
    enum class Kind { LocalRoots, Constant };
    Kind kind = Kind::LocalRoots;
    cx value{0.9};

    static RhoChoice local_roots() { return {Kind::LocalRoots, cx{}}; }
    static RhoChoice constant(cx c) { return {Kind::Constant, c}; }
};

/// Splitting sequences over nodes 1..n3 for the given policy.
inline SplitSequences slab_split(const SlabProfile& p, const RhoChoice& choice) {
    const std::size_t n = static_cast<std::size_t>(p.n3);
    std::vector<cx> r1(n), r2(n);
    if (choice.kind == RhoChoice::Kind::Constant) {
        if (std::abs(choice.value) < 1e-300)
            throw DegenerateSplit("slab_split: constant rho must be nonzero");
        std::fill(r1.begin(), r1.end(), choice.value);
        std::fill(r2.begin(), r2.end(), 1.0 / choice.value);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            auto [a, b] = local_roots(p.eps[i], p.h);
            r1[i] = a;
            r2[i] = b;
        }
    }
    return SplitSequences(1, std::move(r1), std::move(r2));
}

struct ScatterResult {
    cx R;
    cx T;
    GridFunction field;  // Y_k over nodes 1..n3
};

/// Amplitudes of the two plane-wave branches at node k:
/// A_fwd + A_bwd = y_k, A_fwd rho_fwd + A_bwd rho_bwd = y_{k+1}.
inline std::pair<cx, cx> plane_wave_amplitudes(const GridFunction& y, long k, cx rho_fwd,
                                               cx rho_bwd) {
    const SplitState s = decompose(y[k], y[k + 1], rho_fwd, rho_bwd);
    return {s.y1, s.y2};
}

/// Scattering solve of the slab problem with physical radiation
/// conditions: unit forward wave incident from the left, nothing incident
/// from the right. Works with any admissible splitting policy; the field
/// is recovered by a backward reflection sweep plus forward substitution
/// (no transfer sweep), then normalized so the vacuum forward amplitude at
/// node 1 is one. R is the vacuum backward amplitude at node 1 and T the
/// field value at node n3 (a pure forward wave there).
inline ScatterResult solve_forward_smatrix(const SlabProfile& p, const RhoChoice& choice) {
    const RecurrenceCoefficients coeffs = discretize(p);
    const SplitSequences split = slab_split(p, choice);
    const long n = p.n3;

    std::vector<StepMatrix> steps;
    steps.reserve(static_cast<std::size_t>(n - 1));
    for (long k = 1; k < n; ++k)
        steps.push_back(scatter_step(coeffs, split, k));

    // Pure forward tail: state at node n3 of a wave continuing with the
    // local forward root, expressed in the chosen splitting.
    const auto [tail_fwd, tail_bwd] = local_roots(p.eps_at(n), p.h);
    (void)tail_bwd;
    const SplitState terminal = decompose(1.0, tail_fwd, split.rho1(n), split.rho2(n));
    if (std::abs(terminal.y1) < 1e-300)
        throw DegenerateSplit("solve_forward_smatrix: splitting blind to the forward tail");
    const cx r_terminal = terminal.y2 / terminal.y1;

    const std::vector<SplitState> states = scatter_two_point(steps, 1.0, r_terminal);

    std::vector<cx> w(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = states[i].y1 + states[i].y2;

    const auto [lead_fwd, lead_bwd] = local_roots(p.eps_at(1), p.h);
    const SplitState lead = decompose(w[0], w[1], lead_fwd, lead_bwd);
    if (std::abs(lead.y1) < 1e-300)
        throw Error("solve_forward_smatrix: vanishing incident amplitude");

    std::vector<cx> y(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        y[i] = w[i] / lead.y1;
    const cx reflection = lead.y2 / lead.y1;
    const cx transmission = y.back();
    return {reflection, transmission, GridFunction(1, std::move(y))};
}

struct IndependentPair {
    GridFunction y1;
    GridFunction y2;
    RiccatiTrace trace1;
    RiccatiTrace trace2;
};

/// The two linearly independent solutions obtained by forward Riccati
/// iteration from the given seeds at node 1 and diagonal propagation from
/// y1 = y2 = 1.
inline IndependentPair solve_independent_pair(const SlabProfile& p, cx seed1, cx seed2) {
    const RecurrenceCoefficients coeffs = discretize(p);
    RiccatiTrace t1 = riccati_forward(coeffs, seed1, 1, p.n3);
    RiccatiTrace t2 = riccati_forward(coeffs, seed2, 1, p.n3);
    const long usable = std::min(t1.last_index(), t2.last_index());
    const std::vector<SplitState> states =
        diagonal_propagate(t1, t2, SplitState{1.0, 1.0}, usable, 1);
    std::vector<cx> a(states.size()), b(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        a[i] = states[i].y1;
        b[i] = states[i].y2;
    }
    return {GridFunction(1, std::move(a)), GridFunction(1, std::move(b)), std::move(t1),
            std::move(t2)};
}

/// Vacuum-root seeds at node 1 (the common case).
inline IndependentPair solve_independent_pair(const SlabProfile& p) {
    const auto [s1, s2] = local_roots(p.eps_at(1), p.h);
    return solve_independent_pair(p, s1, s2);
}

struct InverseResult {
    cx R;
    cx T;
    GridFunction y1;  // nodes 1..n3
    RiccatiTrace trace;
};

/// Inverse scheme: seed the Riccati iteration with the vacuum forward root
/// at node n3, run it downward together with y_k = y_{k+1} / rho_k from
/// y_{n3} = terminal_value, then decompose the pre-slab field at node 1
/// into vacuum plane waves. R is backward/forward there; T references the
/// transmitted value at node n3 back to xi = 0 with the continuum phase
/// exp(i h (n3 - 1)), the same normalization the analytic coefficients use.
inline InverseResult solve_inverse_scheme(const SlabProfile& p, cx terminal_value) {
    const RecurrenceCoefficients coeffs = discretize(p);
    const long n = p.n3;
    const auto [tail_fwd, tail_bwd] = local_roots(p.eps_at(n), p.h);
    (void)tail_bwd;
    RiccatiTrace trace = riccati_inverse(coeffs, tail_fwd, n, n);
    if (trace.first_index != 1)
        throw Error("solve_inverse_scheme: Riccati sweep diverged before node 1");

    std::vector<cx> y(static_cast<std::size_t>(n));
    y.back() = terminal_value;
    for (long k = n - 1; k >= 1; --k)
        y[static_cast<std::size_t>(k - 1)] = y[static_cast<std::size_t>(k)] / trace.at(k);

    const auto [lead_fwd, lead_bwd] = local_roots(p.eps_at(1), p.h);
    const SplitState lead = decompose(y[0], y[1], lead_fwd, lead_bwd);
    if (std::abs(lead.y1) < 1e-300)
        throw Error("solve_inverse_scheme: vanishing incident amplitude");

    const cx reflection = lead.y2 / lead.y1;
    const cx phase_ref = std::exp(cx{0.0, p.h * static_cast<double>(n - 1)});
    const cx transmission = terminal_value / (lead.y1 * phase_ref);
    return {reflection, transmission, GridFunction(1, std::move(y)), std::move(trace)};
}

}  // namespace splitrec
