#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "splitrec/recurrence.hpp"
#include "splitrec/riccati.hpp"
#include "splitrec/types.hpp"

namespace splitrec {

/// Dimensionless geometry of a coupled-resonator chain: g_k = R_k/R* is
/// the normalized radius of cell k, u_k the normalized coupling strength
/// of the aperture *before* cell k (so N cells carry u_1..u_{N+1}), phi
/// the design phase advance per cell and Q the quality factor (may be
/// +infinity for the lossless chain).
struct ChainDesign {
    double phi;
    double Q;
    std::vector<double> g;  // g[i] is cell i+1
    std::vector<double> u;  // u[i] is aperture i+1; size g.size() + 1

    ChainDesign(double phase, double quality, std::vector<double> radii,
                std::vector<double> couplings)
        : phi(phase), Q(quality), g(std::move(radii)), u(std::move(couplings)) {
        if (!(std::abs(std::sin(phi)) > 1e-12))
            throw Error("ChainDesign: sin(phi) must be nonzero");
        if (!(Q > 0.0))
            throw Error("ChainDesign: Q must be positive");
        if (g.empty() || u.size() != g.size() + 1)
            throw Error("ChainDesign: need N cells and N+1 couplings");
        for (double v : g)
            if (!(v > 0.0))
                throw Error("ChainDesign: cell radii must be positive");
        for (double v : u)
            if (!(v > 0.0))
                throw Error("ChainDesign: couplings must be positive");
    }

    long cells() const { return static_cast<long>(g.size()); }

    /// Lossy resonance term of cell k:
    /// Z_k = 1 - g_k^2 + (u_k + u_{k+1})/g_k^2 - i g_k / Q.
    cx impedance(long k) const {
        const double gk = g[static_cast<std::size_t>(k - 1)];
        const double uk = u[static_cast<std::size_t>(k - 1)];
        const double uk1 = u[static_cast<std::size_t>(k)];
        const double loss = std::isinf(Q) ? 0.0 : gk / Q;
        return cx{1.0 - gk * gk + (uk + uk1) / (gk * gk), -loss};
    }
};

/// Three-term recurrence coefficients of the chain's amplitude equation:
/// a_k = -Z_k g_k^2 / u_{k+1}, b_k = u_k / u_{k+1}, f_k = 0.
inline RecurrenceCoefficients ccm_coefficients(const ChainDesign& d) {
    const std::size_t n = d.g.size();
    std::vector<cx> a(n), b(n), f(n, cx{0.0});
    for (std::size_t i = 0; i < n; ++i) {
        const double gk = d.g[i];
        a[i] = -d.impedance(static_cast<long>(i) + 1) * gk * gk / d.u[i + 1];
        b[i] = d.u[i] / d.u[i + 1];
    }
    return RecurrenceCoefficients(1, std::move(a), std::move(b), std::move(f));
}

namespace detail {

/// Real positive root of g^4 + p3 g^3 + p2 g^2 + p1 g + p0 nearest
/// `target`, found via the companion-matrix eigenvalues and polished with
/// a few Newton steps.
inline double quartic_root_near(double p3, double p2, double p1, double p0, double target) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = -p3;
    m(0, 1) = -p2;
    m(0, 2) = -p1;
    m(0, 3) = -p0;
    m(1, 0) = m(2, 1) = m(3, 2) = 1.0;
    const Eigen::EigenSolver<Eigen::Matrix4d> es(m);

    std::optional<double> best;
    for (int i = 0; i < 4; ++i) {
        const std::complex<double> z = es.eigenvalues()(i);
        if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z.real())))
            continue;
        double r = z.real();
        if (!(r > 0.0))
            continue;
        for (int it = 0; it < 8; ++it) {
            const double val = (((r + p3) * r + p2) * r + p1) * r + p0;
            const double der = ((4.0 * r + 3.0 * p3) * r + 2.0 * p2) * r + p1;
            if (std::abs(der) < 1e-300)
                break;
            const double step = val / der;
            r -= step;
            if (std::abs(step) < 1e-15 * std::abs(r))
                break;
        }
        if (!(r > 0.0))
            continue;
        if (!best || std::abs(r - target) < std::abs(*best - target))
            best = r;
    }
    if (!best)
        throw NoPhysicalRoot("quartic_root_near: no positive real root");
    return *best;
}

}  // namespace detail

/// Constant-gradient chain design: pick g_1 from the quartic
/// g^4 - c3 g^3 - g^2 + 2(cos phi - 1) u_1 = 0 with c3 = (cos phi - 1) /
/// (Q sin phi) (real positive root nearest 1), then alternate
/// u_{k+1} = (g_k^2 - g_k^4)/(cos phi - 1) - u_k with the same quartic at
/// u_{k+1} (root nearest g_k). The result makes the forward field an exact
/// constant-amplitude, constant-phase-advance solution.
inline ChainDesign design_constant_gradient(double u1, double phi, double Q, long cells) {
    if (!(u1 > 0.0))
        throw Error("design_constant_gradient: u1 must be positive");
    if (!(phi > 0.0 && phi < std::numbers::pi))
        throw Error("design_constant_gradient: phi must lie in (0, pi)");
    if (!(Q > 0.0))
        throw Error("design_constant_gradient: Q must be positive");
    if (cells < 1)
        throw Error("design_constant_gradient: need at least one cell");

    const double c = std::cos(phi) - 1.0;
    const double c3 = std::isinf(Q) ? 0.0 : c / (Q * std::sin(phi));

    std::vector<double> g;
    std::vector<double> u;
    g.reserve(static_cast<std::size_t>(cells));
    u.reserve(static_cast<std::size_t>(cells) + 1);
    u.push_back(u1);
    for (long k = 1; k <= cells; ++k) {
        const double uk = u.back();
        const double target = g.empty() ? 1.0 : g.back();
        const double gk = detail::quartic_root_near(-c3, -1.0, 0.0, 2.0 * c * uk, target);
        g.push_back(gk);
        const double next = (gk * gk - gk * gk * gk * gk) / c - uk;
        if (!(next > 0.0))
            throw NoPhysicalRoot("design_constant_gradient: coupling sequence left the "
                                 "physical range at cell " + std::to_string(k));
        u.push_back(next);
    }
    return ChainDesign(phi, Q, std::move(g), std::move(u));
}

struct BackwardField {
    RiccatiTrace trace;           // per-cell ratios of the backward field
    GridFunction y2;              // backward field, cumulative product from 1
    std::vector<double> phase_deviation;  // arg(y2_k) + (k-1) phi, unwrapped
};

/// Backward-field structure of a constant-gradient chain:
/// rho_k = -w_k / rho_{k-1} + e^{i phi} + w_k e^{-i phi} with coupling
/// ratio w_k = (u_k/u_{k+1})^ratio_exponent, seeded at cell 1 with the
/// characteristic root nearest e^{-i phi}. The field y2 is the cumulative
/// product from a unit start; the deviation tracks how far its phase
/// drifts from a uniform -phi per cell.
inline BackwardField backward_field(const ChainDesign& d, int ratio_exponent = 1) {
    const long n = d.cells();
    const cx fwd = std::exp(cx{0.0, d.phi});
    const cx bwd = std::exp(cx{0.0, -d.phi});

    auto ratio = [&](long k) {
        const double r = d.u[static_cast<std::size_t>(k - 1)] / d.u[static_cast<std::size_t>(k)];
        return std::pow(r, static_cast<double>(ratio_exponent));
    };

    // Seed: root of rho^2 + a rho + b at cell 1 (with the chosen coupling
    // exponent) closest to the pure backward phasor.
    const double w1 = ratio(1);
    const auto [r1, r2] = characteristic_roots(-(fwd + w1 * bwd), cx{w1});
    cx rho = (std::abs(r1 - bwd) <= std::abs(r2 - bwd)) ? r1 : r2;

    std::vector<cx> rhos;
    std::vector<cx> field;
    std::vector<double> deviation;
    rhos.reserve(static_cast<std::size_t>(n));
    field.reserve(static_cast<std::size_t>(n));
    deviation.reserve(static_cast<std::size_t>(n));

    cx y = 1.0;
    double dev = 0.0;
    field.push_back(y);
    deviation.push_back(dev);
    std::optional<long> diverged_at;
    rhos.push_back(rho);
    for (long k = 2; k <= n; ++k) {
        if (detail::rho_out_of_range(rho)) {
            diverged_at = k - 1;
            break;
        }
        y *= rho;
        dev += std::arg(rho * fwd);
        field.push_back(y);
        deviation.push_back(dev);
        if (k < n) {
            const double wk = ratio(k);
            rho = -wk / rho + fwd + wk * bwd;
            rhos.push_back(rho);
        }
    }
    return {RiccatiTrace{1, std::move(rhos), diverged_at},
            GridFunction(1, std::move(field)), std::move(deviation)};
}

}  // namespace splitrec
