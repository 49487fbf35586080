#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <numbers>

#include "splitrec/cavity_chain.hpp"

using namespace splitrec;

namespace {

const double kPhi = 2.0 * std::numbers::pi / 3.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("chain coefficients from geometry") {
    SECTION("uniform chain gives constant a and b = 1") {
        const ChainDesign d(kPhi, 1e4, std::vector<double>(10, 1.02),
                            std::vector<double>(11, 0.05));
        const RecurrenceCoefficients c = ccm_coefficients(d);
        REQUIRE(std::abs(c.b(4) - cx{1.0}) < 1e-15);
        REQUIRE(std::abs(c.a(2) - c.a(9)) < 1e-15);
    }
    SECTION("lossless chain has real coefficients") {
        const ChainDesign d(kPhi, kInf, std::vector<double>(5, 0.98),
                            std::vector<double>(6, 0.04));
        const RecurrenceCoefficients c = ccm_coefficients(d);
        for (long k = 1; k <= 5; ++k)
            REQUIRE(c.a(k).imag() == 0.0);
    }
    SECTION("coupling products telescope") {
        const ChainDesign d = design_constant_gradient(0.05, kPhi, 1e4, 60);
        const RecurrenceCoefficients c = ccm_coefficients(d);
        cx prod = 1.0;
        for (long k = 1; k <= d.cells(); ++k)
            prod *= c.b(k);
        const double expect = d.u.front() / d.u.back();
        REQUIRE(std::abs(prod - cx{expect}) <= 1e-13 * expect);
    }
}

TEST_CASE("constant-gradient design") {
    SECTION("lossless first cell has the closed-form radius") {
        const ChainDesign d = design_constant_gradient(0.03, kPhi, kInf, 1);
        const double g1 = std::sqrt((1.0 + std::sqrt(1.0 + 12.0 * 0.03)) / 2.0);
        REQUIRE(d.g[0] == Catch::Approx(g1).margin(1e-10));
    }
    SECTION("loss correction to the first cell is small") {
        const ChainDesign lossy = design_constant_gradient(0.03, kPhi, 1e4, 1);
        const double g1 = std::sqrt((1.0 + std::sqrt(1.0 + 12.0 * 0.03)) / 2.0);
        REQUIRE(std::abs(lossy.g[0] - g1) < 1e-3);
        REQUIRE(lossy.g[0] != g1);
    }
    SECTION("design satisfies the flat-forward-field condition exactly") {
        for (double u1 : {0.1, 0.05, 0.03, 0.02}) {
            const ChainDesign d = design_constant_gradient(u1, kPhi, 1e4, 100);
            const cx fwd = std::exp(cx{0.0, kPhi});
            const cx bwd = std::exp(cx{0.0, -kPhi});
            for (long k = 1; k <= d.cells(); ++k) {
                const double gk = d.g[static_cast<std::size_t>(k - 1)];
                const cx z = d.impedance(k);
                const cx rhs = (fwd * d.u[static_cast<std::size_t>(k)] +
                                bwd * d.u[static_cast<std::size_t>(k - 1)]) /
                               (gk * gk);
                REQUIRE(std::abs(z - rhs) <= 1e-12 * std::abs(z));
            }
        }
    }
    SECTION("derivation closure: u_k is recovered from g_k") {
        const double c = std::cos(kPhi) - 1.0;
        const double c3 = c / (1e4 * std::sin(kPhi));
        const ChainDesign d = design_constant_gradient(0.05, kPhi, 1e4, 100);
        for (std::size_t i = 0; i < d.g.size(); ++i) {
            const double g = d.g[i];
            const double u = (g * g - g * g * g * g + c3 * g * g * g) / (2.0 * c);
            REQUIRE(u == Catch::Approx(d.u[i]).epsilon(1e-12));
        }
    }
    SECTION("couplings decrease and radii are monotone") {
        for (double u1 : {0.1, 0.05, 0.02}) {
            const ChainDesign d = design_constant_gradient(u1, kPhi, 1e4, 100);
            for (std::size_t i = 1; i < d.u.size(); ++i)
                REQUIRE(d.u[i] < d.u[i - 1]);
            for (std::size_t i = 1; i < d.g.size(); ++i)
                REQUIRE(d.g[i] <= d.g[i - 1] + 1e-12);
        }
    }
    SECTION("invalid parameters are rejected") {
        REQUIRE_THROWS_AS(design_constant_gradient(-0.1, kPhi, 1e4, 10), Error);
        REQUIRE_THROWS_AS(design_constant_gradient(0.03, 4.0, 1e4, 10), Error);
        REQUIRE_THROWS_AS(design_constant_gradient(0.03, kPhi, 0.0, 10), Error);
    }
}

TEST_CASE("backward field of the designed chain") {
    SECTION("uniform lossless chain sits at the backward fixed point") {
        // b = 1 throughout: rho^2 - 2 cos(phi) rho + 1 has roots e^{+-i phi}.
        const ChainDesign d(kPhi, kInf, std::vector<double>(40, 1.0),
                            std::vector<double>(41, 0.05));
        const BackwardField bf = backward_field(d);
        const cx bwd = std::exp(cx{0.0, -kPhi});
        for (const cx& r : bf.trace.rho)
            REQUIRE(std::abs(r - bwd) < 1e-12);
        for (double dev : bf.phase_deviation)
            REQUIRE(std::abs(dev) < 1e-10);
        for (const cx& v : bf.y2.values())
            REQUIRE(std::abs(std::abs(v) - 1.0) < 1e-12);
    }
    SECTION("constant-gradient chains grow the backward field") {
        for (double u1 : {0.1, 0.05, 0.02}) {
            const ChainDesign d = design_constant_gradient(u1, kPhi, 1e4, 100);
            const BackwardField bf = backward_field(d);
            const auto& v = bf.y2.values();
            REQUIRE(v.size() == 100);
            REQUIRE(std::abs(v.back()) > std::abs(v.front()));
        }
    }
    SECTION("small initial coupling inflates the phase deviation") {
        // Lossless: at finite Q a u1 = 0.001 chain exhausts its coupling
        // budget after a few cells and cannot reach 100 cells.
        auto span = [](double u1) {
            const ChainDesign d = design_constant_gradient(u1, kPhi, kInf, 100);
            const BackwardField bf = backward_field(d);
            double m = 0.0;
            for (double v : bf.phase_deviation)
                m = std::max(m, std::abs(v));
            return m;
        };
        REQUIRE(span(0.001) > span(0.1));
    }
    SECTION("cubed-ratio variant stays finite and qualitatively similar") {
        const ChainDesign d = design_constant_gradient(0.1, kPhi, 1e4, 100);
        const BackwardField bf = backward_field(d, 3);
        REQUIRE_FALSE(bf.trace.diverged());
        REQUIRE(std::abs(bf.y2.values().back()) > std::abs(bf.y2.values().front()));
    }
}

TEST_CASE("quartic root selection rejects impossible cases") {
    // g^4 + g^2 + 1 has no real roots at all.
    REQUIRE_THROWS_AS(detail::quartic_root_near(0.0, 1.0, 0.0, 1.0, 1.0), NoPhysicalRoot);
}

TEST_CASE("chain validation") {
    REQUIRE_THROWS_AS(ChainDesign(kPhi, 1e4, {1.0}, {0.1}), Error);       // u too short
    REQUIRE_THROWS_AS(ChainDesign(kPhi, 1e4, {-1.0}, {0.1, 0.1}), Error);  // negative g
    REQUIRE_THROWS_AS(ChainDesign(std::numbers::pi, 1e4, {1.0}, {0.1, 0.1}), Error);
}
