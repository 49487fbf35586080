#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "splitrec/matrix_forms.hpp"
#include "splitrec/riccati.hpp"

using namespace splitrec;

namespace {

RecurrenceCoefficients constant_coeffs(std::size_t n, cx a, cx b, cx f = 0.0) {
    return RecurrenceCoefficients(1, std::vector<cx>(n, a), std::vector<cx>(n, b),
                                  std::vector<cx>(n, f));
}

}  // namespace

TEST_CASE("constant coefficients with characteristic-root splitting give a "
          "diagonal transfer matrix") {
    // rho^2 - 3 rho + 2: roots 2 and 1.
    const auto coeffs = constant_coeffs(5, -3.0, 2.0);
    const auto split = SplitSequences::constant(1, 5, cx{2.0}, cx{1.0});
    for (long k = 1; k <= 4; ++k) {
        const StepMatrix t = transfer_matrix(coeffs, split, k);
        REQUIRE(std::abs(t.m11 - cx{2.0}) < 1e-14);
        REQUIRE(std::abs(t.m22 - cx{1.0}) < 1e-14);
        REQUIRE(std::abs(t.m12) < 1e-14);
        REQUIRE(std::abs(t.m21) < 1e-14);
    }
}

TEST_CASE("transfer propagation matches direct recursion with forcing") {
    std::mt19937 rng(5u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cx> a(40), b(40), f(40), r1(40), r2(40);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = cx{u(rng), u(rng)};
        b[i] = cx{u(rng), u(rng)} + cx{1.5};
        f[i] = cx{u(rng), u(rng)};
        r1[i] = cx{u(rng) + 2.0, u(rng)};
        r2[i] = cx{u(rng) - 2.0, u(rng)};
    }
    const RecurrenceCoefficients coeffs(1, a, b, f);
    const SplitSequences split(1, r1, r2);
    const cx y1{0.5, -0.1}, y2{1.2, 0.3};
    const GridFunction y = solve_cauchy(coeffs, y1, y2, 40);

    const SplitState init = initial_split(coeffs, y1, y2, split.rho1(2), split.rho2(2));
    const TransferRun run = propagate_transfer(coeffs, split, init, 39);
    REQUIRE_FALSE(run.overflowed());
    double scale = 0.0;
    for (const cx& v : y.values())
        scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < run.states.size(); ++i) {
        const cx sum = run.states[i].y1 + run.states[i].y2;
        REQUIRE(std::abs(sum - y[2 + static_cast<long>(i)]) <= 1e-10 * scale);
    }
}

TEST_CASE("zero initial state stays zero without forcing") {
    const auto coeffs = constant_coeffs(10, cx{-1.0, 0.5}, cx{0.8});
    const auto split = SplitSequences::constant(1, 10, cx{1.5}, cx{0.4});
    const TransferRun run = propagate_transfer(coeffs, split, SplitState{0.0, 0.0}, 9);
    for (const SplitState& s : run.states) {
        REQUIRE(std::abs(s.y1) == 0.0);
        REQUIRE(std::abs(s.y2) == 0.0);
    }
}

TEST_CASE("scatter step describes the same linear relation as the transfer step") {
    std::mt19937 rng(17u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<cx> a(2), b(2), f(2), r1(2), r2(2);
        for (std::size_t i = 0; i < 2; ++i) {
            a[i] = cx{u(rng), u(rng)};
            b[i] = cx{u(rng), u(rng)} + cx{1.5};
            f[i] = cx{u(rng), u(rng)};
            r1[i] = cx{u(rng) + 2.0, u(rng)};
            r2[i] = cx{u(rng) - 2.0, u(rng)};
        }
        const RecurrenceCoefficients coeffs(1, a, b, f);
        const SplitSequences split(1, r1, r2);

        const StepMatrix t = transfer_matrix(coeffs, split, 1);
        const StepMatrix s = scatter_step(coeffs, split, 1);

        const cx y1k{u(rng), u(rng)}, y2k{u(rng), u(rng)};
        const cx y1n = t.m11 * y1k + t.m12 * y2k + t.forcing;
        const cx y2n = t.m21 * y1k + t.m22 * y2k + t.forcing2;

        // (y2_k, y1_{k+1}) from (y1_k, y2_{k+1}) must reproduce the pair.
        const cx out1 = s.m11 * y1k + s.m12 * y2n + s.forcing;
        const cx out2 = s.m21 * y1k + s.m22 * y2n + s.forcing2;
        const double scale =
            std::max({1.0, std::abs(y1k), std::abs(y2k), std::abs(y1n), std::abs(y2n)});
        REQUIRE(std::abs(out1 - y2k) <= 1e-12 * scale);
        REQUIRE(std::abs(out2 - y1n) <= 1e-12 * scale);
    }
}

TEST_CASE("scatter forcing vanishes for a homogeneous recurrence") {
    const auto coeffs = constant_coeffs(4, cx{-1.7, 0.2}, cx{0.9});
    const auto split = SplitSequences::constant(1, 4, cx{1.4, 0.3}, cx{-0.5});
    const StepMatrix s = scatter_step(coeffs, split, 2);
    REQUIRE(std::abs(s.forcing) == 0.0);
    REQUIRE(std::abs(s.forcing2) == 0.0);
}

TEST_CASE("cascade of pass-through steps is the identity span") {
    std::vector<StepMatrix> steps(5, StepMatrix{0.0, 1.0, 1.0, 0.0, 0.0, 0.0,
                                                MatrixForm::Scatter});
    const CumulativeScatter c = cascade_scatter(steps);
    REQUIRE(std::abs(c.s11) < 1e-15);
    REQUIRE(std::abs(c.s22) < 1e-15);
    REQUIRE(std::abs(c.s12 - cx{1.0}) < 1e-15);
    REQUIRE(std::abs(c.s21 - cx{1.0}) < 1e-15);
}

TEST_CASE("cascading a single step reproduces it") {
    const auto coeffs = constant_coeffs(3, cx{-2.5, 0.4}, cx{1.2});
    const auto split = SplitSequences::constant(1, 3, cx{1.8, 0.2}, cx{0.3, -0.6});
    const StepMatrix s = scatter_step(coeffs, split, 1);
    const CumulativeScatter c = cascade_scatter(std::span<const StepMatrix>(&s, 1));
    REQUIRE(std::abs(c.s11 - s.m11) < 1e-15);
    REQUIRE(std::abs(c.s12 - s.m12) < 1e-15);
    REQUIRE(std::abs(c.s21 - s.m21) < 1e-15);
    REQUIRE(std::abs(c.s22 - s.m22) < 1e-15);
}

TEST_CASE("star product is associative") {
    std::mt19937 rng(23u);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    auto random_span = [&] {
        CumulativeScatter c;
        c.s11 = cx{u(rng), u(rng)};
        c.s12 = cx{u(rng) + 1.0, u(rng)};
        c.s21 = cx{u(rng) + 1.0, u(rng)};
        c.s22 = cx{u(rng), u(rng)};
        c.c1 = cx{u(rng), u(rng)};
        c.c2 = cx{u(rng), u(rng)};
        return c;
    };
    for (int trial = 0; trial < 100; ++trial) {
        const CumulativeScatter a = random_span(), b = random_span(), c = random_span();
        const CumulativeScatter left = star_product(star_product(a, b), c);
        const CumulativeScatter right = star_product(a, star_product(b, c));
        for (auto [x, y] : {std::pair<cx, cx>{left.s11, right.s11},
                            {left.s12, right.s12},
                            {left.s21, right.s21},
                            {left.s22, right.s22},
                            {left.c1, right.c1},
                            {left.c2, right.c2}})
            REQUIRE(std::abs(x - y) < 1e-12);
    }
}

TEST_CASE("two-point scatter solve agrees with transfer elimination on small "
          "random problems") {
    std::mt19937 rng(29u);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int trial = 0; trial < 100; ++trial) {
        const long n = 20;
        std::vector<cx> a(n), b(n), f(n, cx{0.0}), r1(n), r2(n);
        for (long i = 0; i < n; ++i) {
            a[static_cast<std::size_t>(i)] = cx{u(rng), u(rng)} - cx{1.9};
            b[static_cast<std::size_t>(i)] = cx{0.95} + cx{u(rng) * 0.05, u(rng) * 0.05};
            r1[static_cast<std::size_t>(i)] = cx{0.99, 0.06} + cx{u(rng) * 0.1, 0.0};
            r2[static_cast<std::size_t>(i)] = cx{0.99, -0.06} - cx{u(rng) * 0.1, 0.0};
        }
        const RecurrenceCoefficients coeffs(1, a, b, f);
        const SplitSequences split(1, r1, r2);

        std::vector<StepMatrix> steps;
        for (long k = 1; k < n; ++k)
            steps.push_back(scatter_step(coeffs, split, k));
        const std::vector<SplitState> states = scatter_two_point(steps, cx{1.0}, cx{0.0});

        // Eliminate against the transfer sweep started from the same
        // recovered state at node 1.
        const TransferRun run = propagate_transfer(coeffs, split, states.front(), n, 1);
        REQUIRE_FALSE(run.overflowed());
        for (std::size_t i = 0; i < states.size(); ++i) {
            const double scale = std::max({1.0, std::abs(run.states[i].y1),
                                           std::abs(run.states[i].y2)});
            REQUIRE(std::abs(states[i].y1 - run.states[i].y1) <= 1e-9 * scale);
            REQUIRE(std::abs(states[i].y2 - run.states[i].y2) <= 1e-9 * scale);
        }
        // The terminal condition imposed by the sweep.
        REQUIRE(std::abs(states.back().y2) <= 1e-9);
    }
}

TEST_CASE("Riccati-consistent splitting decouples the scatter form too") {
    const auto coeffs = constant_coeffs(10, -3.0, 2.0);
    const auto split = SplitSequences::constant(1, 10, cx{2.0}, cx{1.0});
    for (long k = 1; k <= 9; ++k) {
        const StepMatrix s = scatter_step(coeffs, split, k);
        // No coupling between branches: the reflection-like entries vanish.
        REQUIRE(std::abs(s.m11) < 1e-14);
        REQUIRE(std::abs(s.m22) < 1e-14);
    }
}
