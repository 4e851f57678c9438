#include <doctest.h>

#include <cmath>

#include "regrate/operators.hpp"

using namespace regrate;

namespace {

Vector e(std::size_t dim, std::size_t i) {
    Vector v(dim);
    v[i] = 1.0;
    return v;
}

// every construction the library offers, over a shared fixed point
std::vector<Operator> construction_zoo(const Vector& p) {
    const std::size_t d = p.dim();
    std::vector<Operator> zoo;
    zoo.push_back(identity_op(p));
    zoo.push_back(contraction_about(p, 0.5));
    zoo.push_back(reflection_about(p));
    zoo.push_back(projection_onto_ball(p, 2.0));
    if (d >= 2) {
        zoo.push_back(rotation_about(p, 0, 1, 1.2345));
        Vector n(d);
        n[0] = 1.0;
        n[1] = -2.0;
        zoo.push_back(householder_about(p, n));
        zoo.push_back(compose({rotation_about(p, 0, 1, 0.4), contraction_about(p, 0.8)}));
    }
    zoo.push_back(averaged(reflection_about(p), 0.25));
    zoo.push_back(psc_from_nonexpansive(reflection_about(p), 0.5));
    zoo.push_back(psc_from_nonexpansive(contraction_about(p, 0.9), 0.3));
    zoo.push_back(convex_combination({identity_op(p), reflection_about(p)}, {0.25, 0.75}));
    return zoo;
}

}  // namespace

TEST_CASE("inner product basics") {
    CHECK(inner(e(3, 0), e(3, 0)) == 1.0);
    CHECK(inner(e(3, 0), e(3, 1)) == 0.0);
    CHECK(inner(Vector{1.0, 2.0}, Vector{3.0, 4.0}) == 11.0);
    CHECK_THROWS_AS(inner(Vector{1.0}, Vector{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("parallelogram law holds on sampled vectors") {
    SplitRng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + rng.next_below(8);
        Vector u(d), v(d);
        for (std::size_t i = 0; i < d; ++i) {
            u[i] = rng.uniform(-10.0, 10.0);
            v[i] = rng.uniform(-10.0, 10.0);
        }
        const double lhs = norm_squared(u + v) + norm_squared(u - v);
        const double rhs = 2.0 * (norm_squared(u) + norm_squared(v));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("apply basics") {
    const Vector p{0.0, 0.0};
    CHECK(apply(identity_op(p), Vector{3.0, -4.0}) == Vector{3.0, -4.0});
    CHECK(apply(reflection_about(p), Vector{1.0, 0.0}) == Vector{-1.0, 0.0});
    // contraction c = 0.5 about p = (1,1): (3,1) -> (2,1)
    const Vector q{1.0, 1.0};
    CHECK(apply(contraction_about(q, 0.5), Vector{3.0, 1.0}) == Vector{2.0, 1.0});
    CHECK_THROWS_AS(apply(identity_op(p), Vector{1.0}), std::invalid_argument);
}

TEST_CASE("averaged transform endpoints and zero map") {
    const Vector p{0.0};
    Operator t = reflection_about(p);

    Operator at1 = averaged(t, 1.0);
    Operator at0 = averaged(t, 0.0);
    Operator half = averaged(t, 0.5);
    for (double x : {-2.0, 0.25, 7.0}) {
        CHECK(apply(at1, Vector{x}) == Vector{x});
        CHECK(apply(at0, Vector{x})[0] == -x);
        CHECK(apply(half, Vector{x})[0] == 0.0);  // t x + (1-t)(-x) vanishes at t = 1/2
    }
    CHECK_THROWS_AS(averaged(t, 1.5), std::invalid_argument);
}

TEST_CASE("averaged evaluates through the shared lincomb path") {
    const Vector p{0.5, -1.0};
    SplitRng rng(11);
    Operator t = rotation_about(p, 0, 1, 0.77);
    for (double tv : {0.0, 0.25, 0.5, 1.0}) {
        Operator avg = averaged(t, tv);
        for (int trial = 0; trial < 50; ++trial) {
            Vector x{rng.uniform(-5, 5), rng.uniform(-5, 5)};
            const Vector direct = lincomb(tv, x, 1.0 - tv, apply(t, x));
            CHECK(apply(avg, x) == direct);  // bit-identical
        }
    }
}

TEST_CASE("averaged composition law") {
    const Vector p{1.0, 2.0, 0.0};
    SplitRng rng(12);
    Operator t = compose({rotation_about(p, 0, 2, 1.9), contraction_about(p, 0.6)});
    for (int trial = 0; trial < 100; ++trial) {
        const double t1 = rng.next_unit();
        const double t2 = rng.next_unit();
        Operator lhs = averaged(averaged(t, t1), t2);
        Operator rhs = averaged(t, 1.0 - (1.0 - t1) * (1.0 - t2));
        Vector x{rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)};
        CHECK(dist(apply(lhs, x), apply(rhs, x)) <= 1e-12);
    }
}

TEST_CASE("psc_from_nonexpansive: k = 0 returns the base map") {
    const Vector p{0.0};
    Operator u = contraction_about(p, 0.5);
    Operator t = psc_from_nonexpansive(u, 0.0);
    CHECK(t.kind() == "contraction-about-point");
    CHECK(t.k_claimed() == 0.0);
}

TEST_CASE("psc_from_nonexpansive: -I at k = 1/2 gives x -> -3x with equality in the defining inequality") {
    const Vector p{0.0};
    Operator t = psc_from_nonexpansive(reflection_about(p), 0.5);
    CHECK(t.k_claimed() == 0.5);
    CHECK(apply(t, Vector{1.0})[0] == -3.0);
    CHECK(apply(t, Vector{-2.0})[0] == 6.0);

    // ||Tx - Ty||^2 = 9||x-y||^2 = ||x-y||^2 + (1/2)||4(x-y)||^2: equality at k = 1/2
    SplitRng rng(77);
    auto pairs = sample_pairs(1, 1000, 10.0, rng);
    CHECK(check_kpsc(t, 0.5, pairs).violations() == 0);

    // at k = 0.4 the pair (0, e1) already violates: 9 > 1 + 0.4*16 = 7.4
    std::vector<PairSample> single = {{Vector{0.0}, Vector{1.0}}};
    auto bad = check_kpsc(t, 0.4, single);
    CHECK(bad.violations() == 1);
    CHECK(bad.max_excess() == doctest::Approx(9.0 - 7.4));
}

TEST_CASE("psc_from_nonexpansive: identity is a fixed point of the construction") {
    const Vector p{1.0, -3.0};
    Operator t = psc_from_nonexpansive(identity_op(p), 0.7);
    SplitRng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Vector x{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        CHECK(dist(apply(t, x), x) <= 1e-12);
    }
}

TEST_CASE("psc_from_nonexpansive round-trips through averaged") {
    const Vector p{0.25, 0.5};
    SplitRng rng(6);
    for (double k : {0.1, 0.3, 0.5, 0.9}) {
        Operator u = compose({rotation_about(p, 0, 1, 2.1), projection_onto_ball(p, 1.5)});
        Operator t = psc_from_nonexpansive(u, k);
        Operator back = averaged(t, k);
        for (int trial = 0; trial < 50; ++trial) {
            Vector x{rng.uniform(-8, 8), rng.uniform(-8, 8)};
            CHECK(dist(apply(back, x), apply(u, x)) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(psc_from_nonexpansive(identity_op(p), 1.0), std::invalid_argument);
}

TEST_CASE("convex combination basics") {
    const Vector p{0.0, 0.0};
    Operator t = rotation_about(p, 0, 1, 0.3);
    Operator single = convex_combination({t}, {1.0});
    CHECK(single.kind() == "rotation");

    Operator zero = convex_combination({identity_op(p), reflection_about(p)}, {0.5, 0.5});
    SplitRng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Vector x{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        CHECK(norm(apply(zero, x)) == 0.0);
    }

    auto pairs = sample_pairs(2, 1000, 10.0, rng);
    Operator mix = convex_combination({rotation_about(p, 0, 1, 1.0), contraction_about(p, 0.7)}, {0.6, 0.4});
    CHECK(check_nonexpansive(mix, pairs).violations() == 0);

    CHECK_THROWS_AS(convex_combination({identity_op(p)}, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(convex_combination({identity_op(p), reflection_about(p)}, {1.5, -0.5}),
                    std::invalid_argument);
}

TEST_CASE("check_kpsc / check_nonexpansive on canonical maps") {
    const Vector p{0.0, 0.0};
    SplitRng rng(8);
    auto pairs = sample_pairs(2, 500, 10.0, rng);

    CHECK(check_kpsc(identity_op(p), 0.0, pairs).violations() == 0);
    CHECK(check_nonexpansive(rotation_about(p, 0, 1, 2.7), pairs).violations() == 0);

    // x -> 2x expands: violation on (0, e1)
    Operator doubling = linear_about(p, {{2.0, 0.0}, {0.0, 2.0}}, 0.0);
    std::vector<PairSample> single = {{Vector{0.0, 0.0}, Vector{1.0, 0.0}}};
    CHECK(check_nonexpansive(doubling, single).violations() == 1);
}

TEST_CASE("lipschitz_bound values and sampled bound") {
    CHECK(lipschitz_bound(0.0) == 1.0);
    CHECK(lipschitz_bound(0.5) == 3.0);
    CHECK(lipschitz_bound(0.9) == doctest::Approx(19.0));
    CHECK_THROWS_AS(lipschitz_bound(1.0), std::invalid_argument);

    // x -> -3x is 3-Lipschitz exactly, matching lipschitz_bound(1/2)
    const Vector p{0.0};
    Operator t = psc_from_nonexpansive(reflection_about(p), 0.5);
    SplitRng rng(9);
    auto pairs = sample_pairs(1, 500, 10.0, rng);
    CHECK(check_lipschitz(t, pairs).violations() == 0);
}

TEST_CASE("every construction satisfies its claimed constants on seeded samples") {
    SplitRng rng(2024);
    for (std::size_t d : {1u, 2u, 4u, 7u}) {
        Vector p(d);
        for (std::size_t i = 0; i < d; ++i) p[i] = rng.uniform(-2.0, 2.0);
        const double radius = 10.0 * norm(p) + 10.0;
        auto pairs = sample_pairs(d, 1000, radius, rng.fork(d));
        for (const auto& op : construction_zoo(p)) {
            CAPTURE(op.kind());
            CAPTURE(d);
            auto fixed = check_fixed_point(op);
            CHECK(fixed.violations() == 0);
            auto kpsc = check_kpsc(op, op.k_claimed(), pairs);
            CHECK(kpsc.checked() == 1000);
            CHECK(kpsc.violations() == 0);
            CHECK(check_lipschitz(op, pairs).violations() == 0);
        }
    }
}
