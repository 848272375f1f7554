#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qid/tvbounds.hpp"

using namespace qid;
using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

TrigPoly poly1d(std::initializer_list<std::pair<int, cplx>> terms) {
    TrigPoly p(1);
    for (const auto& [e, q] : terms) p.add_term({e}, q);
    return p;
}

TrigPoly random_poly(std::mt19937_64& rng, int d, int max_terms) {
    std::uniform_int_distribution<int> uterms(1, max_terms), ucoef(-3, 3), uexp(-4, 4);
    TrigPoly p(d);
    int terms = uterms(rng);
    for (int i = 0; i < terms; ++i) {
        std::vector<int> e(static_cast<size_t>(d));
        for (auto& x : e) x = uexp(rng);
        p.add_term(std::move(e), cplx(ucoef(rng), ucoef(rng)));
    }
    if (p.coefficients().empty()) p.add_term(std::vector<int>(static_cast<size_t>(d), 1), {1.0, 0.0});
    return p;
}

}  // namespace

TEST_CASE("set_partitions: Bell numbers up to n = 5") {
    CHECK(set_partitions(0).size() == 1);
    CHECK(set_partitions(1).size() == 1);
    CHECK(set_partitions(2).size() == 2);
    CHECK(set_partitions(3).size() == 5);
    CHECK(set_partitions(4).size() == 15);
    CHECK(set_partitions(5).size() == 52);
}

TEST_CASE("exact_power_norm: single phase term") {
    auto p = poly1d({{1, {1.0, 0.0}}});
    for (int k : {1, 2, 5, 9}) CHECK(exact_power_norm(p, k) == doctest::Approx(1.0));
}

TEST_CASE("exact_power_norm: binomial") {
    auto p = poly1d({{0, {1.0, 0.0}}, {1, {1.0, 0.0}}});
    CHECK(exact_power_norm(p, 2) == doctest::Approx(4.0));
    CHECK(exact_power_norm(p, 5) == doctest::Approx(32.0));
}

TEST_CASE("exact_power_norm: frozen cubic expansion") {
    // (1 - z + z^2)^3 has coefficients 1,-3,6,-7,6,-3,1: norm 27
    auto p = poly1d({{0, {1.0, 0.0}}, {1, {-1.0, 0.0}}, {2, {1.0, 0.0}}});
    CHECK(exact_power_norm(p, 3) == doctest::Approx(27.0).epsilon(1e-14));
}

TEST_CASE("exact_power_norm: budget guard") {
    TrigPoly p(2);
    p.add_term({0, 0}, {1.0, 0.0});
    p.add_term({1, 3}, {1.0, 0.0});
    p.add_term({-2, 1}, {0.5, 0.0});
    CHECK_THROWS_AS(exact_power_norm(p, 3, 4), std::runtime_error);
}

TEST_CASE("Lemma-8 bounds for the pure phase e^{it}") {
    auto p = poly1d({{1, {1.0, 0.0}}});
    Lemma8Bounds b(p);
    CHECK(b.S() == doctest::Approx(1.0).epsilon(1e-15));
    // k = 1: the empty-subset term vanishes (|k*alpha - 1| = 0) and the
    // derivative term gives exactly pi/sqrt(6)
    CHECK(b.refined_bound(1) == doctest::Approx(kPi / std::sqrt(6.0)).epsilon(1e-12));
    // k = 3 by hand: (pi/sqrt 6) * (|3-1| * S^3 + 3 * S^2 * sup|phi'|) = 5 pi / sqrt 6
    CHECK(b.refined_bound(3) == doctest::Approx(5.0 * kPi / std::sqrt(6.0)).epsilon(1e-12));
    // the k-free constant keeps the empty-subset term (|alpha|+1 = 2):
    // A = (pi/sqrt 6) * (2 + 1)
    CHECK(b.A() == doctest::Approx(3.0 * kPi / std::sqrt(6.0)).epsilon(1e-12));
    for (int k : {1, 2, 3, 4, 5, 6})
        CHECK(b.bound_from_constants(k) >= exact_power_norm(p, k));
}

TEST_CASE("Lemma-8 bounds for a constant polynomial") {
    auto p = poly1d({{0, {0.7, 0.0}}});
    Lemma8Bounds b(p);
    CHECK(b.S() == doctest::Approx(0.7));
    for (int k : {1, 2, 4}) {
        double exact = std::pow(0.7, k);
        CHECK(exact_power_norm(p, k) == doctest::Approx(exact));
        CHECK(b.bound_from_constants(k) >= exact);
        CHECK(b.refined_bound(k) >= exact);
        CHECK(std::isfinite(b.bound_from_constants(k)));
    }
}

TEST_CASE("Lemma-8 k = 1 bound reduces to the first-derivative form") {
    // (pi/sqrt 6)^d sum_U prod_{j notin U} |alpha_j - 1| * sup |d^U phi|
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 4; ++rep) {
        auto p = random_poly(rng, 1, 4);
        Lemma8Bounds b(p);
        double expect = 0.0;
        double alpha = p.min_exponents()[0];
        // U = {}: |alpha - 1| * S; U = {1}: sup|phi'| <= ||phi'||
        auto bc = bound_constants(p);
        double sup_d = 0.0;
        {
            auto der = p.derivative({0});
            // loose but valid comparison cap: Wiener norm of the derivative
            sup_d = der.norm();
        }
        expect = (kPi / std::sqrt(6.0)) * (std::abs(alpha - 1.0) * bc.S_phi + sup_d);
        CHECK(b.refined_bound(1) <= expect + 1e-9);
        CHECK(b.refined_bound(1) >= p.norm() - 1e-9);
    }
}

TEST_CASE("bound_from_constants: contractive polynomials decay") {
    auto p = poly1d({{1, {0.4, 0.0}}});
    Lemma8Bounds b(p);
    CHECK(b.S() == doctest::Approx(0.4));
    CHECK(b.bound_from_constants(40) < 1e-10);
}

TEST_CASE("bound/exact ratio for 1 + e^{it} is A * k^d") {
    auto p = poly1d({{0, {1.0, 0.0}}, {1, {1.0, 0.0}}});
    Lemma8Bounds b(p);
    CHECK(b.S() == doctest::Approx(2.0).epsilon(1e-12));
    for (int k = 1; k <= 10; ++k) {
        double exact = std::pow(2.0, k);
        CHECK(exact_power_norm(p, k) == doctest::Approx(exact).epsilon(1e-12));
        double ratio = b.bound_from_constants(k) / exact;
        CHECK(ratio == doctest::Approx(b.A() * k).epsilon(1e-12));
        CHECK(ratio >= 1.0);
    }
}

TEST_CASE("random d = 2 polynomial has finite positive constants") {
    std::mt19937_64 rng(17);
    auto p = random_poly(rng, 2, 5);
    auto bc = bound_constants(p);
    CHECK(bc.S_phi > 0.0);
    CHECK(std::isfinite(bc.A_phi));
    CHECK(bc.A_phi > 0.0);
}

TEST_CASE("soundness sweep: exact norm below both bounds") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> ud(1, 3);
    for (int rep = 0; rep < 24; ++rep) {
        auto p = random_poly(rng, ud(rng), 6);
        Lemma8Bounds b(p);
        for (int k = 1; k <= 6; ++k) {
            double exact = exact_power_norm(p, k);
            CHECK(exact <= b.refined_bound(k) * (1 + 1e-12) + 1e-12);
            CHECK(exact <= b.bound_from_constants(k) * (1 + 1e-12) + 1e-12);
            CHECK(exact <= p.norm() * std::pow(p.norm(), k - 1) + 1e-9);  // submultiplicativity
        }
    }
}

TEST_CASE("rational_basis_lift: declared irrational pair {1, sqrt 2}") {
    QLinearSet set;
    set.generator_values = {1.0, std::numbers::sqrt2};
    set.coords = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    auto lift = rational_basis_lift(set);
    CHECK(lift.dimension() == 2);
    CHECK(lift.kappa == 1);
    CHECK(lift.exponents[0] == std::vector<long long>{1, 0});
    CHECK(lift.exponents[1] == std::vector<long long>{0, 1});
    CHECK(lift.basis_values[0] == doctest::Approx(1.0));
    CHECK(lift.basis_values[1] == doctest::Approx(std::numbers::sqrt2));
}

TEST_CASE("rational_basis_lift: {1/2, 1/3} lands on the 1/6 lattice") {
    auto lift = rational_basis_lift(QLinearSet::from_rationals({Rat(1, 2), Rat(1, 3)}));
    CHECK(lift.dimension() == 1);
    CHECK(lift.kappa == 3);
    CHECK(lift.beta_tilde[0] == doctest::Approx(1.0 / 6.0));
    CHECK(lift.exponents[0] == std::vector<long long>{3});
    CHECK(lift.exponents[1] == std::vector<long long>{2});
}

TEST_CASE("rational_basis_lift: {2, 4, 6} stays one-dimensional") {
    auto lift = rational_basis_lift(QLinearSet::from_rationals({Rat(2), Rat(4), Rat(6)}));
    CHECK(lift.dimension() == 1);
    CHECK(lift.kappa == 1);
    CHECK(lift.exponents[0] == std::vector<long long>{1});
    CHECK(lift.exponents[1] == std::vector<long long>{2});
    CHECK(lift.exponents[2] == std::vector<long long>{3});
    CHECK(lift.frequency_of(lift.exponents[2]) == doctest::Approx(6.0));
}

TEST_CASE("rational_basis_lift rejects duplicate frequencies") {
    CHECK_THROWS_AS(rational_basis_lift(QLinearSet::from_rationals({Rat(1), Rat(1)})),
                    std::invalid_argument);
}

TEST_CASE("lift norm equality: ||lifted phi^k|| matches the real-frequency expansion") {
    // distinct real frequencies, exact rational bookkeeping on the real line
    std::vector<Rat> freqs = {Rat(1, 2), Rat(1, 3), Rat(5, 6), Rat(-1, 4)};
    std::vector<cplx> weights = {{0.4, 0.1}, {-0.3, 0.0}, {0.2, -0.2}, {0.35, 0.0}};
    auto lift = rational_basis_lift(QLinearSet::from_rationals(freqs));
    auto lifted = lift_to_trigpoly(lift, weights);
    CHECK(lifted.terms() == freqs.size());

    for (int k = 1; k <= 4; ++k) {
        // direct k-fold expansion keyed by exact rational frequency sums
        std::map<Rat, cplx> acc;
        acc[Rat(0)] = {1.0, 0.0};
        for (int step = 0; step < k; ++step) {
            std::map<Rat, cplx> next;
            for (const auto& [fa, qa] : acc)
                for (size_t m = 0; m < freqs.size(); ++m) next[fa + freqs[m]] += qa * weights[m];
            acc = std::move(next);
        }
        double direct = 0.0;
        for (const auto& [f, q] : acc) direct += std::abs(q);
        CHECK(exact_power_norm(lifted, k) == doctest::Approx(direct).epsilon(1e-12));
    }
}
