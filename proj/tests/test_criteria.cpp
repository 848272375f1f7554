#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "qid/criteria.hpp"

using namespace qid;
constexpr double kPi = std::numbers::pi;

namespace {

MixtureDistribution example1() {
    return MixtureDistribution::make(Rat(1, 2), AtomicMeasure::dirac(Loc(Rat(0))),
                                     Rat(3, 10), GridDensity::triangular(-1.0, 0.0, 1.0),
                                     Rat(1, 5), SingularSpec::classical_cantor());
}

MixtureDistribution example2() {
    return MixtureDistribution::make(Rat(1, 2), AtomicMeasure::dirac(Loc(Rat(0))),
                                     Rat(3, 10), GridDensity::uniform(0.0, 1.0),
                                     Rat(1, 5), SingularSpec::classical_cantor());
}

MixtureDistribution example3() {
    return MixtureDistribution::make(Rat(1, 2), AtomicMeasure::dirac(Loc(Rat(0))),
                                     Rat(0), std::nullopt,
                                     Rat(1, 2), SingularSpec::factorial_bernoulli());
}

MixtureDistribution example4() {
    return MixtureDistribution::make(Rat(1, 2), AtomicMeasure::dirac(Loc(Rat(1))),
                                     Rat(3, 10), GridDensity::uniform(0.0, 1.0),
                                     Rat(1, 5), SingularSpec::classical_cantor());
}

}  // namespace

TEST_CASE("dominated_check: worked cases") {
    auto [ok1, m1] = dominated_check(example1());
    CHECK(ok1);
    CHECK(m1 == doctest::Approx(0.3).epsilon(1e-12));

    auto [ok3, m3] = dominated_check(example3());
    CHECK(!ok3);
    CHECK(m3 == doctest::Approx(0.0).epsilon(1e-12));

    auto pure = MixtureDistribution::make(Rat(2, 5), AtomicMeasure::dirac(Loc(Rat(0))),
                                          Rat(3, 5), GridDensity::uniform(0.0, 1.0));
    auto [ok0, m0] = dominated_check(pure);
    CHECK(ok0);
}

TEST_CASE("rid_criteria: the worked examples") {
    auto r2 = rid_criteria(example2());
    CHECK(r2.verdict == RidVerdict::rid);
    CHECK(r2.dominated);
    CHECK(r2.cond_ii == CondVerdict::certified_yes);
    CHECK(r2.cond_iii == CondVerdict::certified_yes);
    CHECK(r2.inf_f_lower > 0.0);
    CHECK(!r2.inconsistency);

    auto r4 = rid_criteria(example4());
    CHECK(r4.verdict == RidVerdict::rid);

    auto r3 = rid_criteria(example3());
    CHECK(r3.verdict == RidVerdict::precondition_failed);
    CHECK(!r3.dominated);
}

TEST_CASE("rid_criteria refuses an empty discrete part") {
    // default-constructed mixture: no atoms to certify
    auto rep = rid_criteria(MixtureDistribution{});
    CHECK(rep.verdict == RidVerdict::precondition_failed);
    REQUIRE(!rep.notes.empty());
    CHECK(rep.notes[0].find("mu_d") != std::string::npos);
}

TEST_CASE("ratio_test: invariant under shifts (point mass)") {
    auto F = MixtureDistribution::pure_discrete(AtomicMeasure::dirac(Loc(Rat(5, 3))));
    std::vector<double> ts = {-11.0, -2.0, 0.0, 1.5, 7.0, 100.0};
    for (double tau : {0.5, 1.0, kPi}) {
        for (const auto& p : ratio_test(F, tau, ts)) {
            CHECK(!p.f_zero);
            CHECK(p.value == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("ratio_test_exact_pi: the factorial counterexample diverges") {
    auto F = example3();
    std::vector<BigInt> probes;
    for (int n = 3; n <= 10; ++n) probes.push_back(big_factorial(2 * n));
    auto seq = ratio_test_exact_pi(F, BigInt(1), probes);
    REQUIRE(seq.size() == 8);

    double prev = 0.0;
    for (size_t i = 0; i < seq.size(); ++i) {
        int n = 3 + static_cast<int>(i);
        CHECK(!seq[i].f_zero);
        // oracle: ratio = 1/(1 - R_n)^2 with R_n the k > 2n tail product
        double rn = 1.0;
        for (int k = 2 * n + 1; k <= 2 * n + 60; ++k) {
            double angle = kPi * to_double(Rat(big_factorial(2 * n), big_factorial(k)));
            rn *= std::cos(angle);
            if (angle < 1e-9) break;
        }
        double expect = 1.0 / ((1.0 - rn) * (1.0 - rn));
        CHECK(seq[i].value == doctest::Approx(expect).epsilon(1e-9));
        CHECK(seq[i].value > prev);
        prev = seq[i].value;
    }
    CHECK(seq[5].value > 1e3);  // n = 8
    CHECK(ratio_diverging(seq));
}

TEST_CASE("ratio_test: bounded along a RID mixture") {
    // compound-Poisson-type discrete law: f = exp{0.3 (e^{it} - 1)} is zero-free
    std::vector<AtomicMeasure::Atom> atoms;
    double fact = 1.0;
    for (int k = 0; k <= 20; ++k) {
        if (k > 0) fact *= k;
        atoms.push_back({Loc(Rat(k)), std::exp(-0.3) * std::pow(0.3, k) / fact});
    }
    auto F = MixtureDistribution::pure_discrete(AtomicMeasure::from_atoms(std::move(atoms)));
    std::vector<double> ts;
    for (double t = -1000.0; t <= 1000.0; t += 11.37) ts.push_back(t);
    for (double tau : {1.0, kPi}) {
        auto seq = ratio_test(F, tau, ts);
        double mx = 0.0;
        for (const auto& p : seq) {
            CHECK(!p.f_zero);
            mx = std::max(mx, p.value);
        }
        CHECK(mx < 5.0);  // |f| >= e^{-0.6} pins the ratio well below any divergence call
        CHECK(!ratio_diverging(seq));
    }
}

TEST_CASE("pure_singular_verdict: threshold arithmetic") {
    CHECK(pure_singular_verdict(2, Rat(1), Rat(1, 5), Rat(1, 2)) ==
          SingularityVerdict::not_pure_singular);
    CHECK(pure_singular_verdict(5, Rat(1), Rat(49, 100), Rat(1, 2)) ==
          SingularityVerdict::not_pure_singular);
    // alpha = 0.1 < (2/3) * 0.9
    CHECK(pure_singular_verdict(2, Rat(1, 10), Rat(9, 20), Rat(1, 2)) ==
          SingularityVerdict::inconclusive);
    // declaration wins regardless of the numbers
    CHECK(pure_singular_verdict(2, Rat(1, 10), Rat(9, 20), Rat(1, 2), true) ==
          SingularityVerdict::pure_singular);
    // exact boundary: alpha = (n_a/(n_a+1)) (c_s/c_d) counts as reached
    CHECK(pure_singular_verdict(2, Rat(3, 10), Rat(9, 40), Rat(1, 2)) ==
          SingularityVerdict::not_pure_singular);
    CHECK_THROWS_AS(pure_singular_verdict(1, Rat(1), Rat(1, 5), Rat(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(pure_singular_verdict(2, Rat(2), Rat(1, 5), Rat(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(pure_singular_verdict(2, Rat(1), Rat(1, 2), Rat(1, 2)), std::invalid_argument);
}

TEST_CASE("decomposition_check: example-4 square") {
    auto F4 = example4();
    auto rep = decomposition_check(F4, F4);
    CHECK(rep.full.verdict == RidVerdict::rid);
    CHECK(rep.part1.verdict == RidVerdict::rid);
    CHECK(rep.part2.verdict == RidVerdict::rid);
    CHECK(rep.factor1_dominated);
    CHECK(rep.factor2_dominated);
    CHECK(!rep.inconsistency);
}

TEST_CASE("decomposition_check: a point-mass factor changes nothing") {
    auto F1 = example2();
    auto delta = MixtureDistribution::pure_discrete(AtomicMeasure::dirac(Loc(Rat(3))));
    auto rep = decomposition_check(F1, delta);
    CHECK(rep.full.verdict == rep.part1.verdict);
    CHECK(rep.part2.verdict == RidVerdict::rid);
    CHECK(!rep.inconsistency);
}

TEST_CASE("decomposition_check: unclassified product carries the warning") {
    DeclaredGeneric g;
    g.cf = [](double t) { return SingularSpec::classical_cantor().cf(t); };
    g.mean_abs_bound = 1.0;
    auto F = MixtureDistribution::make(Rat(7, 10), AtomicMeasure::dirac(Loc(Rat(0))),
                                       Rat(0), std::nullopt,
                                       Rat(3, 10), SingularSpec(SingularSpec::Node(g)));
    auto rep = decomposition_check(F, F);
    bool has_warning = false;
    for (const auto& n : rep.notes) has_warning = has_warning || n.find("unclassified") != std::string::npos;
    CHECK(has_warning);
    CHECK(rep.full.verdict == RidVerdict::precondition_failed);
}

TEST_CASE("convolution_power_domination: worked cases") {
    auto F = MixtureDistribution::make(Rat(3, 5), AtomicMeasure::dirac(Loc(Rat(0))),
                                       Rat(1, 5), GridDensity::uniform(0.0, 1.0),
                                       Rat(1, 5), SingularSpec::classical_cantor());
    auto p1 = convolution_power_domination(F, 1);
    CHECK(!p1.lost);
    // boundary case n = 3: 3 * (1/5) * (3/5)^2 = 27/125 = (3/5)^3
    auto p3 = convolution_power_domination(F, 3);
    CHECK(p3.pairwise_lower == Rat(27, 125));
    CHECK(p3.loss_threshold == Rat(27, 125));
    CHECK(p3.lost);
    // all n >= c_d/c_s = 3 report loss
    for (int n = 3; n <= 12; ++n) CHECK(convolution_power_domination(F, n).lost);
    CHECK_THROWS_AS(convolution_power_domination(F, 0), std::invalid_argument);
}

TEST_CASE("equivalence audit: certified (ii) and (iii) agree on random dominated mixtures") {
    std::mt19937_64 rng(314159);
    int both = 0;
    for (int rep = 0; rep < 25; ++rep) {
        auto F = qid::testing::random_dominated_mixture(rng);
        auto r = rid_criteria(F);
        CHECK(!r.inconsistency);
        if (r.cond_ii != CondVerdict::not_certified && r.cond_iii != CondVerdict::not_certified) {
            CHECK(r.cond_ii == r.cond_iii);
            ++both;
        }
        if (r.verdict == RidVerdict::rid) CHECK(r.inf_f_lower > 0.0);
    }
    CHECK(both >= 20);  // certification succeeds for the bulk of the suite
}
