#pragma once

#include <random>

#include "qid/charfun.hpp"
#include "qid/mixture.hpp"

namespace qid::testing {

// Random mixture with a certified dominated singular part: a dominant
// lattice atom keeps mu_d away from zero, and c_s is drawn strictly below
// the certified c_d * mu_d.
inline MixtureDistribution random_dominated_mixture(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> ucount(1, 3), uden(1, 3), upick(0, 3), ufrac(10, 75);
    std::uniform_int_distribution<int> ucd(40, 80), uspread(1, 6);
    std::uniform_real_distribution<double> ureal(0.0, 1.0);

    // discrete part: dominant atom at 0 plus a few lattice satellites
    Rat h(1, uden(rng));
    int extras = ucount(rng);
    double p0 = 0.55 + 0.4 * ureal(rng);
    std::vector<double> rest(static_cast<size_t>(extras));
    double rest_sum = 0.0;
    for (auto& r : rest) {
        r = ureal(rng);
        rest_sum += r;
    }
    std::vector<AtomicMeasure::Atom> atoms{{Loc(Rat(0)), p0}};
    for (int i = 0; i < extras; ++i)
        atoms.push_back({Loc(h * Rat(uspread(rng))), (1.0 - p0) * rest[static_cast<size_t>(i)] / rest_sum});
    auto F_d = AtomicMeasure::from_atoms(std::move(atoms));
    double mu = certified_min_modulus_fd(F_d);

    Rat c_d(ucd(rng), 100);
    // c_s strictly below c_d * mu, on a coarse rational grid, leaving a
    // nonnegative remainder for the ac part
    Rat mu_floor(static_cast<long long>(std::floor(mu * 1000.0)), 1000);
    Rat c_s = Rat(ufrac(rng), 100) * c_d * mu_floor;
    if (c_s > Rat(1) - c_d) c_s = Rat(1) - c_d;
    Rat c_a = Rat(1) - c_d - c_s;

    std::optional<GridDensity> F_a;
    if (c_a > Rat(0)) {
        switch (upick(rng) % 3) {
            case 0: F_a = GridDensity::uniform(-1.0 + ureal(rng), 1.0 + ureal(rng)); break;
            case 1: F_a = GridDensity::triangular(-1.0, ureal(rng), 2.0); break;
            default: F_a = GridDensity::uniform(0.0, 0.5 + ureal(rng)); break;
        }
    }
    std::optional<SingularSpec> F_s;
    if (c_s > Rat(0)) {
        switch (upick(rng)) {
            case 0: F_s = SingularSpec::classical_cantor(); break;
            case 1: F_s = SingularSpec::power_bernoulli(3); break;
            case 2: F_s = SingularSpec::power_bernoulli(5); break;
            default: {
                CantorIFS c;
                c.ratio = Rat(1, 4);
                c.shifts = {Rat(0), Rat(3, 4)};
                c.weights = {0.5, 0.5};
                F_s = SingularSpec(SingularSpec::Node(std::move(c)));
                break;
            }
        }
    }
    return MixtureDistribution::make(c_d, F_d, c_a, std::move(F_a), c_s, std::move(F_s));
}

}  // namespace qid::testing
