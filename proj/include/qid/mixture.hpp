#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qid/atomic_measure.hpp"
#include "qid/grid_density.hpp"
#include "qid/singular.hpp"

namespace qid {

// Lebesgue mixture F = c_d F_d + c_a F_a + c_s F_s with c_d > 0.
// Weights are kept as exact rationals; parts are absent iff their weight
// is zero. `unclassified_weight` carries mass produced by a singular x
// singular convolution whose Lebesgue class could not be determined; it is
// never created by direct construction.
class MixtureDistribution {
public:
    MixtureDistribution() = default;

    static MixtureDistribution make(Rat c_d, AtomicMeasure F_d,
                                    Rat c_a = Rat(0), std::optional<GridDensity> F_a = std::nullopt,
                                    Rat c_s = Rat(0), std::optional<SingularSpec> F_s = std::nullopt);

    static MixtureDistribution pure_discrete(AtomicMeasure F_d) {
        return make(Rat(1), std::move(F_d));
    }

    double c_d() const { return to_double(c_d_); }
    double c_a() const { return to_double(c_a_); }
    double c_s() const { return to_double(c_s_); }
    const Rat& c_d_rat() const { return c_d_; }
    const Rat& c_a_rat() const { return c_a_; }
    const Rat& c_s_rat() const { return c_s_; }

    const AtomicMeasure& discrete() const { return F_d_; }
    const std::optional<GridDensity>& ac() const { return F_a_; }
    const std::optional<SingularSpec>& singular() const { return F_s_; }

    // Declared split F_s^{*n_a} = alpha H_a + (1-alpha) H_s for the first
    // convolution power with an absolutely continuous part.
    struct SquareClass {
        int n_a = 2;
        Rat alpha{1};
    };
    const std::optional<SquareClass>& singular_square_class() const { return square_class_; }
    void declare_singular_square_class(int n_a, Rat alpha);

    double unclassified_weight() const { return to_double(unclassified_); }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    Rat c_d_{1}, c_a_{0}, c_s_{0}, unclassified_{0};
    AtomicMeasure F_d_;
    std::optional<GridDensity> F_a_;
    std::optional<SingularSpec> F_s_;
    std::optional<SquareClass> square_class_;
    std::vector<std::string> warnings_;

    friend MixtureDistribution mixture_convolve(const MixtureDistribution&, const MixtureDistribution&);
};

// Convolution via the part-type table: d*d->d, d*a->a, a*a->a, a*s->a,
// d*s->s; s*s stays singular only when both singular parts carry the
// all-powers-singular declaration for the same generator (or the declared
// square class applies); otherwise its mass is excluded from the singular
// weight and recorded as an unclassified warning.
MixtureDistribution mixture_convolve(const MixtureDistribution& F1, const MixtureDistribution& F2);

}  // namespace qid
