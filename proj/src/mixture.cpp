#include "qid/mixture.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace qid {

MixtureDistribution MixtureDistribution::make(Rat c_d, AtomicMeasure F_d, Rat c_a,
                                              std::optional<GridDensity> F_a, Rat c_s,
                                              std::optional<SingularSpec> F_s) {
    if (!(c_d > 0)) throw std::invalid_argument("mixture: c_d must be positive");
    if (c_a < 0 || c_s < 0) throw std::invalid_argument("mixture: negative part weight");
    if (c_d + c_a + c_s != 1) {
        double sum = to_double(c_d) + to_double(c_a) + to_double(c_s);
        if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("mixture: weights must sum to 1");
    }
    if ((c_a > 0) != F_a.has_value()) throw std::invalid_argument("mixture: ac part present iff c_a > 0");
    if ((c_s > 0) != F_s.has_value()) throw std::invalid_argument("mixture: singular part present iff c_s > 0");
    if (!F_d.is_probability()) throw std::invalid_argument("mixture: F_d must be a probability measure");
    if (F_a && !F_a->is_probability()) throw std::invalid_argument("mixture: F_a must integrate to 1");
    MixtureDistribution m;
    m.c_d_ = std::move(c_d);
    m.c_a_ = std::move(c_a);
    m.c_s_ = std::move(c_s);
    m.F_d_ = std::move(F_d);
    m.F_a_ = std::move(F_a);
    m.F_s_ = std::move(F_s);
    return m;
}

void MixtureDistribution::declare_singular_square_class(int n_a, Rat alpha) {
    if (n_a < 2) throw std::invalid_argument("square class: n_a must be >= 2");
    if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("square class: alpha must be in (0, 1]");
    square_class_ = SquareClass{n_a, std::move(alpha)};
}

namespace {

// Accumulates weighted ac contributions; normalizes at the end.
struct AcAccumulator {
    std::vector<GridDensity> parts;
    Rat weight{0};

    void add(const Rat& w, GridDensity g) {
        if (w == 0) return;
        parts.push_back(g.scaled(to_double(w)));
        weight += w;
    }
    std::optional<GridDensity> result() const {
        if (parts.empty()) return std::nullopt;
        return GridDensity::sum(parts).scaled(1.0 / to_double(weight));
    }
};

struct SingAccumulator {
    std::vector<std::pair<double, std::shared_ptr<const SingularSpec>>> parts;
    Rat weight{0};
    bool all_powers = true;

    void add(const Rat& w, SingularSpec s) {
        if (w == 0) return;
        all_powers = all_powers && s.all_powers_singular();
        parts.push_back({to_double(w), std::make_shared<SingularSpec>(std::move(s))});
        weight += w;
    }
    std::optional<SingularSpec> result() const {
        if (parts.empty()) return std::nullopt;
        if (parts.size() == 1) return *parts[0].second;
        auto scaled = parts;
        for (auto& [w, p] : scaled) w /= to_double(weight);
        return SingularSpec(SingularMix{std::move(scaled)}, all_powers);
    }
};

}  // namespace

MixtureDistribution mixture_convolve(const MixtureDistribution& F1, const MixtureDistribution& F2) {
    const Rat c1d = F1.c_d_rat(), c1a = F1.c_a_rat(), c1s = F1.c_s_rat();
    const Rat c2d = F2.c_d_rat(), c2a = F2.c_a_rat(), c2s = F2.c_s_rat();
    if (F1.unclassified_weight() != 0.0 || F2.unclassified_weight() != 0.0)
        throw std::invalid_argument("mixture_convolve: input carries unclassified mass");

    MixtureDistribution out;
    out.warnings_ = F1.warnings();
    out.warnings_.insert(out.warnings_.end(), F2.warnings().begin(), F2.warnings().end());

    // d * d
    out.c_d_ = c1d * c2d;
    out.F_d_ = convolve_atomic(F1.discrete(), F2.discrete());

    AcAccumulator ac;
    SingAccumulator sing;
    Rat unclassified{0};

    // d * a and a * d
    if (c2a > 0) ac.add(c1d * c2a, F2.ac()->convolved_with_atoms(F1.discrete()));
    if (c1a > 0) ac.add(c1a * c2d, F1.ac()->convolved_with_atoms(F2.discrete()));
    // a * a
    if (c1a > 0 && c2a > 0) ac.add(c1a * c2a, F1.ac()->convolved_with_density(*F2.ac()));
    // a * s and s * a  (absolutely continuous outcome)
    if (c1a > 0 && c2s > 0) {
        auto atoms = F2.singular()->refine(8);
        ac.add(c1a * c2s, F1.ac()->convolved_with_atoms(atoms));
    }
    if (c1s > 0 && c2a > 0) {
        auto atoms = F1.singular()->refine(8);
        ac.add(c1s * c2a, F2.ac()->convolved_with_atoms(atoms));
    }
    // d * s and s * d  (stays singular)
    if (c2s > 0)
        sing.add(c1d * c2s, SingularSpec(SingularShift{std::make_shared<SingularSpec>(*F2.singular()),
                                                       F1.discrete()},
                                         F2.singular()->all_powers_singular()));
    if (c1s > 0)
        sing.add(c1s * c2d, SingularSpec(SingularShift{std::make_shared<SingularSpec>(*F1.singular()),
                                                       F2.discrete()},
                                         F1.singular()->all_powers_singular()));
    // s * s: classification is declaration-driven, never guessed.
    if (c1s > 0 && c2s > 0) {
        const Rat w = c1s * c2s;
        const bool same = F1.singular()->structurally_equal(*F2.singular());
        const auto& sq = F1.singular_square_class();
        if (same && F1.singular()->all_powers_singular()) {
            sing.add(w, SingularSpec(SingularConv{std::make_shared<SingularSpec>(*F1.singular()),
                                                  std::make_shared<SingularSpec>(*F2.singular())},
                                     true));
        } else if (same && sq && sq->n_a > 2) {
            // first ac-carrying power is beyond the square, so s*s is singular
            sing.add(w, SingularSpec(SingularConv{std::make_shared<SingularSpec>(*F1.singular()),
                                                  std::make_shared<SingularSpec>(*F2.singular())},
                                     false));
        } else if (same && sq && sq->n_a == 2) {
            unclassified += w;
            out.warnings_.push_back(
                "s*s product split by declared square class (alpha = " + to_string(sq->alpha) +
                "); neither component has a computable representation, mass excluded");
        } else {
            unclassified += w;
            out.warnings_.push_back("unclassified singular*singular product; mass " + to_string(w) +
                                    " excluded from the singular weight");
        }
    }

    out.c_a_ = ac.weight;
    out.F_a_ = ac.result();
    out.c_s_ = sing.weight;
    out.F_s_ = sing.result();
    out.unclassified_ = unclassified;
    return out;
}

}  // namespace qid
