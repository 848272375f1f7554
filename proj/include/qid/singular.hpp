#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "qid/atomic_measure.hpp"
#include "qid/rational.hpp"

namespace qid {

// Self-similar measure: X = sum_{k>=1} r^{k-1} * shift_{J_k}, J_k iid with
// the given weights. The classical Cantor distribution is
// ratio 1/3, shifts {0, 2/3}, weights {1/2, 1/2}.
struct CantorIFS {
    Rat ratio;
    std::vector<Rat> shifts;
    std::vector<double> weights;
    int max_level = 20;
};

// Infinite symmetric Bernoulli convolution X = sum_{k>=1} eps_k / a_k with
// eps_k = +-1 equiprobable; a_k = k! (factorial) or a_k = base^k (power).
struct ProductCF {
    enum class Scales { factorial, power };
    Scales scales = Scales::power;
    long base = 3;  // used by the power rule
};

// User-supplied continuous singular part: a CF oracle and an optional
// refinement oracle producing a probability AtomicMeasure per level.
struct DeclaredGeneric {
    std::function<std::complex<double>(double)> cf;
    std::function<AtomicMeasure(int)> refine;  // may be empty
    double mean_abs_bound = 1.0;               // bound on E|X|
};

class SingularSpec;

// Convolution of a singular part with an atomic measure (stays singular).
struct SingularShift {
    std::shared_ptr<const SingularSpec> base;
    AtomicMeasure atoms;
};

// Convolution of two singular parts declared to remain singular.
struct SingularConv {
    std::shared_ptr<const SingularSpec> lhs;
    std::shared_ptr<const SingularSpec> rhs;
};

// Finite mixture of singular parts (weights sum to 1).
struct SingularMix {
    std::vector<std::pair<double, std::shared_ptr<const SingularSpec>>> parts;
};

class SingularSpec {
public:
    using Node = std::variant<CantorIFS, ProductCF, DeclaredGeneric, SingularShift, SingularConv, SingularMix>;

    SingularSpec() : node_(ProductCF{}) {}
    explicit SingularSpec(Node n, bool all_powers_singular = false)
        : node_(std::move(n)), all_powers_singular_(all_powers_singular) {}

    static SingularSpec classical_cantor();
    static SingularSpec factorial_bernoulli();
    static SingularSpec power_bernoulli(long base);

    const Node& node() const { return node_; }
    // Declaration that every convolution power F_s^{*k} is continuous
    // singular (holds for the Cantor and Bernoulli-convolution families).
    bool all_powers_singular() const { return all_powers_singular_; }

    std::complex<double> cf(double t) const;

    // Probability AtomicMeasure supported on the level-`level` generator set.
    AtomicMeasure refine(int level) const;

    // sup |X - X_level| over realizations: CF error <= |t| * this.
    double refine_tail_bound(int level) const;

    // Bound on E|X|, a CF Lipschitz constant.
    double mean_abs_bound() const;

    bool structurally_equal(const SingularSpec& o) const;

private:
    Node node_;
    bool all_powers_singular_ = false;
};

// Exact evaluation of a ProductCF at t = pi * q for integer q: factors with
// an integer angle multiple are resolved by the parity of the big-integer
// ratio, never by floating cosine. Detects exact zeros.
double product_cf_exact_pi(const ProductCF& p, const BigInt& q);

AtomicMeasure singular_refine(const SingularSpec& s, int level);

}  // namespace qid
