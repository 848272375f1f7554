#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "qid/rational.hpp"

namespace qid {

// Merge tolerance for inexact atom locations (absolute).
inline constexpr double kLocMergeTol = 1e-14;

// Atom location: a double value, optionally backed by an exact rational.
// Exact locations merge by rational equality, inexact ones by |dx| <= 1e-14.
struct Loc {
    double value = 0.0;
    bool exact = false;
    Rat rat{0};

    Loc() = default;
    explicit Loc(double v) : value(v), exact(false) {}
    explicit Loc(Rat r) : value(to_double(r)), exact(true), rat(std::move(r)) {}

    friend Loc operator+(const Loc& a, const Loc& b) {
        if (a.exact && b.exact) return Loc(a.rat + b.rat);
        return Loc(a.value + b.value);
    }
    friend Loc operator-(const Loc& a) {
        if (a.exact) return Loc(-a.rat);
        return Loc(-a.value);
    }
    bool same_location(const Loc& o) const {
        if (exact && o.exact) return rat == o.rat;
        return std::abs(value - o.value) <= kLocMergeTol;
    }
    bool before(const Loc& o) const {
        if (exact && o.exact && value == o.value) return rat < o.rat;
        return value < o.value;
    }
};

// Finite signed measure with atoms at strictly increasing locations.
class AtomicMeasure {
public:
    struct Atom {
        Loc loc;
        double weight = 0.0;
    };

    AtomicMeasure() = default;

    // Sorts, merges coincident locations, drops exact-zero weights.
    static AtomicMeasure from_atoms(std::vector<Atom> atoms);
    static AtomicMeasure dirac(Loc at, double weight = 1.0);

    const std::vector<Atom>& atoms() const { return atoms_; }
    size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    double tv_norm() const;
    double total_mass() const;
    bool is_probability(double tol = 1e-12) const;
    bool all_exact() const;

    // sum_k |w_k||x_k|, a Lipschitz constant for the characteristic function.
    double mean_abs_location() const;

    std::complex<double> cf(double t) const;

    AtomicMeasure shifted(const Loc& by) const;
    AtomicMeasure scaled(double factor) const;

    // Cumulative function sum_{x_k <= x} w_k.
    double cdf(double x) const;

private:
    std::vector<Atom> atoms_;
};

// Atomic approximation of a measure together with the TV-norm error
// accumulated by pruning and refinement.
struct SignedMeasureApprox {
    AtomicMeasure atoms;
    double tv_error_budget = 0.0;
};

// All pairwise location sums with multiplied weights, merged by location.
// TV(result) <= TV(a) * TV(b), with equality for nonnegative weights.
AtomicMeasure convolve_atomic(const AtomicMeasure& a, const AtomicMeasure& b);

// Drops smallest-|weight| atoms while the dropped mass stays within budget.
// Ties broken by ascending location.
SignedMeasureApprox prune(const AtomicMeasure& m, double budget);

}  // namespace qid
