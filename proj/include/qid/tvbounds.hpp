#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "qid/rational.hpp"

namespace qid {

// Trigonometric polynomial sum_m q_m e^{i<t, c_m>} with integer exponent
// vectors c_m in Z^d.
class TrigPoly {
public:
    using Exponent = std::vector<int>;
    using CoefMap = std::map<Exponent, std::complex<double>>;

    explicit TrigPoly(int dimension) : d_(dimension) {
        if (dimension < 1) throw std::invalid_argument("TrigPoly: dimension must be >= 1");
    }
    TrigPoly(int dimension, CoefMap coefs) : TrigPoly(dimension) { set(std::move(coefs)); }

    int dimension() const { return d_; }
    const CoefMap& coefficients() const { return coef_; }
    void add_term(Exponent e, std::complex<double> q);

    // Wiener norm: sum of |coefficients|.
    double norm() const;
    size_t terms() const { return coef_.size(); }

    // Coefficient-wise partial derivative d^{|s|} / prod_{j in s} dt_j.
    TrigPoly derivative(const std::vector<int>& axes) const;

    // alpha_j = min_m c_{m,j}
    std::vector<int> min_exponents() const;

private:
    void set(CoefMap m);
    int d_;
    CoefMap coef_;
};

// ||phi^k|| by k-fold coefficient convolution over Z^d; the brute-force
// oracle for the Lemma-8 bounds.
double exact_power_norm(const TrigPoly& phi, int k, size_t coef_budget = 10'000'000);

struct BoundConstants {
    double S_phi = 0.0;  // certified sup over [-pi, pi]^d
    double A_phi = 0.0;  // k-free constant of the A * k^d * S^k bound
};

// Shared evaluator: the grid sups are computed once per polynomial and
// reused by both bound forms.
class Lemma8Bounds {
public:
    explicit Lemma8Bounds(const TrigPoly& phi);
    ~Lemma8Bounds();
    Lemma8Bounds(Lemma8Bounds&&) noexcept;
    Lemma8Bounds& operator=(Lemma8Bounds&&) noexcept;

    double S() const;
    double A() const;
    // the A * k^d * S^k bound
    double bound_from_constants(int k) const;
    // the sharper k-dependent partition bound
    double refined_bound(int k) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Certified (grid sup + Lipschitz inflation, capped by the Wiener norm)
// evaluation of S_phi and the k-independent constant A_phi.
BoundConstants bound_constants(const TrigPoly& phi);

inline double bound_power_norm(double S_phi, double A_phi, int d, int k) {
    double r = A_phi;
    for (int i = 0; i < d; ++i) r *= k;
    return r * std::pow(S_phi, k);
}

// The sharper k-dependent partition bound; both this and the A*k^d*S^k form
// are upper bounds on ||phi^k||, neither dominates the other.
double refined_bound_power_norm(const TrigPoly& phi, int k);

// All set partitions of {0, .., n-1} as block-index strings (restricted
// growth strings); partition[i] = block of element i.
std::vector<std::vector<int>> set_partitions(int n);

// Frequencies with declared Q-linear structure: coords[m] are the exact
// rational coordinates of frequency m over a shared list of declared
// Q-independent generators (generator 0 is conventionally the rational
// unit 1). Floating frequencies carry no such structure and are rejected
// by construction.
struct QLinearSet {
    std::vector<double> generator_values;
    std::vector<std::vector<Rat>> coords;

    static QLinearSet from_rationals(const std::vector<Rat>& freqs);
    double value(size_t m) const;
    size_t size() const { return coords.size(); }
};

struct LatticeLift {
    std::vector<size_t> basis;                      // indices of the basis frequencies
    std::vector<double> basis_values;               // beta_l
    BigInt kappa;                                   // minimal integer clearing denominators
    std::vector<double> beta_tilde;                 // beta_l / kappa
    std::vector<std::vector<long long>> exponents;  // integer vector per input frequency

    int dimension() const { return static_cast<int>(basis.size()); }
    double frequency_of(const std::vector<long long>& exponent) const;
};

// Greedy basis over Q in input order; every frequency becomes an integer
// combination of beta_tilde = beta / kappa. Distinct frequencies map to
// distinct exponent vectors.
LatticeLift rational_basis_lift(const QLinearSet& freqs);

// Places weights on the lifted exponents; the coefficient multiset is
// preserved by construction.
TrigPoly lift_to_trigpoly(const LatticeLift& lift, const std::vector<std::complex<double>>& weights);

}  // namespace qid
