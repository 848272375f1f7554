#include "qid/singular.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qid {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double max_abs_shift(const CantorIFS& c) {
    double m = 0.0;
    for (const auto& s : c.shifts) m = std::max(m, std::abs(to_double(s)));
    return m;
}

void validate(const CantorIFS& c) {
    if (!(c.ratio > 0 && c.ratio < Rat(1, 2))) throw std::invalid_argument("CantorIFS: ratio must be in (0, 1/2)");
    if (c.shifts.size() < 2 || c.shifts.size() != c.weights.size())
        throw std::invalid_argument("CantorIFS: shifts/weights mismatch");
    double sum = 0.0;
    for (double w : c.weights) {
        if (w < 0.0) throw std::invalid_argument("CantorIFS: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("CantorIFS: weights must sum to 1");
}

// a_k for the ProductCF scale rules; k is 1-based.
double scale_value(const ProductCF& p, int k) {
    if (p.scales == ProductCF::Scales::factorial) {
        double a = 1.0;
        for (int j = 2; j <= k; ++j) a *= j;
        return a;
    }
    return std::pow(static_cast<double>(p.base), k);
}

BigInt scale_big(const ProductCF& p, int k) {
    if (p.scales == ProductCF::Scales::factorial) return big_factorial(k);
    return big_pow(BigInt(p.base), k);
}

Rat scale_rat_inv(const ProductCF& p, int k) { return Rat(1, scale_big(p, k)); }

}  // namespace

SingularSpec SingularSpec::classical_cantor() {
    CantorIFS c;
    c.ratio = Rat(1, 3);
    c.shifts = {Rat(0), Rat(2, 3)};
    c.weights = {0.5, 0.5};
    return SingularSpec(std::move(c), /*all_powers_singular=*/true);
}

SingularSpec SingularSpec::factorial_bernoulli() {
    ProductCF p;
    p.scales = ProductCF::Scales::factorial;
    return SingularSpec(std::move(p), /*all_powers_singular=*/true);
}

SingularSpec SingularSpec::power_bernoulli(long base) {
    if (base < 2) throw std::invalid_argument("power_bernoulli: base must be >= 2");
    ProductCF p;
    p.scales = ProductCF::Scales::power;
    p.base = base;
    return SingularSpec(std::move(p), /*all_powers_singular=*/true);
}

std::complex<double> SingularSpec::cf(double t) const {
    struct Visitor {
        double t;
        cplx operator()(const CantorIFS& c) const {
            validate(c);
            // prod_k sum_j w_j exp(i t r^{k-1} shift_j)
            double r = to_double(c.ratio);
            double ms = max_abs_shift(c);
            cplx prod{1.0, 0.0};
            double scale = 1.0;
            for (int k = 0; k < 20000; ++k) {
                if (std::abs(t) * scale * ms / (1.0 - r) < 1e-16) break;
                cplx f{0.0, 0.0};
                for (size_t j = 0; j < c.shifts.size(); ++j) {
                    double ph = t * scale * to_double(c.shifts[j]);
                    f += c.weights[j] * cplx(std::cos(ph), std::sin(ph));
                }
                prod *= f;
                scale *= r;
            }
            return prod;
        }
        cplx operator()(const ProductCF& p) const {
            cplx prod{1.0, 0.0};
            for (int k = 1; k <= 20000; ++k) {
                double a = scale_value(p, k);
                double x = t / a;
                if (std::abs(x) < 1e-8 && k > 1) break;  // remaining factors are 1 to 1e-16
                prod *= std::cos(x);
            }
            return prod;
        }
        cplx operator()(const DeclaredGeneric& g) const {
            if (!g.cf) throw std::invalid_argument("DeclaredGeneric: missing CF oracle");
            return g.cf(t);
        }
        cplx operator()(const SingularShift& s) const { return s.base->cf(t) * s.atoms.cf(t); }
        cplx operator()(const SingularConv& s) const { return s.lhs->cf(t) * s.rhs->cf(t); }
        cplx operator()(const SingularMix& s) const {
            cplx acc{0.0, 0.0};
            for (const auto& [w, part] : s.parts) acc += w * part->cf(t);
            return acc;
        }
    };
    return std::visit(Visitor{t}, node_);
}

AtomicMeasure SingularSpec::refine(int level) const {
    if (level < 0) throw std::invalid_argument("refine: negative level");
    struct Visitor {
        int level;
        AtomicMeasure operator()(const CantorIFS& c) const {
            validate(c);
            if (level > c.max_level) throw std::invalid_argument("refine: level above configured max");
            AtomicMeasure m = AtomicMeasure::dirac(Loc(Rat(0)));
            Rat scale(1);
            for (int k = 0; k < level; ++k) {
                std::vector<AtomicMeasure::Atom> step;
                for (size_t j = 0; j < c.shifts.size(); ++j)
                    step.push_back({Loc(scale * c.shifts[j]), c.weights[j]});
                m = convolve_atomic(m, AtomicMeasure::from_atoms(std::move(step)));
                scale *= c.ratio;
            }
            return m;
        }
        AtomicMeasure operator()(const ProductCF& p) const {
            if (level > 25) throw std::invalid_argument("refine: level above configured max");
            AtomicMeasure m = AtomicMeasure::dirac(Loc(Rat(0)));
            for (int k = 1; k <= level; ++k) {
                Rat inv = scale_rat_inv(p, k);
                auto step = AtomicMeasure::from_atoms({{Loc(-inv), 0.5}, {Loc(inv), 0.5}});
                m = convolve_atomic(m, step);
            }
            return m;
        }
        AtomicMeasure operator()(const DeclaredGeneric& g) const {
            if (!g.refine) throw std::invalid_argument("DeclaredGeneric: refinement oracle not provided");
            return g.refine(level);
        }
        AtomicMeasure operator()(const SingularShift& s) const {
            return convolve_atomic(s.base->refine(level), s.atoms);
        }
        AtomicMeasure operator()(const SingularConv& s) const {
            return convolve_atomic(s.lhs->refine(level), s.rhs->refine(level));
        }
        AtomicMeasure operator()(const SingularMix& s) const {
            std::vector<AtomicMeasure::Atom> all;
            for (const auto& [w, part] : s.parts) {
                for (const auto& a : part->refine(level).atoms()) all.push_back({a.loc, w * a.weight});
            }
            return AtomicMeasure::from_atoms(std::move(all));
        }
    };
    return std::visit(Visitor{level}, node_);
}

double SingularSpec::refine_tail_bound(int level) const {
    struct Visitor {
        int level;
        double operator()(const CantorIFS& c) const {
            double r = to_double(c.ratio);
            return std::pow(r, level) * max_abs_shift(c) / (1.0 - r);
        }
        double operator()(const ProductCF& p) const {
            if (p.scales == ProductCF::Scales::power) {
                double b = static_cast<double>(p.base);
                return std::pow(b, -level) / (b - 1.0);
            }
            // factorial tail: sum_{k>level} 1/k! <= 2/(level+1)!
            double inv = 1.0;
            for (int j = 2; j <= level + 1; ++j) inv /= j;
            return 2.0 * inv;
        }
        double operator()(const DeclaredGeneric&) const { return 0.0; }  // oracle's contract
        double operator()(const SingularShift& s) const { return s.base->refine_tail_bound(level); }
        double operator()(const SingularConv& s) const {
            return s.lhs->refine_tail_bound(level) + s.rhs->refine_tail_bound(level);
        }
        double operator()(const SingularMix& s) const {
            double m = 0.0;
            for (const auto& [w, part] : s.parts) m = std::max(m, part->refine_tail_bound(level));
            return m;
        }
    };
    return std::visit(Visitor{level}, node_);
}

double SingularSpec::mean_abs_bound() const {
    struct Visitor {
        double operator()(const CantorIFS& c) const { return max_abs_shift(c) / (1.0 - to_double(c.ratio)); }
        double operator()(const ProductCF& p) const {
            return p.scales == ProductCF::Scales::power ? 1.0 / (static_cast<double>(p.base) - 1.0)
                                                        : std::numbers::e - 1.0;
        }
        double operator()(const DeclaredGeneric& g) const { return g.mean_abs_bound; }
        double operator()(const SingularShift& s) const {
            return s.base->mean_abs_bound() + s.atoms.mean_abs_location();
        }
        double operator()(const SingularConv& s) const {
            return s.lhs->mean_abs_bound() + s.rhs->mean_abs_bound();
        }
        double operator()(const SingularMix& s) const {
            double acc = 0.0;
            for (const auto& [w, part] : s.parts) acc += std::abs(w) * part->mean_abs_bound();
            return acc;
        }
    };
    return std::visit(Visitor{}, node_);
}

bool SingularSpec::structurally_equal(const SingularSpec& o) const {
    if (node_.index() != o.node_.index()) return false;
    if (const auto* c = std::get_if<CantorIFS>(&node_)) {
        const auto& d = std::get<CantorIFS>(o.node_);
        return c->ratio == d.ratio && c->shifts == d.shifts && c->weights == d.weights;
    }
    if (const auto* p = std::get_if<ProductCF>(&node_)) {
        const auto& q = std::get<ProductCF>(o.node_);
        return p->scales == q.scales && (p->scales == ProductCF::Scales::factorial || p->base == q.base);
    }
    return false;  // composite or generic nodes: no structural identity
}

double product_cf_exact_pi(const ProductCF& p, const BigInt& q) {
    if (q == 0) return 1.0;
    BigInt qa = q < 0 ? BigInt(-q) : q;
    double prod = 1.0;
    for (int k = 1; k <= 100000; ++k) {
        BigInt a = scale_big(p, k);
        // Remaining factors differ from 1 by less than 1e-16 once the
        // angle pi*q/a drops below 1e-8 (scales are increasing).
        if (a > 2 * qa && kPi * to_double(Rat(qa, a)) < 1e-8) break;
        // cos(pi q / a) depends on q mod 2a only.
        BigInt m = qa % (2 * a);
        if (m == 0) continue;  // factor +1
        if (m == a) {
            prod = -prod;  // factor -1
            continue;
        }
        if (2 * m == a || 2 * m == 3 * a) return 0.0;  // exact zero
        // exact-ratio reduction: angle = pi * m / a with m in (0, 2a)
        double ratio;
        if (a <= BigInt(1) << 52) {
            ratio = to_double(m) / to_double(a);
        } else {
            ratio = to_double(Rat(m, a));
        }
        prod *= std::cos(kPi * ratio);
    }
    return prod;
}

AtomicMeasure singular_refine(const SingularSpec& s, int level) { return s.refine(level); }

}  // namespace qid
