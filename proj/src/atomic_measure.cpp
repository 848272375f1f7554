#include "qid/atomic_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qid {

AtomicMeasure AtomicMeasure::from_atoms(std::vector<Atom> atoms) {
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& a, const Atom& b) { return a.loc.before(b.loc); });
    AtomicMeasure m;
    m.atoms_.reserve(atoms.size());
    for (auto& a : atoms) {
        if (!std::isfinite(a.loc.value) || !std::isfinite(a.weight))
            throw std::invalid_argument("atom with non-finite location or weight");
        if (!m.atoms_.empty() && m.atoms_.back().loc.same_location(a.loc)) {
            m.atoms_.back().weight += a.weight;
        } else {
            m.atoms_.push_back(std::move(a));
        }
    }
    std::erase_if(m.atoms_, [](const Atom& a) { return a.weight == 0.0; });
    return m;
}

AtomicMeasure AtomicMeasure::dirac(Loc at, double weight) {
    return from_atoms({Atom{std::move(at), weight}});
}

double AtomicMeasure::tv_norm() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += std::abs(a.weight);
    return s;
}

double AtomicMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
}

bool AtomicMeasure::is_probability(double tol) const {
    for (const auto& a : atoms_)
        if (a.weight < 0.0) return false;
    return std::abs(total_mass() - 1.0) <= tol;
}

bool AtomicMeasure::all_exact() const {
    for (const auto& a : atoms_)
        if (!a.loc.exact) return false;
    return true;
}

double AtomicMeasure::mean_abs_location() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += std::abs(a.weight) * std::abs(a.loc.value);
    return s;
}

std::complex<double> AtomicMeasure::cf(double t) const {
    std::complex<double> s{0.0, 0.0};
    for (const auto& a : atoms_) {
        double ph = t * a.loc.value;
        s += a.weight * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return s;
}

AtomicMeasure AtomicMeasure::shifted(const Loc& by) const {
    std::vector<Atom> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back({a.loc + by, a.weight});
    return from_atoms(std::move(out));
}

AtomicMeasure AtomicMeasure::scaled(double factor) const {
    std::vector<Atom> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back({a.loc, a.weight * factor});
    return from_atoms(std::move(out));
}

double AtomicMeasure::cdf(double x) const {
    double s = 0.0;
    for (const auto& a : atoms_) {
        if (a.loc.value > x) break;
        s += a.weight;
    }
    return s;
}

namespace {

// Dense integer-grid convolution for exact-rational measures sharing a
// common denominator lattice. Returns nullopt when the lattice would be
// too large.
std::optional<AtomicMeasure> convolve_dense_exact(const AtomicMeasure& a, const AtomicMeasure& b) {
    if (!a.all_exact() || !b.all_exact() || a.empty() || b.empty()) return std::nullopt;
    BigInt den = 1;
    for (const auto& at : a.atoms()) den = big_lcm(den, at.loc.rat.denominator());
    for (const auto& at : b.atoms()) den = big_lcm(den, at.loc.rat.denominator());
    if (den > BigInt(1) << 62) return std::nullopt;

    auto index_of = [&](const Rat& r) { return r.numerator() * (den / r.denominator()); };
    BigInt lo_a = index_of(a.atoms().front().loc.rat), hi_a = index_of(a.atoms().back().loc.rat);
    BigInt lo_b = index_of(b.atoms().front().loc.rat), hi_b = index_of(b.atoms().back().loc.rat);
    BigInt span = (hi_a + hi_b) - (lo_a + lo_b);
    const BigInt kMaxSpan = 1 << 26;
    if (span < 0 || span > kMaxSpan) return std::nullopt;
    // Not worth the dense pass for tiny inputs.
    if (a.size() * b.size() < 4096) return std::nullopt;

    size_t n = static_cast<size_t>(span.convert_to<long long>()) + 1;
    std::vector<double> acc(n, 0.0);
    BigInt base = lo_a + lo_b;
    std::vector<long long> ib(b.size());
    for (size_t j = 0; j < b.size(); ++j)
        ib[j] = (index_of(b.atoms()[j].loc.rat) - lo_b).convert_to<long long>();
    for (const auto& aa : a.atoms()) {
        long long ia = (index_of(aa.loc.rat) - lo_a).convert_to<long long>();
        double wa = aa.weight;
        for (size_t j = 0; j < b.size(); ++j) acc[static_cast<size_t>(ia + ib[j])] += wa * b.atoms()[j].weight;
    }
    std::vector<AtomicMeasure::Atom> out;
    for (size_t i = 0; i < n; ++i) {
        if (acc[i] != 0.0) out.push_back({Loc(Rat(base + BigInt(i), den)), acc[i]});
    }
    return AtomicMeasure::from_atoms(std::move(out));
}

}  // namespace

AtomicMeasure convolve_atomic(const AtomicMeasure& a, const AtomicMeasure& b) {
    if (a.empty() || b.empty()) return AtomicMeasure{};
    if (auto dense = convolve_dense_exact(a, b)) return *dense;

    const size_t pairs = a.size() * b.size();
    if (pairs > size_t(8) << 24)
        throw std::runtime_error("convolve_atomic: pairwise expansion too large; prune inputs first");
    std::vector<AtomicMeasure::Atom> out;
    out.reserve(pairs);
    for (const auto& aa : a.atoms())
        for (const auto& bb : b.atoms()) out.push_back({aa.loc + bb.loc, aa.weight * bb.weight});
    return AtomicMeasure::from_atoms(std::move(out));
}

SignedMeasureApprox prune(const AtomicMeasure& m, double budget) {
    if (budget < 0.0) throw std::invalid_argument("prune: negative budget");
    std::vector<size_t> order(m.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
        double wi = std::abs(m.atoms()[i].weight), wj = std::abs(m.atoms()[j].weight);
        if (wi != wj) return wi < wj;
        return m.atoms()[i].loc.before(m.atoms()[j].loc);
    });
    std::vector<bool> drop(m.size(), false);
    double dropped = 0.0;
    for (size_t i : order) {
        double w = std::abs(m.atoms()[i].weight);
        if (dropped + w <= budget) {
            dropped += w;
            drop[i] = true;
        } else {
            break;
        }
    }
    std::vector<AtomicMeasure::Atom> kept;
    kept.reserve(m.size());
    for (size_t i = 0; i < m.size(); ++i)
        if (!drop[i]) kept.push_back(m.atoms()[i]);
    return SignedMeasureApprox{AtomicMeasure::from_atoms(std::move(kept)), dropped};
}

}  // namespace qid
