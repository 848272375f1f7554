#include "qid/tvbounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qid/fft.hpp"

namespace qid {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

}  // namespace

void TrigPoly::set(CoefMap m) {
    for (const auto& [e, q] : m) {
        if (static_cast<int>(e.size()) != d_) throw std::invalid_argument("TrigPoly: exponent dimension mismatch");
    }
    coef_ = std::move(m);
    std::erase_if(coef_, [](const auto& kv) { return kv.second == cplx{0.0, 0.0}; });
}

void TrigPoly::add_term(Exponent e, std::complex<double> q) {
    if (static_cast<int>(e.size()) != d_) throw std::invalid_argument("TrigPoly: exponent dimension mismatch");
    auto [it, inserted] = coef_.try_emplace(std::move(e), q);
    if (!inserted) it->second += q;
    if (it->second == cplx{0.0, 0.0}) coef_.erase(it);
}

double TrigPoly::norm() const {
    double s = 0.0;
    for (const auto& [e, q] : coef_) s += std::abs(q);
    return s;
}

TrigPoly TrigPoly::derivative(const std::vector<int>& axes) const {
    TrigPoly out(d_);
    for (const auto& [e, q] : coef_) {
        cplx factor{1.0, 0.0};
        for (int j : axes) factor *= cplx(0.0, static_cast<double>(e[static_cast<size_t>(j)]));
        if (factor != cplx{0.0, 0.0}) out.add_term(e, q * factor);
    }
    return out;
}

std::vector<int> TrigPoly::min_exponents() const {
    if (coef_.empty()) return std::vector<int>(static_cast<size_t>(d_), 0);
    std::vector<int> mn(static_cast<size_t>(d_), std::numeric_limits<int>::max());
    for (const auto& [e, q] : coef_)
        for (int j = 0; j < d_; ++j) mn[static_cast<size_t>(j)] = std::min(mn[static_cast<size_t>(j)], e[static_cast<size_t>(j)]);
    return mn;
}

double exact_power_norm(const TrigPoly& phi, int k, size_t coef_budget) {
    if (k < 1) throw std::invalid_argument("exact_power_norm: k must be >= 1");
    TrigPoly::CoefMap acc;
    acc[std::vector<int>(static_cast<size_t>(phi.dimension()), 0)] = cplx{1.0, 0.0};
    for (int step = 0; step < k; ++step) {
        TrigPoly::CoefMap next;
        for (const auto& [ea, qa] : acc) {
            for (const auto& [eb, qb] : phi.coefficients()) {
                std::vector<int> e(ea.size());
                for (size_t j = 0; j < e.size(); ++j) e[j] = ea[j] + eb[j];
                next[std::move(e)] += qa * qb;
            }
            if (next.size() > coef_budget) throw std::runtime_error("exact_power_norm: coefficient budget exceeded");
        }
        acc = std::move(next);
    }
    double s = 0.0;
    for (const auto& [e, q] : acc) s += std::abs(q);
    return s;
}

std::vector<std::vector<int>> set_partitions(int n) {
    std::vector<std::vector<int>> out;
    if (n == 0) {
        out.push_back({});
        return out;
    }
    // restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1])
    std::vector<int> a(static_cast<size_t>(n), 0);
    while (true) {
        out.push_back(a);
        int i = n - 1;
        for (; i > 0; --i) {
            int mx = 0;
            for (int j = 0; j < i; ++j) mx = std::max(mx, a[static_cast<size_t>(j)]);
            if (a[static_cast<size_t>(i)] <= mx) break;
        }
        if (i == 0) return out;
        ++a[static_cast<size_t>(i)];
        for (int j = i + 1; j < n; ++j) a[static_cast<size_t>(j)] = 0;
    }
}

namespace {

int grid_size_per_axis(int d) {
    switch (d) {
        case 1:
        case 2:
            return 1 << 10;
        case 3:
            return 1 << 7;
        default:
            return 1 << 5;  // d = 4: 2^7 per axis would not fit in memory
    }
}

// |poly| sampled on the uniform grid (2pi j / N per axis) of [0, 2pi)^d,
// evaluated exactly through an FFT.
std::vector<double> magnitude_grid(const TrigPoly& poly, int N) {
    const int d = poly.dimension();
    size_t total = 1;
    for (int j = 0; j < d; ++j) total *= static_cast<size_t>(N);
    std::vector<cplx> box(total, cplx{0.0, 0.0});
    for (const auto& [e, q] : poly.coefficients()) {
        size_t idx = 0;
        for (int j = 0; j < d; ++j) {
            long long r = e[static_cast<size_t>(j)] % N;
            if (r < 0) r += N;
            idx = idx * static_cast<size_t>(N) + static_cast<size_t>(r);
        }
        box[idx] += q;
    }
    dft(box, std::vector<int>(static_cast<size_t>(d), N), +1);
    std::vector<double> mag(total);
    for (size_t i = 0; i < total; ++i) mag[i] = std::abs(box[i]);
    return mag;
}

// sum_j (delta_j/2) * L_j with L_j = sum_m |q_m| |c_{m,j}|: the covering
// slack of the per-axis grid under the polynomial's Lipschitz bounds.
double lipschitz_slack(const TrigPoly& poly, int N) {
    double total = 0.0;
    for (int j = 0; j < poly.dimension(); ++j) {
        double lip = 0.0;
        for (const auto& [e, q] : poly.coefficients())
            lip += std::abs(q) * std::abs(static_cast<double>(e[static_cast<size_t>(j)]));
        total += lip * (kPi / static_cast<double>(N));
    }
    return total;
}

struct PartitionData {
    std::vector<std::vector<int>> blocks;  // each block lists axis indices
};

// Certified sups shared by both Lemma-8 bounds.
struct SupTables {
    double S = 0.0;
    // For every nonempty subset s of D (bitmask key): certified sup of
    // |d^{|s|} phi| and its Wiener-norm cap.
    std::vector<double> deriv_sup;
    std::vector<double> deriv_norm;
    std::vector<std::vector<double>> deriv_grid;  // magnitude grids for products
    double slack_unit = 0.0;                      // (delta/2) per unit Lipschitz constant, per axis
    int N = 0;
};

SupTables build_sup_tables(const TrigPoly& phi) {
    const int d = phi.dimension();
    if (d > 4) throw std::invalid_argument("bound_constants: dimension above 4 unsupported");
    if (phi.coefficients().empty()) throw std::invalid_argument("bound_constants: zero polynomial");
    const int N = grid_size_per_axis(d);

    SupTables tab;
    tab.N = N;
    auto grid = magnitude_grid(phi, N);
    tab.S = std::min(*std::max_element(grid.begin(), grid.end()) + lipschitz_slack(phi, N), phi.norm());

    const int nmask = 1 << d;
    tab.deriv_sup.assign(static_cast<size_t>(nmask), 0.0);
    tab.deriv_norm.assign(static_cast<size_t>(nmask), 0.0);
    tab.deriv_grid.resize(static_cast<size_t>(nmask));
    for (int mask = 1; mask < nmask; ++mask) {
        std::vector<int> axes;
        for (int j = 0; j < d; ++j)
            if (mask & (1 << j)) axes.push_back(j);
        TrigPoly der = phi.derivative(axes);
        tab.deriv_norm[static_cast<size_t>(mask)] = der.norm();
        if (der.coefficients().empty()) continue;
        auto g = magnitude_grid(der, N);
        double sup = std::min(*std::max_element(g.begin(), g.end()) + lipschitz_slack(der, N), der.norm());
        tab.deriv_sup[static_cast<size_t>(mask)] = sup;
        tab.deriv_grid[static_cast<size_t>(mask)] = std::move(g);
    }
    return tab;
}

// Certified sup over the torus of prod_b |d^{s_b} phi| for the partition
// blocks given as bitmasks.
double partition_product_sup(const SupTables& tab, const TrigPoly& phi,
                             const std::vector<int>& block_masks) {
    if (block_masks.empty()) return 1.0;  // empty product
    // Wiener-norm cap of the product.
    double cap = 1.0;
    for (int m : block_masks) cap *= tab.deriv_norm[static_cast<size_t>(m)];
    if (cap == 0.0) return 0.0;
    if (block_masks.size() == 1) return tab.deriv_sup[static_cast<size_t>(block_masks[0])];

    const size_t total = tab.deriv_grid[static_cast<size_t>(block_masks[0])].size();
    double mx = 0.0;
    for (size_t i = 0; i < total; ++i) {
        double p = 1.0;
        for (int m : block_masks) p *= tab.deriv_grid[static_cast<size_t>(m)][i];
        mx = std::max(mx, p);
    }
    // Lipschitz inflation of the product via norm caps of the cofactors.
    double slack = 0.0;
    for (size_t b = 0; b < block_masks.size(); ++b) {
        double co = 1.0;
        for (size_t b2 = 0; b2 < block_masks.size(); ++b2)
            if (b2 != b) co *= tab.deriv_norm[static_cast<size_t>(block_masks[b2])];
        std::vector<int> axes;
        for (int j = 0; j < phi.dimension(); ++j)
            if (block_masks[b] & (1 << j)) axes.push_back(j);
        TrigPoly der = phi.derivative(axes);
        slack += co * lipschitz_slack(der, tab.N);
    }
    return std::min(mx + slack, cap);
}

std::vector<std::vector<int>> partitions_as_masks(const std::vector<int>& axes) {
    std::vector<std::vector<int>> result;
    auto rgs = set_partitions(static_cast<int>(axes.size()));
    for (const auto& assign : rgs) {
        int nblocks = assign.empty() ? 0 : 1 + *std::max_element(assign.begin(), assign.end());
        std::vector<int> masks(static_cast<size_t>(nblocks), 0);
        for (size_t i = 0; i < assign.size(); ++i)
            masks[static_cast<size_t>(assign[i])] |= 1 << axes[i];
        result.push_back(std::move(masks));
    }
    return result;
}

double pi_over_sqrt6_pow(int d) { return std::pow(kPi / std::sqrt(6.0), d); }

}  // namespace

struct Lemma8Bounds::Impl {
    int d;
    std::vector<int> alpha;
    SupTables tab;
    // per subset U (bitmask): list of (block count, certified R_phi(P))
    std::vector<std::vector<std::pair<int, double>>> partition_sups;
};

Lemma8Bounds::Lemma8Bounds(const TrigPoly& phi) : impl_(std::make_unique<Impl>()) {
    impl_->d = phi.dimension();
    impl_->alpha = phi.min_exponents();
    impl_->tab = build_sup_tables(phi);
    impl_->partition_sups.resize(size_t{1} << impl_->d);
    for (int umask = 0; umask < (1 << impl_->d); ++umask) {
        std::vector<int> axes;
        for (int j = 0; j < impl_->d; ++j)
            if (umask & (1 << j)) axes.push_back(j);
        for (const auto& blocks : partitions_as_masks(axes)) {
            double r = partition_product_sup(impl_->tab, phi, blocks);
            impl_->partition_sups[static_cast<size_t>(umask)].push_back(
                {static_cast<int>(blocks.size()), r});
        }
    }
    // magnitude grids are only needed while building the partition sups
    impl_->tab.deriv_grid.clear();
}

Lemma8Bounds::~Lemma8Bounds() = default;
Lemma8Bounds::Lemma8Bounds(Lemma8Bounds&&) noexcept = default;
Lemma8Bounds& Lemma8Bounds::operator=(Lemma8Bounds&&) noexcept = default;

double Lemma8Bounds::S() const { return impl_->tab.S; }

double Lemma8Bounds::A() const {
    const int d = impl_->d;
    double sum = 0.0;
    for (int umask = 0; umask < (1 << d); ++umask) {
        double outside = 1.0;
        for (int j = 0; j < d; ++j)
            if (!(umask & (1 << j)))
                outside *= std::abs(static_cast<double>(impl_->alpha[static_cast<size_t>(j)])) + 1.0;
        double inner = 0.0;
        for (const auto& [p, r] : impl_->partition_sups[static_cast<size_t>(umask)])
            inner += std::pow(impl_->tab.S, -p) * r;
        sum += outside * inner;
    }
    return pi_over_sqrt6_pow(d) * sum;
}

double Lemma8Bounds::bound_from_constants(int k) const {
    return bound_power_norm(S(), A(), impl_->d, k);
}

double Lemma8Bounds::refined_bound(int k) const {
    if (k < 1) throw std::invalid_argument("refined_bound: k must be >= 1");
    const int d = impl_->d;
    double sum = 0.0;
    for (int umask = 0; umask < (1 << d); ++umask) {
        double outside = 1.0;
        for (int j = 0; j < d; ++j)
            if (!(umask & (1 << j)))
                outside *= std::abs(static_cast<double>(k) * impl_->alpha[static_cast<size_t>(j)] - 1.0);
        double inner = 0.0;
        for (const auto& [p, r] : impl_->partition_sups[static_cast<size_t>(umask)]) {
            if (p > k) continue;
            double falling = 1.0;
            for (int l = 1; l <= p; ++l) falling *= static_cast<double>(k - l + 1);
            inner += falling * std::pow(impl_->tab.S, k - p) * r;
        }
        sum += outside * inner;
    }
    return pi_over_sqrt6_pow(d) * sum;
}

BoundConstants bound_constants(const TrigPoly& phi) {
    Lemma8Bounds b(phi);
    return BoundConstants{b.S(), b.A()};
}

double refined_bound_power_norm(const TrigPoly& phi, int k) {
    return Lemma8Bounds(phi).refined_bound(k);
}

QLinearSet QLinearSet::from_rationals(const std::vector<Rat>& freqs) {
    QLinearSet set;
    set.generator_values = {1.0};
    for (const auto& f : freqs) set.coords.push_back({f});
    return set;
}

double QLinearSet::value(size_t m) const {
    double v = 0.0;
    for (size_t g = 0; g < coords[m].size(); ++g) v += to_double(coords[m][g]) * generator_values[g];
    return v;
}

namespace {

// Solves sum_i r_i basis_i = y over Q, if representable.
std::optional<std::vector<Rat>> solve_in_span(const std::vector<std::vector<Rat>>& basis,
                                              const std::vector<Rat>& y) {
    const size_t nb = basis.size();
    if (nb == 0) {
        for (const auto& c : y)
            if (c != Rat(0)) return std::nullopt;
        return std::vector<Rat>{};
    }
    const size_t g = y.size();
    // Augmented system over the generator coordinates: columns = basis rows.
    std::vector<std::vector<Rat>> m(g, std::vector<Rat>(nb + 1, Rat(0)));
    for (size_t row = 0; row < g; ++row) {
        for (size_t col = 0; col < nb; ++col) m[row][col] = basis[col][row];
        m[row][nb] = y[row];
    }
    std::vector<int> pivot_col_of_row(g, -1);
    size_t rank = 0;
    for (size_t col = 0; col < nb && rank < g; ++col) {
        size_t piv = rank;
        while (piv < g && m[piv][col] == Rat(0)) ++piv;
        if (piv == g) continue;
        std::swap(m[piv], m[rank]);
        Rat inv = Rat(1) / m[rank][col];
        for (size_t c2 = col; c2 <= nb; ++c2) m[rank][c2] *= inv;
        for (size_t r2 = 0; r2 < g; ++r2) {
            if (r2 == rank || m[r2][col] == Rat(0)) continue;
            Rat f = m[r2][col];
            for (size_t c2 = col; c2 <= nb; ++c2) m[r2][c2] -= f * m[rank][c2];
        }
        pivot_col_of_row[rank] = static_cast<int>(col);
        ++rank;
    }
    for (size_t r2 = rank; r2 < g; ++r2)
        if (m[r2][nb] != Rat(0)) return std::nullopt;  // inconsistent: y not in the span
    std::vector<Rat> r(nb, Rat(0));
    for (size_t row = 0; row < rank; ++row) r[static_cast<size_t>(pivot_col_of_row[row])] = m[row][nb];
    return r;
}

}  // namespace

LatticeLift rational_basis_lift(const QLinearSet& freqs) {
    if (freqs.coords.empty()) throw std::invalid_argument("rational_basis_lift: no frequencies");
    const size_t g = freqs.generator_values.size();
    for (const auto& c : freqs.coords)
        if (c.size() != g) throw std::invalid_argument("rational_basis_lift: coordinate size mismatch");
    {
        std::vector<std::vector<Rat>> seen;
        for (const auto& c : freqs.coords) {
            if (std::find(seen.begin(), seen.end(), c) != seen.end())
                throw std::invalid_argument("rational_basis_lift: frequencies must be distinct");
            seen.push_back(c);
        }
    }

    LatticeLift lift;
    std::vector<std::vector<Rat>> basis_rows;
    std::vector<std::vector<Rat>> rational_coeffs(freqs.size());
    for (size_t m = 0; m < freqs.size(); ++m) {
        const auto& y = freqs.coords[m];
        bool zero = std::all_of(y.begin(), y.end(), [](const Rat& c) { return c == Rat(0); });
        if (zero) {
            rational_coeffs[m] = {};
            continue;
        }
        if (auto r = solve_in_span(basis_rows, y)) {
            rational_coeffs[m] = std::move(*r);
        } else {
            basis_rows.push_back(y);
            lift.basis.push_back(m);
            rational_coeffs[m].assign(basis_rows.size(), Rat(0));
            rational_coeffs[m].back() = Rat(1);
        }
    }
    const size_t d = basis_rows.size();
    if (d == 0) throw std::invalid_argument("rational_basis_lift: all frequencies are zero");
    if (d > 4) throw std::invalid_argument("rational_basis_lift: torus dimension above 4");

    lift.kappa = 1;
    for (const auto& r : rational_coeffs)
        for (const auto& c : r) lift.kappa = big_lcm(lift.kappa, c.denominator());

    for (size_t m = 0; m < freqs.size(); ++m) {
        std::vector<long long> e(d, 0);
        for (size_t l = 0; l < rational_coeffs[m].size(); ++l) {
            BigInt v = rational_coeffs[m][l].numerator() * (lift.kappa / rational_coeffs[m][l].denominator());
            if (v > BigInt(1) << 62 || v < -(BigInt(1) << 62))
                throw std::invalid_argument("rational_basis_lift: exponent overflow");
            e[l] = v.convert_to<long long>();
        }
        lift.exponents.push_back(std::move(e));
    }
    for (size_t l = 0; l < d; ++l) {
        lift.basis_values.push_back(freqs.value(lift.basis[l]));
        lift.beta_tilde.push_back(freqs.value(lift.basis[l]) / to_double(lift.kappa));
    }
    return lift;
}

double LatticeLift::frequency_of(const std::vector<long long>& exponent) const {
    double v = 0.0;
    for (size_t l = 0; l < beta_tilde.size(); ++l) v += beta_tilde[l] * static_cast<double>(exponent[l]);
    return v;
}

TrigPoly lift_to_trigpoly(const LatticeLift& lift, const std::vector<std::complex<double>>& weights) {
    if (weights.size() != lift.exponents.size())
        throw std::invalid_argument("lift_to_trigpoly: weight count mismatch");
    TrigPoly poly(lift.dimension());
    for (size_t m = 0; m < weights.size(); ++m) {
        std::vector<int> e(lift.exponents[m].size());
        for (size_t l = 0; l < e.size(); ++l) {
            if (std::abs(lift.exponents[m][l]) > (1 << 30))
                throw std::invalid_argument("lift_to_trigpoly: exponent too large");
            e[l] = static_cast<int>(lift.exponents[m][l]);
        }
        poly.add_term(std::move(e), weights[m]);
    }
    return poly;
}

}  // namespace qid
