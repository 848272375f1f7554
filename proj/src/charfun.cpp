#include "qid/charfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stack>
#include <stdexcept>

#include "qid/fft.hpp"

namespace qid {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double principal_arg_jump(const cplx& from, const cplx& to) { return std::arg(to / from); }

}  // namespace

std::complex<double> eval_cf(const MixtureDistribution& F, double t, PartSelector part) {
    switch (part) {
        case PartSelector::d:
            return F.discrete().cf(t);
        case PartSelector::a:
            return F.ac() ? F.ac()->cf(t) : cplx{0.0, 0.0};
        case PartSelector::s:
            return F.singular() ? F.singular()->cf(t) : cplx{0.0, 0.0};
        case PartSelector::all: {
            cplx v = F.c_d() * F.discrete().cf(t);
            if (F.ac()) v += F.c_a() * F.ac()->cf(t);
            if (F.singular()) v += F.c_s() * F.singular()->cf(t);
            return v;
        }
    }
    return {};
}

namespace {

// e^{i pi q x} for rational x, by exact reduction of q*num mod 2*den.
cplx unit_exact_pi(const BigInt& q, const Rat& x) {
    BigInt num = q * x.numerator();
    const BigInt& den = x.denominator();
    BigInt m = num % (2 * den);
    if (m < 0) m += 2 * den;
    if (m == 0) return {1.0, 0.0};
    if (m == den) return {-1.0, 0.0};
    double angle = kPi * to_double(Rat(m, den));
    return {std::cos(angle), std::sin(angle)};
}

cplx discrete_exact_pi(const AtomicMeasure& m, const BigInt& q) {
    cplx s{0.0, 0.0};
    for (const auto& a : m.atoms()) {
        if (a.loc.exact) {
            s += a.weight * unit_exact_pi(q, a.loc.rat);
        } else {
            if (abs(q) > BigInt(1) << 40)
                throw std::invalid_argument("eval_cf_exact_pi: inexact atom location with large q");
            double ph = kPi * to_double(q) * a.loc.value;
            s += a.weight * cplx(std::cos(ph), std::sin(ph));
        }
    }
    return s;
}

cplx singular_exact_pi(const SingularSpec& s, const BigInt& q) {
    if (const auto* p = std::get_if<ProductCF>(&s.node())) return {product_cf_exact_pi(*p, q), 0.0};
    if (const auto* sh = std::get_if<SingularShift>(&s.node()))
        return singular_exact_pi(*sh->base, q) * discrete_exact_pi(sh->atoms, q);
    if (const auto* cv = std::get_if<SingularConv>(&s.node()))
        return singular_exact_pi(*cv->lhs, q) * singular_exact_pi(*cv->rhs, q);
    if (const auto* mx = std::get_if<SingularMix>(&s.node())) {
        cplx acc{0.0, 0.0};
        for (const auto& [w, part] : mx->parts) acc += w * singular_exact_pi(*part, q);
        return acc;
    }
    if (abs(q) > BigInt(1) << 40)
        throw std::invalid_argument("eval_cf_exact_pi: singular part has no exact path for large q");
    return s.cf(kPi * to_double(q));
}

}  // namespace

std::complex<double> eval_cf_exact_pi(const MixtureDistribution& F, const BigInt& q, PartSelector part) {
    if (part == PartSelector::d) return discrete_exact_pi(F.discrete(), q);
    if (part == PartSelector::s) return F.singular() ? singular_exact_pi(*F.singular(), q) : cplx{};
    if (part == PartSelector::a) {
        if (!F.ac()) return {};
        if (abs(q) > BigInt(1) << 40) return {};  // |f_a| <= bv_norm / |pi q|
        return F.ac()->cf(kPi * to_double(q));
    }
    cplx v = F.c_d() * discrete_exact_pi(F.discrete(), q);
    if (F.singular()) v += F.c_s() * singular_exact_pi(*F.singular(), q);
    if (F.ac() && abs(q) <= BigInt(1) << 40) v += F.c_a() * F.ac()->cf(kPi * to_double(q));
    return v;
}

double CfTrace::max_arg_jump() const {
    double m = 0.0;
    for (size_t i = 0; i + 1 < args.size(); ++i) m = std::max(m, std::abs(args[i + 1] - args[i]));
    return m;
}

CfTrace distinguished_log(const std::function<cplx(double)>& f, double t_min, double t_max,
                          const TraceOptions& opts) {
    if (!(t_min < t_max)) throw std::invalid_argument("distinguished_log: empty interval");

    auto eval = [&](double t) -> cplx {
        cplx v = f(t);
        if (!(std::abs(v) > opts.zero_floor)) throw ZeroCrossingError(t);
        return v;
    };

    CfTrace trace;
    trace.grid.reserve(4 * opts.initial_panels);
    trace.values.reserve(4 * opts.initial_panels);

    // In-order depth-first refinement; keeps the grid sorted as it grows.
    struct Seg {
        double t0, t1;
        cplx v0, v1;
        int depth;
    };

    // Panel boundaries include 0 when it lies inside the range.
    std::vector<double> bounds;
    size_t panels = opts.initial_panels;
    for (size_t i = 0; i <= panels; ++i) bounds.push_back(t_min + (t_max - t_min) * static_cast<double>(i) / static_cast<double>(panels));
    if (t_min < 0.0 && t_max > 0.0) {
        bounds.push_back(0.0);
        std::sort(bounds.begin(), bounds.end());
        bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    }

    std::vector<cplx> bvals(bounds.size());
    for (size_t i = 0; i < bounds.size(); ++i) bvals[i] = eval(bounds[i]);

    trace.grid.push_back(bounds[0]);
    trace.values.push_back(bvals[0]);

    for (size_t i = 0; i + 1 < bounds.size(); ++i) {
        std::stack<Seg> todo;
        todo.push({bounds[i], bounds[i + 1], bvals[i], bvals[i + 1], 0});
        while (!todo.empty()) {
            Seg s = todo.top();
            todo.pop();
            double jump = std::abs(principal_arg_jump(s.v0, s.v1));
            if (jump < opts.jump_threshold) {
                trace.grid.push_back(s.t1);
                trace.values.push_back(s.v1);
                continue;
            }
            if (s.depth >= opts.max_depth) throw ZeroCrossingError(0.5 * (s.t0 + s.t1));
            if (trace.grid.size() + todo.size() > opts.max_points)
                throw std::runtime_error("distinguished_log: refinement exceeded the point budget");
            double tm = 0.5 * (s.t0 + s.t1);
            cplx vm = eval(tm);
            // push right first so the left half is processed first
            todo.push({tm, s.t1, vm, s.v1, s.depth + 1});
            todo.push({s.t0, tm, s.v0, vm, s.depth + 1});
        }
    }

    // Unwrap outward from the anchor (t = 0 if present, else the point
    // closest to zero), with the principal argument there.
    size_t anchor = 0;
    for (size_t i = 1; i < trace.grid.size(); ++i)
        if (std::abs(trace.grid[i]) < std::abs(trace.grid[anchor])) anchor = i;

    const size_t n = trace.grid.size();
    trace.args.assign(n, 0.0);
    trace.log_mod.assign(n, 0.0);
    for (size_t i = 0; i < n; ++i) trace.log_mod[i] = std::log(std::abs(trace.values[i]));
    trace.args[anchor] = std::arg(trace.values[anchor]);
    for (size_t i = anchor + 1; i < n; ++i)
        trace.args[i] = trace.args[i - 1] + principal_arg_jump(trace.values[i - 1], trace.values[i]);
    for (size_t i = anchor; i-- > 0;)
        trace.args[i] = trace.args[i + 1] - principal_arg_jump(trace.values[i], trace.values[i + 1]);
    return trace;
}

CfTrace distinguished_log(const MixtureDistribution& F, double t_max, const TraceOptions& opts,
                          PartSelector part) {
    return distinguished_log([&F, part](double t) { return eval_cf(F, t, part); }, -t_max, t_max, opts);
}

namespace detail {

std::optional<Lattice> detect_lattice(const AtomicMeasure& m) {
    if (m.empty()) return std::nullopt;
    Lattice lat;
    lat.x0 = m.atoms().front().loc;
    if (m.size() == 1) {
        lat.h = 0.0;
        lat.exact = lat.x0.exact;
        lat.offsets = {0};
        return lat;
    }
    if (m.all_exact()) {
        Rat g{0};
        for (const auto& a : m.atoms()) g = rat_gcd(g, a.loc.rat - lat.x0.rat);
        lat.h_exact = g;
        lat.h = to_double(g);
        lat.exact = true;
        for (const auto& a : m.atoms()) {
            Rat q = (a.loc.rat - lat.x0.rat) / g;
            if (q.denominator() != 1 || q.numerator() > BigInt(1) << 40) return std::nullopt;
            lat.offsets.push_back(q.numerator().convert_to<long long>());
        }
        return lat;
    }
    // Floating lattice detection: tolerance-based Euclid over the diffs.
    const double span = m.atoms().back().loc.value - lat.x0.value;
    const double tol = 1e-9 * std::max(1.0, span);
    auto fgcd = [tol](double a, double b) {
        a = std::abs(a);
        b = std::abs(b);
        if (a < b) std::swap(a, b);
        while (b > tol) {
            double r = std::fmod(a, b);
            if (r > 0.5 * b) r = b - r;  // distance to the nearest multiple
            a = b;
            b = r;
        }
        return a;
    };
    double g = 0.0;
    for (const auto& a : m.atoms()) g = fgcd(g, a.loc.value - lat.x0.value);
    if (g <= tol) return std::nullopt;
    for (const auto& a : m.atoms()) {
        double ratio = (a.loc.value - lat.x0.value) / g;
        double n = std::round(ratio);
        if (std::abs(ratio - n) > 1e-6 || std::abs(n) > 1e9) return std::nullopt;
        lat.offsets.push_back(static_cast<long long>(n));
    }
    lat.h = g;
    lat.exact = false;
    return lat;
}

}  // namespace detail

namespace {

// Samples P(theta) = sum p_k e^{i theta n_k} on an N-point uniform grid of
// [0, 2pi) via an FFT (placement at n_k mod N is exact).
std::vector<cplx> sample_periodized(const std::vector<long long>& offsets,
                                    const std::vector<double>& weights, int N) {
    std::vector<cplx> a(static_cast<size_t>(N), cplx{0.0, 0.0});
    for (size_t k = 0; k < offsets.size(); ++k) {
        long long r = offsets[k] % N;
        if (r < 0) r += N;
        a[static_cast<size_t>(r)] += weights[k];
    }
    dft_1d(a, +1);  // e^{+i 2pi j n / N}
    return a;
}

}  // namespace

double certified_min_modulus_fd(const AtomicMeasure& F_d) {
    if (F_d.empty()) throw std::invalid_argument("certified_min_modulus_fd: empty measure");
    if (F_d.size() == 1) return std::abs(F_d.atoms()[0].weight);
    auto lat = detail::detect_lattice(F_d);
    if (!lat)
        throw std::invalid_argument(
            "certified_min_modulus_fd: unsupported support structure (no lattice found); "
            "declare the rational-linear structure explicitly");

    std::vector<double> weights;
    weights.reserve(F_d.size());
    double lip = 0.0;  // |dP/dtheta| <= sum |p_k| |n_k|
    for (size_t k = 0; k < F_d.size(); ++k) {
        weights.push_back(F_d.atoms()[k].weight);
        lip += std::abs(F_d.atoms()[k].weight) * static_cast<double>(std::abs(lat->offsets[k]));
    }

    long long span = *std::max_element(lat->offsets.begin(), lat->offsets.end()) -
                     *std::min_element(lat->offsets.begin(), lat->offsets.end());
    int N = 1 << 12;
    while (N < 4 * span && N < (1 << 22)) N <<= 1;

    double best = 0.0;
    for (; N <= (1 << 22); N <<= 1) {
        auto samples = sample_periodized(lat->offsets, weights, N);
        double mn = std::abs(samples[0]);
        for (const auto& v : samples) mn = std::min(mn, std::abs(v));
        double slack = lip * (kPi / static_cast<double>(N));  // L * delta / 2
        double bound = mn - slack;
        best = std::max(best, bound);
        if (bound > 0.0 && slack <= 0.5 * mn) return bound;
    }
    return std::max(best, 0.0);
}

double certified_min_modulus_fd_lifted(const QLinearSet& locations,
                                       const std::vector<double>& weights) {
    if (locations.size() != weights.size())
        throw std::invalid_argument("certified_min_modulus_fd_lifted: weight count mismatch");
    auto lift = rational_basis_lift(locations);
    const int d = lift.dimension();
    int log2n = d == 1 ? 14 : (d == 2 ? 9 : (d == 3 ? 6 : 4));
    const int log2n_max = d == 1 ? 22 : (d == 2 ? 12 : (d == 3 ? 8 : 6));

    double best = 0.0;
    for (; log2n <= log2n_max; ++log2n) {
        const int N = 1 << log2n;
        size_t total = 1;
        for (int j = 0; j < d; ++j) total *= static_cast<size_t>(N);
        std::vector<cplx> box(total, cplx{0.0, 0.0});
        std::vector<size_t> stride(static_cast<size_t>(d));
        stride[static_cast<size_t>(d) - 1] = 1;
        for (int j = d - 2; j >= 0; --j)
            stride[static_cast<size_t>(j)] = stride[static_cast<size_t>(j) + 1] * static_cast<size_t>(N);
        for (size_t m = 0; m < weights.size(); ++m) {
            size_t idx = 0;
            for (int j = 0; j < d; ++j) {
                long long r = lift.exponents[m][static_cast<size_t>(j)] % N;
                if (r < 0) r += N;
                idx += static_cast<size_t>(r) * stride[static_cast<size_t>(j)];
            }
            box[idx] += weights[m];
        }
        dft(box, std::vector<int>(static_cast<size_t>(d), N), +1);
        double mn = std::abs(box[0]);
        for (const auto& v : box) mn = std::min(mn, std::abs(v));
        // per-axis Lipschitz constants of the lifted polynomial
        double slack = 0.0;
        for (int j = 0; j < d; ++j) {
            double lip = 0.0;
            for (size_t m = 0; m < weights.size(); ++m)
                lip += std::abs(weights[m]) *
                       std::abs(static_cast<double>(lift.exponents[m][static_cast<size_t>(j)]));
            slack += lip * (kPi / static_cast<double>(N));
        }
        double bound = mn - slack;
        best = std::max(best, bound);
        if (bound > 0.0 && slack <= 0.5 * mn) return bound;
    }
    return std::max(best, 0.0);
}

double tail_bound_fa(const GridDensity& F_a, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("tail_bound_fa: T must be positive");
    return F_a.bv_norm() / T;
}

namespace {

double mixture_cf_lipschitz(const MixtureDistribution& F) {
    double lip = F.c_d() * F.discrete().mean_abs_location();
    if (F.ac()) lip += F.c_a() * F.ac()->mean_abs_x();
    if (F.singular()) lip += F.c_s() * F.singular()->mean_abs_bound();
    return lip;
}

}  // namespace

WindingResult winding_index(const MixtureDistribution& F) {
    if (F.c_a() == 0.0) return WindingResult{};
    double mu = certified_min_modulus_fd(F.discrete());
    double margin = F.c_d() * mu - F.c_s();
    if (!(margin > 0.0))
        throw std::invalid_argument("winding_index: dominated singular part not certified");

    // Past T the ac term keeps |R_a - 1| <= 0.3, so the argument deviates
    // from its limit by < asin(0.3) on each side: total < 0.1 turns.
    double V = F.ac()->bv_norm();
    double T = std::max(16.0, F.c_a() * V / (0.3 * margin));

    auto denom = [&](double t) {
        cplx v = F.c_d() * F.discrete().cf(t);
        if (F.singular()) v += F.c_s() * F.singular()->cf(t);
        return v;
    };
    auto ra = [&](double t) { return 1.0 + F.c_a() * F.ac()->cf(t) / denom(t); };

    CfTrace trace = distinguished_log(ra, -T, T);
    double a_minus = trace.args.front(), a_plus = trace.args.back();
    double raw = (a_plus - a_minus) / (2.0 * kPi);
    int index = static_cast<int>(std::lround(raw));
    if (std::abs(raw - index) >= 0.1)
        throw std::runtime_error("winding_index: winding not within 0.1 of an integer (grid failure)");
    return WindingResult{index, a_plus, a_minus, T, trace.max_arg_jump()};
}

double certified_inf_modulus(const MixtureDistribution& F) {
    if (F.unclassified_weight() != 0.0) return 0.0;
    double mu;
    try {
        mu = certified_min_modulus_fd(F.discrete());
    } catch (const std::invalid_argument&) {
        return 0.0;
    }
    double margin = F.c_d() * mu - F.c_s();
    if (!(margin > 0.0)) return 0.0;

    double T, beyond;
    if (F.c_a() > 0.0) {
        double V = F.ac()->bv_norm();
        T = std::max(16.0, 4.0 * F.c_a() * V / margin);
        beyond = 0.5 * margin - F.c_a() * tail_bound_fa(*F.ac(), T);
    } else {
        T = 16.0;
        beyond = margin;
    }

    double lip = mixture_cf_lipschitz(F);
    double bound_grid = 0.0;
    for (int N = 1 << 13; N <= (1 << 19); N <<= 1) {
        double mn = std::numeric_limits<double>::infinity();
        double dt = 2.0 * T / N;
        for (int j = 0; j <= N; ++j) mn = std::min(mn, std::abs(eval_cf(F, -T + dt * j)));
        double slack = lip * dt / 2.0;
        bound_grid = mn - slack;
        if (slack <= 0.5 * mn) break;
    }

    double result = std::min(bound_grid, beyond);
    if (F.c_a() == 0.0) result = std::max(result, margin);
    return std::max(result, 0.0);
}

}  // namespace qid
