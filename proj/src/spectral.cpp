#include "qid/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qid/fft.hpp"

namespace qid {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double principal_jump(const cplx& from, const cplx& to) { return std::arg(to / from); }

// Sequentially unwrapped arguments of a cyclic sample sequence; fails when
// a consecutive jump reaches pi/2 (caller refines). Returns args and the
// full-cycle winding.
struct Unwrapped {
    std::vector<double> args;
    long winding = 0;
    bool ok = false;
};

Unwrapped unwrap_cycle(const std::vector<cplx>& v, double floor) {
    Unwrapped u;
    u.args.resize(v.size());
    if (std::abs(v[0]) <= floor) return u;
    u.args[0] = std::arg(v[0]);
    for (size_t j = 1; j < v.size(); ++j) {
        if (std::abs(v[j]) <= floor) return u;
        double d = principal_jump(v[j - 1], v[j]);
        if (std::abs(d) >= kPi / 2) return u;
        u.args[j] = u.args[j - 1] + d;
    }
    double wrap = principal_jump(v.back(), v[0]);
    if (std::abs(wrap) >= kPi / 2) return u;
    double total = u.args.back() + wrap - u.args[0];
    u.winding = std::lround(total / (2 * kPi));
    u.ok = true;
    return u;
}

std::vector<cplx> sample_lattice_cf(const std::vector<long long>& offsets,
                                    const std::vector<double>& weights, int N) {
    std::vector<cplx> a(static_cast<size_t>(N), cplx{0.0, 0.0});
    for (size_t k = 0; k < offsets.size(); ++k) {
        long long r = offsets[k] % N;
        if (r < 0) r += N;
        a[static_cast<size_t>(r)] += weights[k];
    }
    dft_1d(a, +1);
    return a;
}

// Signed index of an FFT bin.
long signed_bin(size_t j, int N) {
    long v = static_cast<long>(j);
    if (v > N / 2) v -= N;
    return v;
}

}  // namespace

DiscreteSpectrum extract_discrete(const AtomicMeasure& F_d, const ExtractOptions& opts) {
    if (F_d.empty()) throw std::invalid_argument("extract_discrete: empty measure");
    if (std::abs(F_d.total_mass() - 1.0) > 1e-6)
        throw std::invalid_argument("extract_discrete: representation requires unit total mass");
    if (F_d.size() == 1) {
        DiscreteSpectrum out;
        out.gamma0 = F_d.atoms()[0].loc.value;
        return out;
    }
    auto lat = detail::detect_lattice(F_d);
    if (!lat)
        throw std::invalid_argument(
            "extract_discrete: non-lattice support; use extract_discrete_lifted with declared "
            "Q-linear structure");

    std::vector<double> weights;
    for (const auto& a : F_d.atoms()) weights.push_back(a.weight);

    for (int log2n = opts.initial_log2_n; log2n <= opts.max_log2_n; ++log2n) {
        const int N = 1 << log2n;
        auto samples = sample_lattice_cf(lat->offsets, weights, N);
        auto uw = unwrap_cycle(samples, 1e-13);
        if (!uw.ok) continue;

        std::vector<cplx> psi(static_cast<size_t>(N));
        for (size_t j = 0; j < psi.size(); ++j) {
            double theta = 2 * kPi * static_cast<double>(j) / N;
            psi[j] = cplx(std::log(std::abs(samples[j])),
                          uw.args[j] - static_cast<double>(uw.winding) * theta);
        }
        dft_1d(psi, -1);
        for (auto& c : psi) c /= static_cast<double>(N);

        // Aliasing control: the outer quarter of the spectrum must be below
        // the tail target before the coefficients are trusted.
        double edge = 0.0;
        for (size_t j = 0; j < psi.size(); ++j) {
            long v = signed_bin(j, N);
            if (std::abs(v) > 3 * N / 8) edge += std::abs(psi[j]);
        }
        if (edge > opts.coefficient_tail_target && log2n < opts.max_log2_n) continue;

        DiscreteSpectrum out;
        out.gamma0 = lat->x0.value + lat->h * static_cast<double>(uw.winding);
        out.truncation_l1_error = edge;
        for (size_t j = 0; j < psi.size(); ++j) {
            long v = signed_bin(j, N);
            if (v == 0) continue;
            double mag = std::abs(psi[j]);
            out.im_residual = std::max(out.im_residual, std::abs(psi[j].imag()));
            if (mag < opts.drop_tol) {
                out.truncation_l1_error += mag;
                continue;
            }
            out.lambdas[lat->h * static_cast<double>(v)] += psi[j].real();
        }
        return out;
    }
    throw std::runtime_error("extract_discrete: FFT refinement failed to resolve the logarithm");
}

DiscreteSpectrum extract_discrete_lifted(const QLinearSet& locations,
                                         const std::vector<double>& weights,
                                         const ExtractOptions& opts) {
    if (locations.size() != weights.size())
        throw std::invalid_argument("extract_discrete_lifted: weight count mismatch");
    auto lift = rational_basis_lift(locations);
    const int d = lift.dimension();
    if (d == 1) {
        // one-dimensional lifts are plain lattices
        std::vector<AtomicMeasure::Atom> atoms;
        for (size_t m = 0; m < weights.size(); ++m)
            atoms.push_back({Loc(lift.beta_tilde[0] * static_cast<double>(lift.exponents[m][0])),
                             weights[m]});
        return extract_discrete(AtomicMeasure::from_atoms(std::move(atoms)), opts);
    }

    int per_axis_log2 = d == 2 ? 9 : (d == 3 ? 6 : 4);
    for (; per_axis_log2 <= (d == 2 ? 12 : (d == 3 ? 8 : 6)); ++per_axis_log2) {
        const int N = 1 << per_axis_log2;
        size_t total = 1;
        for (int j = 0; j < d; ++j) total *= static_cast<size_t>(N);

        std::vector<cplx> box(total, cplx{0.0, 0.0});
        for (size_t m = 0; m < weights.size(); ++m) {
            size_t idx = 0;
            for (int j = 0; j < d; ++j) {
                long long r = lift.exponents[m][static_cast<size_t>(j)] % N;
                if (r < 0) r += N;
                idx = idx * static_cast<size_t>(N) + static_cast<size_t>(r);
            }
            box[idx] += weights[m];
        }
        dft(box, std::vector<int>(static_cast<size_t>(d), N), +1);

        // Row-major unwrap: each point from its predecessor along the last
        // axis; the head of each run from the previous axis.
        std::vector<double> args(total, 0.0);
        std::vector<size_t> stride(static_cast<size_t>(d));
        stride[static_cast<size_t>(d) - 1] = 1;
        for (int j = d - 2; j >= 0; --j)
            stride[static_cast<size_t>(j)] = stride[static_cast<size_t>(j) + 1] * static_cast<size_t>(N);

        bool ok = true;
        args[0] = std::arg(box[0]);
        for (size_t i = 1; i < total && ok; ++i) {
            // predecessor: along the last axis whose index is nonzero
            size_t pred = i;
            for (int j = d - 1; j >= 0; --j) {
                size_t coord = (i / stride[static_cast<size_t>(j)]) % static_cast<size_t>(N);
                if (coord != 0) {
                    pred = i - stride[static_cast<size_t>(j)];
                    break;
                }
            }
            if (std::abs(box[i]) < 1e-13 || std::abs(box[pred]) < 1e-13) {
                ok = false;
                break;
            }
            double dj = principal_jump(box[pred], box[i]);
            if (std::abs(dj) >= kPi / 2) {
                ok = false;
                break;
            }
            args[i] = args[pred] + dj;
        }
        if (!ok) continue;

        // Per-axis windings at the leading edge lines.
        std::vector<long> winding(static_cast<size_t>(d), 0);
        for (int j = 0; j < d && ok; ++j) {
            size_t last = stride[static_cast<size_t>(j)] * static_cast<size_t>(N - 1);
            double wrap = principal_jump(box[last], box[0]);
            if (std::abs(wrap) >= kPi / 2) {
                ok = false;
                break;
            }
            double total_sweep = args[last] + wrap - args[0];
            winding[static_cast<size_t>(j)] = std::lround(total_sweep / (2 * kPi));
        }
        if (!ok) continue;

        std::vector<cplx> psi(total);
        for (size_t i = 0; i < total; ++i) {
            double lin = 0.0;
            for (int j = 0; j < d; ++j) {
                size_t coord = (i / stride[static_cast<size_t>(j)]) % static_cast<size_t>(N);
                lin += static_cast<double>(winding[static_cast<size_t>(j)]) * 2 * kPi *
                       static_cast<double>(coord) / N;
            }
            psi[i] = cplx(std::log(std::abs(box[i])), args[i] - lin);
        }
        dft(psi, std::vector<int>(static_cast<size_t>(d), N), -1);
        for (auto& c : psi) c /= static_cast<double>(total);

        DiscreteSpectrum out;
        for (int j = 0; j < d; ++j)
            out.gamma0 += static_cast<double>(winding[static_cast<size_t>(j)]) * lift.beta_tilde[static_cast<size_t>(j)];
        double edge = 0.0;
        for (size_t i = 0; i < total; ++i) {
            std::vector<long long> v(static_cast<size_t>(d));
            bool zero = true, near_edge = false;
            for (int j = 0; j < d; ++j) {
                size_t coord = (i / stride[static_cast<size_t>(j)]) % static_cast<size_t>(N);
                long sv = signed_bin(coord, N);
                v[static_cast<size_t>(j)] = sv;
                zero = zero && sv == 0;
                near_edge = near_edge || std::abs(sv) > 3 * N / 8;
            }
            double mag = std::abs(psi[i]);
            if (near_edge) edge += mag;
            if (zero) continue;
            out.im_residual = std::max(out.im_residual, std::abs(psi[i].imag()));
            if (mag < opts.drop_tol) {
                out.truncation_l1_error += mag;
                continue;
            }
            out.lambdas[lift.frequency_of(v)] += psi[i].real();
        }
        out.truncation_l1_error += edge;
        if (edge > opts.coefficient_tail_target && per_axis_log2 < (d == 2 ? 12 : (d == 3 ? 8 : 6)))
            continue;
        return out;
    }
    throw std::runtime_error("extract_discrete_lifted: torus refinement failed");
}

InvertedDiscrete invert_fd(const AtomicMeasure& F_d, const ExtractOptions& opts) {
    if (F_d.empty()) throw std::invalid_argument("invert_fd: empty measure");
    if (F_d.size() == 1) {
        const auto& a = F_d.atoms()[0];
        if (a.weight == 0.0) throw std::invalid_argument("invert_fd: zero mass");
        return InvertedDiscrete{AtomicMeasure::dirac(-a.loc, 1.0 / a.weight), 0.0, 0.0};
    }
    auto lat = detail::detect_lattice(F_d);
    if (!lat) throw std::invalid_argument("invert_fd: unsupported support structure (no lattice)");

    std::vector<double> weights;
    for (const auto& a : F_d.atoms()) weights.push_back(a.weight);

    for (int log2n = opts.initial_log2_n; log2n <= opts.max_log2_n; ++log2n) {
        const int N = 1 << log2n;
        auto samples = sample_lattice_cf(lat->offsets, weights, N);
        double mn = 1e300;
        for (const auto& v : samples) mn = std::min(mn, std::abs(v));
        if (mn < 1e-12) throw std::invalid_argument("invert_fd: discrete CF not certified away from 0");

        std::vector<cplx> inv(samples.size());
        for (size_t j = 0; j < samples.size(); ++j) inv[j] = 1.0 / samples[j];
        dft_1d(inv, -1);
        for (auto& c : inv) c /= static_cast<double>(N);

        // relative tail truncation at 1e-12
        std::vector<size_t> order(inv.size());
        for (size_t j = 0; j < inv.size(); ++j) order[j] = j;
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t b) { return std::abs(inv[a]) > std::abs(inv[b]); });
        double total = 0.0;
        for (const auto& c : inv) total += std::abs(c);
        double kept = 0.0;
        size_t cut = 0;
        while (cut < order.size() && total - kept > 1e-12 * total) kept += std::abs(inv[order[cut++]]);

        std::vector<AtomicMeasure::Atom> atoms;
        for (size_t r = 0; r < cut; ++r) {
            size_t j = order[r];
            long v = signed_bin(j, N);
            Loc loc = lat->exact ? Loc(Rat(-1) * lat->x0.rat + lat->h_exact * Rat(v))
                                 : Loc(-lat->x0.value + lat->h * static_cast<double>(v));
            atoms.push_back({loc, inv[j].real()});
        }
        InvertedDiscrete out{AtomicMeasure::from_atoms(std::move(atoms)), 0.0, total - kept};

        // verification: sup |f_d * g - 1| over an incommensurate t-grid
        double period = lat->h > 0 ? 2 * kPi / lat->h : 1.0;
        for (int i = 0; i < 257; ++i) {
            double t = period * (static_cast<double>(i) * 0.03125 + 0.37 * std::sin(i));
            cplx prod = F_d.cf(t) * out.atoms.cf(t);
            out.residual = std::max(out.residual, std::abs(prod - 1.0));
        }
        if (out.residual < 1e-9 || log2n == opts.max_log2_n) return out;
    }
    throw std::runtime_error("invert_fd: refinement failed");
}

std::complex<double> winding_kernel(double t, int m) {
    return cplx(0.0, 2.0 * static_cast<double>(m) * std::atan(t));
}

VaRecovery recover_va(const MixtureDistribution& F, int index_ma, const VaOptions& opts) {
    if (F.c_a() == 0.0) {
        // contract: v_a is identically zero when there is no ac part
        VaRecovery out{GridDensity::from_samples(-1.0, 1.0, {0.0, 0.0, 0.0}), index_ma, 0.0, 0.0, 0.0};
        return out;
    }
    const double cds = F.c_d() + F.c_s();
    auto denom = [&](double t) {
        cplx v = F.c_d() * F.discrete().cf(t);
        if (F.singular()) v += F.c_s() * F.singular()->cf(t);
        return v;
    };
    auto f_ads = [&](double t) -> cplx {
        return cds + F.c_a() * cds * F.ac()->cf(t) / denom(t);
    };

    const double T = opts.t_max;
    for (int log2n = opts.log2_n; log2n <= opts.log2_n + 4; ++log2n) {
        const size_t N = size_t{1} << log2n;
        const double dt = 2.0 * T / static_cast<double>(N);
        std::vector<cplx> vals(N + 1);  // both endpoints, folded into one bin below
        for (size_t j = 0; j <= N; ++j) vals[j] = f_ads(-T + dt * static_cast<double>(j));

        // sequential unwrap anchored at t = 0 (index N/2)
        std::vector<double> args(N + 1);
        bool ok = true;
        args[N / 2] = std::arg(vals[N / 2]);
        for (size_t j = N / 2 + 1; j <= N && ok; ++j) {
            double d = principal_jump(vals[j - 1], vals[j]);
            ok = std::abs(d) < kPi / 2 && std::abs(vals[j]) > 1e-12;
            args[j] = args[j - 1] + d;
        }
        for (size_t j = N / 2; j-- > 0 && ok;) {
            double d = principal_jump(vals[j + 1], vals[j]);
            ok = std::abs(d) < kPi / 2 && std::abs(vals[j]) > 1e-12;
            args[j] = args[j + 1] + d;
        }
        if (!ok) continue;

        std::vector<cplx> u(N + 1);
        for (size_t j = 0; j <= N; ++j) {
            double t = -T + dt * static_cast<double>(j);
            u[j] = cplx(std::log(std::abs(vals[j])), args[j]) - winding_kernel(t, index_ma);
        }

        // additive constant from the outer edge_fraction of the grid
        size_t edge_n = std::max<size_t>(8, static_cast<size_t>(opts.edge_fraction * 0.5 * N));
        cplx c_sum{0.0, 0.0};
        for (size_t j = 0; j < edge_n; ++j) c_sum += u[j] + u[N - j];
        cplx C = c_sum / static_cast<double>(2 * edge_n);
        for (auto& x : u) x -= C;

        double edge_mag = 0.0;
        size_t probe = std::max<size_t>(4, N / 64);
        for (size_t j = 0; j < probe; ++j) edge_mag += std::abs(u[j]) + std::abs(u[N - j]);
        edge_mag /= static_cast<double>(2 * probe);
        if (edge_mag > opts.edge_tolerance)
            throw std::runtime_error(
                "recover_va: u(t) does not decay at the grid edges (window too small)");

        // piecewise-linear deconvolution: divide samples by the Fejer factor
        // so the interpolated density reproduces u on the grid
        const double dx = kPi / T;
        for (size_t j = 0; j <= N; ++j) {
            double t = -T + dt * static_cast<double>(j);
            double z = t * dx / 2.0;
            double fejer = std::abs(z) < 1e-8 ? 1.0 : std::pow(std::sin(z) / z, 2);
            u[j] /= fejer;
        }
        // periodic trapezoid: the +-T samples share one bin
        u[0] = 0.5 * (u[0] + u[N]);
        u.resize(N);
        dft_1d(u, -1);
        std::vector<double> samples(N);
        double im_res = 0.0;
        const double x_min = -static_cast<double>(N / 2) * dx;
        for (size_t k = 0; k < N; ++k) {
            long sk = static_cast<long>(k) - static_cast<long>(N / 2);
            size_t bin = static_cast<size_t>((sk % static_cast<long>(N) + static_cast<long>(N)) %
                                             static_cast<long>(N));
            double x = static_cast<double>(sk) * dx;
            cplx rot(std::cos(T * x), std::sin(T * x));
            cplx v = u[bin] * rot * (dt / (2 * kPi));
            samples[k] = v.real();
            im_res = std::max(im_res, std::abs(v.imag()));
        }

        VaRecovery out;
        out.index_ma = index_ma;
        out.v_a = GridDensity::from_samples(x_min, dx, std::move(samples));
        out.im_residual = im_res;
        out.l1_norm = out.v_a.abs_integral();

        // forward re-synthesis on the verification grid
        double vhat0 = out.v_a.cf(0.0).real();
        double sup = 0.0;
        for (int i = 0; i < opts.verify_points; ++i) {
            double t = -opts.verify_t_max +
                       2 * opts.verify_t_max * static_cast<double>(i) / (opts.verify_points - 1);
            cplx expo = out.v_a.cf(t) - vhat0 + winding_kernel(t, index_ma);
            sup = std::max(sup, std::abs(std::exp(expo) - f_ads(t)));
        }
        out.resynth_residual = sup;
        return out;
    }
    throw std::runtime_error("recover_va: argument unwrap failed at the maximum grid size");
}

WSeries compute_W(const MixtureDistribution& F, int n, int refine_level, const WOptions& opts) {
    if (n < 1) throw std::invalid_argument("compute_W: need n >= 1");
    if (!(F.c_s() > 0.0) || !F.singular()) throw std::invalid_argument("compute_W: c_s must be positive");
    double mu = certified_min_modulus_fd(F.discrete());
    if (!(mu > 0.0)) throw std::invalid_argument("compute_W: discrete CF not certified away from 0");
    const double ratio = F.c_s() / F.c_d();
    WSeries out;
    out.rho = F.c_s() / (F.c_d() * mu);
    if (out.rho >= 1.0) throw std::invalid_argument("compute_W: dominated condition fails (rho >= 1)");
    out.terms = n;
    out.refine_level = refine_level;
    out.mass_target = std::log1p(ratio);

    auto inverted = invert_fd(F.discrete());
    AtomicMeasure S_L = F.singular()->refine(refine_level);
    AtomicMeasure SI = convolve_atomic(S_L, inverted.atoms);

    std::vector<AtomicMeasure::Atom> accumulated;
    AtomicMeasure power;  // (S_L * I)^{*k}, pruned
    double tv_error = 0.0;
    double mass = 0.0;
    for (int k = 1; k <= n; ++k) {
        if (k == 1) {
            power = SI;
        } else {
            tv_error *= SI.tv_norm();
            power = convolve_atomic(power, SI);
        }
        auto pruned = prune(power, opts.prune_relative * power.tv_norm());
        power = std::move(pruned.atoms);
        tv_error += pruned.tv_error_budget;

        double coef = (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k) * std::pow(ratio, k);
        for (const auto& a : power.atoms()) accumulated.push_back({a.loc, coef * a.weight});
        mass += coef * power.total_mass();
        out.approx.tv_error_budget += std::abs(coef) * tv_error;
    }
    out.approx.atoms = AtomicMeasure::from_atoms(std::move(accumulated));
    out.mass = mass;

    // analytic tail of the alternating series
    for (int k = n + 1; k < n + 100000; ++k) {
        double term = std::pow(out.rho, k) / static_cast<double>(k);
        out.analytic_tail += term;
        if (term < 1e-18) break;
    }
    out.approx.tv_error_budget += out.analytic_tail;

    // CF-domain residuals against ln(1 + ratio f_s g_d)
    auto log_target = [&](double t) -> cplx {
        cplx z = ratio * F.singular()->cf(t) / F.discrete().cf(t);
        return std::log(1.0 + z);  // |z| <= rho < 1: principal branch
    };
    for (double t = -opts.residual_t_max; t <= opts.residual_t_max + 1e-9; t += opts.residual_step) {
        cplx z = ratio * F.singular()->cf(t) / F.discrete().cf(t);
        cplx partial{0.0, 0.0};
        cplx zk{1.0, 0.0};
        for (int k = 1; k <= n; ++k) {
            zk *= z;
            partial += (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k) * zk;
        }
        out.series_residual = std::max(out.series_residual, std::abs(partial - log_target(t)));
    }
    if (opts.atoms_residual) {
        for (double t = -opts.residual_t_max; t <= opts.residual_t_max + 1e-9;
             t += opts.atoms_residual_step) {
            cplx what = out.approx.atoms.cf(t);
            out.atoms_residual = std::max(out.atoms_residual, std::abs(what - log_target(t)));
        }
    }
    return out;
}

SpectralTriplet assemble_triplet(const MixtureDistribution& F, const TripletOptions& opts) {
    SpectralTriplet trip;
    trip.discrete = extract_discrete(F.discrete(), opts.extract);
    trip.gamma0 = trip.discrete.gamma0;

    if (F.c_a() > 0.0) {
        auto w = winding_index(F);
        trip.index_ma = w.index;
        trip.va_stats = recover_va(F, w.index, opts.va);
        trip.v_a = trip.va_stats->v_a;
    }
    if (F.c_s() > 0.0) {
        trip.w_stats = compute_W(F, opts.w_terms, opts.w_refine_level, opts.w);
        trip.W = trip.w_stats->approx;
        trip.w_cf = SpectralTriplet::WSeriesCf{F.c_s() / F.c_d(), *F.singular(), F.discrete()};
    }

    // gamma = gamma0 + int sin(x) dL(x): exact sums for the atomic parts,
    // trapezoid for v_a, closed form pi/2 per index unit.
    double gamma = trip.gamma0;
    for (const auto& [u, l] : trip.discrete.lambdas) gamma += l * std::sin(u);
    if (trip.v_a) {
        const auto& g = *trip.v_a;
        double acc = 0.0;
        for (size_t j = 0; j < g.samples().size(); ++j) {
            double x = g.x_min() + g.step() * static_cast<double>(j);
            double w = (j == 0 || j + 1 == g.samples().size()) ? 0.5 : 1.0;
            acc += w * std::sin(x) * g.samples()[j];
        }
        gamma += acc * g.step();
        gamma += static_cast<double>(trip.index_ma) * kPi / 2.0;  // int sin sgn e^{-|x|}/|x| = pi/2
    }
    if (trip.W)
        for (const auto& a : trip.W->atoms.atoms()) gamma += a.weight * std::sin(a.loc.value);
    trip.gamma = gamma;
    return trip;
}

double SpectralTriplet::L_d(double x) const {
    double s = 0.0;
    if (x < 0.0) {
        for (const auto& [u, l] : discrete.lambdas)
            if (u <= x) s += l;
    } else {
        for (const auto& [u, l] : discrete.lambdas)
            if (u > x) s -= l;
    }
    return s;
}

double SpectralTriplet::L_a(double x) const {
    if (!v_a) return 0.0;
    const auto& g = *v_a;
    // exact integral of the piecewise-linear density over the half-line
    auto integral_below = [&](double cut) {
        double acc = 0.0;
        const auto& v = g.samples();
        for (size_t j = 0; j + 1 < v.size(); ++j) {
            double x0 = g.x_min() + g.step() * static_cast<double>(j);
            double x1 = x0 + g.step();
            if (cut <= x0) break;
            if (cut >= x1) {
                acc += 0.5 * g.step() * (v[j] + v[j + 1]);
            } else {
                double f = (cut - x0) / g.step();
                double vm = v[j] * (1 - f) + v[j + 1] * f;
                acc += 0.5 * (cut - x0) * (v[j] + vm);
            }
        }
        return acc;
    };
    double total = g.integral();
    double m = static_cast<double>(index_ma);
    if (x < 0.0) {
        // int_{-inf}^x (v_a(u) - m e^{u}/(-u)... ) du; kernel part: -m E1(-x)
        return integral_below(x) - m * (-std::expint(x));
    }
    double kernel_above = m * (-std::expint(-x));  // int_x^inf m e^{-u}/u du
    return -(total - integral_below(x)) - kernel_above;
}

double SpectralTriplet::L_s(double x) const {
    if (!W) return 0.0;
    double v = W->atoms.cdf(x);
    if (x > 0.0) v -= W->atoms.total_mass();
    return v;
}

std::complex<double> synthesize_cf(const SpectralTriplet& triplet, double t, WEval w_eval) {
    cplx expo(0.0, triplet.gamma0 * t);
    for (const auto& [u, l] : triplet.discrete.lambdas)
        expo += l * (cplx(std::cos(t * u), std::sin(t * u)) - 1.0);
    if (triplet.v_a) {
        expo += triplet.v_a->cf(t) - triplet.v_a->cf(0.0).real();
        expo += winding_kernel(t, triplet.index_ma);
    }
    if (triplet.W) {
        if (w_eval == WEval::series && triplet.w_cf) {
            const auto& wc = *triplet.w_cf;
            cplx z = wc.ratio * wc.f_s.cf(t) / wc.f_d.cf(t);
            expo += std::log(1.0 + z) - std::log1p(wc.ratio);
        } else {
            expo += triplet.W->atoms.cf(t) - triplet.W->atoms.total_mass();
        }
    }
    return std::exp(expo);
}

AtomicMeasure synthesize_discrete_measure(const Loc& gamma0,
                                          const std::vector<std::pair<Loc, double>>& lambdas,
                                          double tail_tol) {
    double lam_sum = 0.0, lam_abs = 0.0;
    std::vector<AtomicMeasure::Atom> jump_atoms;
    for (const auto& [u, l] : lambdas) {
        lam_sum += l;
        lam_abs += std::abs(l);
        jump_atoms.push_back({u, l});
    }
    AtomicMeasure jumps = AtomicMeasure::from_atoms(std::move(jump_atoms));

    // exp_* expansion: e^{-sum lambda} sum_k M^{*k} / k!
    AtomicMeasure acc = AtomicMeasure::dirac(Loc(Rat(0)));
    AtomicMeasure term = acc;
    double factorial = 1.0;
    double tail_norm = std::exp(lam_abs);
    for (int k = 1; k <= 64; ++k) {
        term = convolve_atomic(term, jumps);
        factorial *= k;
        tail_norm = tail_norm * lam_abs / k;  // bound on the remaining series TV
        std::vector<AtomicMeasure::Atom> merged = acc.atoms();
        for (const auto& a : term.atoms()) merged.push_back({a.loc, a.weight / factorial});
        acc = AtomicMeasure::from_atoms(std::move(merged));
        if (tail_norm < tail_tol) break;
    }
    return convolve_atomic(acc, AtomicMeasure::dirac(gamma0)).scaled(std::exp(-lam_sum));
}

}  // namespace qid
