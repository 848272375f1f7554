#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qid/spectral.hpp"

using namespace qid;
using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

MixtureDistribution example2_mixture() {
    return MixtureDistribution::make(Rat(1, 2), AtomicMeasure::dirac(Loc(Rat(0))),
                                     Rat(3, 10), GridDensity::uniform(0.0, 1.0),
                                     Rat(1, 5), SingularSpec::classical_cantor());
}

// 7-point Gauss-Legendre panels: the independent quadrature oracle for the
// defining integral of the winding kernel.
double gl7_panels(const std::function<double(double)>& f, double a, double b, int panels) {
    static const double xs[] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                                0.0,                 0.4058451513773972,  0.7415311855993945,
                                0.9491079123427585};
    static const double ws[] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                                0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                                0.1294849661688697};
    double h = (b - a) / panels, acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        double mid = a + h * (p + 0.5);
        for (int i = 0; i < 7; ++i) acc += ws[i] * f(mid + 0.5 * h * xs[i]);
    }
    return acc * 0.5 * h;
}

// int_{R} (e^{itx}-1) sgn(x) e^{-|x|}/|x| dx collapses to
// 2i int_0^inf sin(tx) e^{-x}/x dx; integrand extended continuously at 0.
double kernel_quadrature(double t) {
    auto f = [t](double x) { return x == 0.0 ? t : std::sin(t * x) * std::exp(-x) / x; };
    int panels = std::max(64, static_cast<int>(std::ceil(40.0 * std::abs(t) / kPi)));
    return 2.0 * gl7_panels(f, 0.0, 40.0, panels);
}

}  // namespace

TEST_CASE("extract_discrete: point mass gives a pure shift") {
    auto s = extract_discrete(AtomicMeasure::dirac(Loc(Rat(5, 2))));
    CHECK(s.gamma0 == doctest::Approx(2.5));
    CHECK(s.lambdas.empty());
}

TEST_CASE("extract_discrete: Poisson-type lattice law") {
    std::vector<AtomicMeasure::Atom> atoms;
    double fact = 1.0;
    for (int k = 0; k <= 20; ++k) {
        if (k > 0) fact *= k;
        atoms.push_back({Loc(Rat(k)), std::exp(-0.3) * std::pow(0.3, k) / fact});
    }
    auto m = AtomicMeasure::from_atoms(std::move(atoms));
    auto s = extract_discrete(m);
    CHECK(std::abs(s.gamma0) < 1e-10);
    REQUIRE(s.lambdas.count(1.0) == 1);
    CHECK(s.lambdas.at(1.0) == doctest::Approx(0.3).epsilon(1e-10));
    for (const auto& [u, l] : s.lambdas)
        if (std::abs(u - 1.0) > 1e-12) CHECK(std::abs(l) < 1e-10);
    CHECK(s.im_residual < 1e-10);
}

TEST_CASE("extract_discrete: two-atom law reproduces the Mercator series") {
    auto m = AtomicMeasure::from_atoms({{Loc(Rat(0)), 0.75}, {Loc(Rat(1)), 0.25}});
    auto s = extract_discrete(m);
    CHECK(std::abs(s.gamma0) < 1e-12);
    double sup_err = 0.0;
    for (int k = 1; k <= 25; ++k) {
        double expect = (k % 2 == 1 ? 1.0 : -1.0) * std::pow(1.0 / 3.0, k) / k;
        double got = s.lambdas.count(static_cast<double>(k)) ? s.lambdas.at(static_cast<double>(k)) : 0.0;
        sup_err = std::max(sup_err, std::abs(got - expect));
    }
    CHECK(sup_err < 1e-10);
    // negative frequencies carry nothing for this law
    for (const auto& [u, l] : s.lambdas)
        if (u < 0.0) CHECK(std::abs(l) < 1e-12);
}

TEST_CASE("extract_discrete_lifted: atoms at {0, 1, sqrt 2}") {
    QLinearSet locs;
    locs.generator_values = {1.0, std::numbers::sqrt2};
    locs.coords = {{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    std::vector<double> weights = {0.6, 0.25, 0.15};
    auto s = extract_discrete_lifted(locs, weights);
    CHECK(std::abs(s.gamma0) < 1e-9);
    // oracle: ln(0.6 + 0.25 z1 + 0.15 z2), coefficient of z1^a z2^b is
    // (-1)^{a+b-1} (a+b-1)!/(a! b!) (5/12)^a (1/4)^b
    auto lambda_at = [&](int a, int b) {
        double u = a + b * std::numbers::sqrt2;
        for (const auto& [key, val] : s.lambdas)
            if (std::abs(key - u) < 1e-9) return val;
        return 0.0;
    };
    for (int a = 0; a <= 3; ++a) {
        for (int b = 0; b <= 3; ++b) {
            if (a + b == 0) continue;
            double fact = 1.0;
            for (int i = 2; i < a + b; ++i) fact *= i;
            double fa = 1.0, fb = 1.0;
            for (int i = 2; i <= a; ++i) fa *= i;
            for (int i = 2; i <= b; ++i) fb *= i;
            double expect = ((a + b) % 2 == 1 ? 1.0 : -1.0) * fact / (fa * fb) *
                            std::pow(5.0 / 12.0, a) * std::pow(0.25, b);
            CHECK(lambda_at(a, b) == doctest::Approx(expect).epsilon(1e-7));
        }
    }
}

TEST_CASE("invert_fd: identity and phases") {
    auto inv0 = invert_fd(AtomicMeasure::dirac(Loc(Rat(0))));
    REQUIRE(inv0.atoms.size() == 1);
    CHECK(inv0.atoms.atoms()[0].loc.rat == Rat(0));
    CHECK(inv0.atoms.atoms()[0].weight == doctest::Approx(1.0));

    auto inva = invert_fd(AtomicMeasure::dirac(Loc(Rat(7, 4))));
    CHECK(inva.atoms.atoms()[0].loc.rat == Rat(-7, 4));
}

TEST_CASE("invert_fd: geometric series for 0.75 + 0.25 e^{it}") {
    auto m = AtomicMeasure::from_atoms({{Loc(Rat(0)), 0.75}, {Loc(Rat(1)), 0.25}});
    auto inv = invert_fd(m);
    CHECK(inv.residual < 1e-9);
    // q_k = (4/3) (-1/3)^k for k >= 0
    for (int k = 0; k <= 30; ++k) {
        double expect = (4.0 / 3.0) * std::pow(-1.0 / 3.0, k);
        double got = 0.0;
        for (const auto& a : inv.atoms.atoms())
            if (a.loc.exact && a.loc.rat == Rat(k)) got = a.weight;
        CHECK(std::abs(got - expect) < 1e-12);
    }
    double sup = 0.0;
    for (double t = -20.0; t <= 20.0; t += 0.37)
        sup = std::max(sup, std::abs(m.cf(t) * inv.atoms.cf(t) - 1.0));
    CHECK(sup < 1e-9);
}

TEST_CASE("winding_kernel: closed form against the quadrature oracle") {
    CHECK(winding_kernel(0.0, 3) == cplx{0.0, 0.0});
    for (int m : {0, 1, 2}) {
        for (double t : {-50.0, -7.3, -1.0, 0.25, 1.0, 12.0, 50.0}) {
            cplx closed = winding_kernel(t, m);
            CHECK(std::abs(closed.real()) < 1e-12);
            CHECK(std::abs(closed.imag() - m * kernel_quadrature(t)) < 1e-9);
        }
    }
    // total argument sweep of exp(w_m) equals 2 pi m
    for (int m : {1, 2, 5}) {
        double sweep = winding_kernel(1e8, m).imag() - winding_kernel(-1e8, m).imag();
        CHECK(std::abs(sweep - 2 * kPi * m) < 1e-6);
    }
}

TEST_CASE("recover_va: identically zero without an ac part") {
    auto F = MixtureDistribution::make(Rat(1, 2), AtomicMeasure::dirac(Loc(Rat(0))),
                                       Rat(0), std::nullopt,
                                       Rat(1, 2), SingularSpec::classical_cantor());
    auto r = recover_va(F, 0);
    CHECK(r.l1_norm == 0.0);
    CHECK(r.resynth_residual == 0.0);
}

TEST_CASE("recover_va: pure d+a mixture re-synthesizes its CF") {
    auto F = MixtureDistribution::make(Rat(3, 5), AtomicMeasure::dirac(Loc(Rat(0))),
                                       Rat(2, 5), GridDensity::uniform(0.0, 1.0));
    auto w = winding_index(F);
    CHECK(w.index == 0);
    auto r = recover_va(F, w.index);
    CHECK(r.im_residual < 1e-8);
    CHECK(r.resynth_residual < 1e-6);
    CHECK(r.l1_norm < 10.0);
}

TEST_CASE("recover_va: example-1 mixture with a Cantor part") {
    auto F = MixtureDistribution::make(Rat(1, 2), AtomicMeasure::dirac(Loc(Rat(0))),
                                       Rat(3, 10), GridDensity::triangular(-1.0, 0.0, 1.0),
                                       Rat(1, 5), SingularSpec::classical_cantor());
    auto w = winding_index(F);
    CHECK(w.index == 0);
    auto r = recover_va(F, w.index);
    CHECK(r.im_residual < 1e-8);
    CHECK(r.resynth_residual < 1e-6);
}

TEST_CASE("compute_W: example-2 series mass and residuals") {
    auto F = example2_mixture();
    auto w = compute_W(F, 20, 8);
    CHECK(w.rho == doctest::Approx(0.4));
    CHECK(w.mass_target == doctest::Approx(std::log(1.4)));
    CHECK(std::abs(w.mass - std::log(1.4)) < 1e-8);
    CHECK(w.series_residual < 1e-8);
    CHECK(w.analytic_tail < 1e-9);
    // atomic route carries the refinement error, bounded by |t| * tail(L)
    CHECK(w.atoms_residual < 50.0 * SingularSpec::classical_cantor().refine_tail_bound(8) * 1.2);
    CHECK(w.approx.atoms.tv_norm() > 0.3);
}

TEST_CASE("compute_W: I_d = delta_0 makes W_n plain Cantor power sums") {
    auto F = example2_mixture();
    // Cauchy property: ||W_{n+1} - W_n|| = rho^{n+1}/(n+1) exactly up to pruning
    for (int n : {3, 6, 9}) {
        auto wa = compute_W(F, n, 6);
        auto wb = compute_W(F, n + 1, 6);
        std::vector<AtomicMeasure::Atom> diff = wb.approx.atoms.atoms();
        for (const auto& a : wa.approx.atoms.atoms()) diff.push_back({a.loc, -a.weight});
        double tv = AtomicMeasure::from_atoms(std::move(diff)).tv_norm();
        double expect = std::pow(0.4, n + 1) / (n + 1);
        CHECK(tv == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("compute_W: refinement level drives the largest atom down") {
    auto F = example2_mixture();
    double prev = 1e300;
    for (int level : {6, 8, 10}) {
        auto w = compute_W(F, 12, level, WOptions{.atoms_residual = false});
        double mx = 0.0;
        for (const auto& a : w.approx.atoms.atoms()) mx = std::max(mx, std::abs(a.weight));
        CHECK(mx < prev);
        prev = mx;
    }
}

TEST_CASE("compute_W rejects undominated input") {
    auto F3 = MixtureDistribution::make(Rat(1, 2), AtomicMeasure::dirac(Loc(Rat(0))),
                                        Rat(0), std::nullopt,
                                        Rat(1, 2), SingularSpec::factorial_bernoulli());
    CHECK_THROWS_AS(compute_W(F3, 10, 6), std::invalid_argument);
}

TEST_CASE("assemble_triplet: point mass") {
    auto F = MixtureDistribution::pure_discrete(AtomicMeasure::dirac(Loc(Rat(3))));
    auto trip = assemble_triplet(F);
    CHECK(trip.gamma0 == doctest::Approx(3.0));
    CHECK(trip.discrete.lambdas.empty());
    CHECK(trip.index_ma == 0);
    CHECK(!trip.v_a.has_value());
    CHECK(!trip.W.has_value());
    CHECK(trip.sigma2 == 0.0);
    CHECK(trip.gamma == doctest::Approx(3.0));
}

TEST_CASE("assemble_triplet: example 2 has an empty discrete spectrum") {
    auto trip = assemble_triplet(example2_mixture());
    CHECK(std::abs(trip.gamma0) < 1e-12);
    CHECK(trip.discrete.lambda_abs_sum() < 1e-10);
    CHECK(trip.index_ma == 0);
    REQUIRE(trip.v_a.has_value());
    REQUIRE(trip.W.has_value());
    CHECK(trip.va_stats->im_residual < 1e-8);
    CHECK(trip.sigma2 == 0.0);
    // L_s vanishes at +inf by construction
    double far = trip.W->atoms.atoms().back().loc.value + 1.0;
    CHECK(trip.L_s(far) == doctest::Approx(0.0).epsilon(1e-12));
    // spectral function is finite and decays at both ends
    CHECK(std::abs(trip.L(far + 5.0)) < 1e-6);
    CHECK(std::isfinite(trip.L(-0.5)));
}

TEST_CASE("synthesize_cf: empty and Poisson triplets") {
    SpectralTriplet empty;
    CHECK(std::abs(synthesize_cf(empty, 3.7) - cplx{1.0, 0.0}) < 1e-15);

    SpectralTriplet pois;
    pois.discrete.lambdas[1.0] = 0.3;
    for (double t : {0.0, 1.0, -4.2, 17.0}) {
        cplx expect = std::exp(0.3 * (cplx(std::cos(t), std::sin(t)) - 1.0));
        CHECK(std::abs(synthesize_cf(pois, t) - expect) < 1e-14);
    }
}

TEST_CASE("synthesize_cf roundtrip on example 2") {
    auto F = example2_mixture();
    auto trip = assemble_triplet(F);
    for (double t : {1.0, 2 * kPi, 10.0}) {
        cplx direct = eval_cf(F, t);
        cplx series = synthesize_cf(trip, t, WEval::series);
        CHECK(std::abs(series - direct) < 1e-6);
        // atomic route: within the refinement budget
        cplx atoms = synthesize_cf(trip, t, WEval::atoms);
        double wtol = std::abs(t) * SingularSpec::classical_cantor().refine_tail_bound(8) * 1.2 + 1e-6;
        CHECK(std::abs(atoms - direct) < wtol);
    }
}

TEST_CASE("synthesize_discrete_measure inverts extract_discrete") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ug(-2.0, 2.0), ul(-0.5, 0.5);
    std::uniform_int_distribution<int> ucount(1, 8), ufreq(-8, 8);
    for (int rep = 0; rep < 6; ++rep) {
        double gamma0 = std::round(ug(rng));
        std::vector<std::pair<Loc, double>> lambdas;
        double abs_sum = 0.0;
        int count = ucount(rng);
        for (int i = 0; i < count; ++i) {
            int u = ufreq(rng);
            if (u == 0) continue;
            double l = ul(rng);
            if (abs_sum + std::abs(l) > 1.0) break;
            abs_sum += std::abs(l);
            lambdas.push_back({Loc(Rat(u)), l});
        }
        auto measure = synthesize_discrete_measure(Loc(Rat(static_cast<long long>(gamma0))), lambdas);
        CHECK(std::abs(measure.total_mass() - 1.0) < 1e-12);
        auto spec = extract_discrete(measure);
        CHECK(spec.gamma0 == doctest::Approx(gamma0).epsilon(1e-10));
        std::map<double, double> expect;
        for (const auto& [u, l] : lambdas) expect[u.value] += l;
        for (const auto& [u, l] : expect) {
            double got = 0.0;
            for (const auto& [ku, kl] : spec.lambdas)
                if (std::abs(ku - u) < 1e-9) got = kl;
            CHECK(std::abs(got - l) < 1e-10);
        }
    }
}
