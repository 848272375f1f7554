#pragma once

#include <complex>
#include <map>
#include <optional>

#include "qid/charfun.hpp"
#include "qid/mixture.hpp"
#include "qid/tvbounds.hpp"

namespace qid {

// Discrete part of the spectral function: Ln f_d(t) = i t gamma0 +
// sum_u lambda_u (e^{itu} - 1) over nonzero frequencies u of the support
// module, truncated to the computed set.
struct DiscreteSpectrum {
    double gamma0 = 0.0;
    std::map<double, double> lambdas;  // u -> lambda_u, keys nonzero
    double truncation_l1_error = 0.0;
    double im_residual = 0.0;  // max |Im| discarded when realifying

    double lambda_abs_sum() const {
        double s = 0.0;
        for (const auto& [u, l] : lambdas) s += std::abs(l);
        return s;
    }
};

struct ExtractOptions {
    int initial_log2_n = 14;  // lattice-path FFT size
    int max_log2_n = 20;
    double coefficient_tail_target = 1e-12;
    double drop_tol = 1e-14;  // coefficients below this join the truncation error
};

// Lattice path: samples Ln f_d over one period and reads the Fourier
// coefficients. Requires a certified zero-free discrete CF.
DiscreteSpectrum extract_discrete(const AtomicMeasure& F_d, const ExtractOptions& opts = {});

// Torus path for supports with declared Q-linear structure: the support is
// lifted to Z^d (d <= 4) and Ln of the lifted polynomial is transformed.
DiscreteSpectrum extract_discrete_lifted(const QLinearSet& locations,
                                         const std::vector<double>& weights,
                                         const ExtractOptions& opts = {});

struct InvertedDiscrete {
    AtomicMeasure atoms;     // I_d with coefficients q_y
    double residual = 0.0;   // sup_t |f_d(t) g(t) - 1| on the verification grid
    double tail_dropped = 0.0;
};

// Wiener inversion g_d = 1/f_d as an absolutely convergent atomic series,
// truncated at relative tail 1e-12.
InvertedDiscrete invert_fd(const AtomicMeasure& F_d, const ExtractOptions& opts = {});

// CF-domain image of the index kernel: w_m(t) = m * int (e^{itx}-1) sgn(x)
// e^{-|x|}/|x| dx = 2 i m atan(t).
std::complex<double> winding_kernel(double t, int m);

struct VaOptions {
    double t_max = 256.0;
    int log2_n = 16;
    double edge_fraction = 0.1;   // window used to fix the additive constant
    double edge_tolerance = 5e-3;  // non-decay detection on the outermost samples
    double verify_t_max = 50.0;
    int verify_points = 301;
};

struct VaRecovery {
    GridDensity v_a;
    int index_ma = 0;
    double im_residual = 0.0;
    double resynth_residual = 0.0;
    double l1_norm = 0.0;
};

// Recovers the ac spectral density v_a from u(t) = Ln f_{a,ds}(t) - w_m(t)
// by Fourier inversion on a symmetric grid; the additive constant is fixed
// by the Riemann-Lebesgue decay of u at the grid edges.
VaRecovery recover_va(const MixtureDistribution& F, int index_ma, const VaOptions& opts = {});

struct WOptions {
    double prune_relative = 1e-12;      // per-term prune budget
    double residual_t_max = 50.0;
    double residual_step = 0.05;        // series residual grid
    double atoms_residual_step = 0.5;   // coarse grid for the atomic residual
    bool atoms_residual = true;
};

struct WSeries {
    SignedMeasureApprox approx;
    int terms = 0;
    int refine_level = 0;
    double rho = 0.0;              // c_s / (c_d mu_d lower bound)
    double mass = 0.0;             // computed W(inf)
    double mass_target = 0.0;      // ln(1 + c_s/c_d)
    double series_residual = 0.0;  // closed-form partial sum vs ln(1 + ...)
    double analytic_tail = 0.0;    // sum_{k>n} rho^k / k
    double atoms_residual = 0.0;   // atomic CF vs ln(1 + ...), coarse grid
};

// Alternating series W_n = sum_{k<=n} (-1)^{k-1}/k (c_s/c_d)^k
// (F_s^{*k} * I_d^{*k}) with the singular part refined to `refine_level`.
WSeries compute_W(const MixtureDistribution& F, int n, int refine_level, const WOptions& opts = {});

struct TripletOptions {
    ExtractOptions extract;
    VaOptions va;
    WOptions w;
    int w_terms = 20;
    int w_refine_level = 8;
};

// The (gamma, 0, L) characteristic triplet data of the Levy-type
// representation, plus the diagnostics of each recovery stage.
struct SpectralTriplet {
    DiscreteSpectrum discrete;
    int index_ma = 0;
    std::optional<GridDensity> v_a;
    std::optional<SignedMeasureApprox> W;
    double gamma0 = 0.0;
    double gamma = 0.0;   // sin-compensated shift
    double sigma2 = 0.0;  // identically zero in this representation

    std::optional<VaRecovery> va_stats;
    std::optional<WSeries> w_stats;

    // Exact CF-domain route for the W part: Ln f_{s,d}(t) =
    // ln(1 + r f_s(t) g_d(t)) - ln(1 + r). Kept alongside the atomic
    // approximation, whose accuracy is bounded by the refinement budget.
    struct WSeriesCf {
        double ratio = 0.0;  // c_s / c_d
        SingularSpec f_s;
        AtomicMeasure f_d;
    };
    std::optional<WSeriesCf> w_cf;

    // Spectral function L = L_d + L_a + L_s, evaluable at x != 0.
    double L_d(double x) const;
    double L_a(double x) const;
    double L_s(double x) const;
    double L(double x) const { return L_d(x) + L_a(x) + L_s(x); }
};

SpectralTriplet assemble_triplet(const MixtureDistribution& F, const TripletOptions& opts = {});

enum class WEval { atoms, series };

// Forward map of the triplet: evaluates the representation exponent by
// exact sums (discrete), grid quadrature (v_a), the index kernel, and the
// chosen W route.
std::complex<double> synthesize_cf(const SpectralTriplet& triplet, double t,
                                   WEval w_eval = WEval::atoms);

// Atomic realization of exp{i t gamma0 + sum lambda_u (e^{itu} - 1)}:
// the compound-Poisson-type expansion, truncated below `tail_tol` in TV.
AtomicMeasure synthesize_discrete_measure(const Loc& gamma0,
                                          const std::vector<std::pair<Loc, double>>& lambdas,
                                          double tail_tol = 1e-15);

}  // namespace qid
