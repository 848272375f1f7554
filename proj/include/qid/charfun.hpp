#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "qid/mixture.hpp"
#include "qid/tvbounds.hpp"

namespace qid {

enum class PartSelector { all, d, a, s };

std::complex<double> eval_cf(const MixtureDistribution& F, double t, PartSelector part = PartSelector::all);

// Evaluation at t = pi * q with integer q. ProductCF singular parts and
// rational-location discrete parts are evaluated by exact angle reduction
// (parity for integer multiples); the ac part is Riemann-Lebesgue small at
// such t and is bounded by bv_norm/|t|, evaluated directly for moderate q.
std::complex<double> eval_cf_exact_pi(const MixtureDistribution& F, const BigInt& q,
                                      PartSelector part = PartSelector::all);

struct ZeroCrossingError : std::runtime_error {
    double t;
    explicit ZeroCrossingError(double at)
        : std::runtime_error("characteristic function vanishes near t = " + std::to_string(at)), t(at) {}
};

// Distinguished-logarithm trace: adaptively refined grid with unwrapped
// continuous argument, Arg f(0) anchored in (-pi, pi].
struct CfTrace {
    std::vector<double> grid;
    std::vector<std::complex<double>> values;
    std::vector<double> args;
    std::vector<double> log_mod;

    std::complex<double> ln_at(size_t i) const { return {log_mod[i], args[i]}; }
    double max_arg_jump() const;
};

struct TraceOptions {
    double jump_threshold = 1.5707963267948966;  // pi/2
    double zero_floor = 1e-12;
    int max_depth = 46;
    size_t initial_panels = 256;
    size_t max_points = 1u << 22;
};

CfTrace distinguished_log(const std::function<std::complex<double>(double)>& f, double t_min,
                          double t_max, const TraceOptions& opts = {});
CfTrace distinguished_log(const MixtureDistribution& F, double t_max, const TraceOptions& opts = {},
                          PartSelector part = PartSelector::all);

struct WindingResult {
    int index = 0;
    double arg_at_plus_inf = 0.0;
    double arg_at_minus_inf = 0.0;
    double tail_T = 0.0;
    double certificate = 0.0;  // max inter-sample argument jump
};

// Winding of R_a(t) = 1 + c_a f_a / (c_d f_d + c_s f_s); the truncation T is
// chosen so the certified ac tail keeps R_a in the right half-plane past T.
WindingResult winding_index(const MixtureDistribution& F);

// Rigorous lower bound for inf_t |f_d(t)|: grid minimum over one period (or
// the lifted torus) minus Lipschitz slack; returns 0 when certification
// fails. Requires finite lattice support; non-lattice supports go through
// the declared Q-linear overload below.
double certified_min_modulus_fd(const AtomicMeasure& F_d);

// Torus path for supports with declared Q-linear structure (lifted to Z^d,
// d <= 4): by Kronecker density the line infimum equals the torus minimum,
// certified by a grid scan with Lipschitz slack.
double certified_min_modulus_fd_lifted(const QLinearSet& locations, const std::vector<double>& weights);

// V/T bound for sup_{|t|>T} |f_a(t)| (integration by parts, BV density).
double tail_bound_fa(const GridDensity& F_a, double T);

// Certified lower bound on inf_t |f(t)|; 0 means "cannot certify", never a
// false positive.
double certified_inf_modulus(const MixtureDistribution& F);

namespace detail {
struct Lattice {
    Loc x0;
    double h = 0.0;
    Rat h_exact{0};
    bool exact = false;
    std::vector<long long> offsets;  // x_k = x0 + h * offsets[k]
};
std::optional<Lattice> detect_lattice(const AtomicMeasure& m);
}  // namespace detail

}  // namespace qid
