#pragma once

#include <string>
#include <vector>

#include "qid/charfun.hpp"
#include "qid/mixture.hpp"

namespace qid {

enum class CondVerdict { certified_yes, certified_no, not_certified };
enum class RidVerdict { rid, not_certified, precondition_failed };

const char* to_string(CondVerdict v);
const char* to_string(RidVerdict v);

struct CriteriaReport {
    double mu_d_lower = 0.0;
    double inf_f_lower = 0.0;
    bool dominated = false;
    double margin = 0.0;  // c_d * mu_d_lower - c_s
    CondVerdict cond_ii = CondVerdict::not_certified;
    CondVerdict cond_iii = CondVerdict::not_certified;
    RidVerdict verdict = RidVerdict::not_certified;
    bool inconsistency = false;  // certified (ii) and (iii) disagree
    std::vector<std::string> notes;
};

// Dominated continuous singular part: c_s < c_d * mu_d when mu_d > 0,
// c_s = 0 when mu_d = 0. Returns the flag and the margin c_d mu_d - c_s.
std::pair<bool, double> dominated_check(const MixtureDistribution& F);

// Membership verdict. A failed domination precondition yields
// precondition_failed, never a non-membership claim.
CriteriaReport rid_criteria(const MixtureDistribution& F);

struct RatioPoint {
    double t = 0.0;
    double value = 0.0;
    bool f_zero = false;  // |f(t)| vanished; value is meaningless
};

// |f(t-tau) f(t+tau) / f(t)^2| at the requested points; an unbounded
// sequence certifies non-membership.
std::vector<RatioPoint> ratio_test(const MixtureDistribution& F, double tau,
                                   const std::vector<double>& t_points);

// Exact-parity variant with t = pi * t_q and tau = pi * tau_q.
std::vector<RatioPoint> ratio_test_exact_pi(const MixtureDistribution& F, const BigInt& tau_q,
                                            const std::vector<BigInt>& t_qs);

// Conservative divergence call: strict monotone growth over at least five
// consecutive probes and a value beyond 10^3.
bool ratio_diverging(const std::vector<RatioPoint>& seq);

enum class SingularityVerdict { not_pure_singular, inconclusive, pure_singular };

const char* to_string(SingularityVerdict v);

// Proposition-1 threshold: alpha >= (n_a/(n_a+1)) (c_s/c_d) rules out a
// purely singular W; a declaration that every convolution power stays
// singular yields pure_singular.
SingularityVerdict pure_singular_verdict(int n_a, const Rat& alpha, const Rat& c_s, const Rat& c_d,
                                         bool all_powers_singular_declared = false);

struct DecompositionReport {
    CriteriaReport full;  // for F = F1 * F2
    CriteriaReport part1;
    CriteriaReport part2;
    bool factor1_dominated = false;  // c_{1,s} < c_{1,d} mu_{1,d}
    bool factor2_dominated = false;
    bool inconsistency = false;  // a factor contradicts the decomposition guarantee
    std::vector<std::string> notes;
};

// Runs the criteria on F1 * F2 and on both factors; when the convolution is
// certified RID, any factor failing the propagated domination inequalities
// is flagged as a software-error-level inconsistency.
DecompositionReport decomposition_check(const MixtureDistribution& F1, const MixtureDistribution& F2);

struct PowerDomination {
    int n = 1;
    Rat discrete_weight;        // c_d^n
    Rat pairwise_lower;         // n c_s c_d^{n-1}
    Rat singular_weight_lower;  // best certified bound (all-powers declaration sharpens it)
    Rat loss_threshold;         // c_d^n (mu_d <= 1)
    bool lost = false;          // singular weight provably reaches c_d^n mu_d^n
};

// Part weights of F^{*n} by the multinomial table, in exact arithmetic;
// domination is necessarily lost once n >= c_d / c_s.
PowerDomination convolution_power_domination(const MixtureDistribution& F, int n);

}  // namespace qid
