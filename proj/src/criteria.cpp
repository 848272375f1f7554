#include "qid/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qid {

namespace {

using cplx = std::complex<double>;

// Zero-freeness certificate for condition (iii): grid scan with Lipschitz
// slack on [-T, T], the tail argument covering |t| > T.
bool certify_zero_free(const MixtureDistribution& F, double margin) {
    double T = 16.0;
    if (F.c_a() > 0.0) {
        double V = F.ac()->bv_norm();
        T = std::max(T, 2.0 * F.c_a() * V / margin);  // tail <= margin/2 beyond T
    }
    double lip = F.c_d() * F.discrete().mean_abs_location();
    if (F.ac()) lip += F.c_a() * F.ac()->mean_abs_x();
    if (F.singular()) lip += F.c_s() * F.singular()->mean_abs_bound();

    for (int N = 1 << 13; N <= (1 << 19); N <<= 1) {
        double dt = 2.0 * T / N;
        double slack = lip * dt / 2.0;
        double mn = std::numeric_limits<double>::infinity();
        for (int j = 0; j <= N; ++j) mn = std::min(mn, std::abs(eval_cf(F, -T + dt * j)));
        if (mn - slack > 0.0) return true;
        if (slack < 0.25 * std::max(mn, 1e-300) || mn == 0.0) return false;
    }
    return false;
}

}  // namespace

const char* to_string(CondVerdict v) {
    switch (v) {
        case CondVerdict::certified_yes: return "certified_yes";
        case CondVerdict::certified_no: return "certified_no";
        default: return "not_certified";
    }
}

const char* to_string(RidVerdict v) {
    switch (v) {
        case RidVerdict::rid: return "RID";
        case RidVerdict::not_certified: return "NOT_CERTIFIED";
        default: return "PRECONDITION_FAILED";
    }
}

const char* to_string(SingularityVerdict v) {
    switch (v) {
        case SingularityVerdict::not_pure_singular: return "NOT_PURE_SINGULAR";
        case SingularityVerdict::inconclusive: return "INCONCLUSIVE";
        default: return "PURE_SINGULAR";
    }
}

std::pair<bool, double> dominated_check(const MixtureDistribution& F) {
    double mu = certified_min_modulus_fd(F.discrete());
    double margin = F.c_d() * mu - F.c_s();
    bool ok = (mu > 0.0 && F.c_s() < F.c_d() * mu) || F.c_s() == 0.0;
    return {ok, margin};
}

CriteriaReport rid_criteria(const MixtureDistribution& F) {
    if (!(F.c_d() > 0.0)) throw std::invalid_argument("rid_criteria: c_d must be positive");
    CriteriaReport rep;
    for (const auto& w : F.warnings()) rep.notes.push_back(w);
    if (F.unclassified_weight() != 0.0) {
        rep.verdict = RidVerdict::precondition_failed;
        rep.notes.push_back("mixture carries unclassified singular*singular mass; cannot certify");
        return rep;
    }
    try {
        rep.mu_d_lower = certified_min_modulus_fd(F.discrete());
    } catch (const std::exception& e) {
        rep.verdict = RidVerdict::precondition_failed;
        rep.notes.push_back(std::string("mu_d not certifiable: ") + e.what());
        return rep;
    }
    rep.margin = F.c_d() * rep.mu_d_lower - F.c_s();
    rep.dominated = (rep.mu_d_lower > 0.0 && F.c_s() < F.c_d() * rep.mu_d_lower) || F.c_s() == 0.0;
    if (!rep.dominated) {
        rep.verdict = RidVerdict::precondition_failed;
        rep.notes.push_back("dominated continuous singular part not certified (margin " +
                            std::to_string(rep.margin) + "); the criterion does not apply");
        return rep;
    }

    rep.inf_f_lower = certified_inf_modulus(F);
    rep.cond_ii = rep.inf_f_lower > 0.0 ? CondVerdict::certified_yes : CondVerdict::not_certified;

    if (rep.mu_d_lower > 0.0 && certify_zero_free(F, rep.margin))
        rep.cond_iii = CondVerdict::certified_yes;
    else
        rep.cond_iii = CondVerdict::not_certified;

    bool ii_known = rep.cond_ii != CondVerdict::not_certified;
    bool iii_known = rep.cond_iii != CondVerdict::not_certified;
    if (ii_known && iii_known && rep.cond_ii != rep.cond_iii) {
        rep.inconsistency = true;
        rep.notes.push_back("certified conditions (ii) and (iii) disagree: invariant breach");
    }

    if (rep.cond_ii == CondVerdict::certified_yes && rep.cond_iii == CondVerdict::certified_yes)
        rep.verdict = RidVerdict::rid;
    else
        rep.verdict = RidVerdict::not_certified;
    if (rep.verdict == RidVerdict::rid && rep.inf_f_lower == 0.0) {
        rep.verdict = RidVerdict::not_certified;  // never claim RID on a zero bound
        rep.inconsistency = true;
    }
    return rep;
}

std::vector<RatioPoint> ratio_test(const MixtureDistribution& F, double tau,
                                   const std::vector<double>& t_points) {
    std::vector<RatioPoint> out;
    out.reserve(t_points.size());
    for (double t : t_points) {
        cplx num = eval_cf(F, t - tau) * eval_cf(F, t + tau);
        cplx den = eval_cf(F, t);
        RatioPoint p;
        p.t = t;
        if (std::abs(den) == 0.0) {
            p.f_zero = true;
        } else {
            p.value = std::abs(num) / std::norm(den);
        }
        out.push_back(p);
    }
    return out;
}

std::vector<RatioPoint> ratio_test_exact_pi(const MixtureDistribution& F, const BigInt& tau_q,
                                            const std::vector<BigInt>& t_qs) {
    std::vector<RatioPoint> out;
    out.reserve(t_qs.size());
    for (const BigInt& q : t_qs) {
        cplx num = eval_cf_exact_pi(F, q - tau_q) * eval_cf_exact_pi(F, q + tau_q);
        cplx den = eval_cf_exact_pi(F, q);
        RatioPoint p;
        p.t = std::numbers::pi * to_double(q);
        if (std::abs(den) == 0.0) {
            p.f_zero = true;
        } else {
            p.value = std::abs(num) / std::norm(den);
        }
        out.push_back(p);
    }
    return out;
}

bool ratio_diverging(const std::vector<RatioPoint>& seq) {
    int run = 0;
    double prev = -1.0;
    for (const auto& p : seq) {
        if (p.f_zero) return true;  // an exact zero of f certifies non-membership outright
        if (p.value > prev) {
            ++run;
        } else {
            run = 1;
        }
        if (run >= 5 && p.value > 1e3) return true;
        prev = p.value;
    }
    return false;
}

SingularityVerdict pure_singular_verdict(int n_a, const Rat& alpha, const Rat& c_s, const Rat& c_d,
                                         bool all_powers_singular_declared) {
    if (all_powers_singular_declared) return SingularityVerdict::pure_singular;
    if (n_a < 2) throw std::invalid_argument("pure_singular_verdict: n_a must be >= 2");
    if (!(alpha > Rat(0) && alpha <= Rat(1)))
        throw std::invalid_argument("pure_singular_verdict: alpha must be in (0, 1]");
    if (!(c_d > Rat(0)) || c_s < Rat(0) || !(c_s < c_d))
        throw std::invalid_argument("pure_singular_verdict: need 0 <= c_s < c_d");
    Rat threshold = Rat(n_a, n_a + 1) * c_s / c_d;
    return alpha >= threshold ? SingularityVerdict::not_pure_singular
                              : SingularityVerdict::inconclusive;
}

DecompositionReport decomposition_check(const MixtureDistribution& F1,
                                        const MixtureDistribution& F2) {
    DecompositionReport rep;
    auto F = mixture_convolve(F1, F2);
    rep.full = rid_criteria(F);
    rep.part1 = rid_criteria(F1);
    rep.part2 = rid_criteria(F2);
    for (const auto& w : F.warnings()) rep.notes.push_back(w);

    auto dominated_of = [](const MixtureDistribution& G, const CriteriaReport& r) {
        return (r.mu_d_lower > 0.0 && G.c_s() < G.c_d() * r.mu_d_lower) || G.c_s() == 0.0;
    };
    rep.factor1_dominated = dominated_of(F1, rep.part1);
    rep.factor2_dominated = dominated_of(F2, rep.part2);

    if (rep.full.verdict == RidVerdict::rid) {
        // the decomposition theorem transfers domination and membership to
        // both factors; a certified contradiction is a software error
        if (!rep.factor1_dominated || !rep.factor2_dominated) {
            rep.inconsistency = true;
            rep.notes.push_back("decomposition guarantee violated: factor lost domination");
        }
        if (rep.part1.verdict == RidVerdict::precondition_failed ||
            rep.part2.verdict == RidVerdict::precondition_failed) {
            rep.inconsistency = true;
            rep.notes.push_back("decomposition guarantee violated: factor failed the precondition");
        }
    } else {
        rep.notes.push_back("convolution not certified RID; factor verdicts are informational");
    }
    return rep;
}

PowerDomination convolution_power_domination(const MixtureDistribution& F, int n) {
    if (n < 1) throw std::invalid_argument("convolution_power_domination: n must be >= 1");
    if (!(F.c_s_rat() > Rat(0)))
        throw std::invalid_argument("convolution_power_domination: c_s must be positive");
    const Rat cd = F.c_d_rat(), cs = F.c_s_rat();
    PowerDomination out;
    out.n = n;
    Rat cd_pow(1);
    for (int i = 0; i < n; ++i) cd_pow *= cd;
    out.discrete_weight = cd_pow;
    Rat cd_pow_nm1(1);
    for (int i = 0; i + 1 < n; ++i) cd_pow_nm1 *= cd;
    out.pairwise_lower = Rat(n) * cs * cd_pow_nm1;
    out.singular_weight_lower = out.pairwise_lower;
    if (F.singular() && F.singular()->all_powers_singular()) {
        // every term with at least one singular factor and no ac factor
        Rat cds_pow(1);
        for (int i = 0; i < n; ++i) cds_pow *= cd + cs;
        out.singular_weight_lower = cds_pow - cd_pow;
    }
    out.loss_threshold = cd_pow;  // c_d^n mu_d^n with mu_d <= 1
    out.lost = out.singular_weight_lower >= out.loss_threshold;
    return out;
}

}  // namespace qid
