#include "qid/scenario.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

namespace qid {

namespace {

using nlohmann::json;
using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
    throw std::invalid_argument("config error at " + where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> keys) {
    if (!obj.is_object()) config_error(where, "expected an object");
    for (const auto& [k, v] : obj.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) config_error(where, "unknown key '" + k + "'");
    }
}

Rat rat_field(const json& v, const std::string& where) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rat(v.get<long long>());
    if (v.is_number_float()) return rat_from_double(v.get<double>());
    config_error(where, "expected a rational (string or number)");
}

double num_field(const json& obj, const std::string& key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number()) config_error(where + "." + key, "expected a number");
    double v = obj.at(key).get<double>();
    if (!std::isfinite(v)) config_error(where + "." + key, "non-finite value");
    return v;
}

int int_field(const json& obj, const std::string& key, int fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number_integer()) config_error(where + "." + key, "expected an integer");
    return obj.at(key).get<int>();
}

GridDensity parse_density(const json& d) {
    reject_unknown(d, "mixture.density",
                   {"kind", "a", "b", "c", "x_min", "step", "values", "samples"});
    std::string kind = d.value("kind", "");
    if (kind == "uniform") {
        int n = int_field(d, "samples", 1025, "mixture.density");
        return GridDensity::uniform(num_field(d, "a", 0.0, "mixture.density"),
                                    num_field(d, "b", 1.0, "mixture.density"), n);
    }
    if (kind == "triangular") {
        int n = int_field(d, "samples", 1025, "mixture.density");
        return GridDensity::triangular(num_field(d, "a", -1.0, "mixture.density"),
                                       num_field(d, "c", 0.0, "mixture.density"),
                                       num_field(d, "b", 1.0, "mixture.density"), n);
    }
    if (kind == "samples") {
        if (!d.contains("values") || !d.at("values").is_array())
            config_error("mixture.density.values", "expected an array");
        std::vector<double> values = d.at("values").get<std::vector<double>>();
        return GridDensity::from_samples(num_field(d, "x_min", 0.0, "mixture.density"),
                                         num_field(d, "step", 1.0, "mixture.density"),
                                         std::move(values));
    }
    config_error("mixture.density.kind", "expected uniform | triangular | samples");
}

SingularSpec parse_singular(const json& s) {
    reject_unknown(s, "mixture.singular",
                   {"kind", "ratio", "shifts", "weights", "base", "all_powers_singular"});
    std::string kind = s.value("kind", "");
    if (kind == "cantor") return SingularSpec::classical_cantor();
    if (kind == "factorial") return SingularSpec::factorial_bernoulli();
    if (kind == "power") return SingularSpec::power_bernoulli(int_field(s, "base", 3, "mixture.singular"));
    if (kind == "cantor_ifs") {
        CantorIFS c;
        c.ratio = rat_field(s.at("ratio"), "mixture.singular.ratio");
        for (const auto& sh : s.at("shifts")) c.shifts.push_back(rat_field(sh, "mixture.singular.shifts"));
        c.weights = s.at("weights").get<std::vector<double>>();
        bool aps = s.value("all_powers_singular", false);
        return SingularSpec(SingularSpec::Node(std::move(c)), aps);
    }
    config_error("mixture.singular.kind", "expected cantor | cantor_ifs | factorial | power");
}

MixtureDistribution parse_mixture(const json& m) {
    reject_unknown(m, "mixture", {"weights", "atoms", "density", "singular", "square_class"});
    if (!m.contains("weights")) config_error("mixture", "missing weights");
    const auto& w = m.at("weights");
    reject_unknown(w, "mixture.weights", {"d", "a", "s"});
    Rat c_d = w.contains("d") ? rat_field(w.at("d"), "weights.d") : Rat(1);
    Rat c_a = w.contains("a") ? rat_field(w.at("a"), "weights.a") : Rat(0);
    Rat c_s = w.contains("s") ? rat_field(w.at("s"), "weights.s") : Rat(0);
    if (c_d + c_a + c_s != Rat(1)) config_error("mixture.weights", "weights must sum to 1 exactly");

    if (!m.contains("atoms") || !m.at("atoms").is_array() || m.at("atoms").empty())
        config_error("mixture.atoms", "expected a non-empty atom array");
    std::vector<AtomicMeasure::Atom> atoms;
    for (const auto& a : m.at("atoms")) {
        reject_unknown(a, "mixture.atoms[]", {"x", "p"});
        atoms.push_back({Loc(rat_field(a.at("x"), "atom.x")),
                         to_double(rat_field(a.at("p"), "atom.p"))});
    }
    std::optional<GridDensity> density;
    if (c_a > Rat(0)) {
        if (!m.contains("density")) config_error("mixture", "c_a > 0 requires a density block");
        density = parse_density(m.at("density"));
    } else if (m.contains("density")) {
        config_error("mixture.density", "present although c_a = 0");
    }
    std::optional<SingularSpec> singular;
    if (c_s > Rat(0)) {
        if (!m.contains("singular")) config_error("mixture", "c_s > 0 requires a singular block");
        singular = parse_singular(m.at("singular"));
    } else if (m.contains("singular")) {
        config_error("mixture.singular", "present although c_s = 0");
    }

    auto mix = MixtureDistribution::make(c_d, AtomicMeasure::from_atoms(std::move(atoms)),
                                         c_a, std::move(density), c_s, std::move(singular));
    if (m.contains("square_class")) {
        const auto& q = m.at("square_class");
        reject_unknown(q, "mixture.square_class", {"n_a", "alpha"});
        mix.declare_singular_square_class(int_field(q, "n_a", 2, "square_class"),
                                          rat_field(q.at("alpha"), "square_class.alpha"));
    }
    return mix;
}

double round17(double v) { return v; }  // doubles round-trip at 17 significant digits

json verdict_block(const CriteriaReport& r) {
    json v;
    v["verdict"] = to_string(r.verdict);
    v["cond_ii"] = to_string(r.cond_ii);
    v["cond_iii"] = to_string(r.cond_iii);
    v["dominated"] = r.dominated;
    v["margin"] = round17(r.margin);
    v["mu_d_lower"] = round17(r.mu_d_lower);
    v["inf_f_lower"] = round17(r.inf_f_lower);
    v["inconsistency"] = r.inconsistency;
    v["notes"] = r.notes;
    return v;
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
}

class StageTimer {
public:
    explicit StageTimer(json& doc) : doc_(doc) {}
    template <typename F>
    auto run(const std::string& name, F&& f) {
        auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            record(name, start);
        } else {
            auto r = f();
            record(name, start);
            return r;
        }
    }

private:
    void record(const std::string& name, std::chrono::steady_clock::time_point start) {
        auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
        doc_["timings"][name + "_ms"] = ms.count();
    }
    json& doc_;
};

}  // namespace

std::uint64_t fnv1a_hash(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

ScenarioConfig parse_scenario(const json& doc) {
    reject_unknown(doc, "$", {"task", "mixture", "grid", "series", "bounds"});
    ScenarioConfig cfg;
    if (!doc.contains("task") || !doc.at("task").is_string())
        config_error("task", "missing or not a string");
    cfg.task = doc.at("task").get<std::string>();
    const bool known = cfg.task == "check" || cfg.task == "triplet" || cfg.task == "series" ||
                       cfg.task == "bounds" || cfg.task == "counterexample" || cfg.task == "report";
    if (!known) config_error("task", "unknown task '" + cfg.task + "'");

    if (doc.contains("mixture")) cfg.mixture = parse_mixture(doc.at("mixture"));
    if (cfg.task != "bounds" && !cfg.mixture) config_error("mixture", "required for this task");

    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        reject_unknown(g, "grid", {"t_max", "samples", "refinement"});
        cfg.t_max = num_field(g, "t_max", cfg.t_max, "grid");
        cfg.samples = int_field(g, "samples", cfg.samples, "grid");
        cfg.refinement = int_field(g, "refinement", cfg.refinement, "grid");
        if (cfg.t_max <= 0 || cfg.samples < 3) config_error("grid", "invalid grid block");
    }
    if (doc.contains("series")) {
        const auto& s = doc.at("series");
        reject_unknown(s, "series", {"n", "refine_level", "prune_budget"});
        cfg.n = int_field(s, "n", cfg.n, "series");
        cfg.refine_level = int_field(s, "refine_level", cfg.refine_level, "series");
        cfg.prune_budget = num_field(s, "prune_budget", cfg.prune_budget, "series");
        if (cfg.n < 1 || cfg.refine_level < 0 || cfg.prune_budget < 0)
            config_error("series", "invalid series block");
    }
    if (doc.contains("bounds")) {
        const auto& b = doc.at("bounds");
        reject_unknown(b, "bounds", {"dims", "max_terms", "k_max", "count", "coef_range", "exp_range", "seed"});
        if (b.contains("dims")) cfg.dims = b.at("dims").get<std::vector<int>>();
        cfg.max_terms = int_field(b, "max_terms", cfg.max_terms, "bounds");
        cfg.k_max = int_field(b, "k_max", cfg.k_max, "bounds");
        cfg.count = int_field(b, "count", cfg.count, "bounds");
        cfg.coef_range = int_field(b, "coef_range", cfg.coef_range, "bounds");
        cfg.exp_range = int_field(b, "exp_range", cfg.exp_range, "bounds");
        if (b.contains("seed")) cfg.seed = b.at("seed").get<std::uint64_t>();
        for (int d : cfg.dims)
            if (d < 1 || d > 4) config_error("bounds.dims", "dimensions must be within 1..4");
        if (cfg.count < 1 || cfg.k_max < 1 || cfg.max_terms < 1)
            config_error("bounds", "invalid bounds block");
    }
    cfg.canonical = doc;
    return cfg;
}

ScenarioConfig parse_scenario_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    return parse_scenario(doc);
}

std::vector<std::pair<std::string, json>> builtin_examples() {
    json cantor = {{"kind", "cantor"}};
    std::vector<std::pair<std::string, json>> out;

    json e1;
    e1["task"] = "report";
    e1["mixture"] = {{"weights", {{"d", "1/2"}, {"a", "3/10"}, {"s", "1/5"}}},
                     {"atoms", json::array({{{"x", "0"}, {"p", "1"}}})},
                     {"density", {{"kind", "triangular"}, {"a", -1.0}, {"c", 0.0}, {"b", 1.0}}},
                     {"singular", cantor}};
    out.emplace_back("example1", e1);

    json e2;
    e2["task"] = "report";
    e2["mixture"] = {{"weights", {{"d", "1/2"}, {"a", "3/10"}, {"s", "1/5"}}},
                     {"atoms", json::array({{{"x", "0"}, {"p", "1"}}})},
                     {"density", {{"kind", "uniform"}, {"a", 0.0}, {"b", 1.0}}},
                     {"singular", cantor}};
    out.emplace_back("example2", e2);

    json e3;
    e3["task"] = "report";
    e3["mixture"] = {{"weights", {{"d", "1/2"}, {"s", "1/2"}}},
                     {"atoms", json::array({{{"x", "0"}, {"p", "1"}}})},
                     {"singular", {{"kind", "factorial"}}}};
    out.emplace_back("example3", e3);

    json e4;
    e4["task"] = "report";
    e4["mixture"] = {{"weights", {{"d", "1/2"}, {"a", "3/10"}, {"s", "1/5"}}},
                     {"atoms", json::array({{{"x", "1"}, {"p", "1"}}})},
                     {"density", {{"kind", "uniform"}, {"a", 0.0}, {"b", 1.0}}},
                     {"singular", cantor}};
    out.emplace_back("example4", e4);
    return out;
}

namespace {

std::string trace_csv(const MixtureDistribution& F, double t_max) {
    std::string body = "t,re,im,abs,arg\n";
    char line[256];
    try {
        auto trace = distinguished_log(F, t_max);
        for (size_t i = 0; i < trace.grid.size(); ++i) {
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", trace.grid[i],
                          trace.values[i].real(), trace.values[i].imag(), std::abs(trace.values[i]),
                          trace.args[i]);
            body += line;
        }
    } catch (const ZeroCrossingError&) {
        // fall back to principal arguments on a uniform grid
        for (int i = 0; i <= 2000; ++i) {
            double t = -t_max + 2 * t_max * i / 2000.0;
            cplx v = eval_cf(F, t);
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", t, v.real(), v.imag(),
                          std::abs(v), std::arg(v));
            body += line;
        }
    }
    return body;
}

json run_check(const ScenarioConfig& cfg, json& doc) {
    StageTimer timer(doc);
    auto rep = timer.run("criteria", [&] { return rid_criteria(*cfg.mixture); });
    return verdict_block(rep);
}

json triplet_block(const SpectralTriplet& trip) {
    json t;
    t["gamma0"] = round17(trip.gamma0);
    t["gamma"] = round17(trip.gamma);
    t["sigma2"] = trip.sigma2;
    t["index_ma"] = trip.index_ma;
    t["lambda_abs_sum"] = round17(trip.discrete.lambda_abs_sum());
    t["lambda_count"] = trip.discrete.lambdas.size();
    t["lambda_truncation_l1"] = round17(trip.discrete.truncation_l1_error);
    t["lambda_im_residual"] = round17(trip.discrete.im_residual);
    if (trip.va_stats) {
        t["va_l1"] = round17(trip.va_stats->l1_norm);
        t["va_im_residual"] = round17(trip.va_stats->im_residual);
        t["va_resynth_residual"] = round17(trip.va_stats->resynth_residual);
    }
    if (trip.w_stats) {
        t["w_mass"] = round17(trip.w_stats->mass);
        t["w_mass_target"] = round17(trip.w_stats->mass_target);
        t["w_tv_budget"] = round17(trip.w_stats->approx.tv_error_budget);
        t["w_series_residual"] = round17(trip.w_stats->series_residual);
        t["w_atoms_residual"] = round17(trip.w_stats->atoms_residual);
        t["w_analytic_tail"] = round17(trip.w_stats->analytic_tail);
        t["w_atom_count"] = trip.w_stats->approx.atoms.size();
    }
    return t;
}

TripletOptions triplet_options(const ScenarioConfig& cfg) {
    TripletOptions opts;
    opts.w_terms = cfg.n;
    opts.w_refine_level = cfg.refine_level;
    opts.w.prune_relative = cfg.prune_budget;
    opts.w.residual_t_max = cfg.t_max;
    return opts;
}

json run_bounds(const ScenarioConfig& cfg, json& doc, std::string* csv) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> udim(0, static_cast<int>(cfg.dims.size()) - 1);
    std::uniform_int_distribution<int> uterms(1, cfg.max_terms);
    std::uniform_int_distribution<int> ucoef(-cfg.coef_range, cfg.coef_range);
    std::uniform_int_distribution<int> uexp(-cfg.exp_range, cfg.exp_range);

    int violations = 0;
    double max_ratio13 = 0.0, max_ratio15 = 0.0;
    if (csv) *csv = "d,k,exact,bound13,bound15,ratio\n";

    StageTimer timer(doc);
    timer.run("bounds_suite", [&] {
        for (int rep = 0; rep < cfg.count; ++rep) {
            int d = cfg.dims[static_cast<size_t>(udim(rng))];
            TrigPoly p(d);
            int terms = uterms(rng);
            for (int i = 0; i < terms; ++i) {
                std::vector<int> e(static_cast<size_t>(d));
                for (auto& x : e) x = uexp(rng);
                p.add_term(std::move(e), cplx(ucoef(rng), ucoef(rng)));
            }
            if (p.coefficients().empty()) p.add_term(std::vector<int>(static_cast<size_t>(d), 1), {1, 0});
            Lemma8Bounds bounds(p);
            for (int k = 1; k <= cfg.k_max; ++k) {
                double exact = exact_power_norm(p, k);
                double b13 = bounds.refined_bound(k);
                double b15 = bounds.bound_from_constants(k);
                const double slop = 1e-9 * std::max(1.0, exact);
                if (exact > b13 + slop || exact > b15 + slop) ++violations;
                if (exact > 0) {
                    max_ratio13 = std::max(max_ratio13, b13 / exact);
                    max_ratio15 = std::max(max_ratio15, b15 / exact);
                }
                if (csv) {
                    char line[192];
                    std::snprintf(line, sizeof line, "%d,%d,%.17g,%.17g,%.17g,%.17g\n", d, k, exact,
                                  b13, b15, exact > 0 ? b15 / exact : 0.0);
                    *csv += line;
                }
            }
        }
    });

    // the k = 1 pure-phase pin: the Lemma-8 partition bound is pi/sqrt(6)
    TrigPoly phase(1);
    phase.add_term({1}, {1.0, 0.0});
    Lemma8Bounds pb(phase);
    json b;
    b["cases"] = cfg.count;
    b["k_max"] = cfg.k_max;
    b["violations"] = violations;
    b["max_ratio13"] = round17(max_ratio13);
    b["max_ratio15"] = round17(max_ratio15);
    b["phase_bound_k1"] = round17(pb.refined_bound(1));
    b["phase_bound_k1_target"] = round17(kPi / std::sqrt(6.0));
    b["phase_constants_bound_k1"] = round17(pb.bound_from_constants(1));
    return b;
}

json run_counterexample(const ScenarioConfig& cfg, json& doc, std::string* csv) {
    const auto& F = *cfg.mixture;
    json c;
    StageTimer timer(doc);
    bool factorial = false;
    if (F.singular()) {
        if (const auto* p = std::get_if<ProductCF>(&F.singular()->node()))
            factorial = p->scales == ProductCF::Scales::factorial;
    }
    std::vector<RatioPoint> seq;
    if (csv) *csv = "n,t,ratio,f_zero\n";
    if (factorial) {
        std::vector<BigInt> probes;
        for (int n = 3; n <= 10; ++n) probes.push_back(big_factorial(2 * n));
        seq = timer.run("ratio_exact", [&] { return ratio_test_exact_pi(F, BigInt(1), probes); });
        c["probe"] = "t_n = pi (2n)!, tau = pi, n = 3..10";
        json rows = json::array();
        for (size_t i = 0; i < seq.size(); ++i) {
            json row;
            row["n"] = 3 + static_cast<int>(i);
            row["ratio"] = round17(seq[i].value);
            row["f_zero"] = seq[i].f_zero;
            rows.push_back(row);
            if (csv) {
                char line[160];
                std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%d\n", 3 + static_cast<int>(i),
                              seq[i].t, seq[i].value, seq[i].f_zero ? 1 : 0);
                *csv += line;
            }
        }
        c["rows"] = rows;
    } else {
        std::vector<double> ts;
        for (int i = 0; i < cfg.samples; ++i)
            ts.push_back(-cfg.t_max + 2 * cfg.t_max * i / (cfg.samples - 1));
        seq = timer.run("ratio_grid", [&] { return ratio_test(F, kPi, ts); });
        double mx = 0.0;
        for (const auto& p : seq) mx = std::max(mx, p.value);
        c["probe"] = "uniform grid, tau = pi";
        c["max_ratio"] = round17(mx);
        if (csv) {
            for (const auto& p : seq) {
                char line[160];
                std::snprintf(line, sizeof line, "0,%.17g,%.17g,%d\n", p.t, p.value, p.f_zero ? 1 : 0);
                *csv += line;
            }
        }
    }
    c["diverging"] = ratio_diverging(seq);
    return c;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
    RunReport report;
    json& doc = report.doc;
    doc["tool_version"] = kToolVersion;
    doc["task"] = cfg.task;
    doc["config_hash"] = fnv1a_hash(cfg.canonical.dump());
    doc["timings"] = json::object();

    std::string bounds_csv, counter_csv;
    std::string trace;
    StageTimer timer(doc);

    try {
        if (cfg.task == "check" || cfg.task == "report" || cfg.task == "triplet") {
            doc["criteria"] = run_check(cfg, doc);
            const auto& v = doc["criteria"];
            if (v["inconsistency"].get<bool>())
                report.exit_code = 3;
            else if (v["verdict"] == "RID")
                report.exit_code = 0;
            else
                report.exit_code = 1;
        }
        if (cfg.task == "triplet" || cfg.task == "report") {
            if (doc["criteria"]["verdict"] == "RID") {
                auto trip = timer.run("triplet",
                                      [&] { return assemble_triplet(*cfg.mixture, triplet_options(cfg)); });
                doc["triplet"] = triplet_block(trip);
            } else {
                doc["triplet"] = {{"skipped", "criteria verdict is not RID"}};
            }
        }
        if (cfg.task == "series") {
            if (!(cfg.mixture->c_s() > 0.0)) config_error("series", "mixture has no singular part");
            auto w = timer.run("series", [&] {
                WOptions opts;
                opts.prune_relative = cfg.prune_budget;
                opts.residual_t_max = cfg.t_max;
                return compute_W(*cfg.mixture, cfg.n, cfg.refine_level, opts);
            });
            json s;
            s["terms"] = w.terms;
            s["refine_level"] = w.refine_level;
            s["rho"] = round17(w.rho);
            s["mass"] = round17(w.mass);
            s["mass_target"] = round17(w.mass_target);
            s["mass_error"] = round17(std::abs(w.mass - w.mass_target));
            s["series_residual"] = round17(w.series_residual);
            s["atoms_residual"] = round17(w.atoms_residual);
            s["analytic_tail"] = round17(w.analytic_tail);
            s["tv_budget"] = round17(w.approx.tv_error_budget);
            s["atom_count"] = w.approx.atoms.size();
            doc["series"] = s;
            report.exit_code = 0;
        }
        if (cfg.task == "counterexample") {
            doc["counterexample"] = run_counterexample(cfg, doc, &counter_csv);
            report.exit_code = doc["counterexample"]["diverging"].get<bool>() ? 1 : 0;
        }
        if (cfg.task == "bounds") {
            doc["bounds"] = run_bounds(cfg, doc, &bounds_csv);
            report.exit_code = doc["bounds"]["violations"].get<int>() == 0 ? 0 : 3;
        }
        if (cfg.task == "report" && cfg.mixture) {
            trace = timer.run("trace", [&] { return trace_csv(*cfg.mixture, cfg.t_max); });
        }
    } catch (const std::invalid_argument&) {
        throw;  // invalid input surfaces as exit code 2 at the CLI boundary
    } catch (const std::exception& e) {
        doc["error"] = e.what();
        report.exit_code = 1;  // certification failure, not a crash
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        if (!trace.empty()) write_text(out_dir + "/trace.csv", trace);
        if (!bounds_csv.empty()) write_text(out_dir + "/bounds.csv", bounds_csv);
        if (!counter_csv.empty()) write_text(out_dir + "/counterexample.csv", counter_csv);
        write_text(out_dir + "/report.json", doc.dump(2) + "\n");
    }
    return report;
}

}  // namespace qid
