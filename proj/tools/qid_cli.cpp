// qid: criteria, spectral triplets and certified bounds for mixture
// distributions with discrete, absolutely continuous and dominated
// continuous singular parts.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qid/scenario.hpp"

namespace {

using nlohmann::json;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string format = "json";
    double t_max = -1.0;
    int n = -1;
    int refine = -1;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* c = cmd->add_option("--config", args.config_path, "scenario config file (JSON)");
    if (config_required) c->required();
    cmd->add_option("--out", args.out_dir, "directory for report.json and trace tables");
    cmd->add_option("--t-max", args.t_max, "override grid.t_max");
    cmd->add_option("--n", args.n, "override series.n");
    cmd->add_option("--refine", args.refine, "override series.refine_level");
    cmd->add_option("--seed", args.seed, "override bounds.seed");
    cmd->add_option("--format", args.format, "json | table")
        ->check(CLI::IsMember({"json", "table"}));
}

json load_config(const CommonArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) throw std::invalid_argument("cannot open config file: " + args.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    json doc = json::parse(buf.str(), nullptr, true);
    return doc;
}

void apply_overrides(json& doc, const CommonArgs& args, const std::string& task) {
    if (!task.empty()) doc["task"] = task;
    if (args.t_max > 0) doc["grid"]["t_max"] = args.t_max;
    if (args.n > 0) doc["series"]["n"] = args.n;
    if (args.refine >= 0) doc["series"]["refine_level"] = args.refine;
    if (args.seed >= 0) doc["bounds"]["seed"] = static_cast<std::uint64_t>(args.seed);
}

void print_table(const json& doc, std::ostream& os, const std::string& prefix = "") {
    for (const auto& [key, value] : doc.items()) {
        std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            print_table(value, os, name);
        } else if (value.is_array() && !value.empty() && value[0].is_object()) {
            for (size_t i = 0; i < value.size(); ++i)
                print_table(value[i], os, name + "[" + std::to_string(i) + "]");
        } else {
            os << name << " = " << value.dump() << "\n";
        }
    }
}

int run(const json& doc, const CommonArgs& args) {
    auto cfg = qid::parse_scenario(doc);
    auto report = qid::run_scenario(cfg, args.out_dir);
    if (args.format == "table")
        print_table(report.doc, std::cout);
    else
        std::cout << report.doc.dump(2) << "\n";
    return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rational-infinite divisibility toolkit for mixture distributions"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string example_name;

    auto* check = app.add_subcommand("check", "membership criteria (dominated singular part)");
    add_common(check, args, true);
    auto* triplet = app.add_subcommand("triplet", "criteria plus the spectral triplet");
    add_common(triplet, args, true);
    auto* series = app.add_subcommand("series", "W series computation");
    add_common(series, args, true);
    auto* bounds = app.add_subcommand("bounds", "trig-polynomial power norm bound suite");
    add_common(bounds, args, false);
    auto* counter = app.add_subcommand("counterexample", "ratio divergence probe");
    add_common(counter, args, true);
    auto* report = app.add_subcommand("report", "all-in-one report");
    add_common(report, args, true);
    auto* example = app.add_subcommand("example", "run a built-in construction");
    example->add_option("name", example_name, "example1 | example2 | example3 | example4")->required();
    add_common(example, args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        json doc;
        std::string task;
        if (example->parsed()) {
            for (auto& [name, cfg] : qid::builtin_examples()) {
                if (name == example_name) doc = cfg;
            }
            if (doc.is_null()) throw std::invalid_argument("unknown example: " + example_name);
        } else if (bounds->parsed() && args.config_path.empty()) {
            doc = json{{"task", "bounds"}};
        } else {
            doc = load_config(args);
        }
        if (check->parsed()) task = "check";
        if (triplet->parsed()) task = "triplet";
        if (series->parsed()) task = "series";
        if (bounds->parsed()) task = "bounds";
        if (counter->parsed()) task = "counterexample";
        if (report->parsed()) task = "report";
        apply_overrides(doc, args, task);
        return run(doc, args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
