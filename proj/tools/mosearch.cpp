#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mosearch/experiment.hpp"
#include "mosearch/io.hpp"
#include "mosearch/rulegen.hpp"

namespace {

using namespace mosearch;

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::map<std::string, double> parse_kv(const std::string& csv) {
    std::map<std::string, double> out;
    for (const std::string& pair : split_csv(csv)) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected key=value, got: " + pair);
        std::size_t used = 0;
        const double value = std::stod(pair.substr(eq + 1), &used);
        if (used != pair.size() - eq - 1)
            throw std::invalid_argument("not a number in: " + pair);
        out[pair.substr(0, eq)] = value;
    }
    return out;
}

GenerationScope full_scope(const Metamodel& mm) {
    GenerationScope scope;
    for (const NodeType& nt : mm.node_types())
        if (!nt.is_abstract) scope.node_types.push_back(nt.name);
    for (const EdgeType& et : mm.edge_types()) scope.edge_types.push_back(et.name);
    return scope;
}

int cmd_rulegen(const std::string& pack_name, const std::string& metamodel_path,
                const std::string& constraints_path, const std::string& scope_nodes,
                const std::string& scope_edges, bool scope_given, const std::string& phase,
                const std::string& dump_path, bool explain) {
    MetamodelPtr mm;
    ConstraintSet cs;
    GenerationScope scope;
    if (!pack_name.empty()) {
        const ProblemPack pack = make_pack(pack_name);
        mm = pack.metamodel;
        cs = pack.solution_constraints;
        scope = pack.scope;
    } else {
        auto loaded = metamodel_from_json(load_json_file(metamodel_path));
        mm = loaded.first;
        cs = loaded.second;
        if (!constraints_path.empty()) {
            const ConstraintSet extra =
                constraints_from_json(*mm, load_json_file(constraints_path));
            for (const auto& [key, m] : extra.entries()) cs.refine(key.first, key.second, m);
            cs.validate(*mm);
        }
        scope = full_scope(*mm);
    }
    if (scope_given) scope = GenerationScope{split_csv(scope_nodes), split_csv(scope_edges)};

    RuleSet rules;
    if (phase == "problem")
        rules = generate_phase_rules(mm, nullptr, scope, Phase::Problem, {});
    else if (phase == "solution")
        rules = generate_phase_rules(mm, &cs, scope, Phase::Solution, {});
    else
        rules = generate_acpsos(mm, cs, scope);

    if (rules.rules.empty()) std::cerr << "warning: scope produced no rules\n";
    const Json dump = ruleset_to_json(*mm, rules.rules, explain);
    if (dump_path.empty())
        std::cout << dump.dump(2) << "\n";
    else
        write_json_file(dump_path, dump);
    std::cerr << rules.rules.size() << " rules\n";
    return 0;
}

int cmd_genmodel(const std::string& pack_name, const std::string& params_csv,
                 std::uint64_t seed, const std::string& out_path) {
    const ProblemPack pack = make_pack(pack_name);
    std::map<std::string, double> generator_overrides;
    EvalParams eval_params = pack.eval_defaults;
    for (const auto& [key, value] : parse_kv(params_csv)) {
        const bool is_size = std::any_of(pack.instance_defaults.begin(),
                                         pack.instance_defaults.end(),
                                         [&](const auto& d) { return d.first == key; });
        if (is_size)
            generator_overrides[key] = value;
        else if (eval_params.count(key))
            eval_params[key] = value;
        else
            throw std::invalid_argument("unknown parameter for pack " + pack_name + ": " + key);
    }
    Rng rng(seed);
    const Model m = pack.make_instance(generator_overrides, rng);
    const Json j = model_to_json(m, eval_params);
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json_file(out_path, j);
    std::cerr << "instance: " << m.node_count() << " nodes, " << m.edge_count() << " edges\n";
    return 0;
}

int cmd_run(ExperimentSpec spec, const std::string& strategy) {
    spec.config.strategy =
        strategy == "nondet" ? MutationStrategy::Nondet : MutationStrategy::Classic;
    if (!std::filesystem::exists(spec.instance_path)) {
        std::cerr << "error: instance file not found: " << spec.instance_path << "\n";
        return 2;
    }
    const RunOutcome outcome = run_experiment(spec, std::cerr);
    std::cerr << (outcome.all_complete ? "all repetitions complete\n"
                                       : "some repetitions failed\n");
    return outcome.all_complete ? 0 : 1;
}

int cmd_analyze(const std::vector<std::string>& dirs, const std::string& out_path) {
    const Json summary = analyze_dirs(dirs);
    std::cout << analysis_table(summary);
    if (out_path.empty())
        std::cout << summary.dump(2) << "\n";
    else
        write_json_file(out_path, summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"search-based optimization of typed graph models"};
    app.require_subcommand(1);

    // rulegen
    std::string rg_pack, rg_metamodel, rg_constraints, rg_scope_nodes, rg_scope_edges;
    std::string rg_phase = "both", rg_dump;
    bool rg_explain = false;
    CLI::App* rulegen = app.add_subcommand("rulegen", "generate consistency-preserving rules");
    auto* rg_pack_opt = rulegen->add_option("--pack", rg_pack, "built-in problem pack");
    auto* rg_mm_opt =
        rulegen->add_option("--metamodel", rg_metamodel, "metamodel JSON file");
    rulegen->add_option("--constraints", rg_constraints, "refinements JSON file")
        ->needs(rg_mm_opt);
    rg_pack_opt->excludes(rg_mm_opt);
    auto* rg_sn_opt =
        rulegen->add_option("--scope-nodes", rg_scope_nodes, "node types to generate for (csv)");
    auto* rg_se_opt =
        rulegen->add_option("--scope-edges", rg_scope_edges, "edge types to generate for (csv)");
    rulegen->add_option("--phase", rg_phase, "problem|solution|both")
        ->check(CLI::IsMember({"problem", "solution", "both"}));
    rulegen->add_option("--dump", rg_dump, "write ruleset JSON here (default stdout)");
    rulegen->add_flag("--explain", rg_explain, "include per-rule generation notes");

    // genmodel
    std::string gm_pack, gm_params, gm_out;
    std::uint64_t gm_seed = 0;
    CLI::App* genmodel = app.add_subcommand("genmodel", "generate a random problem instance");
    genmodel->add_option("--pack", gm_pack, "built-in problem pack")->required();
    genmodel->add_option("--params", gm_params, "size/eval overrides as k=v,k=v");
    genmodel->add_option("--seed", gm_seed, "generator seed");
    genmodel->add_option("--out", gm_out, "write instance JSON here (default stdout)");

    // run
    ExperimentSpec spec;
    std::string run_strategy = "classic";
    spec.jobs = std::max(1u, std::thread::hardware_concurrency());
    CLI::App* run = app.add_subcommand("run", "run a seeded experiment batch");
    run->add_option("--pack", spec.pack_name, "built-in problem pack")->required();
    run->add_option("--instance", spec.instance_path, "instance JSON file")->required();
    run->add_option("--pop", spec.config.population_size, "population size");
    run->add_option("--evolutions", spec.config.evolutions, "generations per repetition");
    run->add_option("--strategy", run_strategy, "classic|nondet")
        ->check(CLI::IsMember({"classic", "nondet"}));
    run->add_option("--seed", spec.config.rng_seed, "base seed; repetition i uses base+i");
    run->add_option("--repetitions", spec.repetitions, "independent repetitions");
    run->add_option("--operators", spec.operator_source, "generated|manual")
        ->check(CLI::IsMember({"generated", "manual"}));
    run->add_option("--jobs", spec.jobs, "concurrent repetitions");
    run->add_option("--out", spec.out_dir, "result directory")->required();

    // analyze
    std::vector<std::string> an_dirs;
    std::string an_out;
    CLI::App* analyze = app.add_subcommand("analyze", "summarize result directories");
    analyze->add_option("dirs", an_dirs, "result directories")->required();
    analyze->add_option("--out", an_out, "write summary JSON here (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rulegen->parsed()) {
            if (rg_pack.empty() == rg_metamodel.empty()) {
                std::cerr << "error: pass exactly one of --pack / --metamodel\n";
                return 1;
            }
            return cmd_rulegen(rg_pack, rg_metamodel, rg_constraints, rg_scope_nodes,
                               rg_scope_edges, rg_sn_opt->count() > 0 || rg_se_opt->count() > 0,
                               rg_phase, rg_dump, rg_explain);
        }
        if (genmodel->parsed()) return cmd_genmodel(gm_pack, gm_params, gm_seed, gm_out);
        if (run->parsed()) return cmd_run(spec, run_strategy);
        if (analyze->parsed()) return cmd_analyze(an_dirs, an_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
