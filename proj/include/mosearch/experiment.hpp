#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mosearch/evolve.hpp"
#include "mosearch/io.hpp"
#include "mosearch/metrics.hpp"
#include "mosearch/problems.hpp"

namespace mosearch {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

struct ExperimentSpec {
    std::string pack_name;
    std::string instance_path;
    SearchConfig config;  // rng_seed is the base seed; repetition i runs with base + i
    std::size_t repetitions = 30;
    std::string operator_source = "generated";  // or "manual"
    std::size_t jobs = 1;
    std::string out_dir;

    void validate() const {
        config.validate();
        if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
        if (operator_source != "generated" && operator_source != "manual")
            throw std::invalid_argument("operator source must be generated or manual");
        if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
        if (out_dir.empty()) throw std::invalid_argument("output directory required");
    }
};

struct RunOutcome {
    bool all_complete = false;
    Json manifest;
};

namespace experiment_detail {

inline std::string front_name(std::size_t idx) { return "front_" + std::to_string(idx) + ".csv"; }
inline std::string log_name(std::size_t idx) { return "log_" + std::to_string(idx) + ".csv"; }

// NaN and infinities have no JSON number form; emit null.
inline Json json_number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace experiment_detail

inline RunOutcome run_experiment(const ExperimentSpec& spec, std::ostream& progress) {
    namespace fs = std::filesystem;
    spec.validate();
    const auto started = std::chrono::steady_clock::now();

    const ProblemPack pack = make_pack(spec.pack_name);
    const auto [seed_model, instance_params] =
        model_from_json(pack.metamodel, load_json_file(spec.instance_path));
    const std::vector<OperatorPtr> operators = spec.operator_source == "generated"
                                                   ? pack.generated_operators()
                                                   : pack.manual_operators;
    fs::create_directories(spec.out_dir);

    struct RepRecord {
        std::string status;
        long long wall_ms = 0;
        std::size_t front_size = 0;
    };
    std::vector<RepRecord> records(spec.repetitions);
    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;

    auto worker = [&] {
        for (std::size_t idx = next.fetch_add(1); idx < spec.repetitions;
             idx = next.fetch_add(1)) {
            const auto rep_start = std::chrono::steady_clock::now();
            RepRecord rec;
            SearchConfig config = spec.config;
            config.rng_seed = spec.config.rng_seed + idx;
            try {
                const EvolveResult r = evolve(pack, seed_model, config, operators,
                                              instance_params);
                write_text_file(spec.out_dir + "/" + experiment_detail::front_name(idx),
                                front_csv(pack, r.front));
                write_text_file(spec.out_dir + "/" + experiment_detail::log_name(idx),
                                log_csv(pack, r.log));
                rec.front_size = r.front.individuals.size();
                rec.status = "complete";
            } catch (const std::exception& e) {
                rec.status = std::string("failed: ") + e.what();
            }
            rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - rep_start)
                              .count();
            records[idx] = rec;
            std::lock_guard<std::mutex> lock(progress_mutex);
            progress << "rep " << idx << ": " << rec.status << " (" << rec.wall_ms
                     << " ms, front " << rec.front_size << ")\n";
        }
    };
    if (spec.jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < spec.jobs; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }

    Json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["tool_version"] = kToolVersion;
    manifest["pack"] = spec.pack_name;
    manifest["instance"] = spec.instance_path;
    manifest["operators"] = spec.operator_source;
    manifest["strategy"] = to_string(spec.config.strategy);
    manifest["population"] = spec.config.population_size;
    manifest["evolutions"] = spec.config.evolutions;
    manifest["base_seed"] = spec.config.rng_seed;
    manifest["repetitions"] = spec.repetitions;
    manifest["jobs"] = spec.jobs;
    if (!instance_params.empty()) {
        Json p;
        for (const auto& [key, value] : instance_params) p[key] = value;
        manifest["params"] = std::move(p);
    }
    manifest["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - started)
                              .count();
    manifest["runs"] = Json::array();
    bool all_complete = true;
    for (std::size_t idx = 0; idx < spec.repetitions; ++idx) {
        const RepRecord& rec = records[idx];
        Json run;
        run["index"] = idx;
        run["seed"] = spec.config.rng_seed + idx;
        run["status"] = rec.status;
        run["wall_ms"] = rec.wall_ms;
        run["front_size"] = rec.front_size;
        run["front_csv"] = experiment_detail::front_name(idx);
        run["log_csv"] = experiment_detail::log_name(idx);
        manifest["runs"].push_back(std::move(run));
        if (rec.status != "complete") all_complete = false;
    }
    write_json_file(spec.out_dir + "/manifest.json", manifest);
    return {all_complete, std::move(manifest)};
}

namespace experiment_detail {

struct LoadedConfigRuns {
    std::string dir;
    std::string label;
    std::vector<std::vector<ObjectiveVector>> fronts;  // per completed run, natural sign
    std::size_t runs_listed = 0;
};

inline std::vector<ObjectiveVector> parse_front_csv(const std::string& path,
                                                    std::size_t arity) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
    std::vector<ObjectiveVector> points;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ObjectiveVector p;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) p.push_back(std::strtod(cell.c_str(), nullptr));
        if (p.size() != arity)
            throw std::runtime_error(path + ": expected " + std::to_string(arity) +
                                     " objectives per row");
        points.push_back(std::move(p));
    }
    return points;
}

inline Json stats_json(const SummaryStats& s) {
    Json j;
    j["median"] = json_number(s.median);
    j["min"] = json_number(s.min);
    j["max"] = json_number(s.max);
    j["sd"] = json_number(s.sd);
    j["skewness"] = json_number(s.skewness);
    j["kurtosis"] = json_number(s.kurtosis);
    return j;
}

}  // namespace experiment_detail

// Pure function of the result files: statistics per configuration plus
// pairwise rank-sum comparisons. Multi-objective configurations are scored by
// normalized hypervolume against a merged reference set.
inline Json analyze_dirs(const std::vector<std::string>& dirs) {
    using experiment_detail::json_number;
    if (dirs.empty()) throw std::invalid_argument("analyze needs at least one result directory");

    std::string pack_name;
    std::vector<experiment_detail::LoadedConfigRuns> configs;
    for (const std::string& dir : dirs) {
        const Json manifest = load_json_file(dir + "/manifest.json");
        const std::string this_pack = manifest.at("pack").get<std::string>();
        if (pack_name.empty())
            pack_name = this_pack;
        else if (pack_name != this_pack)
            throw std::invalid_argument("result directories mix packs (" + pack_name + " vs " +
                                        this_pack + "): objective arity mismatch");
        experiment_detail::LoadedConfigRuns cfg;
        cfg.dir = dir;
        cfg.label = manifest.at("operators").get<std::string>() + "/" +
                    manifest.at("strategy").get<std::string>();
        const ProblemPack pack = make_pack(this_pack);
        for (const Json& run : manifest.at("runs")) {
            ++cfg.runs_listed;
            if (run.at("status").get<std::string>() != "complete") continue;
            cfg.fronts.push_back(experiment_detail::parse_front_csv(
                dir + "/" + run.at("front_csv").get<std::string>(), pack.objectives.size()));
        }
        if (cfg.fronts.empty())
            throw std::runtime_error("no completed runs in " + dir);
        configs.push_back(std::move(cfg));
    }

    const ProblemPack pack = make_pack(pack_name);
    const std::size_t arity = pack.objectives.size();

    Json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["pack"] = pack_name;
    summary["objectives"] = Json::array();
    for (const Objective& o : pack.objectives) summary["objectives"].push_back(o.name);
    summary["metric"] = arity == 1 ? pack.objectives[0].name : "hypervolume";

    // per-run score samples per configuration
    std::vector<std::vector<double>> samples(configs.size());
    ReferenceSet reference;

    if (arity == 1) {
        const bool maximize = pack.objectives[0].direction == Direction::Maximize;
        for (std::size_t c = 0; c < configs.size(); ++c)
            for (const auto& front : configs[c].fronts) {
                double best = maximize ? -std::numeric_limits<double>::infinity()
                                       : std::numeric_limits<double>::infinity();
                for (const ObjectiveVector& p : front)
                    best = maximize ? std::max(best, p[0]) : std::min(best, p[0]);
                samples[c].push_back(front.empty() ? 0.0 : best);
            }
    } else {
        // minimization orientation for dominance and hypervolume
        auto minimized = [&](ObjectiveVector p) {
            for (std::size_t m = 0; m < arity; ++m)
                if (pack.objectives[m].direction == Direction::Maximize) p[m] = -p[m];
            return p;
        };
        std::vector<std::vector<ObjectiveVector>> all_fronts;
        for (const auto& cfg : configs)
            for (const auto& front : cfg.fronts) {
                std::vector<ObjectiveVector> f;
                for (const ObjectiveVector& p : front) f.push_back(minimized(p));
                all_fronts.push_back(std::move(f));
            }
        reference = merge_reference_set(all_fronts);

        ObjectiveVector lo(arity, std::numeric_limits<double>::infinity());
        ObjectiveVector hi(arity, -std::numeric_limits<double>::infinity());
        for (const auto& front : all_fronts)
            for (const ObjectiveVector& p : front)
                for (std::size_t m = 0; m < arity; ++m) {
                    lo[m] = std::min(lo[m], p[m]);
                    hi[m] = std::max(hi[m], p[m]);
                }
        auto normalized = [&](const ObjectiveVector& p) {
            ObjectiveVector q(arity);
            for (std::size_t m = 0; m < arity; ++m)
                q[m] = hi[m] > lo[m] ? (p[m] - lo[m]) / (hi[m] - lo[m]) : 0.0;
            return q;
        };
        const ObjectiveVector nadir(arity, 1.01);

        for (std::size_t c = 0; c < configs.size(); ++c)
            for (const auto& front : configs[c].fronts) {
                if (front.empty()) {
                    samples[c].push_back(0.0);  // infeasible run scores zero
                    continue;
                }
                std::vector<ObjectiveVector> pts;
                for (const ObjectiveVector& p : front) pts.push_back(normalized(minimized(p)));
                samples[c].push_back(hypervolume(pts, nadir));
            }

        summary["reference_set_size"] = reference.points.size();
    }

    summary["configurations"] = Json::array();
    for (std::size_t c = 0; c < configs.size(); ++c) {
        Json cfg;
        cfg["dir"] = configs[c].dir;
        cfg["label"] = configs[c].label;
        cfg["runs"] = configs[c].runs_listed;
        cfg["complete"] = configs[c].fronts.size();
        std::size_t feasible = 0;
        for (const auto& front : configs[c].fronts)
            if (!front.empty()) ++feasible;
        cfg["feasible_runs"] = feasible;
        cfg["stats"] = experiment_detail::stats_json(summarize(samples[c]));
        if (arity > 1) {
            std::set<ObjectiveVector> contributed;
            for (const auto& front : configs[c].fronts)
                for (ObjectiveVector p : front) {
                    for (std::size_t m = 0; m < arity; ++m)
                        if (pack.objectives[m].direction == Direction::Maximize) p[m] = -p[m];
                    contributed.insert(std::move(p));
                }
            std::size_t rsc = 0;
            for (const ObjectiveVector& r : reference.points)
                if (contributed.count(r)) ++rsc;
            cfg["rs"] = reference.points.size();
            cfg["rsc"] = rsc;
            cfg["bsr"] = json_number(static_cast<double>(rsc) /
                                     static_cast<double>(reference.points.size()));
        }
        Json values = Json::array();
        for (double v : samples[c]) values.push_back(json_number(v));
        cfg["values"] = std::move(values);
        summary["configurations"].push_back(std::move(cfg));
    }

    summary["comparisons"] = Json::array();
    for (std::size_t a = 0; a < configs.size(); ++a)
        for (std::size_t b = a + 1; b < configs.size(); ++b) {
            Json cmp;
            cmp["a"] = configs[a].dir;
            cmp["b"] = configs[b].dir;
            const MannWhitneyResult mw = mann_whitney_u(samples[a], samples[b]);
            cmp["u"] = json_number(mw.u);
            cmp["p"] = json_number(mw.p_two_sided);
            if (samples[a].size() >= 2 && samples[b].size() >= 2) {
                const EffectSize e = cohens_d(samples[a], samples[b]);
                cmp["d"] = json_number(e.d);
                cmp["effect"] = e.label;
            }
            summary["comparisons"].push_back(std::move(cmp));
        }
    return summary;
}

// Fixed-width text rendering of an analyze summary.
inline std::string analysis_table(const Json& summary) {
    std::ostringstream out;
    const bool multi = summary.contains("reference_set_size");
    out << "pack: " << summary.at("pack").get<std::string>()
        << "   metric: " << summary.at("metric").get<std::string>() << "\n";

    auto cell = [](const Json& j) -> std::string {
        if (j.is_null()) return "-";
        if (j.is_string()) return j.get<std::string>();
        if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
        if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
        std::ostringstream s;
        s << std::setprecision(6) << j.get<double>();
        return s.str();
    };

    out << std::left << std::setw(28) << "configuration" << std::right << std::setw(12)
        << "median" << std::setw(12) << "min" << std::setw(12) << "max" << std::setw(12) << "sd";
    if (multi) out << std::setw(8) << "rs" << std::setw(8) << "rsc" << std::setw(10) << "bsr";
    out << std::setw(12) << "feasible" << "\n";
    for (const Json& cfg : summary.at("configurations")) {
        const Json& stats = cfg.at("stats");
        out << std::left << std::setw(28) << cfg.at("label").get<std::string>() << std::right
            << std::setw(12) << cell(stats.at("median")) << std::setw(12) << cell(stats.at("min"))
            << std::setw(12) << cell(stats.at("max")) << std::setw(12) << cell(stats.at("sd"));
        if (multi)
            out << std::setw(8) << cell(cfg.at("rs")) << std::setw(8) << cell(cfg.at("rsc"))
                << std::setw(10) << cell(cfg.at("bsr"));
        out << std::setw(6) << cell(cfg.at("feasible_runs")) << "/" << std::left
            << cell(cfg.at("complete")) << std::right << "\n";
    }
    for (const Json& cmp : summary.at("comparisons"))
        out << cmp.at("a").get<std::string>() << " vs " << cmp.at("b").get<std::string>()
            << ": U=" << cell(cmp.at("u")) << " p=" << cell(cmp.at("p"))
            << (cmp.contains("d") ? " d=" + cell(cmp.at("d")) + " (" +
                                        cmp.at("effect").get<std::string>() + ")"
                                  : "")
            << "\n";
    return out.str();
}

}  // namespace mosearch
