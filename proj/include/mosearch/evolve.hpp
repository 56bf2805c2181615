#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mosearch/metrics.hpp"
#include "mosearch/operators.hpp"
#include "mosearch/problems.hpp"
#include "mosearch/rng.hpp"
#include "mosearch/typed_graph.hpp"

namespace mosearch {

// Objectives are stored minimization-oriented; maximization objectives are
// negated on evaluation and reported with their natural sign in logs.
struct Individual {
    Model model;
    std::vector<double> objectives;
    std::size_t violation_count = 0;
};

struct SearchConfig {
    std::size_t population_size = 100;
    std::size_t evolutions = 0;
    MutationStrategy strategy = MutationStrategy::Classic;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (population_size < 2)
            throw std::invalid_argument("population size must be at least 2");
    }
};

struct Front {
    std::vector<Individual> individuals;
};

inline Individual evaluate(const ProblemPack& pack, Model model, const EvalParams& params) {
    Individual ind{std::move(model), {}, 0};
    for (const Objective& obj : pack.objectives) {
        double value = 0.0;
        try {
            value = obj.eval(ind.model);
        } catch (const std::exception& e) {
            throw std::runtime_error("objective '" + obj.name + "' failed: " + e.what());
        }
        ind.objectives.push_back(obj.direction == Direction::Maximize ? -value : value);
    }
    ind.violation_count = pack.total_violations(ind.model, params);
    return ind;
}

inline std::vector<double> natural_objectives(const ProblemPack& pack,
                                              const std::vector<double>& internal) {
    std::vector<double> out = internal;
    for (std::size_t i = 0; i < out.size() && i < pack.objectives.size(); ++i)
        if (pack.objectives[i].direction == Direction::Maximize) out[i] = -out[i];
    return out;
}

// Constrained dominance: fewer violations win outright; ties fall back to
// Pareto dominance on the objectives.
inline bool dominates(const Individual& a, const Individual& b) {
    if (a.objectives.size() != b.objectives.size())
        throw std::invalid_argument("objective arity mismatch");
    if (a.violation_count != b.violation_count) return a.violation_count < b.violation_count;
    return dominates(a.objectives, b.objectives);
}

inline std::vector<std::vector<std::size_t>> nondominated_sort(
    const std::vector<Individual>& pop) {
    if (pop.empty()) throw std::invalid_argument("cannot sort an empty population");
    const std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> beats(n);
    std::vector<std::size_t> beaten_by(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(pop[i], pop[j])) {
                beats[i].push_back(j);
                ++beaten_by[j];
            } else if (dominates(pop[j], pop[i])) {
                beats[j].push_back(i);
                ++beaten_by[i];
            }
        }

    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t i = 0; i < n; ++i)
        if (beaten_by[i] == 0) fronts[0].push_back(i);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        std::vector<std::size_t> next;
        for (std::size_t p : fronts[f])
            for (std::size_t q : beats[p])
                if (--beaten_by[q] == 0) next.push_back(q);
        if (next.empty()) break;
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    return fronts;
}

// Boundary individuals get infinite distance; value ties are ordered by
// population index so results stay deterministic.
inline std::vector<double> crowding_distances(const std::vector<Individual>& pop,
                                              const std::vector<std::size_t>& front) {
    const std::size_t n = front.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, 0.0);
    if (n == 0) return dist;
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }
    const std::size_t arity = pop[front[0]].objectives.size();
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < arity; ++m) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = pop[front[a]].objectives[m], vb = pop[front[b]].objectives[m];
            if (va != vb) return va < vb;
            return front[a] < front[b];
        });
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        const double lo = pop[front[order.front()]].objectives[m];
        const double hi = pop[front[order.back()]].objectives[m];
        if (hi > lo)
            for (std::size_t i = 1; i + 1 < n; ++i)
                dist[order[i]] += (pop[front[order[i + 1]]].objectives[m] -
                                   pop[front[order[i - 1]]].objectives[m]) /
                                  (hi - lo);
    }
    return dist;
}

// NSGA-II survivor selection: whole fronts in order, the straddling front
// truncated by descending crowding distance.
inline std::vector<std::size_t> environmental_selection(const std::vector<Individual>& pool,
                                                        std::size_t target) {
    if (target > pool.size())
        throw std::invalid_argument("selection target exceeds pool size");
    const auto fronts = nondominated_sort(pool);
    std::vector<std::size_t> chosen;
    for (const auto& front : fronts) {
        if (chosen.size() == target) break;
        if (chosen.size() + front.size() <= target) {
            chosen.insert(chosen.end(), front.begin(), front.end());
            continue;
        }
        const std::vector<double> dist = crowding_distances(pool, front);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (dist[a] != dist[b]) return dist[a] > dist[b];
            return front[a] < front[b];
        });
        for (std::size_t i = 0; chosen.size() < target; ++i) chosen.push_back(front[order[i]]);
        break;
    }
    return chosen;
}

inline std::vector<Individual> init_population(const ProblemPack& pack, const Model& seed,
                                               const SearchConfig& config,
                                               const std::vector<OperatorPtr>& operators,
                                               const EvalParams& params, Rng& rng) {
    config.validate();
    if (operators.empty()) throw std::invalid_argument("no search operators");
    std::vector<Individual> pop;
    pop.reserve(config.population_size);
    for (std::size_t i = 0; i < config.population_size; ++i)
        pop.push_back(evaluate(pack, mutate(seed, operators, config.strategy, rng), params));
    return pop;
}

struct GenerationLogRow {
    std::size_t generation = 0;
    std::vector<double> best;  // natural sign; over feasible individuals when any exist
    std::size_t feasible_count = 0;
    std::size_t front_size = 0;
    std::optional<double> hypervolume;  // multi-objective packs only
};

struct EvolveResult {
    Front front;  // final first front restricted to violation-free individuals
    std::vector<GenerationLogRow> log;
    bool seed_had_applicable_rule = true;
};

namespace evolve_detail {

inline std::size_t tournament(const std::vector<std::size_t>& rank,
                              const std::vector<double>& crowding, Rng& rng) {
    const std::size_t i = rng.index(rank.size());
    const std::size_t j = rng.index(rank.size());
    if (rank[i] != rank[j]) return rank[i] < rank[j] ? i : j;
    if (crowding[i] != crowding[j]) return crowding[i] > crowding[j] ? i : j;
    return std::min(i, j);
}

inline GenerationLogRow log_row(const ProblemPack& pack, const std::vector<Individual>& pop,
                                const std::vector<std::vector<std::size_t>>& fronts,
                                std::size_t generation) {
    GenerationLogRow row;
    row.generation = generation;
    row.front_size = fronts[0].size();
    for (const Individual& ind : pop)
        if (ind.violation_count == 0) ++row.feasible_count;

    const std::size_t arity = pack.objectives.size();
    std::vector<double> best(arity, std::numeric_limits<double>::infinity());
    for (const Individual& ind : pop) {
        if (row.feasible_count > 0 && ind.violation_count != 0) continue;
        for (std::size_t m = 0; m < arity; ++m) best[m] = std::min(best[m], ind.objectives[m]);
    }
    row.best = natural_objectives(pack, best);

    if (arity == 2 || arity == 3) {
        std::vector<ObjectiveVector> pts;
        for (std::size_t idx : fronts[0])
            if (pop[idx].violation_count == 0) pts.push_back(pop[idx].objectives);
        row.hypervolume = pts.empty() ? 0.0 : hypervolume(pts, nadir_with_margin(pts));
    }
    return row;
}

}  // namespace evolve_detail

inline EvolveResult evolve(const ProblemPack& pack, const Model& seed, const SearchConfig& config,
                           const std::vector<OperatorPtr>& operators,
                           const EvalParams& overrides = {}) {
    config.validate();
    if (operators.empty()) throw std::invalid_argument("no search operators");
    EvalParams params = pack.eval_defaults;
    for (const auto& [key, value] : overrides) params[key] = value;

    Rng rng(config.rng_seed);
    EvolveResult result;
    {
        std::size_t total = 0;
        for (const OperatorPtr& op : operators) total += op->count_applications(seed);
        result.seed_had_applicable_rule = total > 0;
    }

    std::vector<Individual> pop = init_population(pack, seed, config, operators, params, rng);
    auto fronts = nondominated_sort(pop);
    result.log.push_back(evolve_detail::log_row(pack, pop, fronts, 0));

    std::vector<std::size_t> rank(config.population_size);
    std::vector<double> crowding(config.population_size);
    for (std::size_t gen = 1; gen <= config.evolutions; ++gen) {
        for (std::size_t f = 0; f < fronts.size(); ++f) {
            const std::vector<double> dist = crowding_distances(pop, fronts[f]);
            for (std::size_t i = 0; i < fronts[f].size(); ++i) {
                rank[fronts[f][i]] = f;
                crowding[fronts[f][i]] = dist[i];
            }
        }
        std::vector<Individual> pool = pop;
        pool.reserve(2 * config.population_size);
        for (std::size_t i = 0; i < config.population_size; ++i) {
            const std::size_t parent = evolve_detail::tournament(rank, crowding, rng);
            try {
                pool.push_back(evaluate(
                    pack, mutate(pop[parent].model, operators, config.strategy, rng), params));
            } catch (const std::exception& e) {
                throw std::runtime_error("generation " + std::to_string(gen) + ": " + e.what());
            }
        }
        std::vector<Individual> next;
        next.reserve(config.population_size);
        for (std::size_t idx : environmental_selection(pool, config.population_size))
            next.push_back(std::move(pool[idx]));
        pop = std::move(next);
        fronts = nondominated_sort(pop);
        result.log.push_back(evolve_detail::log_row(pack, pop, fronts, gen));
    }

    for (std::size_t idx : fronts[0])
        if (pop[idx].violation_count == 0) result.front.individuals.push_back(pop[idx]);
    return result;
}

}  // namespace mosearch
