#pragma once

#include <functional>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "rules.hpp"

namespace mosearch {

// A mutation operator: a finite, deterministically ordered set of concrete
// applications on a given model. Rules and hand-written program mutations
// share this interface so the search treats them uniformly.
class SearchOperator {
public:
    virtual ~SearchOperator() = default;
    virtual const std::string& name() const = 0;
    virtual std::size_t count_applications(const Model& m) const = 0;
    // index must be < count_applications(m) on the same model
    virtual Model apply_application(const Model& m, std::size_t index) const = 0;
};

using OperatorPtr = std::shared_ptr<const SearchOperator>;

class RuleOperator final : public SearchOperator {
public:
    explicit RuleOperator(Rule rule) : rule_(std::move(rule)) { rule_.validate(); }

    const Rule& rule() const { return rule_; }
    const std::string& name() const override { return rule_.name; }

    std::size_t count_applications(const Model& m) const override {
        return count_matches(rule_, m);
    }

    Model apply_application(const Model& m, std::size_t index) const override {
        std::optional<Match> match = nth_match(rule_, m, index);
        if (!match)
            throw std::out_of_range(rule_.name + ": application index " + std::to_string(index) +
                                    " out of range");
        return apply(rule_, m, *match);
    }

private:
    Rule rule_;
};

// Wraps an ad-hoc mutation written as plain code (used for hand-authored
// operator baselines that are not expressible as single rules).
class ProgramOperator final : public SearchOperator {
public:
    using CountFn = std::function<std::size_t(const Model&)>;
    using ApplyFn = std::function<Model(const Model&, std::size_t)>;

    ProgramOperator(std::string name, CountFn count, ApplyFn apply)
        : name_(std::move(name)), count_(std::move(count)), apply_(std::move(apply)) {}

    const std::string& name() const override { return name_; }
    std::size_t count_applications(const Model& m) const override { return count_(m); }
    Model apply_application(const Model& m, std::size_t index) const override {
        return apply_(m, index);
    }

private:
    std::string name_;
    CountFn count_;
    ApplyFn apply_;
};

inline std::vector<OperatorPtr> to_operators(const std::vector<Rule>& rules) {
    std::vector<OperatorPtr> ops;
    ops.reserve(rules.size());
    for (const Rule& r : rules) ops.push_back(std::make_shared<RuleOperator>(r));
    return ops;
}

// CLASSIC draws uniformly over all (operator, application) pairs, so heavily
// matchable operators dominate. NONDET first draws the operator uniformly
// (retrying inapplicable ones without replacement), then the application.
// Both return the model unchanged when nothing is applicable.
enum class MutationStrategy { Classic, Nondet };

inline const char* to_string(MutationStrategy s) {
    return s == MutationStrategy::Classic ? "classic" : "nondet";
}

inline Model mutate(const Model& m, const std::vector<OperatorPtr>& ops, MutationStrategy strategy,
                    Rng& rng) {
    if (strategy == MutationStrategy::Classic) {
        std::vector<std::size_t> counts(ops.size());
        std::size_t total = 0;
        for (std::size_t i = 0; i < ops.size(); ++i) {
            counts[i] = ops[i]->count_applications(m);
            total += counts[i];
        }
        if (total == 0) return m;
        std::size_t pick = rng.index(total);
        for (std::size_t i = 0; i < ops.size(); ++i) {
            if (pick < counts[i]) return ops[i]->apply_application(m, pick);
            pick -= counts[i];
        }
        throw std::logic_error("mutation draw out of range");
    }
    std::vector<std::size_t> order(ops.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    for (std::size_t i : order) {
        const std::size_t c = ops[i]->count_applications(m);
        if (c > 0) return ops[i]->apply_application(m, rng.index(c));
    }
    return m;
}

}  // namespace mosearch
