#pragma once

// Sequential voting where each agent sees only some of the earlier votes.

#include <cstdint>
#include <span>
#include <vector>

#include "votefusion/detection.hpp"
#include "votefusion/public.hpp"

namespace votefusion {

// observed(d) lists the earlier positions (in acting order) whose votes the
// agent at position d sees.
class ObservationGraph {
public:
    explicit ObservationGraph(std::vector<std::vector<int>> observed);

    static ObservationGraph empty(int n);
    static ObservationGraph full(int n);
    // Each agent sees only its immediate predecessor.
    static ObservationGraph chain(int n);

    int N() const noexcept { return static_cast<int>(observed_.size()); }
    const std::vector<int>& observed(int position) const { return observed_.at(position); }
    const std::vector<std::vector<int>>& lists() const noexcept { return observed_; }
    bool is_full() const;
    bool is_empty() const;

private:
    std::vector<std::vector<int>> observed_;
};

// One threshold per (position, observed pattern). Bit k of a pattern is the
// vote cast at position graph.observed(position)[k].
class PartialPolicy {
public:
    PartialPolicy(const FusionRule& rule, ObservationGraph graph, std::vector<int> ordering = {});

    // Full-graph copy of a public policy (settled histories included).
    static PartialPolicy from_public(const VotePolicy& policy);
    // Empty-graph policy; by_agent is indexed by agent.
    static PartialPolicy from_secret(const FusionRule& rule, std::span<const double> by_agent,
                                     std::vector<int> ordering = {});

    const FusionRule& rule() const noexcept { return rule_; }
    const ObservationGraph& graph() const noexcept { return graph_; }
    const std::vector<int>& ordering() const noexcept { return ordering_; }
    int N() const noexcept { return rule_.N(); }

    std::uint32_t patterns(int position) const;
    std::uint32_t pattern_of(int position, std::uint32_t history) const;
    // PolicyError if unset.
    double threshold(int position, std::uint32_t pattern) const;
    double threshold_at(int position, std::uint32_t history) const { return threshold(position, pattern_of(position, history)); }
    void set_threshold(int position, std::uint32_t pattern, double threshold);

private:
    FusionRule rule_;
    ObservationGraph graph_;
    std::vector<int> ordering_;
    std::vector<std::vector<double>> thresholds_;
};

// P{H=0 | the votes the agent at `position` observes}, summing over every
// assignment of the votes it does not see. observed_votes is aligned with
// graph.observed(position). ImpossibleObservation if the observed votes have
// probability zero.
Belief marginal_belief_update(const Prior& prior, std::span<const LikelihoodModel> models, const PartialPolicy& policy,
                              int position, std::span<const int> observed_votes);
Belief marginal_belief_update(const Prior& prior, std::span<const LikelihoodModel> models, const VotePolicy& policy,
                              const ObservationGraph& graph, int position, std::span<const int> observed_votes);

RiskReport partial_bayes_risk(const Prior& prior, const CostModel& costs, std::span<const LikelihoodModel> models,
                              const PartialPolicy& policy);
RiskReport partial_bayes_risk(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                              const PartialPolicy& policy);

struct PartialSolution {
    PartialPolicy policy;
    RiskReport report;
    int sweeps = 0;
    int start_index = 0;
};

// Person-by-person optimal thresholds per information set. Starts from the
// optimal secret thresholds (unless disabled) and multistart_points().
PartialSolution optimal_partial_policy(const Prior& prior, const CostModel& costs,
                                       std::span<const LikelihoodModel> models, const FusionRule& rule,
                                       const ObservationGraph& graph, std::vector<int> ordering = {},
                                       const PublicOptions& options = {});
PartialSolution optimal_partial_policy(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                                       const FusionRule& rule, const ObservationGraph& graph,
                                       std::vector<int> ordering = {}, const PublicOptions& options = {});

}  // namespace votefusion
