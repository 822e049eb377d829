#pragma once

// Sequential voting where every agent sees all earlier votes. A policy gives
// each agent one threshold per vote history it can face.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "votefusion/detection.hpp"
#include "votefusion/secret.hpp"

namespace votefusion {

// Posterior probability of H=0 given the votes seen so far.
struct Belief {
    double q0 = 0.5;
    double q1() const noexcept { return 1.0 - q0; }
};

// Votes for 1 still needed and agents still to vote. Terminal once the team
// decision is settled.
class FusionState {
public:
    FusionState(int need, int remaining);
    static FusionState initial(const FusionRule& rule) { return {rule.L(), rule.N()}; }

    int need() const noexcept { return need_; }
    int remaining() const noexcept { return remaining_; }
    bool is_terminal() const noexcept { return need_ <= 0 || need_ > remaining_; }
    // Team decision of a terminal state; StateError otherwise.
    int decision() const;
    // The L-out-of-N rule faced by the remaining agents; StateError if terminal.
    FusionRule as_rule() const;

    friend bool operator==(const FusionState&, const FusionState&) = default;

private:
    int need_;
    int remaining_;
};

FusionState evolve_fusion_state(const FusionState& state, int vote);

// Bayes update of the belief after seeing one vote cast with the given
// error probabilities. ImpossibleObservation if the vote has probability zero.
Belief belief_update(const Belief& belief, const ErrorPair& voter_errors, int vote);
Belief belief_update(const Belief& belief, const VoteProbabilities& voter, int vote);

enum class NodeKind {
    active,     // team decision still open: the threshold matters
    dont_care,  // decision settled by the vote just cast
    excluded,   // decision settled earlier
};

// Thresholds indexed by (depth, history) where depth is the position in the
// acting order and bit j of history is the vote cast at depth j.
//
// Settled histories carry a copy of a neighbouring threshold so that every
// agent has a defined rule on every path: the sibling's (same agent, other
// last vote) when that sibling is active, else the parent's.
class VotePolicy {
public:
    // ordering[d] is the agent acting at depth d; empty means 0..N-1.
    explicit VotePolicy(const FusionRule& rule, std::vector<int> ordering = {});

    // Every history gets agent ordering[d]'s entry of `by_agent`.
    static VotePolicy uniform(const FusionRule& rule, std::span<const double> by_agent, std::vector<int> ordering = {});

    const FusionRule& rule() const noexcept { return rule_; }
    const std::vector<int>& ordering() const noexcept { return ordering_; }
    int N() const noexcept { return rule_.N(); }

    NodeKind kind(int depth, std::uint32_t history) const;
    FusionState state(int depth, std::uint32_t history) const;
    bool has_threshold(int depth, std::uint32_t history) const;
    // PolicyError if the threshold was never set.
    double threshold(int depth, std::uint32_t history) const;
    void set_threshold(int depth, std::uint32_t history, double threshold);
    // Applies the settled-history convention above.
    void fill_settled();

private:
    void check_node(int depth, std::uint32_t history) const;

    FusionRule rule_;
    std::vector<int> ordering_;
    std::vector<double> thresholds_;
};

// "-" for the root, otherwise the votes in acting order, e.g. "01".
std::string history_label(int depth, std::uint32_t history);

// Checks that `ordering` is a permutation of 0..n-1; empty gives identity.
std::vector<int> normalize_ordering(std::vector<int> ordering, int n);

// Belief after the votes of `history`, chained through belief_update with
// each voter's probabilities at its node threshold.
Belief history_belief(const Prior& prior, std::span<const LikelihoodModel> models, const VotePolicy& policy, int depth,
                      std::uint32_t history);

// models are indexed by agent; the policy's ordering says who acts when.
RiskReport public_bayes_risk(const Prior& prior, const CostModel& costs, std::span<const LikelihoodModel> models,
                             const VotePolicy& policy);
RiskReport public_bayes_risk(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                             const VotePolicy& policy);

struct PublicOptions {
    SolverOptions solver;
    // Also start from the optimal secret thresholds, which guarantees the
    // public risk never exceeds the secret one.
    bool secret_start = true;
};

struct PublicSolution {
    VotePolicy policy;
    RiskReport report;
    int sweeps = 0;
    // 0 = secret start, k >= 1 = multistart_points()[k - 1].
    int start_index = 0;
};

PublicSolution optimal_public_policy(const Prior& prior, const CostModel& costs, std::span<const LikelihoodModel> models,
                                     const FusionRule& rule, std::vector<int> ordering = {},
                                     const PublicOptions& options = {});
PublicSolution optimal_public_policy(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                                     const FusionRule& rule, std::vector<int> ordering = {},
                                     const PublicOptions& options = {});

// Optimal identical threshold of a fresh team that keeps the original rule
// but starts from `belief` as its prior: what an agent would do if it used
// earlier votes only to update its belief.
double belief_only_threshold(const Belief& belief, const CostModel& costs, const LikelihoodModel& model,
                             const FusionRule& rule, const SolverOptions& options = {});

}  // namespace votefusion
