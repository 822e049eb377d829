#pragma once

// Reversed ROC sweeps, agent-ordering search and the unanimity-rule checks.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "votefusion/detection.hpp"
#include "votefusion/partial.hpp"
#include "votefusion/public.hpp"

namespace votefusion {

enum class VotingMode { secret, full_public, partial_public };

// "secret", "public", "partial".
std::string mode_name(VotingMode mode);
// ArgumentError on an unknown name.
VotingMode parse_mode(const std::string& name);

// A team without its prior and costs: everything an optimizer needs besides
// the risk weights.
struct TeamSetup {
    std::vector<LikelihoodModel> models;  // indexed by agent
    FusionRule rule{1, 1};
    VotingMode mode = VotingMode::secret;
    std::vector<int> ordering;                 // empty = 0..N-1; ignored in secret mode
    std::optional<ObservationGraph> graph;     // required in partial mode
    PublicOptions options;
};

// Optimal risk and team errors of the setup under the given weights.
RiskReport optimize_team(const RiskWeights& weights, const TeamSetup& setup);

struct RocPoint {
    double weight = 1.0;
    ErrorPair team;
    double risk = 0.0;  // weight * pI + pII
};

struct RocCurve {
    std::vector<RocPoint> points;    // Pareto-pruned, pI ascending
    std::vector<RocPoint> by_weight; // every successful weight, input order
    std::vector<double> skipped;     // weights whose optimization failed
    std::vector<std::string> skip_reasons;
};

// count weights log-spaced over [lo, hi]; defaults give the standard sweep.
std::vector<double> log_spaced_weights(double lo = 1e-3, double hi = 1e3, int count = 41);

// Drops every point weakly dominated by another (within 1e-12) and sorts the
// rest by pI.
std::vector<RocPoint> pareto_prune(std::vector<RocPoint> points);

// For each weight w minimizes w*pI + pII with the setup's optimizer.
RocCurve reversed_roc(const TeamSetup& setup, std::span<const double> weights, int jobs = 1);

// One representative per class of orderings whose optimal risks coincide:
// once every reachable open state of the fusion rule is a unanimity rule
// (need 1 or need everyone left), the order of the remaining agents cannot
// matter. Representatives keep that suffix sorted and come out in
// lexicographic order.
std::vector<std::vector<int>> ordering_classes(const FusionRule& rule);

// "Strength" used to label agents: 1/variance for Gaussian models; for
// exponential models the reciprocal of the single-agent minimum Bayes risk
// at p0 = 0.5 with unit costs. Larger means more informative.
double agent_strength(const LikelihoodModel& model);

struct RankedOrdering {
    std::vector<int> ordering;
    RiskReport report;
};

struct OrderingSearch {
    std::vector<int> best;
    RiskReport report;
    std::vector<RankedOrdering> ranking;  // risk ascending, ties lexicographic
};

// Public-mode optimum over ordering classes. N <= 8, else ArgumentError.
OrderingSearch best_ordering(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                             const FusionRule& rule, const PublicOptions& options = {}, int jobs = 1);
OrderingSearch best_ordering(const Prior& prior, const CostModel& costs, std::span<const LikelihoodModel> models,
                             const FusionRule& rule, const PublicOptions& options = {}, int jobs = 1);

struct UnanimityReport {
    bool unanimity = false;
    // The fields below are only filled for unanimity rules.
    int orderings_checked = 0;
    double secret_risk = 0.0;
    double max_public_secret_gap = 0.0;    // |public risk - secret risk| over orderings
    double max_ordering_risk_gap = 0.0;    // |risk(o) - risk(identity)|
    double max_position_gap = 0.0;         // per agent, across orderings
    double max_history_gap = 0.0;          // per agent, across its histories
    bool risk_equal = false;               // both risk gaps < 1e-8
    bool position_invariant = false;       // < 1e-6
    bool history_independent = false;      // < 1e-6

    bool passed() const noexcept { return !unanimity || (risk_equal && position_invariant && history_independent); }
};

// Orderings checked: all N! permutations for N <= 6, otherwise the N cyclic
// shifts of the identity and of its reverse.
UnanimityReport unanimity_check(const Prior& prior, const CostModel& costs, std::span<const LikelihoodModel> models,
                                const FusionRule& rule, const PublicOptions& options = {}, int jobs = 1);

}  // namespace votefusion
