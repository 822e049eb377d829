#pragma once

// Optimal thresholds when no agent sees any other agent's vote.

#include <span>
#include <vector>

#include "votefusion/detection.hpp"

namespace votefusion {

struct SolverOptions {
    double tolerance = 1e-9;   // max per-coordinate change at convergence
    int max_sweeps = 200;
    int grid_points = 2000;    // coarse grid for scalar risk minimization
};

struct SecretSolution {
    std::vector<double> thresholds;
    double risk = 0.0;
    ErrorPair team;
    // Relative gap between LR(threshold) and the stationarity target, per agent.
    std::vector<double> residuals;
    int sweeps = 0;
    int start_index = 0;
};

// Threshold minimizing a*pI(t) + b*pII(t) over t in [-inf, inf] for one agent.
// a = b = 0 means the agent is irrelevant and `current` is returned.
double lrt_best_response(const LikelihoodModel& model, double a, double b, double current);

// Threshold whose Type I error equals `false_alarm`.
double threshold_for_false_alarm(const LikelihoodModel& model, double false_alarm);

// The five quantile starts: every agent starts where its Type I error is
// 0.9, 0.7, 0.5, 0.3, 0.1.
std::vector<std::vector<double>> quantile_starts(std::span<const LikelihoodModel> models);

// All deterministic multistart points: the quantile starts, then for each
// agent n one start with agent n at +inf and one at -inf (the others at the
// 0.5 level). The silenced starts reach optima where an agent is switched off,
// which the quantile starts can miss.
std::vector<std::vector<double>> multistart_points(std::span<const LikelihoodModel> models);

SecretSolution optimal_identical_threshold(const Prior& prior, const CostModel& costs, const LikelihoodModel& model,
                                           const FusionRule& rule, const SolverOptions& options = {});
SecretSolution optimal_identical_threshold(const RiskWeights& weights, const LikelihoodModel& model,
                                           const FusionRule& rule, const SolverOptions& options = {});

// Person-by-person optimal thresholds by multistart coordinate descent.
SecretSolution optimal_secret_thresholds(const Prior& prior, const CostModel& costs,
                                         std::span<const LikelihoodModel> models, const FusionRule& rule,
                                         const SolverOptions& options = {});
SecretSolution optimal_secret_thresholds(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                                         const FusionRule& rule, const SolverOptions& options = {});

// Team errors when agent n uses thresholds[n].
ErrorPair secret_team_errors(std::span<const LikelihoodModel> models, std::span<const double> thresholds,
                             const FusionRule& rule);

}  // namespace votefusion
