#pragma once

// Exact evaluation of sequential voting policies over the vote-history tree.
//
// Node (d, bits) is the point where the agent acting at depth d has seen the
// votes `bits` (bit j = vote cast at depth j). Heap index (1 << d) - 1 + bits.
// The agent at depth d observes only the votes at `observed[d]`; its threshold
// is looked up by the pattern of those bits ("information set"). The full
// graph makes every node its own information set, the empty graph collapses
// each depth to one.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "votefusion/detection.hpp"
#include "votefusion/secret.hpp"

namespace votefusion::detail {

inline std::size_t node_index(int depth, std::uint32_t bits) { return (std::size_t{1} << depth) - 1 + bits; }

inline std::vector<LikelihoodModel> models_by_depth(std::span<const LikelihoodModel> models,
                                                   const std::vector<int>& ordering) {
    std::vector<LikelihoodModel> out;
    out.reserve(ordering.size());
    for (int agent : ordering) out.push_back(models[agent]);
    return out;
}

// History bits rendered in acting order, "-" for the empty history.
std::string bits_label(int depth, std::uint32_t bits);

class PolicyTree {
public:
    // models_by_depth[d] is the model of the agent acting at depth d.
    PolicyTree(std::vector<LikelihoodModel> models_by_depth, FusionRule rule, RiskWeights weights,
               std::vector<std::vector<int>> observed);

    int depths() const noexcept { return rule_.N(); }
    const FusionRule& rule() const noexcept { return rule_; }
    const RiskWeights& weights() const noexcept { return weights_; }

    // Flat layout of information-set thresholds.
    std::size_t size() const noexcept { return offset_.back(); }
    std::size_t offset(int depth) const noexcept { return offset_[depth]; }
    std::uint32_t patterns(int depth) const noexcept { return static_cast<std::uint32_t>(offset_[depth + 1] - offset_[depth]); }
    std::uint32_t pattern_of(int depth, std::uint32_t bits) const { return pattern_[node_index(depth, bits)]; }
    // Some non-terminal node maps to this information set.
    bool relevant(int depth, std::uint32_t pattern) const { return relevant_[offset_[depth] + pattern]; }
    std::string info_set_label(std::size_t flat) const;

    bool terminal(int depth, std::uint32_t bits) const;
    bool decides_one(int depth, std::uint32_t bits) const;

    // Forward reach probabilities and backward decision probabilities for x.
    void evaluate(const std::vector<double>& x);

    ErrorPair team() const noexcept { return {t1_0_[0], t0_1_[0]}; }
    double risk() const noexcept { return weights_.risk(team()); }

    // Coefficients (a, b) of the depth-d agent's (pI, pII) in the risk, per
    // information set, at the last evaluation.
    std::vector<std::pair<double, double>> coefficients(int depth) const;

    // Best responses of every information set at depth d to the last evaluation.
    void best_respond(int depth, std::vector<double>& x) const;

    // Simultaneous best responses to x; NaN where an information set has no
    // influence on the risk.
    std::vector<double> jacobi(const std::vector<double>& x);

private:
    std::vector<LikelihoodModel> models_;
    FusionRule rule_;
    RiskWeights weights_;
    std::vector<std::size_t> offset_;
    std::vector<std::uint32_t> pattern_;
    std::vector<char> relevant_;
    // Per node, depth 0..N-1: unweighted reach probabilities under H=0, H=1.
    std::vector<double> pi0_, pi1_;
    // Per node, depth 0..N: P{team decides 1 | node, H=h} and its complement.
    std::vector<double> t1_0_, t0_0_, t1_1_, t0_1_;
};

// Gauss-Seidel descent over information sets. The first sweep runs deepest
// depth first, later sweeps run in acting order. Returns the outcome and
// the flat index of the information set with the largest last change.
struct TreeDescent {
    int sweeps = 0;
    bool converged = false;
    double last_change = 0.0;
    std::size_t worst = 0;
};
TreeDescent descend(PolicyTree& tree, std::vector<double>& x, double tolerance, int max_sweeps);

struct MultistartResult {
    std::vector<double> x;  // empty if no start converged
    int sweeps = 0;
    int start_index = 0;
    // Diagnostics of the unconverged start with the smallest last change.
    double worst_change = 0.0;
    std::size_t worst_set = 0;
    std::vector<double> worst_x;
};

// Runs descend() from the secret optimum (index 0, if requested and it
// converges) and then from multistart_points() (indices 1, 2, ...). models are indexed
// by agent, ordering maps depth to agent. A later start must lower the risk
// by more than 1e-12 (relative) to replace an earlier one. Leaves the tree
// evaluated at the winner.
MultistartResult multistart(PolicyTree& tree, std::span<const LikelihoodModel> models, const std::vector<int>& ordering,
                            const SolverOptions& options, bool secret_start);

}  // namespace votefusion::detail
