#include "votefusion/public.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "policy_tree.hpp"
#include "votefusion/errors.hpp"

namespace votefusion {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_vote(int vote) {
    if (vote != 0 && vote != 1) throw ArgumentError("a vote must be 0 or 1");
}

std::vector<std::vector<int>> full_observation(int n) {
    std::vector<std::vector<int>> observed(n);
    for (int d = 0; d < n; ++d) {
        observed[d].resize(d);
        std::iota(observed[d].begin(), observed[d].end(), 0);
    }
    return observed;
}

}  // namespace

FusionState::FusionState(int need, int remaining) : need_(need), remaining_(remaining) {
    if (remaining < 0) throw ArgumentError("remaining agents cannot be negative");
}

int FusionState::decision() const {
    if (!is_terminal()) throw StateError("team decision is still open");
    return need_ <= 0 ? 1 : 0;
}

FusionRule FusionState::as_rule() const {
    if (is_terminal()) throw StateError("terminal fusion state has no remaining rule");
    return FusionRule(need_, remaining_);
}

FusionState evolve_fusion_state(const FusionState& state, int vote) {
    check_vote(vote);
    if (state.is_terminal()) throw StateError("cannot cast a vote after the team decision is settled");
    return {state.need() - vote, state.remaining() - 1};
}

Belief belief_update(const Belief& belief, const VoteProbabilities& voter, int vote) {
    check_vote(vote);
    if (!(belief.q0 >= 0.0 && belief.q0 <= 1.0)) throw ArgumentError("belief must lie in [0,1]");
    const double num = belief.q0 * (vote ? voter.one_given0 : voter.zero_given0);
    const double den = num + belief.q1() * (vote ? voter.one_given1 : voter.zero_given1);
    if (!(den > 0.0)) throw ImpossibleObservation("vote has probability zero under both hypotheses");
    return {num / den};
}

Belief belief_update(const Belief& belief, const ErrorPair& voter_errors, int vote) {
    VoteProbabilities vp{voter_errors.pI, 1.0 - voter_errors.pI, 1.0 - voter_errors.pII, voter_errors.pII};
    return belief_update(belief, vp, vote);
}

std::vector<int> normalize_ordering(std::vector<int> ordering, int n) {
    if (ordering.empty()) {
        ordering.resize(n);
        std::iota(ordering.begin(), ordering.end(), 0);
        return ordering;
    }
    if (static_cast<int>(ordering.size()) != n) throw ArgumentError("ordering must list every agent once");
    auto sorted = ordering;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i) {
        if (sorted[i] != i) throw ArgumentError("ordering must be a permutation of 0..N-1");
    }
    return ordering;
}

std::string history_label(int depth, std::uint32_t history) { return detail::bits_label(depth, history); }

VotePolicy::VotePolicy(const FusionRule& rule, std::vector<int> ordering)
    : rule_(rule), ordering_(normalize_ordering(std::move(ordering), rule.N())) {
    if (rule.N() > 20) throw ArgumentError("sequential voting supports at most 20 agents");
    thresholds_.assign((std::size_t{1} << rule.N()) - 1, kNaN);
}

VotePolicy VotePolicy::uniform(const FusionRule& rule, std::span<const double> by_agent, std::vector<int> ordering) {
    if (static_cast<int>(by_agent.size()) != rule.N()) throw ArgumentError("need one threshold per agent");
    VotePolicy p(rule, std::move(ordering));
    for (int d = 0; d < rule.N(); ++d) {
        for (std::uint32_t h = 0; h < (1u << d); ++h) p.thresholds_[detail::node_index(d, h)] = by_agent[p.ordering_[d]];
    }
    return p;
}

void VotePolicy::check_node(int depth, std::uint32_t history) const {
    if (depth < 0 || depth >= N() || history >= (1u << depth)) throw ArgumentError("history outside the policy tree");
}

FusionState VotePolicy::state(int depth, std::uint32_t history) const {
    check_node(depth, history);
    return {rule_.L() - std::popcount(history), N() - depth};
}

NodeKind VotePolicy::kind(int depth, std::uint32_t history) const {
    if (!state(depth, history).is_terminal()) return NodeKind::active;
    const std::uint32_t parent = history & ~(1u << (depth - 1));
    return state(depth - 1, parent).is_terminal() ? NodeKind::excluded : NodeKind::dont_care;
}

bool VotePolicy::has_threshold(int depth, std::uint32_t history) const {
    check_node(depth, history);
    return !std::isnan(thresholds_[detail::node_index(depth, history)]);
}

double VotePolicy::threshold(int depth, std::uint32_t history) const {
    if (!has_threshold(depth, history)) {
        throw PolicyError("policy has no threshold for agent " + std::to_string(ordering_[depth]) + " at history " +
                          history_label(depth, history));
    }
    return thresholds_[detail::node_index(depth, history)];
}

void VotePolicy::set_threshold(int depth, std::uint32_t history, double threshold) {
    check_node(depth, history);
    if (std::isnan(threshold)) throw ArgumentError("threshold cannot be NaN");
    thresholds_[detail::node_index(depth, history)] = threshold;
}

void VotePolicy::fill_settled() {
    for (int d = 1; d < N(); ++d) {
        const std::uint32_t last = 1u << (d - 1);
        for (std::uint32_t h = 0; h < (1u << d); ++h) {
            if (kind(d, h) == NodeKind::active) continue;
            double& t = thresholds_[detail::node_index(d, h)];
            const std::uint32_t sibling = h ^ last;
            if (kind(d, sibling) == NodeKind::active && has_threshold(d, sibling)) {
                t = thresholds_[detail::node_index(d, sibling)];
            } else {
                t = thresholds_[detail::node_index(d - 1, h & ~last)];
            }
        }
    }
}

Belief history_belief(const Prior& prior, std::span<const LikelihoodModel> models, const VotePolicy& policy, int depth,
                      std::uint32_t history) {
    if (static_cast<int>(models.size()) != policy.N()) throw ArgumentError("need one model per agent");
    if (depth < 0 || depth > policy.N() || history >= (1u << depth)) throw ArgumentError("history outside the tree");
    Belief b{prior.p0()};
    for (int j = 0; j < depth; ++j) {
        const std::uint32_t seen = history & ((1u << j) - 1u);
        auto vp = vote_probabilities(models[policy.ordering()[j]], policy.threshold(j, seen));
        b = belief_update(b, vp, static_cast<int>(history >> j & 1u));
    }
    return b;
}

RiskReport public_bayes_risk(const Prior& prior, const CostModel& costs, std::span<const LikelihoodModel> models,
                             const VotePolicy& policy) {
    return public_bayes_risk(RiskWeights::from(prior, costs), models, policy);
}

RiskReport public_bayes_risk(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                             const VotePolicy& policy) {
    const int N = policy.N();
    if (static_cast<int>(models.size()) != N) throw ArgumentError("need one model per agent");
    std::vector<double> x((std::size_t{1} << N) - 1, 0.0);
    for (int d = 0; d < N; ++d) {
        for (std::uint32_t h = 0; h < (1u << d); ++h) {
            if (policy.kind(d, h) == NodeKind::active) x[detail::node_index(d, h)] = policy.threshold(d, h);
        }
    }
    detail::PolicyTree tree(detail::models_by_depth(models, policy.ordering()), policy.rule(), weights, full_observation(N));
    tree.evaluate(x);
    return {tree.risk(), tree.team(), {}};
}

PublicSolution optimal_public_policy(const Prior& prior, const CostModel& costs, std::span<const LikelihoodModel> models,
                                     const FusionRule& rule, std::vector<int> ordering, const PublicOptions& options) {
    prior.require_nondegenerate();
    return optimal_public_policy(RiskWeights::from(prior, costs), models, rule, std::move(ordering), options);
}

PublicSolution optimal_public_policy(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                                     const FusionRule& rule, std::vector<int> ordering, const PublicOptions& options) {
    const int N = rule.N();
    if (static_cast<int>(models.size()) != N) throw ArgumentError("number of models must equal rule N");
    if (!(weights.false_alarm > 0.0) || !(weights.miss > 0.0)) {
        throw ArgumentError("risk weights must be strictly positive");
    }
    ordering = normalize_ordering(std::move(ordering), N);
    detail::PolicyTree tree(detail::models_by_depth(models, ordering), rule, weights, full_observation(N));

    auto found = detail::multistart(tree, models, ordering, options.solver, options.secret_start);
    if (found.x.empty()) {
        int d = 0;
        while (d + 1 < N && tree.offset(d + 1) <= found.worst_set) ++d;
        std::ostringstream os;
        os << "public descent did not converge in " << options.solver.max_sweeps << " sweeps; largest change "
           << found.worst_change << " at agent " << ordering[d] << ", history "
           << history_label(d, static_cast<std::uint32_t>(found.worst_set - tree.offset(d)));
        throw SolverError(os.str(), found.worst_x);
    }

    PublicSolution sol{VotePolicy(rule, ordering), {tree.risk(), tree.team(), {}}, found.sweeps, found.start_index};
    for (int d = 0; d < N; ++d) {
        for (std::uint32_t h = 0; h < (1u << d); ++h) {
            if (sol.policy.kind(d, h) == NodeKind::active) sol.policy.set_threshold(d, h, found.x[tree.offset(d) + h]);
        }
    }
    sol.policy.fill_settled();
    return sol;
}

double belief_only_threshold(const Belief& belief, const CostModel& costs, const LikelihoodModel& model,
                             const FusionRule& rule, const SolverOptions& options) {
    Prior prior(belief.q0);
    prior.require_nondegenerate();
    return optimal_identical_threshold(prior, costs, model, rule, options).thresholds[0];
}

}  // namespace votefusion
