#include "votefusion/partial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "policy_tree.hpp"
#include "votefusion/errors.hpp"

namespace votefusion {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Belief marginal_belief(const Prior& prior, std::span<const LikelihoodModel> models, const std::vector<int>& ordering,
                       const std::vector<int>& observed, int position, std::span<const int> observed_votes,
                       const std::function<double(int, std::uint32_t)>& threshold_of) {
    if (static_cast<int>(models.size()) != static_cast<int>(ordering.size())) {
        throw ArgumentError("need one model per agent");
    }
    if (position < 0 || position >= static_cast<int>(ordering.size())) throw ArgumentError("position out of range");
    if (observed_votes.size() != observed.size()) {
        throw ArgumentError("observed votes must match the agent's observed set");
    }
    std::uint32_t want = 0, mask = 0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        if (observed_votes[k] != 0 && observed_votes[k] != 1) throw ArgumentError("a vote must be 0 or 1");
        mask |= 1u << observed[k];
        if (observed_votes[k]) want |= 1u << observed[k];
    }
    double j0 = 0.0, j1 = 0.0;
    for (std::uint32_t h = 0; h < (1u << position); ++h) {
        if ((h & mask) != want) continue;
        double a = prior.p0(), b = prior.p1();
        for (int d = 0; d < position && (a > 0.0 || b > 0.0); ++d) {
            auto vp = vote_probabilities(models[ordering[d]], threshold_of(d, h & ((1u << d) - 1u)));
            const bool one = h >> d & 1u;
            a *= one ? vp.one_given0 : vp.zero_given0;
            b *= one ? vp.one_given1 : vp.zero_given1;
        }
        j0 += a;
        j1 += b;
    }
    if (!(j0 + j1 > 0.0)) throw ImpossibleObservation("observed votes have probability zero under the policy");
    return {j0 / (j0 + j1)};
}

}  // namespace

ObservationGraph::ObservationGraph(std::vector<std::vector<int>> observed) : observed_(std::move(observed)) {
    if (observed_.empty()) throw ArgumentError("observation graph needs at least one agent");
    for (int n = 0; n < N(); ++n) {
        auto& obs = observed_[n];
        std::sort(obs.begin(), obs.end());
        if (std::adjacent_find(obs.begin(), obs.end()) != obs.end()) {
            throw ArgumentError("agent " + std::to_string(n) + " lists an observed vote twice");
        }
        for (int m : obs) {
            if (m < 0 || m >= n) {
                throw ArgumentError("agent " + std::to_string(n) + " can only observe earlier agents, got " +
                                    std::to_string(m));
            }
        }
    }
}

ObservationGraph ObservationGraph::empty(int n) { return ObservationGraph(std::vector<std::vector<int>>(n)); }

ObservationGraph ObservationGraph::full(int n) {
    std::vector<std::vector<int>> obs(n);
    for (int d = 0; d < n; ++d) {
        for (int m = 0; m < d; ++m) obs[d].push_back(m);
    }
    return ObservationGraph(std::move(obs));
}

ObservationGraph ObservationGraph::chain(int n) {
    std::vector<std::vector<int>> obs(n);
    for (int d = 1; d < n; ++d) obs[d].push_back(d - 1);
    return ObservationGraph(std::move(obs));
}

bool ObservationGraph::is_full() const {
    for (int d = 0; d < N(); ++d) {
        if (static_cast<int>(observed_[d].size()) != d) return false;
    }
    return true;
}

bool ObservationGraph::is_empty() const {
    return std::all_of(observed_.begin(), observed_.end(), [](const auto& o) { return o.empty(); });
}

PartialPolicy::PartialPolicy(const FusionRule& rule, ObservationGraph graph, std::vector<int> ordering)
    : rule_(rule), graph_(std::move(graph)), ordering_(normalize_ordering(std::move(ordering), rule.N())) {
    if (graph_.N() != rule.N()) throw ArgumentError("observation graph and rule disagree on N");
    if (rule.N() > 20) throw ArgumentError("sequential voting supports at most 20 agents");
    thresholds_.resize(rule.N());
    for (int d = 0; d < rule.N(); ++d) thresholds_[d].assign(std::size_t{1} << graph_.observed(d).size(), kNaN);
}

PartialPolicy PartialPolicy::from_public(const VotePolicy& policy) {
    PartialPolicy p(policy.rule(), ObservationGraph::full(policy.N()), policy.ordering());
    for (int d = 0; d < policy.N(); ++d) {
        for (std::uint32_t h = 0; h < (1u << d); ++h) {
            if (policy.has_threshold(d, h)) p.thresholds_[d][h] = policy.threshold(d, h);
        }
    }
    return p;
}

PartialPolicy PartialPolicy::from_secret(const FusionRule& rule, std::span<const double> by_agent,
                                         std::vector<int> ordering) {
    if (static_cast<int>(by_agent.size()) != rule.N()) throw ArgumentError("need one threshold per agent");
    PartialPolicy p(rule, ObservationGraph::empty(rule.N()), std::move(ordering));
    for (int d = 0; d < rule.N(); ++d) p.thresholds_[d][0] = by_agent[p.ordering_[d]];
    return p;
}

std::uint32_t PartialPolicy::patterns(int position) const {
    return static_cast<std::uint32_t>(thresholds_.at(position).size());
}

std::uint32_t PartialPolicy::pattern_of(int position, std::uint32_t history) const {
    const auto& obs = graph_.observed(position);
    std::uint32_t p = 0;
    for (std::size_t k = 0; k < obs.size(); ++k) {
        if (history >> obs[k] & 1u) p |= 1u << k;
    }
    return p;
}

double PartialPolicy::threshold(int position, std::uint32_t pattern) const {
    if (pattern >= patterns(position)) throw ArgumentError("pattern outside the agent's information sets");
    double t = thresholds_[position][pattern];
    if (std::isnan(t)) {
        throw PolicyError("policy has no threshold for agent " + std::to_string(ordering_[position]) +
                          " at observed pattern " + std::to_string(pattern));
    }
    return t;
}

void PartialPolicy::set_threshold(int position, std::uint32_t pattern, double threshold) {
    if (pattern >= patterns(position)) throw ArgumentError("pattern outside the agent's information sets");
    if (std::isnan(threshold)) throw ArgumentError("threshold cannot be NaN");
    thresholds_[position][pattern] = threshold;
}

Belief marginal_belief_update(const Prior& prior, std::span<const LikelihoodModel> models, const PartialPolicy& policy,
                              int position, std::span<const int> observed_votes) {
    return marginal_belief(prior, models, policy.ordering(), policy.graph().observed(position), position,
                           observed_votes, [&](int d, std::uint32_t h) { return policy.threshold_at(d, h); });
}

Belief marginal_belief_update(const Prior& prior, std::span<const LikelihoodModel> models, const VotePolicy& policy,
                              const ObservationGraph& graph, int position, std::span<const int> observed_votes) {
    if (graph.N() != policy.N()) throw ArgumentError("observation graph and policy disagree on N");
    return marginal_belief(prior, models, policy.ordering(), graph.observed(position), position, observed_votes,
                           [&](int d, std::uint32_t h) { return policy.threshold(d, h); });
}

RiskReport partial_bayes_risk(const Prior& prior, const CostModel& costs, std::span<const LikelihoodModel> models,
                              const PartialPolicy& policy) {
    return partial_bayes_risk(RiskWeights::from(prior, costs), models, policy);
}

RiskReport partial_bayes_risk(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                              const PartialPolicy& policy) {
    const int N = policy.N();
    if (static_cast<int>(models.size()) != N) throw ArgumentError("need one model per agent");
    detail::PolicyTree tree(detail::models_by_depth(models, policy.ordering()), policy.rule(), weights,
                            policy.graph().lists());
    std::vector<double> x(tree.size(), 0.0);
    for (int d = 0; d < N; ++d) {
        for (std::uint32_t s = 0; s < tree.patterns(d); ++s) {
            if (tree.relevant(d, s)) x[tree.offset(d) + s] = policy.threshold(d, s);
        }
    }
    tree.evaluate(x);
    return {tree.risk(), tree.team(), {}};
}

PartialSolution optimal_partial_policy(const Prior& prior, const CostModel& costs,
                                       std::span<const LikelihoodModel> models, const FusionRule& rule,
                                       const ObservationGraph& graph, std::vector<int> ordering,
                                       const PublicOptions& options) {
    prior.require_nondegenerate();
    return optimal_partial_policy(RiskWeights::from(prior, costs), models, rule, graph, std::move(ordering), options);
}

PartialSolution optimal_partial_policy(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                                       const FusionRule& rule, const ObservationGraph& graph,
                                       std::vector<int> ordering, const PublicOptions& options) {
    const int N = rule.N();
    if (static_cast<int>(models.size()) != N) throw ArgumentError("number of models must equal rule N");
    if (graph.N() != N) throw ArgumentError("observation graph and rule disagree on N");
    if (!(weights.false_alarm > 0.0) || !(weights.miss > 0.0)) {
        throw ArgumentError("risk weights must be strictly positive");
    }
    ordering = normalize_ordering(std::move(ordering), N);
    detail::PolicyTree tree(detail::models_by_depth(models, ordering), rule, weights, graph.lists());
    auto found = detail::multistart(tree, models, ordering, options.solver, options.secret_start);
    if (found.x.empty()) {
        int d = 0;
        while (d + 1 < N && tree.offset(d + 1) <= found.worst_set) ++d;
        std::ostringstream os;
        os << "partial descent did not converge in " << options.solver.max_sweeps << " sweeps; largest change "
           << found.worst_change << " at agent " << ordering[d] << ", observed pattern "
           << (found.worst_set - tree.offset(d));
        throw SolverError(os.str(), found.worst_x);
    }
    PartialSolution sol{PartialPolicy(rule, graph, ordering), {tree.risk(), tree.team(), {}}, found.sweeps,
                        found.start_index};
    for (int d = 0; d < N; ++d) {
        for (std::uint32_t s = 0; s < tree.patterns(d); ++s) sol.policy.set_threshold(d, s, found.x[tree.offset(d) + s]);
    }
    return sol;
}

}  // namespace votefusion
