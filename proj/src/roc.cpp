#include "votefusion/roc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "votefusion/errors.hpp"
#include "votefusion/parallel.hpp"
#include "votefusion/secret.hpp"

namespace votefusion {

namespace {

// Spread of a set of thresholds; equal infinities agree, anything else
// involving an infinity is an infinite gap.
double spread(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) return 0.0;
    return *hi - *lo;
}

int unanimity_depth(const FusionRule& rule) {
    const int N = rule.N();
    const int L = rule.L();
    for (int k = 0; k <= N; ++k) {
        bool all = true;
        for (int j = 0; j <= k && all; ++j) {
            const int need = L - j;
            const int rem = N - k;
            if (need <= 0 || need > rem) continue;
            all = need == 1 || need == rem;
        }
        if (all) return k;
    }
    return N;
}

std::vector<std::vector<int>> checked_orderings(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    if (n <= 6) {
        do out.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
        return out;
    }
    for (int pass = 0; pass < 2; ++pass) {
        for (int s = 0; s < n; ++s) {
            out.push_back(p);
            std::rotate(p.begin(), p.begin() + 1, p.end());
        }
        std::reverse(p.begin(), p.end());
    }
    return out;
}

}  // namespace

std::string mode_name(VotingMode mode) {
    switch (mode) {
        case VotingMode::secret: return "secret";
        case VotingMode::full_public: return "public";
        case VotingMode::partial_public: return "partial";
    }
    return "secret";
}

VotingMode parse_mode(const std::string& name) {
    if (name == "secret") return VotingMode::secret;
    if (name == "public") return VotingMode::full_public;
    if (name == "partial") return VotingMode::partial_public;
    throw ArgumentError("unknown voting mode '" + name + "' (expected secret, public or partial)");
}

RiskReport optimize_team(const RiskWeights& weights, const TeamSetup& setup) {
    switch (setup.mode) {
        case VotingMode::secret: {
            auto s = optimal_secret_thresholds(weights, setup.models, setup.rule, setup.options.solver);
            return {s.risk, s.team, s.thresholds};
        }
        case VotingMode::full_public:
            return optimal_public_policy(weights, setup.models, setup.rule, setup.ordering, setup.options).report;
        case VotingMode::partial_public:
            if (!setup.graph) throw ArgumentError("partial voting needs an observation graph");
            return optimal_partial_policy(weights, setup.models, setup.rule, *setup.graph, setup.ordering, setup.options)
                .report;
    }
    throw ArgumentError("unknown voting mode");
}

std::vector<double> log_spaced_weights(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw ArgumentError("weights need 0 < lo <= hi and count >= 1");
    std::vector<double> w(count);
    if (count == 1) {
        w[0] = lo;
        return w;
    }
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < count; ++i) w[i] = std::pow(10.0, a + (b - a) * i / (count - 1));
    w.front() = lo;
    w.back() = hi;
    return w;
}

std::vector<RocPoint> pareto_prune(std::vector<RocPoint> points) {
    constexpr double tol = 1e-12;
    std::sort(points.begin(), points.end(), [](const RocPoint& x, const RocPoint& y) {
        return x.team.pI != y.team.pI ? x.team.pI < y.team.pI : x.team.pII < y.team.pII;
    });
    std::vector<RocPoint> kept;
    for (const auto& p : points) {
        if (kept.empty()) {
            kept.push_back(p);
            continue;
        }
        auto& back = kept.back();
        if (p.team.pI - back.team.pI <= tol) {
            if (p.team.pII < back.team.pII - tol) back = p;
            continue;
        }
        if (p.team.pII < back.team.pII - tol) kept.push_back(p);
    }
    return kept;
}

RocCurve reversed_roc(const TeamSetup& setup, std::span<const double> weights, int jobs) {
    if (weights.empty()) throw ArgumentError("reversed ROC needs at least one weight");
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("sweep weights must be positive and finite");
    }
    std::vector<std::optional<RocPoint>> slots(weights.size());
    std::vector<std::string> reasons(weights.size());
    parallel_for(weights.size(), jobs, [&](std::size_t i) {
        try {
            auto r = optimize_team(RiskWeights{weights[i], 1.0}, setup);
            slots[i] = RocPoint{weights[i], r.team, r.risk};
        } catch (const SolverError& e) {
            reasons[i] = e.what();
        }
    });
    RocCurve curve;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) {
            curve.by_weight.push_back(*slots[i]);
        } else {
            curve.skipped.push_back(weights[i]);
            curve.skip_reasons.push_back(reasons[i]);
        }
    }
    curve.points = pareto_prune(curve.by_weight);
    return curve;
}

std::vector<std::vector<int>> ordering_classes(const FusionRule& rule) {
    const int N = rule.N();
    const int k = unanimity_depth(rule);
    std::vector<std::vector<int>> out;
    std::vector<int> p(N);
    std::iota(p.begin(), p.end(), 0);
    do {
        if (std::is_sorted(p.begin() + k, p.end())) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

double agent_strength(const LikelihoodModel& model) {
    if (const auto* g = std::get_if<GaussianShift>(&model.params())) return 1.0 / g->variance;
    auto s = optimal_identical_threshold(Prior(0.5), CostModel(1, 1), model, FusionRule(1, 1));
    return 1.0 / s.risk;
}

OrderingSearch best_ordering(const Prior& prior, const CostModel& costs, std::span<const LikelihoodModel> models,
                             const FusionRule& rule, const PublicOptions& options, int jobs) {
    prior.require_nondegenerate();
    return best_ordering(RiskWeights::from(prior, costs), models, rule, options, jobs);
}

OrderingSearch best_ordering(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                             const FusionRule& rule, const PublicOptions& options, int jobs) {
    if (rule.N() > 8) {
        throw ArgumentError("ordering search enumerates orderings only for N <= 8; pass an explicit ordering");
    }
    if (static_cast<int>(models.size()) != rule.N()) throw ArgumentError("number of models must equal rule N");
    auto classes = ordering_classes(rule);
    std::vector<RankedOrdering> ranked(classes.size());
    parallel_for(classes.size(), jobs, [&](std::size_t i) {
        ranked[i] = {classes[i], optimal_public_policy(weights, models, rule, classes[i], options).report};
    });
    // Risk ascending; risks within 1e-12 of the first of a run count as tied
    // and keep their lexicographic order.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedOrdering& a, const RankedOrdering& b) { return a.report.risk < b.report.risk; });
    for (std::size_t i = 0; i < ranked.size();) {
        std::size_t j = i + 1;
        const double tie = 1e-12 * std::max(1.0, std::fabs(ranked[i].report.risk));
        while (j < ranked.size() && ranked[j].report.risk - ranked[i].report.risk <= tie) ++j;
        std::sort(ranked.begin() + i, ranked.begin() + j,
                  [](const RankedOrdering& a, const RankedOrdering& b) { return a.ordering < b.ordering; });
        i = j;
    }
    OrderingSearch out;
    out.best = ranked.front().ordering;
    out.report = ranked.front().report;
    out.ranking = std::move(ranked);
    return out;
}

UnanimityReport unanimity_check(const Prior& prior, const CostModel& costs, std::span<const LikelihoodModel> models,
                                const FusionRule& rule, const PublicOptions& options, int jobs) {
    UnanimityReport rep;
    rep.unanimity = rule.is_unanimity();
    if (!rep.unanimity) return rep;
    const int N = rule.N();
    const auto secret = optimal_secret_thresholds(prior, costs, models, rule, options.solver);
    rep.secret_risk = secret.risk;

    const auto orderings = checked_orderings(N);
    std::vector<PublicSolution> sols(orderings.size(), PublicSolution{VotePolicy(rule), {}, 0, 0});
    parallel_for(orderings.size(), jobs, [&](std::size_t i) {
        sols[i] = optimal_public_policy(prior, costs, models, rule, orderings[i], options);
    });
    rep.orderings_checked = static_cast<int>(orderings.size());

    // The open path: all zeros under OR, all ones under AND.
    auto open_history = [&](int d) -> std::uint32_t { return rule.is_or() ? 0u : (1u << d) - 1u; };
    std::vector<std::vector<double>> by_agent(N);
    for (std::size_t i = 0; i < sols.size(); ++i) {
        const auto& pol = sols[i].policy;
        rep.max_public_secret_gap = std::max(rep.max_public_secret_gap, std::fabs(sols[i].report.risk - secret.risk));
        rep.max_ordering_risk_gap =
            std::max(rep.max_ordering_risk_gap, std::fabs(sols[i].report.risk - sols[0].report.risk));
        for (int d = 0; d < N; ++d) {
            by_agent[pol.ordering()[d]].push_back(pol.threshold(d, open_history(d)));
            std::vector<double> here;
            for (std::uint32_t h = 0; h < (1u << d); ++h) {
                if (pol.kind(d, h) != NodeKind::excluded) here.push_back(pol.threshold(d, h));
            }
            rep.max_history_gap = std::max(rep.max_history_gap, spread(here));
        }
    }
    for (const auto& v : by_agent) rep.max_position_gap = std::max(rep.max_position_gap, spread(v));
    rep.risk_equal = rep.max_public_secret_gap < 1e-8 && rep.max_ordering_risk_gap < 1e-8;
    rep.position_invariant = rep.max_position_gap < 1e-6;
    rep.history_independent = rep.max_history_gap < 1e-6;
    return rep;
}

}  // namespace votefusion
