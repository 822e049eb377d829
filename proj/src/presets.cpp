#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "experiment_detail.hpp"
#include "votefusion/errors.hpp"
#include "votefusion/parallel.hpp"
#include "votefusion/secret.hpp"

namespace votefusion {

namespace {

// Pinned comparison tolerances of the figure and theorem checks.
constexpr double kWeakTol = 1e-8;      // "lies weakly below" / "attains the minimum"
constexpr double kStrictGap = 1e-6;    // "strictly below"
constexpr double kThresholdTol = 1e-6;
constexpr double kRiskTol = 1e-9;      // iid public vs secret risk
constexpr double kPartialTol = 1e-8;

std::vector<LikelihoodModel> gaussians(const std::vector<double>& variances) {
    std::vector<LikelihoodModel> m;
    for (double v : variances) m.push_back(LikelihoodModel::gaussian(v));
    return m;
}

std::string fmt(double x) { return format_number(x); }

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ";" : "") + fmt(xs[i]);
    return s;
}

struct Draw {
    double p0, c01, variance;
};

// p0 in [0.05, 0.95], c01/c10 log-uniform in [0.1, 10] with c10 = 1.
Draw draw_prior_costs(std::mt19937_64& rng, double variance) {
    std::uniform_real_distribution<double> p(0.05, 0.95), lr(std::log(0.1), std::log(10.0));
    Draw d;
    d.p0 = p(rng);
    d.c01 = std::exp(lr(rng));
    d.variance = variance;
    return d;
}

// Risk of each sweep weight, NaN where the weight was skipped.
std::vector<double> risks(const RocCurve& c, const std::vector<double>& weights) {
    std::vector<double> r(weights.size(), std::nan(""));
    for (const auto& p : c.by_weight) {
        auto it = std::find(weights.begin(), weights.end(), p.weight);
        r[it - weights.begin()] = p.risk;
    }
    return r;
}

// Shared part of the two ROC figures: curves for the secret team and for each
// public ordering, plus the dominance and best-ordering checks.
RunResult roc_figure(const std::vector<double>& variances, const FusionRule& rule,
                     const std::vector<std::vector<int>>& orderings, const std::vector<int>& expected_best,
                     bool check_strict, const RunOptions& opt) {
    RunResult out;
    const auto weights = log_spaced_weights();
    const auto models = gaussians(variances);

    TeamSetup secret{models, rule, VotingMode::secret, {}, {}, {}};
    auto sec = reversed_roc(secret, weights, opt.jobs);
    out.tables.push_back(detail::roc_table("roc_secret", sec, VotingMode::secret, {}));
    const auto sec_r = risks(sec, weights);

    std::vector<std::vector<double>> pub_r;
    bool skipped = !sec.skipped.empty();
    for (const auto& o : orderings) {
        TeamSetup pub{models, rule, VotingMode::full_public, o, {}, {}};
        auto c = reversed_roc(pub, weights, opt.jobs);
        skipped = skipped || !c.skipped.empty();
        out.tables.push_back(detail::roc_table("roc_public_" + ordering_label(o), c, VotingMode::full_public, o));
        if (!c.skipped.empty()) out.tables.push_back(detail::skipped_table("skipped_public_" + ordering_label(o), c));
        pub_r.push_back(risks(c, weights));
    }
    out.checks.push_back({"no_skipped_weights", !skipped, ""});

    for (std::size_t k = 0; k < orderings.size(); ++k) {
        double worst = -kInf;
        int strict = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const double gap = pub_r[k][i] - sec_r[i];
            if (std::isnan(gap)) continue;
            worst = std::max(worst, gap);
            if (-gap > kStrictGap) ++strict;
        }
        const auto name = ordering_label(orderings[k]);
        out.checks.push_back({"public_weakly_below_secret_" + name, worst <= kWeakTol, "max excess " + fmt(worst)});
        if (check_strict) {
            out.checks.push_back({"public_strictly_below_secret_" + name, strict >= 5,
                                  std::to_string(strict) + " weights with gap > 1e-6"});
        }
    }

    const auto best_k = std::find(orderings.begin(), orderings.end(), expected_best) - orderings.begin();
    int misses = 0;
    double worst_excess = 0.0;
    std::string where;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        double lo = kInf;
        for (const auto& r : pub_r) lo = std::min(lo, r[i]);
        const double excess = pub_r[best_k][i] - lo;
        if (!(excess <= kWeakTol)) {
            ++misses;
            where += (where.empty() ? "" : " ") + fmt(weights[i]);
        }
        if (excess > worst_excess) worst_excess = excess;
    }
    out.checks.push_back({"first_mover_" + std::to_string(expected_best[0]) + "_minimum_everywhere", misses == 0,
                          std::to_string(misses) + " weights not minimal" + (where.empty() ? "" : " (w = " + where + ")") +
                              "; max excess " + fmt(worst_excess)});
    return out;
}

RunResult fig6(const RunOptions& opt) {
    FusionRule rule(2, 3);
    return roc_figure({0.25, 1.0, 2.25}, rule, ordering_classes(rule), {1, 0, 2}, true, opt);
}

RunResult fig7(const RunOptions& opt) {
    // Each candidate first mover followed by the median-strength agent of the
    // rest; the last two are interchangeable.
    return roc_figure({0.25, 0.5, 1.0, 2.25}, FusionRule(2, 4), {{0, 2, 1, 3}, {1, 2, 0, 3}, {2, 1, 0, 3}, {3, 1, 0, 2}},
                      {1, 2, 0, 3}, false, opt);
}

RunResult fig4(const RunOptions&) {
    RunResult out;
    const Prior prior(0.25);
    const CostModel costs(1, 1);
    const FusionRule rule(4, 7);
    const auto model = LikelihoodModel::gaussian(1.0);
    const std::vector<LikelihoodModel> models(7, model);
    auto sol = optimal_public_policy(prior, costs, models, rule);
    const auto& pol = sol.policy;
    const double first = pol.threshold(0, 0);

    out.tables.push_back(detail::public_threshold_table("thresholds", pol));
    Table belief{"belief_only", {"agent", "history", "belief_q0", "threshold"}, {}};
    double full_gap = 0.0, belief_gap = 0.0;
    std::vector<double> carol;
    for (int d = 1; d < rule.N(); ++d) {
        for (std::uint32_t h = 0; h < (1u << d); ++h) {
            if (pol.kind(d, h) != NodeKind::active) continue;
            const auto q = history_belief(prior, models, pol, d, h);
            const double t = belief_only_threshold(q, costs, model, rule);
            belief.rows.push_back({std::int64_t{d}, history_label(d, h), q.q0, t});
            if (d <= 2) {
                full_gap = std::max(full_gap, std::fabs(pol.threshold(d, h) - first));
                belief_gap = std::max(belief_gap, std::fabs(t - first));
            }
            if (d == 2) carol.push_back(t);
        }
    }
    out.tables.push_back(std::move(belief));

    std::sort(carol.begin(), carol.end());
    int distinct = carol.empty() ? 0 : 1;
    for (std::size_t i = 1; i < carol.size(); ++i) {
        if (carol[i] - carol[i - 1] > 1e-9) ++distinct;
    }
    out.checks.push_back({"second_and_third_match_first", full_gap < kThresholdTol, "max gap " + fmt(full_gap)});
    out.checks.push_back({"belief_only_differs", belief_gap > 1e-3, "max gap " + fmt(belief_gap)});
    out.checks.push_back({"three_belief_only_values_at_third", distinct == 3, std::to_string(distinct) + " values"});
    return out;
}

RunResult thm1(const RunOptions& opt) {
    struct Item {
        int N, L;
        Draw d;
    };
    std::mt19937_64 rng(opt.seed.value_or(1));
    std::vector<Item> items;
    for (int N = 2; N <= 7; ++N) {
        for (int L = 1; L <= N; ++L) {
            for (int k = 0; k < 4; ++k) items.push_back({N, L, draw_prior_costs(rng, 1.0)});
        }
    }
    struct Res {
        double secret_threshold, threshold_gap, risk_gap;
    };
    std::vector<Res> res(items.size());
    parallel_for(items.size(), opt.jobs, [&](std::size_t i) {
        const auto& it = items[i];
        const Prior prior(it.d.p0);
        const CostModel costs(1.0, it.d.c01);
        const FusionRule rule(it.L, it.N);
        const std::vector<LikelihoodModel> models(it.N, LikelihoodModel::gaussian(it.d.variance));
        auto sec = optimal_secret_thresholds(prior, costs, models, rule);
        auto pub = optimal_public_policy(prior, costs, models, rule);
        double gap = 0.0;
        for (int d = 0; d < it.N; ++d) {
            for (std::uint32_t h = 0; h < (1u << d); ++h) {
                if (pub.policy.kind(d, h) != NodeKind::active) continue;
                const double a = pub.policy.threshold(d, h), b = sec.thresholds[pub.policy.ordering()[d]];
                gap = std::max(gap, a == b ? 0.0 : std::fabs(a - b));
            }
        }
        res[i] = {sec.thresholds[0], gap, std::fabs(pub.report.risk - sec.risk)};
    });

    RunResult out;
    Table t{"thm1", {"N", "L", "p0", "c10", "c01", "variance", "secret_threshold", "max_threshold_gap", "risk_gap"}, {}};
    double worst_t = 0.0, worst_r = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        t.rows.push_back({std::int64_t{it.N}, std::int64_t{it.L}, it.d.p0, 1.0, it.d.c01, it.d.variance,
                          res[i].secret_threshold, res[i].threshold_gap, res[i].risk_gap});
        worst_t = std::max(worst_t, res[i].threshold_gap);
        worst_r = std::max(worst_r, res[i].risk_gap);
    }
    out.tables.push_back(std::move(t));
    out.checks.push_back({"public_thresholds_equal_secret", worst_t < kThresholdTol, "max gap " + fmt(worst_t)});
    out.checks.push_back({"public_risk_equals_secret", worst_r < kRiskTol, "max gap " + fmt(worst_r)});
    return out;
}

RunResult thm3(const RunOptions& opt) {
    struct Item {
        int N, L;
        Draw d;
        std::vector<double> variances;
    };
    std::mt19937_64 rng(opt.seed.value_or(1));
    std::uniform_real_distribution<double> var(0.1, 4.0);
    std::vector<Item> items;
    for (int N = 2; N <= 4; ++N) {
        for (int L : {1, N}) {
            for (int k = 0; k < 3; ++k) {
                Item it{N, L, draw_prior_costs(rng, 0.0), {}};
                for (int n = 0; n < N; ++n) it.variances.push_back(var(rng));
                items.push_back(std::move(it));
            }
        }
    }
    std::vector<UnanimityReport> reps(items.size());
    parallel_for(items.size(), opt.jobs, [&](std::size_t i) {
        const auto& it = items[i];
        reps[i] = unanimity_check(Prior(it.d.p0), CostModel(1.0, it.d.c01), gaussians(it.variances),
                                  FusionRule(it.L, it.N));
    });

    RunResult out;
    Table t{"thm3",
            {"N", "L", "p0", "c10", "c01", "variances", "orderings", "public_secret_gap", "ordering_risk_gap",
             "position_gap", "history_gap", "passed"},
            {}};
    int failed = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        const auto& r = reps[i];
        t.rows.push_back({std::int64_t{it.N}, std::int64_t{it.L}, it.d.p0, 1.0, it.d.c01, join(it.variances),
                          std::int64_t{r.orderings_checked}, r.max_public_secret_gap, r.max_ordering_risk_gap,
                          r.max_position_gap, r.max_history_gap, std::int64_t{r.passed()}});
        if (!r.passed()) ++failed;
    }
    out.tables.push_back(std::move(t));
    out.checks.push_back({"unanimity_ordering_irrelevant", failed == 0, std::to_string(failed) + " failing draws"});
    return out;
}

RunResult cor2(const RunOptions& opt) {
    struct Item {
        std::string graph_name;
        ObservationGraph graph;
        int L;
        Draw d;
    };
    std::mt19937_64 rng(opt.seed.value_or(1));
    std::uniform_real_distribution<double> var(0.1, 4.0);
    const std::vector<std::vector<int>> tree{{}, {0}, {0}, {1}, {2, 3}};
    std::vector<Item> items;
    for (int N = 2; N <= 5; ++N) {
        std::vector<std::pair<std::string, ObservationGraph>> graphs{{"chain", ObservationGraph::chain(N)}};
        if (N >= 3) graphs.push_back({"tree", ObservationGraph({tree.begin(), tree.begin() + N})});
        for (const auto& [name, g] : graphs) {
            for (int L = 1; L <= N; ++L) {
                Draw d = draw_prior_costs(rng, 0.0);
                d.variance = var(rng);
                items.push_back({name, g, L, d});
            }
        }
    }
    std::vector<std::pair<double, double>> res(items.size());
    parallel_for(items.size(), opt.jobs, [&](std::size_t i) {
        const auto& it = items[i];
        const int N = it.graph.N();
        const Prior prior(it.d.p0);
        const CostModel costs(1.0, it.d.c01);
        const FusionRule rule(it.L, N);
        const std::vector<LikelihoodModel> models(N, LikelihoodModel::gaussian(it.d.variance));
        auto part = optimal_partial_policy(prior, costs, models, rule, it.graph);
        auto sec = optimal_secret_thresholds(prior, costs, models, rule);
        res[i] = {part.report.risk, sec.risk};
    });

    RunResult out;
    Table t{"cor2", {"graph", "N", "L", "p0", "c10", "c01", "variance", "partial_risk", "secret_risk", "gap"}, {}};
    double worst = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        const double gap = std::fabs(res[i].first - res[i].second);
        worst = std::max(worst, gap);
        t.rows.push_back({it.graph_name, std::int64_t{it.graph.N()}, std::int64_t{it.L}, it.d.p0, 1.0, it.d.c01,
                          it.d.variance, res[i].first, res[i].second, gap});
    }
    out.tables.push_back(std::move(t));
    out.checks.push_back({"partial_risk_equals_secret", worst < kPartialTol, "max gap " + fmt(worst)});
    return out;
}

const std::map<std::string, RunResult (*)(const RunOptions&)>& registry() {
    static const std::map<std::string, RunResult (*)(const RunOptions&)> r{
        {"cor2", cor2}, {"fig4", fig4}, {"fig6", fig6}, {"fig7", fig7}, {"thm1", thm1}, {"thm3", thm3}};
    return r;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : registry()) names.push_back(k);
    return names;
}

RunResult run_preset(const std::string& name, const RunOptions& options) {
    auto it = registry().find(name);
    if (it == registry().end()) {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ArgumentError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return it->second(options);
}

}  // namespace votefusion
