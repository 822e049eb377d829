#include <algorithm>

#include "experiment_detail.hpp"
#include "votefusion/errors.hpp"
#include "votefusion/montecarlo.hpp"
#include "votefusion/secret.hpp"

namespace votefusion {

namespace detail {

std::string partial_history_label(const ObservationGraph& graph, int position, std::uint32_t pattern) {
    if (position == 0) return "-";
    std::string s(position, 'x');
    const auto& obs = graph.observed(position);
    for (std::size_t k = 0; k < obs.size(); ++k) s[obs[k]] = (pattern >> k & 1u) ? '1' : '0';
    return s;
}

Table roc_table(const std::string& name, const RocCurve& curve, VotingMode mode, const std::vector<int>& ordering) {
    Table t{name, {"weight", "pe1", "pe2", "risk", "mode", "ordering"}, {}};
    const auto label = mode == VotingMode::secret ? std::string("-") : ordering_label(ordering);
    for (const auto& p : curve.by_weight) t.rows.push_back({p.weight, p.team.pI, p.team.pII, p.risk, mode_name(mode), label});
    return t;
}

Table skipped_table(const std::string& name, const RocCurve& curve) {
    Table t{name, {"weight", "reason"}, {}};
    for (std::size_t i = 0; i < curve.skipped.size(); ++i) t.rows.push_back({curve.skipped[i], curve.skip_reasons[i]});
    return t;
}

Table public_threshold_table(const std::string& name, const VotePolicy& policy) {
    Table t{name, {"agent", "history", "threshold"}, {}};
    for (int d = 0; d < policy.N(); ++d) {
        for (std::uint32_t h = 0; h < (1u << d); ++h) {
            if (policy.kind(d, h) != NodeKind::active) continue;
            t.rows.push_back({std::int64_t{policy.ordering()[d]}, history_label(d, h), policy.threshold(d, h)});
        }
    }
    return t;
}

}  // namespace detail

namespace {

struct Solved {
    RiskReport report;
    PartialPolicy policy;
    Table thresholds;
};

Solved solve(const ExperimentConfig& cfg, const std::vector<int>& ordering) {
    const PublicOptions popts{cfg.solver, true};
    const int N = cfg.rule.N();
    switch (cfg.mode) {
        case VotingMode::secret: {
            auto s = optimal_secret_thresholds(cfg.prior, cfg.costs, cfg.agents, cfg.rule, cfg.solver);
            Table t{"thresholds", {"agent", "history", "threshold"}, {}};
            for (int n = 0; n < N; ++n) t.rows.push_back({std::int64_t{n}, std::string("-"), s.thresholds[n]});
            return {{s.risk, s.team, s.thresholds}, PartialPolicy::from_secret(cfg.rule, s.thresholds), std::move(t)};
        }
        case VotingMode::full_public: {
            auto s = optimal_public_policy(cfg.prior, cfg.costs, cfg.agents, cfg.rule, ordering, popts);
            return {s.report, PartialPolicy::from_public(s.policy), detail::public_threshold_table("thresholds", s.policy)};
        }
        case VotingMode::partial_public: {
            auto s = optimal_partial_policy(cfg.prior, cfg.costs, cfg.agents, cfg.rule, *cfg.graph, ordering, popts);
            Table t{"thresholds", {"agent", "history", "threshold"}, {}};
            for (int d = 0; d < N; ++d) {
                for (std::uint32_t p = 0; p < s.policy.patterns(d); ++p) {
                    t.rows.push_back({std::int64_t{s.policy.ordering()[d]},
                                      detail::partial_history_label(*cfg.graph, d, p), s.policy.threshold(d, p)});
                }
            }
            return {s.report, s.policy, std::move(t)};
        }
    }
    throw ArgumentError("unknown voting mode");
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    RunResult out;
    std::vector<int> ordering = normalize_ordering(cfg.ordering, cfg.rule.N());

    if (cfg.search_ordering) {
        auto search = best_ordering(cfg.prior, cfg.costs, cfg.agents, cfg.rule, PublicOptions{cfg.solver, true}, opt.jobs);
        Table t{"ranking", {"rank", "ordering", "risk", "pe1", "pe2"}, {}};
        for (std::size_t i = 0; i < search.ranking.size(); ++i) {
            const auto& r = search.ranking[i];
            t.rows.push_back({static_cast<std::int64_t>(i + 1), ordering_label(r.ordering), r.report.risk, r.report.team.pI,
                              r.report.team.pII});
        }
        out.tables.push_back(std::move(t));
        ordering = search.best;
    }

    auto solved = solve(cfg, ordering);
    const auto label = cfg.mode == VotingMode::secret ? std::string("-") : ordering_label(ordering);
    out.tables.push_back({"summary",
                          {"mode", "ordering", "risk", "pe1", "pe2"},
                          {{mode_name(cfg.mode), label, solved.report.risk, solved.report.team.pI, solved.report.team.pII}}});
    out.tables.push_back(std::move(solved.thresholds));

    if (cfg.sweep) {
        TeamSetup setup{cfg.agents, cfg.rule, cfg.mode, ordering, cfg.graph, PublicOptions{cfg.solver, true}};
        auto curve = reversed_roc(setup, *cfg.sweep, opt.jobs);
        out.tables.push_back(detail::roc_table("roc", curve, cfg.mode, ordering));
        RocCurve pruned;
        pruned.by_weight = curve.points;
        out.tables.push_back(detail::roc_table("roc_pareto", pruned, cfg.mode, ordering));
        if (!curve.skipped.empty()) out.tables.push_back(detail::skipped_table("roc_skipped", curve));
    }

    if (cfg.mc) {
        SimConfig sim;
        sim.trials = cfg.mc->trials;
        sim.seed = opt.seed.value_or(cfg.mc->seed);
        sim.prior = cfg.prior;
        sim.costs = cfg.costs;
        sim.models = cfg.agents;
        sim.policy = solved.policy;
        sim.jobs = opt.jobs;
        auto r = simulate_team(sim);
        auto z = compare_to_analytic(r, cfg.prior, cfg.costs, solved.report.team);
        out.tables.push_back({"montecarlo",
                              {"trials", "seed", "pe1", "pe2", "risk", "se_pe1", "se_pe2", "se_risk", "analytic_pe1",
                               "analytic_pe2", "analytic_risk", "z_pe1", "z_pe2", "z_risk"},
                              {{static_cast<std::int64_t>(r.trials), std::to_string(sim.seed), r.team.pI, r.team.pII,
                                r.risk, r.se_pI, r.se_pII, r.se_risk, solved.report.team.pI, solved.report.team.pII,
                                bayes_risk(cfg.prior, cfg.costs, solved.report.team), z.z_pI, z.z_pII, z.z_risk}}});
    }
    return out;
}

}  // namespace votefusion
