#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "votefusion/errors.hpp"
#include "votefusion/public.hpp"
#include "votefusion/secret.hpp"

using namespace votefusion;

namespace {

std::vector<LikelihoodModel> random_gaussians(std::mt19937_64& rng, int n) {
    std::vector<LikelihoodModel> m;
    for (int i = 0; i < n; ++i) m.push_back(LikelihoodModel::gaussian(oracle::uniform(rng, 0.2, 3.0)));
    return m;
}

// Policy with an independent random threshold at every node, settled or not.
VotePolicy random_policy(std::mt19937_64& rng, const FusionRule& rule, std::vector<int> ordering = {}) {
    VotePolicy p(rule, std::move(ordering));
    for (int d = 0; d < rule.N(); ++d) {
        for (std::uint32_t h = 0; h < (1u << d); ++h) {
            double t = oracle::uniform(rng, -1.0, 2.0);
            if (rng() % 17 == 0) t = (rng() % 2) ? kInf : -kInf;
            p.set_threshold(d, h, t);
        }
    }
    return p;
}

}  // namespace

TEST_CASE("belief update examples") {
    CHECK(belief_update(Belief{0.5}, ErrorPair{0.2, 0.2}, 0).q0 == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(belief_update(Belief{0.5}, ErrorPair{0.0, 0.0}, 0).q0 == 1.0);
    for (int v : {0, 1}) CHECK(belief_update(Belief{0.37}, ErrorPair{0.3, 0.7}, v).q0 == doctest::Approx(0.37));
    CHECK_THROWS_AS(belief_update(Belief{0.5}, ErrorPair{0.0, 1.0}, 1), ImpossibleObservation);
    CHECK_THROWS_AS(belief_update(Belief{0.5}, ErrorPair{0.1, 0.1}, 2), ArgumentError);
}

TEST_CASE("fusion rule evolution") {
    CHECK(evolve_fusion_state({4, 7}, 1) == FusionState(3, 6));
    CHECK(evolve_fusion_state({4, 7}, 0) == FusionState(4, 6));
    auto or_done = evolve_fusion_state({1, 3}, 1);
    CHECK(or_done.is_terminal());
    CHECK(or_done.decision() == 1);
    auto and_done = evolve_fusion_state({3, 3}, 0);
    CHECK(and_done.is_terminal());
    CHECK(and_done.decision() == 0);
    CHECK_THROWS_AS(evolve_fusion_state(and_done, 1), StateError);
    CHECK_THROWS_AS(FusionState(2, 3).decision(), StateError);
    CHECK(FusionState(2, 3).as_rule() == FusionRule(2, 3));
}

TEST_CASE("node kinds follow the fusion state") {
    VotePolicy p(FusionRule(2, 3));
    CHECK(p.kind(0, 0) == NodeKind::active);
    CHECK(p.kind(1, 0) == NodeKind::active);
    CHECK(p.kind(1, 1) == NodeKind::active);
    CHECK(p.kind(2, 0b00) == NodeKind::dont_care);
    CHECK(p.kind(2, 0b11) == NodeKind::dont_care);
    CHECK(p.kind(2, 0b01) == NodeKind::active);
    VotePolicy q(FusionRule(1, 4));
    CHECK(q.kind(2, 0b10) == NodeKind::dont_care);
    CHECK(q.kind(2, 0b01) == NodeKind::excluded);
    CHECK(q.kind(3, 0b001) == NodeKind::excluded);
    CHECK(q.kind(3, 0b100) == NodeKind::dont_care);
    CHECK(history_label(0, 0) == "-");
    CHECK(history_label(3, 0b110) == "011");
}

TEST_CASE("belief chain equals the direct posterior from joint vote probabilities") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 6;
        FusionRule rule(1 + static_cast<int>(rng() % n), n);
        auto models = random_gaussians(rng, n);
        VotePolicy policy(rule);
        for (int d = 0; d < n; ++d) {
            for (std::uint32_t h = 0; h < (1u << d); ++h) policy.set_threshold(d, h, oracle::uniform(rng, -1.0, 2.0));
        }
        Prior prior(oracle::uniform(rng, 0.05, 0.95));
        for (int d = 0; d <= n; ++d) {
            for (std::uint32_t h = 0; h < (1u << d); ++h) {
                // Joint probability of every full vote pattern extending h.
                double j0 = 0.0, j1 = 0.0;
                for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
                    if ((mask & ((1u << d) - 1u)) != h) continue;
                    double a = prior.p0(), b = prior.p1();
                    for (int k = 0; k < n; ++k) {
                        auto e = local_error_pair(models[k], policy.threshold(k, mask & ((1u << k) - 1u)));
                        bool one = mask >> k & 1u;
                        a *= one ? e.pI : 1.0 - e.pI;
                        b *= one ? 1.0 - e.pII : e.pII;
                    }
                    j0 += a;
                    j1 += b;
                }
                CHECK(std::fabs(history_belief(prior, models, policy, d, h).q0 - j0 / (j0 + j1)) < 1e-12);
            }
        }
    }
}

TEST_CASE("tree risk equals path enumeration for N <= 10") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + trial % 10;
        FusionRule rule(1 + static_cast<int>(rng() % n), n);
        auto models = random_gaussians(rng, n);
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        auto policy = random_policy(rng, rule, order);
        RiskWeights w{oracle::uniform(rng, 0.1, 2.0), oracle::uniform(rng, 0.1, 2.0)};

        std::vector<LikelihoodModel> in_order;
        for (int a : order) in_order.push_back(models[a]);
        ErrorPair slow_team;
        double slow = oracle::path_enumeration_risk(
            in_order, rule.L(), w.false_alarm, w.miss,
            [&](int d, std::uint32_t seen) { return policy.threshold(d, seen); }, &slow_team);
        auto fast = public_bayes_risk(w, models, policy);
        CHECK(std::fabs(fast.risk - slow) < 1e-12);
        CHECK(std::fabs(fast.team.pI - slow_team.pI) < 1e-12);
        CHECK(std::fabs(fast.team.pII - slow_team.pII) < 1e-12);
    }
}

TEST_CASE("single agent public risk is the local risk") {
    std::vector<LikelihoodModel> one{LikelihoodModel::gaussian(1.0)};
    auto policy = VotePolicy::uniform(FusionRule(1, 1), std::vector<double>{0.3});
    Prior prior(0.4);
    CostModel costs(1.5, 0.8);
    auto e = local_error_pair(one[0], 0.3);
    auto r = public_bayes_risk(prior, costs, one, policy);
    CHECK(r.risk == doctest::Approx(1.5 * 0.4 * e.pI + 0.8 * 0.6 * e.pII).epsilon(1e-14));
}

TEST_CASE("missing thresholds are reported") {
    std::vector<LikelihoodModel> models(2, LikelihoodModel::gaussian(1.0));
    VotePolicy p(FusionRule(2, 2));
    p.set_threshold(0, 0, 0.5);
    CHECK_THROWS_AS(public_bayes_risk(Prior(0.5), CostModel(1, 1), models, p), PolicyError);
    CHECK_THROWS_AS(VotePolicy(FusionRule(2, 3), {0, 0, 1}), ArgumentError);
}

TEST_CASE("secret thresholds at every node give the secret risk") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 6;
        FusionRule rule(1 + static_cast<int>(rng() % n), n);
        Prior prior(oracle::uniform(rng, 0.1, 0.9));
        CostModel costs(1.0, oracle::uniform(rng, 0.3, 3.0));
        auto model = LikelihoodModel::gaussian(oracle::uniform(rng, 0.2, 3.0));
        auto sec = optimal_identical_threshold(prior, costs, model, rule);
        std::vector<LikelihoodModel> models(n, model);
        auto policy = VotePolicy::uniform(rule, sec.thresholds);
        CHECK(std::fabs(public_bayes_risk(prior, costs, models, policy).risk - sec.risk) < 1e-12);
    }
}

TEST_CASE("iid agents: every public node threshold equals the secret threshold") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 6;
        FusionRule rule(1 + static_cast<int>(rng() % n), n);
        Prior prior(oracle::uniform(rng, 0.05, 0.95));
        CostModel costs(1.0, std::exp(oracle::uniform(rng, std::log(0.1), std::log(10.0))));
        auto model = LikelihoodModel::gaussian(oracle::uniform(rng, 0.1, 4.0));
        std::vector<LikelihoodModel> models(n, model);
        auto sec = optimal_identical_threshold(prior, costs, model, rule);
        auto pub = optimal_public_policy(prior, costs, models, rule);
        for (int d = 0; d < n; ++d) {
            for (std::uint32_t h = 0; h < (1u << d); ++h) {
                CHECK(oracle::threshold_gap(pub.policy.threshold(d, h), sec.thresholds[0]) < 1e-6);
            }
        }
        CHECK(std::fabs(pub.report.risk - sec.risk) < 1e-9);
    }
}

TEST_CASE("public risk never exceeds secret risk") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + trial % 4;
        FusionRule rule(1 + static_cast<int>(rng() % n), n);
        auto models = random_gaussians(rng, n);
        Prior prior(oracle::uniform(rng, 0.1, 0.9));
        CostModel costs(1.0, oracle::uniform(rng, 0.3, 3.0));
        auto sec = optimal_secret_thresholds(prior, costs, models, rule);
        auto pub = optimal_public_policy(prior, costs, models, rule);
        CHECK(pub.report.risk <= sec.risk + 1e-10);
        CHECK(std::fabs(public_bayes_risk(prior, costs, models, pub.policy).risk - pub.report.risk) < 1e-14);
    }
}

TEST_CASE("heterogeneous majority of three: public strictly beats secret") {
    std::vector<LikelihoodModel> models{LikelihoodModel::gaussian(0.25), LikelihoodModel::gaussian(1.0),
                                        LikelihoodModel::gaussian(2.25)};
    FusionRule rule(2, 3);
    auto sec = optimal_secret_thresholds(Prior(0.5), CostModel(1, 1), models, rule);
    auto pub = optimal_public_policy(Prior(0.5), CostModel(1, 1), models, rule);
    CHECK(pub.report.risk < sec.risk - 1e-6);
}

TEST_CASE("OR rule: the all-zeros path carries the secret thresholds, the rest is settled") {
    std::vector<LikelihoodModel> models{LikelihoodModel::gaussian(0.3), LikelihoodModel::gaussian(1.7),
                                        LikelihoodModel::gaussian(0.8)};
    FusionRule rule(1, 3);
    Prior prior(0.6);
    CostModel costs(1.0, 2.0);
    auto sec = optimal_secret_thresholds(prior, costs, models, rule);
    for (std::vector<int> order : {std::vector<int>{0, 1, 2}, std::vector<int>{2, 0, 1}}) {
        auto pub = optimal_public_policy(prior, costs, models, rule, order);
        for (int d = 0; d < 3; ++d) {
            CHECK(std::fabs(pub.policy.threshold(d, 0) - sec.thresholds[order[d]]) < 1e-6);
            for (std::uint32_t h = 1; h < (1u << d); ++h) CHECK(pub.policy.kind(d, h) != NodeKind::active);
        }
        CHECK(std::fabs(pub.report.risk - sec.risk) < 1e-9);
    }
}

TEST_CASE("two agents: public optimizer matches a nested grid") {
    std::vector<LikelihoodModel> models{LikelihoodModel::gaussian(0.25), LikelihoodModel::gaussian(1.0)};
    for (int L : {1, 2}) {
        FusionRule rule(L, 2);
        RiskWeights w{0.4, 0.6};
        auto pub = optimal_public_policy(w, models, rule);
        // Only Britta's node where the decision is still open matters.
        const std::uint32_t open = L == 1 ? 0u : 1u;
        auto outer = [&](double t0) {
            auto inner = [&](double t1) {
                return oracle::path_enumeration_risk(models, L, w.false_alarm, w.miss, [&](int d, std::uint32_t seen) {
                    return d == 0 ? t0 : (seen == open ? t1 : 0.0);
                });
            };
            return oracle::grid_then_golden(inner, oracle::threshold_grid(-3.0, 4.0, 1e-2)).second;
        };
        double grid = oracle::grid_then_golden(outer, oracle::threshold_grid(-3.0, 4.0, 1e-2)).second;
        CHECK(pub.report.risk <= grid + 1e-12);
        CHECK(grid - pub.report.risk < 1e-5);
    }
}

TEST_CASE("belief-only thresholds drift while full thresholds stay put (4-of-7)") {
    auto model = LikelihoodModel::gaussian(1.0);
    FusionRule rule(4, 7);
    Prior prior(0.25);
    CostModel costs(1, 1);
    auto sec = optimal_identical_threshold(prior, costs, model, rule);
    std::vector<LikelihoodModel> models(7, model);
    auto policy = VotePolicy::uniform(rule, sec.thresholds);

    const double alexis = sec.thresholds[0];
    CHECK(std::fabs(belief_only_threshold(Belief{prior.p0()}, costs, model, rule) - alexis) < 1e-9);
    auto after0 = history_belief(prior, models, policy, 1, 0b0);
    CHECK(std::fabs(belief_only_threshold(after0, costs, model, rule) - alexis) > 1e-3);

    double t01 = belief_only_threshold(history_belief(prior, models, policy, 2, 0b10), costs, model, rule);
    double t10 = belief_only_threshold(history_belief(prior, models, policy, 2, 0b01), costs, model, rule);
    CHECK(std::fabs(t01 - t10) < 1e-12);
}
