#include "votefusion/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "votefusion/errors.hpp"
#include "votefusion/parallel.hpp"

namespace votefusion {

namespace {

constexpr std::uint64_t kChunk = 1u << 16;

std::uint64_t splitmix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Counts {
    std::uint64_t h0 = 0, h1 = 0, fa = 0, miss = 0;
};

}  // namespace

double stream_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t draw) noexcept {
    std::uint64_t k = splitmix(splitmix(seed) ^ trial);
    k = splitmix(k ^ (draw * 0xd1b54a32d192ed03ULL));
    return (static_cast<double>(k >> 11) + 0.5) * 0x1.0p-53;
}

double sample_signal(const LikelihoodModel& model, int hypothesis, double u) {
    if (const auto* g = std::get_if<GaussianShift>(&model.params())) {
        return hypothesis + std::sqrt(g->variance) * standard_normal_quantile(u);
    }
    const auto& e = std::get<ExponentialRates>(model.params());
    return -std::log1p(-u) / (hypothesis == 0 ? e.rate0 : e.rate1);
}

SimResult simulate_team(const SimConfig& cfg) {
    const auto& pol = cfg.policy;
    const int N = pol.N();
    if (cfg.trials == 0) throw ArgumentError("simulation needs at least one trial");
    if (static_cast<int>(cfg.models.size()) != N) throw ArgumentError("number of models must equal rule N");
    if (N > 20) throw ArgumentError("simulation supports at most 20 agents");

    // Threshold per (position, full history); throws PolicyError on a gap.
    std::vector<std::vector<double>> table(N);
    for (int d = 0; d < N; ++d) {
        table[d].resize(std::size_t{1} << d);
        for (std::uint32_t h = 0; h < (1u << d); ++h) table[d][h] = pol.threshold_at(d, h);
    }

    const double p1 = cfg.prior.p1();
    const int L = pol.rule().L();
    const std::uint64_t chunks = (cfg.trials + kChunk - 1) / kChunk;
    std::vector<Counts> partial(chunks);
    parallel_for(chunks, cfg.jobs, [&](std::size_t c) {
        Counts n;
        const std::uint64_t end = std::min<std::uint64_t>(cfg.trials, (c + 1) * kChunk);
        for (std::uint64_t t = c * kChunk; t < end; ++t) {
            const int h = stream_uniform(cfg.seed, t, 0) < p1 ? 1 : 0;
            std::uint32_t history = 0;
            int ones = 0;
            for (int d = 0; d < N; ++d) {
                const int agent = pol.ordering()[d];
                const double y = sample_signal(cfg.models[agent], h, stream_uniform(cfg.seed, t, 1 + agent));
                if (y >= table[d][history]) {
                    history |= 1u << d;
                    ++ones;
                }
            }
            const int decision = ones >= L ? 1 : 0;
            if (h == 0) {
                ++n.h0;
                n.fa += decision;
            } else {
                ++n.h1;
                n.miss += 1 - decision;
            }
        }
        partial[c] = n;
    });

    Counts total;
    for (const auto& n : partial) {
        total.h0 += n.h0;
        total.h1 += n.h1;
        total.fa += n.fa;
        total.miss += n.miss;
    }

    SimResult r;
    r.trials = cfg.trials;
    r.h0_trials = total.h0;
    r.h1_trials = total.h1;
    r.false_alarms = total.fa;
    r.misses = total.miss;
    auto freq = [](std::uint64_t k, std::uint64_t n) { return n ? static_cast<double>(k) / n : 0.0; };
    auto se = [](double p, std::uint64_t n) { return n ? std::sqrt(p * (1.0 - p) / n) : 0.0; };
    r.team = {freq(total.fa, total.h0), freq(total.miss, total.h1)};
    r.se_pI = se(r.team.pI, total.h0);
    r.se_pII = se(r.team.pII, total.h1);

    const double n = static_cast<double>(cfg.trials);
    const double c10 = cfg.costs.c10(), c01 = cfg.costs.c01();
    const double mean = (c10 * total.fa + c01 * total.miss) / n;
    const double second = (c10 * c10 * total.fa + c01 * c01 * total.miss) / n;
    r.risk = mean;
    r.se_risk = std::sqrt(std::max(0.0, second - mean * mean) / n);
    return r;
}

SimAgreement compare_to_analytic(const SimResult& sim, const Prior& prior, const CostModel& costs,
                                 const ErrorPair& analytic) {
    auto z = [](double diff, double se) {
        if (se > 0.0) return std::fabs(diff) / se;
        return diff == 0.0 ? 0.0 : kInf;
    };
    auto binom_se = [](double p, std::uint64_t n) { return n ? std::sqrt(p * (1.0 - p) / n) : 0.0; };

    SimAgreement a;
    a.z_pI = sim.h0_trials ? z(sim.team.pI - analytic.pI, binom_se(analytic.pI, sim.h0_trials)) : 0.0;
    a.z_pII = sim.h1_trials ? z(sim.team.pII - analytic.pII, binom_se(analytic.pII, sim.h1_trials)) : 0.0;

    // Per-trial cost is c10, c01 or 0 with probabilities p0*pI, p1*pII.
    const double c10 = costs.c10(), c01 = costs.c01();
    const double fa = prior.p0() * analytic.pI;
    const double miss = prior.p1() * analytic.pII;
    const double mean = c10 * fa + c01 * miss;
    const double var = c10 * c10 * fa + c01 * c01 * miss - mean * mean;
    a.z_risk = z(sim.risk - mean, std::sqrt(std::max(0.0, var) / static_cast<double>(sim.trials)));
    return a;
}

}  // namespace votefusion
