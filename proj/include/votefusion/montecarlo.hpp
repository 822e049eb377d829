#pragma once

// Seeded simulation of the voting protocol, used to check the analytic error
// probabilities end to end.

#include <cstdint>
#include <vector>

#include "votefusion/detection.hpp"
#include "votefusion/partial.hpp"

namespace votefusion {

struct SimConfig {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    Prior prior{0.5};
    CostModel costs{1.0, 1.0};
    std::vector<LikelihoodModel> models;  // indexed by agent
    // Secret, public and partial policies all run through their PartialPolicy
    // form (PartialPolicy::from_secret / from_public).
    PartialPolicy policy{FusionRule(1, 1), ObservationGraph::empty(1)};
    int jobs = 1;
};

struct SimResult {
    std::uint64_t trials = 0;
    std::uint64_t h0_trials = 0;
    std::uint64_t h1_trials = 0;
    std::uint64_t false_alarms = 0;  // decided 1 under H=0
    std::uint64_t misses = 0;        // decided 0 under H=1

    ErrorPair team;   // false_alarms / h0_trials, misses / h1_trials (0 if no trials)
    double risk = 0;  // mean cost per trial
    // Plug-in binomial standard errors from the empirical frequencies.
    double se_pI = 0;
    double se_pII = 0;
    double se_risk = 0;
};

// Trial t draws everything from a stream keyed by (seed, t), so results do
// not depend on `jobs`. PolicyError before any sampling if the policy lacks a
// threshold; ArgumentError on inconsistent sizes or zero trials.
SimResult simulate_team(const SimConfig& config);

// Distance of the simulation from analytic values in standard errors. The
// errors here use the analytic probabilities, which stay meaningful when an
// error event never occurs in the sample.
struct SimAgreement {
    double z_pI = 0;
    double z_pII = 0;
    double z_risk = 0;
    bool within(double k) const noexcept { return z_pI <= k && z_pII <= k && z_risk <= k; }
};

SimAgreement compare_to_analytic(const SimResult& sim, const Prior& prior, const CostModel& costs,
                                 const ErrorPair& analytic);

// Uniform in (0, 1) from the `draw`-th value of the stream of (seed, trial).
double stream_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t draw) noexcept;

// Signal under hypothesis h by inverse-CDF transform of u.
double sample_signal(const LikelihoodModel& model, int hypothesis, double u);

}  // namespace votefusion
