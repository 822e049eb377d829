#pragma once

// Core types and exact probability computations for binary hypothesis
// testing by a team of threshold-test agents fused with an L-out-of-N rule.
//
// Every agent observes a scalar private signal Y whose likelihood ratio
// f(y|1)/f(y|0) is strictly increasing, so each likelihood ratio test is a
// threshold test on y: vote 1 iff y >= threshold. Thresholds may be +-inf
// (always vote 0 / always vote 1).

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace votefusion {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Prior {
public:
    explicit Prior(double p0);

    double p0() const noexcept { return p0_; }
    double p1() const noexcept { return 1.0 - p0_; }

    // Throws ArgumentError unless 0 < p0 < 1.
    void require_nondegenerate() const;

private:
    double p0_;
};

class CostModel {
public:
    CostModel(double false_alarm, double missed_detection);

    double c10() const noexcept { return c10_; }
    double c01() const noexcept { return c01_; }

private:
    double c10_;
    double c01_;
};

// Signal distribution under H=h: N(h, variance).
struct GaussianShift {
    double variance = 1.0;
};

// Signal distribution under H=h: exponential with rate rate_h, rate0 > rate1,
// so large signals favour H=1 and the likelihood ratio
// (rate1/rate0) exp((rate0-rate1) y) is strictly increasing on [0, inf).
struct ExponentialRates {
    double rate0 = 2.0;
    double rate1 = 1.0;
};

class LikelihoodModel {
public:
    using Params = std::variant<GaussianShift, ExponentialRates>;

    static LikelihoodModel gaussian(double variance);
    static LikelihoodModel exponential(double rate0, double rate1);

    const Params& params() const noexcept { return params_; }
    bool is_gaussian() const noexcept { return std::holds_alternative<GaussianShift>(params_); }

    // Infimum of the signal support (-inf for Gaussian, 0 for exponential).
    double support_min() const noexcept;
    // Likelihood ratio at the bottom / top of the support.
    double lr_min() const noexcept;
    double lr_max() const noexcept;

    // Below search_low the Type II error is ~1e-18 or less; above search_high
    // the Type I error is. Used to bound scalar searches.
    double search_low() const noexcept;
    double search_high() const noexcept;

    std::string describe() const;

private:
    explicit LikelihoodModel(Params p) : params_(p) {}
    Params params_;
};

class FusionRule {
public:
    // Team decides 1 iff at least `votes_needed` of `team_size` votes are 1.
    FusionRule(int votes_needed, int team_size);

    int L() const noexcept { return votes_needed_; }
    int N() const noexcept { return team_size_; }
    bool is_or() const noexcept { return votes_needed_ == 1; }
    bool is_and() const noexcept { return votes_needed_ == team_size_; }
    bool is_unanimity() const noexcept { return is_or() || is_and(); }

    friend bool operator==(const FusionRule&, const FusionRule&) = default;

private:
    int votes_needed_;
    int team_size_;
};

// (Type I, Type II) = (false alarm, missed detection) probabilities.
struct ErrorPair {
    double pI = 0.0;
    double pII = 0.0;
};

// All four vote probabilities at a threshold, each computed from its own tail
// so that probabilities close to 1 keep full relative accuracy in the
// complement.
struct VoteProbabilities {
    double one_given0;   // Type I
    double zero_given0;
    double one_given1;
    double zero_given1;  // Type II

    double p_one(int hypothesis) const noexcept { return hypothesis == 0 ? one_given0 : one_given1; }
    double p_zero(int hypothesis) const noexcept { return hypothesis == 0 ? zero_given0 : zero_given1; }
    ErrorPair errors() const noexcept { return {one_given0, zero_given1}; }
};

// Weights of the two error events in the Bayes risk: c10*p0 and c01*p1.
// The ROC sweep uses (w, 1) directly.
struct RiskWeights {
    double false_alarm = 0.5;
    double miss = 0.5;

    static RiskWeights from(const Prior& prior, const CostModel& costs);
    double risk(const ErrorPair& team) const noexcept { return false_alarm * team.pI + miss * team.pII; }
};

struct RiskReport {
    double risk = 0.0;
    ErrorPair team;
    // Per-agent thresholds in acting order when the strategy has one threshold
    // per agent; empty for history-dependent policies.
    std::vector<double> thresholds;
};

double standard_normal_cdf(double x);
double standard_normal_quantile(double p);

double likelihood_ratio(const LikelihoodModel& model, double y);
double log_likelihood_ratio(const LikelihoodModel& model, double y);
double invert_lr(const LikelihoodModel& model, double target);
// invert_lr taking ln(target); avoids overflow for extreme ratios.
double invert_log_lr(const LikelihoodModel& model, double log_target);

ErrorPair local_error_pair(const LikelihoodModel& model, double threshold);
VoteProbabilities vote_probabilities(const LikelihoodModel& model, double threshold);

// Distribution of the number of ones among independent Bernoulli votes,
// result[k] = P{sum = k}, by iterative convolution.
std::vector<double> vote_count_distribution(std::span<const double> p_one);
// Same, with each complement supplied separately (p_zero[i] = 1 - p_one[i]
// computed without cancellation).
std::vector<double> vote_count_distribution(std::span<const double> p_one, std::span<const double> p_zero);

ErrorPair team_error_pair(std::span<const ErrorPair> locals, int votes_needed);
ErrorPair team_error_pair(std::span<const VoteProbabilities> locals, int votes_needed);

double bayes_risk(const Prior& prior, const CostModel& costs, const ErrorPair& team);

}  // namespace votefusion
