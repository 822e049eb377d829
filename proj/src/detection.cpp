#include "votefusion/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "votefusion/errors.hpp"

namespace votefusion {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// Upper-tail probability P{Z >= z} of a standard normal.
double normal_upper(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

constexpr double kTailQuantile = 8.8;  // Q(8.8) ~ 7e-19

}  // namespace

Prior::Prior(double p0) : p0_(p0) {
    if (!(p0 >= 0.0 && p0 <= 1.0)) {
        throw ArgumentError("prior p0 must lie in [0,1]");
    }
}

void Prior::require_nondegenerate() const {
    if (!(p0_ > 0.0 && p0_ < 1.0)) {
        throw ArgumentError("prior p0 must lie strictly inside (0,1)");
    }
}

CostModel::CostModel(double false_alarm, double missed_detection)
    : c10_(false_alarm), c01_(missed_detection) {
    if (!(c10_ > 0.0) || !(c01_ > 0.0) || !std::isfinite(c10_) || !std::isfinite(c01_)) {
        throw ArgumentError("costs c10 and c01 must be finite and strictly positive");
    }
}

LikelihoodModel LikelihoodModel::gaussian(double variance) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw ArgumentError("gaussian variance must be finite and positive");
    }
    return LikelihoodModel(GaussianShift{variance});
}

LikelihoodModel LikelihoodModel::exponential(double rate0, double rate1) {
    if (!(rate1 > 0.0) || !(rate0 > rate1) || !std::isfinite(rate0)) {
        throw ArgumentError("exponential rates must satisfy rate0 > rate1 > 0");
    }
    return LikelihoodModel(ExponentialRates{rate0, rate1});
}

double LikelihoodModel::support_min() const noexcept {
    return is_gaussian() ? -kInf : 0.0;
}

double LikelihoodModel::lr_min() const noexcept {
    return std::visit(overloaded{[](const GaussianShift&) { return 0.0; },
                                 [](const ExponentialRates& e) { return e.rate1 / e.rate0; }},
                      params_);
}

double LikelihoodModel::lr_max() const noexcept { return kInf; }

double LikelihoodModel::search_low() const noexcept {
    return std::visit(overloaded{[](const GaussianShift& g) { return 1.0 - kTailQuantile * std::sqrt(g.variance); },
                                 [](const ExponentialRates&) { return 0.0; }},
                      params_);
}

double LikelihoodModel::search_high() const noexcept {
    return std::visit(overloaded{[](const GaussianShift& g) { return kTailQuantile * std::sqrt(g.variance); },
                                 [](const ExponentialRates& e) { return 41.5 / e.rate0; }},
                      params_);
}

std::string LikelihoodModel::describe() const {
    std::ostringstream os;
    std::visit(overloaded{[&](const GaussianShift& g) { os << "gaussian(variance=" << g.variance << ")"; },
                          [&](const ExponentialRates& e) {
                              os << "exponential(rate0=" << e.rate0 << ", rate1=" << e.rate1 << ")";
                          }},
               params_);
    return os.str();
}

FusionRule::FusionRule(int votes_needed, int team_size) : votes_needed_(votes_needed), team_size_(team_size) {
    if (team_size < 1 || votes_needed < 1 || votes_needed > team_size) {
        throw ArgumentError("fusion rule requires 1 <= L <= N");
    }
}

RiskWeights RiskWeights::from(const Prior& prior, const CostModel& costs) {
    return {costs.c10() * prior.p0(), costs.c01() * prior.p1()};
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Acklam's rational approximation, then two Halley steps against
// standard_normal_cdf so that sampling and analytic tails agree.
double standard_normal_quantile(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("normal quantile needs p in [0,1]");
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double plow = 0.02425;

    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    for (int i = 0; i < 2; ++i) {
        // Work in the smaller tail to keep the residual accurate.
        double e = x < 0.0 ? standard_normal_cdf(x) - p : (1.0 - p) - normal_upper(x);
        double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        if (!std::isfinite(u)) break;
        x = x - u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double likelihood_ratio(const LikelihoodModel& model, double y) { return std::exp(log_likelihood_ratio(model, y)); }

double log_likelihood_ratio(const LikelihoodModel& model, double y) {
    return std::visit(overloaded{[&](const GaussianShift& g) {
                                     if (std::isnan(y)) throw DomainError("likelihood ratio at NaN");
                                     return (2.0 * y - 1.0) / (2.0 * g.variance);
                                 },
                                 [&](const ExponentialRates& e) {
                                     if (!(y >= 0.0)) throw DomainError("exponential signal must be nonnegative");
                                     return std::log(e.rate1 / e.rate0) + (e.rate0 - e.rate1) * y;
                                 }},
                      model.params());
}

double invert_lr(const LikelihoodModel& model, double target) {
    if (!(target > 0.0) || !std::isfinite(target)) {
        throw RangeError("likelihood ratio target must be finite and positive");
    }
    return invert_log_lr(model, std::log(target));
}

double invert_log_lr(const LikelihoodModel& model, double log_target) {
    if (!std::isfinite(log_target)) throw RangeError("log likelihood ratio target must be finite");
    return std::visit(overloaded{[&](const GaussianShift& g) { return g.variance * log_target + 0.5; },
                                 [&](const ExponentialRates& e) {
                                     double log_floor = std::log(e.rate1 / e.rate0);
                                     if (log_target < log_floor) {
                                         throw RangeError("target below the exponential model's likelihood ratio range");
                                     }
                                     return (log_target - log_floor) / (e.rate0 - e.rate1);
                                 }},
                      model.params());
}

VoteProbabilities vote_probabilities(const LikelihoodModel& model, double threshold) {
    if (std::isnan(threshold)) throw DomainError("threshold is NaN");
    if (threshold == kInf) return {0.0, 1.0, 0.0, 1.0};
    if (threshold == -kInf) return {1.0, 0.0, 1.0, 0.0};
    return std::visit(
        overloaded{[&](const GaussianShift& g) {
                       double s = std::sqrt(g.variance);
                       double z0 = threshold / s;
                       double z1 = (threshold - 1.0) / s;
                       return VoteProbabilities{normal_upper(z0), normal_upper(-z0), normal_upper(z1),
                                                normal_upper(-z1)};
                   },
                   [&](const ExponentialRates& e) {
                       if (threshold <= 0.0) return VoteProbabilities{1.0, 0.0, 1.0, 0.0};
                       return VoteProbabilities{std::exp(-e.rate0 * threshold), -std::expm1(-e.rate0 * threshold),
                                                std::exp(-e.rate1 * threshold), -std::expm1(-e.rate1 * threshold)};
                   }},
        model.params());
}

ErrorPair local_error_pair(const LikelihoodModel& model, double threshold) {
    return vote_probabilities(model, threshold).errors();
}

std::vector<double> vote_count_distribution(std::span<const double> p_one) {
    std::vector<double> p_zero(p_one.size());
    std::transform(p_one.begin(), p_one.end(), p_zero.begin(), [](double p) { return 1.0 - p; });
    return vote_count_distribution(p_one, p_zero);
}

std::vector<double> vote_count_distribution(std::span<const double> p_one, std::span<const double> p_zero) {
    if (p_one.size() != p_zero.size()) throw ArgumentError("vote_count_distribution: size mismatch");
    std::vector<double> dist(p_one.size() + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t n = 1; n <= p_one.size(); ++n) {
        const double p = p_one[n - 1];
        const double q = p_zero[n - 1];
        for (std::size_t k = n; k > 0; --k) {
            dist[k] = dist[k] * q + dist[k - 1] * p;
        }
        dist[0] *= q;
    }
    return dist;
}

ErrorPair team_error_pair(std::span<const ErrorPair> locals, int votes_needed) {
    const int n = static_cast<int>(locals.size());
    if (votes_needed < 1 || votes_needed > n) {
        throw ArgumentError("team_error_pair requires 1 <= L <= number of agents");
    }
    for (const auto& e : locals) {
        if (!(e.pI >= 0.0 && e.pI <= 1.0 && e.pII >= 0.0 && e.pII <= 1.0)) {
            throw ArgumentError("local error probabilities must lie in [0,1]");
        }
    }
    // Under H=0 count false alarms; under H=1 count misses. The team errs
    // under H=0 with >= L ones and under H=1 with >= N-L+1 zeros.
    std::vector<double> p_alarm(n), p_miss(n);
    for (int i = 0; i < n; ++i) {
        p_alarm[i] = locals[i].pI;
        p_miss[i] = locals[i].pII;
    }
    auto alarms = vote_count_distribution(p_alarm);
    auto misses = vote_count_distribution(p_miss);
    ErrorPair team;
    for (int k = votes_needed; k <= n; ++k) team.pI += alarms[k];
    for (int k = n - votes_needed + 1; k <= n; ++k) team.pII += misses[k];
    team.pI = std::min(team.pI, 1.0);
    team.pII = std::min(team.pII, 1.0);
    return team;
}

ErrorPair team_error_pair(std::span<const VoteProbabilities> locals, int votes_needed) {
    const int n = static_cast<int>(locals.size());
    if (votes_needed < 1 || votes_needed > n) {
        throw ArgumentError("team_error_pair requires 1 <= L <= number of agents");
    }
    std::vector<double> alarm(n), no_alarm(n), miss(n), hit(n);
    for (int i = 0; i < n; ++i) {
        alarm[i] = locals[i].one_given0;
        no_alarm[i] = locals[i].zero_given0;
        miss[i] = locals[i].zero_given1;
        hit[i] = locals[i].one_given1;
    }
    auto alarms = vote_count_distribution(alarm, no_alarm);
    auto misses = vote_count_distribution(miss, hit);
    ErrorPair team;
    for (int k = votes_needed; k <= n; ++k) team.pI += alarms[k];
    for (int k = n - votes_needed + 1; k <= n; ++k) team.pII += misses[k];
    team.pI = std::min(team.pI, 1.0);
    team.pII = std::min(team.pII, 1.0);
    return team;
}

double bayes_risk(const Prior& prior, const CostModel& costs, const ErrorPair& team) {
    return RiskWeights::from(prior, costs).risk(team);
}

}  // namespace votefusion
