#include "votefusion/secret.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "votefusion/errors.hpp"
#include "solver_util.hpp"

namespace votefusion {

namespace {

double scaled_log(int k, double p) { return k == 0 ? 0.0 : k * std::log(p); }

ErrorPair identical_team_errors(const LikelihoodModel& model, double threshold, const FusionRule& rule) {
    std::vector<VoteProbabilities> vps(rule.N(), vote_probabilities(model, threshold));
    return team_error_pair(std::span<const VoteProbabilities>(vps), rule.L());
}

// ln LR(t) - ln(stationarity target at t) for identical thresholds. The team
// risk decreases in t where this is negative and increases where positive.
double identical_stationarity_gap(const RiskWeights& w, const LikelihoodModel& model, const FusionRule& rule,
                                  double t) {
    const int L = rule.L();
    const int N = rule.N();
    auto vp = vote_probabilities(model, t);
    double target = std::log(w.false_alarm) + scaled_log(L - 1, vp.one_given0) + scaled_log(N - L, vp.zero_given0) -
                    std::log(w.miss) - scaled_log(N - L, vp.zero_given1) - scaled_log(L - 1, vp.one_given1);
    return log_likelihood_ratio(model, t) - target;
}

}  // namespace

double lrt_best_response(const LikelihoodModel& model, double a, double b, double current) {
    if (a <= 0.0 && b <= 0.0) {
        if (a == 0.0 && b == 0.0) return current;
        // Concave in the error pair along the threshold path: an endpoint wins.
        return a <= b ? -kInf : kInf;
    }
    if (a <= 0.0) return -kInf;
    if (b <= 0.0) return kInf;
    const double log_target = std::log(a) - std::log(b);
    if (!(log_target > std::log(model.lr_min()))) return -kInf;
    if (!std::isfinite(log_target)) return log_target > 0 ? kInf : -kInf;
    return invert_log_lr(model, log_target);
}

double threshold_for_false_alarm(const LikelihoodModel& model, double false_alarm) {
    if (!(false_alarm > 0.0 && false_alarm < 1.0)) throw ArgumentError("false alarm level must lie in (0,1)");
    if (const auto* g = std::get_if<GaussianShift>(&model.params())) {
        return -std::sqrt(g->variance) * standard_normal_quantile(false_alarm);
    }
    const auto& e = std::get<ExponentialRates>(model.params());
    return -std::log(false_alarm) / e.rate0;
}

std::vector<std::vector<double>> quantile_starts(std::span<const LikelihoodModel> models) {
    static constexpr double levels[] = {0.9, 0.7, 0.5, 0.3, 0.1};
    std::vector<std::vector<double>> starts;
    for (double q : levels) {
        std::vector<double> s;
        s.reserve(models.size());
        for (const auto& m : models) s.push_back(threshold_for_false_alarm(m, q));
        starts.push_back(std::move(s));
    }
    return starts;
}

std::vector<std::vector<double>> multistart_points(std::span<const LikelihoodModel> models) {
    auto starts = quantile_starts(models);
    const auto middle = starts[2];
    for (std::size_t n = 0; n < models.size(); ++n) {
        for (double pin : {kInf, -kInf}) {
            auto s = middle;
            s[n] = pin;
            starts.push_back(std::move(s));
        }
    }
    return starts;
}

ErrorPair secret_team_errors(std::span<const LikelihoodModel> models, std::span<const double> thresholds,
                             const FusionRule& rule) {
    if (models.size() != thresholds.size() || static_cast<int>(models.size()) != rule.N()) {
        throw ArgumentError("secret_team_errors: models, thresholds and rule disagree on N");
    }
    std::vector<VoteProbabilities> vps;
    vps.reserve(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) vps.push_back(vote_probabilities(models[i], thresholds[i]));
    return team_error_pair(std::span<const VoteProbabilities>(vps), rule.L());
}

SecretSolution optimal_identical_threshold(const Prior& prior, const CostModel& costs, const LikelihoodModel& model,
                                           const FusionRule& rule, const SolverOptions& options) {
    prior.require_nondegenerate();
    return optimal_identical_threshold(RiskWeights::from(prior, costs), model, rule, options);
}

SecretSolution optimal_identical_threshold(const RiskWeights& weights, const LikelihoodModel& model,
                                           const FusionRule& rule, const SolverOptions& options) {
    if (!(weights.false_alarm > 0.0) || !(weights.miss > 0.0)) {
        throw ArgumentError("risk weights must be strictly positive");
    }
    auto risk_at = [&](double t) { return weights.risk(identical_team_errors(model, t, rule)); };

    // Coarse grid for the basin of the global minimum.
    const int G = std::max(options.grid_points, 16);
    const double lo = model.search_low();
    const double hi = model.search_high();
    const double step = (hi - lo) / (G - 1);
    int best_i = 0;
    double best_r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < G; ++i) {
        double r = risk_at(lo + i * step);
        if (r < best_r) {
            best_r = r;
            best_i = i;
        }
    }
    const double a = lo + std::max(best_i - 1, 0) * step;
    const double b = lo + std::min(best_i + 1, G - 1) * step;

    // Brent (golden section with parabolic steps) on the risk.
    auto [t_brent, r_brent] =
        boost::math::tools::brent_find_minima(risk_at, a, b, std::numeric_limits<double>::digits / 2);

    // Polish: the risk is flat to second order at the minimum, so locate the
    // stationary point as a sign change of the stationarity gap instead.
    double t_best = t_brent;
    double r_best = r_brent;
    auto gap = [&](double t) { return identical_stationarity_gap(weights, model, rule, t); };
    double ga = gap(a);
    double gb = gap(b);
    if (ga < 0.0 && gb > 0.0) {
        auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
        auto [x0, x1] = boost::math::tools::bisect(gap, a, b, tol);
        double t_polish = 0.5 * (x0 + x1);
        double r_polish = risk_at(t_polish);
        if (r_polish <= r_best + 64 * std::numeric_limits<double>::epsilon() * r_best) {
            t_best = t_polish;
            r_best = r_polish;
        }
    }
    for (double t_inf : {-kInf, kInf}) {
        double r = risk_at(t_inf);
        if (r < r_best) {
            r_best = r;
            t_best = t_inf;
        }
    }

    SecretSolution sol;
    sol.thresholds.assign(rule.N(), t_best);
    sol.team = identical_team_errors(model, t_best, rule);
    sol.risk = weights.risk(sol.team);
    double residual = 0.0;
    if (std::isfinite(t_best)) residual = std::fabs(std::expm1(gap(t_best)));
    sol.residuals.assign(rule.N(), residual);
    return sol;
}

SecretSolution optimal_secret_thresholds(const Prior& prior, const CostModel& costs,
                                         std::span<const LikelihoodModel> models, const FusionRule& rule,
                                         const SolverOptions& options) {
    prior.require_nondegenerate();
    return optimal_secret_thresholds(RiskWeights::from(prior, costs), models, rule, options);
}

SecretSolution optimal_secret_thresholds(const RiskWeights& weights, std::span<const LikelihoodModel> models,
                                         const FusionRule& rule, const SolverOptions& options) {
    const int N = rule.N();
    const int L = rule.L();
    if (static_cast<int>(models.size()) != N) throw ArgumentError("number of models must equal rule N");
    if (!(weights.false_alarm > 0.0) || !(weights.miss > 0.0)) {
        throw ArgumentError("risk weights must be strictly positive");
    }

    // Coefficients of agent n's (pI, pII) in the team risk: the agent is
    // pivotal exactly when the others cast L-1 ones.
    auto pivot_weights = [&](const std::vector<VoteProbabilities>& vps, int n) {
        std::vector<double> one0, zero0, one1, zero1;
        for (int m = 0; m < N; ++m) {
            if (m == n) continue;
            one0.push_back(vps[m].one_given0);
            zero0.push_back(vps[m].zero_given0);
            one1.push_back(vps[m].one_given1);
            zero1.push_back(vps[m].zero_given1);
        }
        auto d0 = vote_count_distribution(one0, zero0);
        auto d1 = vote_count_distribution(one1, zero1);
        return std::pair{weights.false_alarm * d0[L - 1], weights.miss * d1[L - 1]};
    };

    auto sweep = [&](std::vector<double>& thr) {
        std::vector<VoteProbabilities> vps;
        for (int n = 0; n < N; ++n) vps.push_back(vote_probabilities(models[n], thr[n]));
        double max_change = 0.0;
        for (int n = 0; n < N; ++n) {
            auto [a, b] = pivot_weights(vps, n);
            double t = lrt_best_response(models[n], a, b, thr[n]);
            max_change = std::max(max_change, threshold_change(thr[n], t));
            thr[n] = t;
            vps[n] = vote_probabilities(models[n], t);
        }
        return max_change;
    };
    auto jacobi = [&](const std::vector<double>& thr) {
        std::vector<VoteProbabilities> vps;
        for (int n = 0; n < N; ++n) vps.push_back(vote_probabilities(models[n], thr[n]));
        std::vector<double> out(N);
        for (int n = 0; n < N; ++n) {
            auto [a, b] = pivot_weights(vps, n);
            out[n] = (a == 0.0 && b == 0.0) ? std::numeric_limits<double>::quiet_NaN()
                                            : lrt_best_response(models[n], a, b, thr[n]);
        }
        return out;
    };
    auto risk_of = [&](const std::vector<double>& thr) { return weights.risk(secret_team_errors(models, thr, rule)); };

    SecretSolution best;
    best.risk = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    double best_unconverged_change = std::numeric_limits<double>::infinity();
    std::vector<double> best_unconverged;

    const auto starts = multistart_points(models);
    for (std::size_t s = 0; s < starts.size(); ++s) {
        std::vector<double> thr = starts[s];
        auto outcome = coordinate_descent(thr, sweep, jacobi, risk_of, options.tolerance, options.max_sweeps);
        if (!outcome.converged) {
            if (outcome.last_change < best_unconverged_change) {
                best_unconverged_change = outcome.last_change;
                best_unconverged = thr;
            }
            continue;
        }
        any_converged = true;
        ErrorPair team = secret_team_errors(models, thr, rule);
        double risk = weights.risk(team);
        if (risk < best.risk) {
            best.thresholds = thr;
            best.team = team;
            best.risk = risk;
            best.sweeps = outcome.sweeps;
            best.start_index = static_cast<int>(s);
        }
    }
    if (!any_converged) {
        std::ostringstream os;
        os << "secret coordinate descent did not converge in " << options.max_sweeps
           << " sweeps (last max change " << best_unconverged_change << ")";
        throw SolverError(os.str(), best_unconverged);
    }

    std::vector<VoteProbabilities> vps;
    for (int n = 0; n < N; ++n) vps.push_back(vote_probabilities(models[n], best.thresholds[n]));
    best.residuals.assign(N, 0.0);
    for (int n = 0; n < N; ++n) {
        auto [a, b] = pivot_weights(vps, n);
        if (std::isfinite(best.thresholds[n]) && a > 0.0 && b > 0.0) {
            double log_target = std::log(a) - std::log(b);
            best.residuals[n] = std::fabs(std::expm1(log_likelihood_ratio(models[n], best.thresholds[n]) - log_target));
        }
    }
    return best;
}

}  // namespace votefusion
