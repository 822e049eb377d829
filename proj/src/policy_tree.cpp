#include "policy_tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "solver_util.hpp"
#include "votefusion/errors.hpp"
#include "votefusion/secret.hpp"

namespace votefusion::detail {

namespace {

constexpr int kMaxTreeDepth = 20;

// Difference of a decision probability between the vote-1 and vote-0
// children, taken from whichever of the two complementary tables holds the
// smaller numbers.
double child_gap(double t1_c1, double t1_c0, double t0_c1, double t0_c0) {
    if (t1_c1 + t1_c0 <= t0_c1 + t0_c0) return t1_c1 - t1_c0;
    return t0_c0 - t0_c1;
}

}  // namespace

std::string bits_label(int depth, std::uint32_t bits) {
    if (depth == 0) return "-";
    std::string s;
    for (int j = 0; j < depth; ++j) s.push_back((bits >> j & 1u) ? '1' : '0');
    return s;
}

PolicyTree::PolicyTree(std::vector<LikelihoodModel> models_by_depth, FusionRule rule, RiskWeights weights,
                       std::vector<std::vector<int>> observed)
    : models_(std::move(models_by_depth)), rule_(rule), weights_(weights) {
    const int N = rule_.N();
    if (N > kMaxTreeDepth) throw ArgumentError("sequential voting supports at most 20 agents");
    if (static_cast<int>(models_.size()) != N || static_cast<int>(observed.size()) != N) {
        throw ArgumentError("models, observation lists and rule disagree on N");
    }
    offset_.assign(N + 1, 0);
    for (int d = 0; d < N; ++d) offset_[d + 1] = offset_[d] + (std::size_t{1} << observed[d].size());

    const std::size_t inner = (std::size_t{1} << N) - 1;
    pattern_.assign(inner, 0);
    relevant_.assign(size(), 0);
    for (int d = 0; d < N; ++d) {
        for (std::uint32_t bits = 0; bits < (1u << d); ++bits) {
            std::uint32_t p = 0;
            for (std::size_t k = 0; k < observed[d].size(); ++k) {
                if (bits >> observed[d][k] & 1u) p |= 1u << k;
            }
            pattern_[node_index(d, bits)] = p;
            if (!terminal(d, bits)) relevant_[offset_[d] + p] = 1;
        }
    }
    pi0_.assign(inner, 0.0);
    pi1_.assign(inner, 0.0);
    const std::size_t all = (std::size_t{1} << (N + 1)) - 1;
    t1_0_.assign(all, 0.0);
    t0_0_.assign(all, 0.0);
    t1_1_.assign(all, 0.0);
    t0_1_.assign(all, 0.0);
}

std::string PolicyTree::info_set_label(std::size_t flat) const {
    int d = 0;
    while (offset_[d + 1] <= flat) ++d;
    std::ostringstream os;
    os << "depth " << d << " pattern " << (flat - offset_[d]);
    return os.str();
}

bool PolicyTree::terminal(int depth, std::uint32_t bits) const {
    const int need = rule_.L() - std::popcount(bits);
    const int remaining = rule_.N() - depth;
    return need <= 0 || need > remaining;
}

bool PolicyTree::decides_one(int, std::uint32_t bits) const { return rule_.L() - std::popcount(bits) <= 0; }

void PolicyTree::evaluate(const std::vector<double>& x) {
    const int N = rule_.N();
    std::vector<VoteProbabilities> vps((std::size_t{1} << N) - 1, VoteProbabilities{0, 1, 0, 1});
    std::fill(pi0_.begin(), pi0_.end(), 0.0);
    std::fill(pi1_.begin(), pi1_.end(), 0.0);
    pi0_[0] = 1.0;
    pi1_[0] = 1.0;
    for (int d = 0; d < N; ++d) {
        for (std::uint32_t bits = 0; bits < (1u << d); ++bits) {
            if (terminal(d, bits)) continue;
            const std::size_t i = node_index(d, bits);
            vps[i] = vote_probabilities(models_[d], x[offset_[d] + pattern_[i]]);
            if (d + 1 == N) continue;
            const std::size_t c0 = node_index(d + 1, bits);
            const std::size_t c1 = node_index(d + 1, bits | 1u << d);
            pi0_[c1] = pi0_[i] * vps[i].one_given0;
            pi0_[c0] = pi0_[i] * vps[i].zero_given0;
            pi1_[c1] = pi1_[i] * vps[i].one_given1;
            pi1_[c0] = pi1_[i] * vps[i].zero_given1;
        }
    }
    for (int d = N; d >= 0; --d) {
        for (std::uint32_t bits = 0; bits < (1u << d); ++bits) {
            const std::size_t i = node_index(d, bits);
            if (terminal(d, bits)) {
                const double one = decides_one(d, bits) ? 1.0 : 0.0;
                t1_0_[i] = t1_1_[i] = one;
                t0_0_[i] = t0_1_[i] = 1.0 - one;
                continue;
            }
            const std::size_t c0 = node_index(d + 1, bits);
            const std::size_t c1 = node_index(d + 1, bits | 1u << d);
            const auto& v = vps[i];
            t1_0_[i] = v.one_given0 * t1_0_[c1] + v.zero_given0 * t1_0_[c0];
            t0_0_[i] = v.one_given0 * t0_0_[c1] + v.zero_given0 * t0_0_[c0];
            t1_1_[i] = v.one_given1 * t1_1_[c1] + v.zero_given1 * t1_1_[c0];
            t0_1_[i] = v.one_given1 * t0_1_[c1] + v.zero_given1 * t0_1_[c0];
        }
    }
}

std::vector<std::pair<double, double>> PolicyTree::coefficients(int depth) const {
    std::vector<std::pair<double, double>> ab(patterns(depth), {0.0, 0.0});
    for (std::uint32_t bits = 0; bits < (1u << depth); ++bits) {
        if (terminal(depth, bits)) continue;
        const std::size_t i = node_index(depth, bits);
        if (pi0_[i] == 0.0 && pi1_[i] == 0.0) continue;
        const std::size_t c0 = node_index(depth + 1, bits);
        const std::size_t c1 = node_index(depth + 1, bits | 1u << depth);
        auto& [a, b] = ab[pattern_[i]];
        a += weights_.false_alarm * pi0_[i] * child_gap(t1_0_[c1], t1_0_[c0], t0_0_[c1], t0_0_[c0]);
        b += weights_.miss * pi1_[i] * child_gap(t1_1_[c1], t1_1_[c0], t0_1_[c1], t0_1_[c0]);
    }
    return ab;
}

void PolicyTree::best_respond(int depth, std::vector<double>& x) const {
    auto ab = coefficients(depth);
    for (std::uint32_t s = 0; s < ab.size(); ++s) {
        double& t = x[offset_[depth] + s];
        t = lrt_best_response(models_[depth], ab[s].first, ab[s].second, t);
    }
}

std::vector<double> PolicyTree::jacobi(const std::vector<double>& x) {
    evaluate(x);
    std::vector<double> out(x.size());
    for (int d = 0; d < rule_.N(); ++d) {
        auto ab = coefficients(d);
        for (std::uint32_t s = 0; s < ab.size(); ++s) {
            const std::size_t k = offset_[d] + s;
            const auto [a, b] = ab[s];
            out[k] = (a == 0.0 && b == 0.0) ? std::numeric_limits<double>::quiet_NaN()
                                            : lrt_best_response(models_[d], a, b, x[k]);
        }
    }
    return out;
}

TreeDescent descend(PolicyTree& tree, std::vector<double>& x, double tolerance, int max_sweeps) {
    TreeDescent result;
    const int N = tree.depths();
    int sweep_count = 0;
    auto sweep = [&](std::vector<double>& thr) {
        double max_change = 0.0;
        const bool backward = sweep_count++ == 0;
        for (int k = 0; k < N; ++k) {
            const int d = backward ? N - 1 - k : k;
            tree.evaluate(thr);
            const std::size_t lo = tree.offset(d);
            std::vector<double> before(thr.begin() + lo, thr.begin() + lo + tree.patterns(d));
            tree.best_respond(d, thr);
            for (std::uint32_t s = 0; s < before.size(); ++s) {
                double c = threshold_change(before[s], thr[lo + s]);
                if (c > max_change) {
                    max_change = c;
                    result.worst = lo + s;
                }
            }
        }
        return max_change;
    };
    auto F = [&](const std::vector<double>& thr) { return tree.jacobi(thr); };
    auto risk = [&](const std::vector<double>& thr) {
        tree.evaluate(thr);
        return tree.risk();
    };
    auto outcome = coordinate_descent(x, sweep, F, risk, tolerance, max_sweeps);
    result.sweeps = outcome.sweeps;
    result.converged = outcome.converged;
    result.last_change = outcome.last_change;
    tree.evaluate(x);
    return result;
}

MultistartResult multistart(PolicyTree& tree, std::span<const LikelihoodModel> models, const std::vector<int>& ordering,
                            const SolverOptions& options, bool secret_start) {
    const int N = tree.depths();
    auto spread = [&](const std::vector<double>& by_agent) {
        std::vector<double> x(tree.size());
        for (int d = 0; d < N; ++d) {
            std::fill(x.begin() + tree.offset(d), x.begin() + tree.offset(d) + tree.patterns(d), by_agent[ordering[d]]);
        }
        return x;
    };
    std::vector<std::pair<int, std::vector<double>>> starts;
    if (secret_start) {
        try {
            starts.emplace_back(0, spread(optimal_secret_thresholds(tree.weights(), models, tree.rule(), options).thresholds));
        } catch (const SolverError&) {
        }
    }
    auto q = multistart_points(models);
    for (std::size_t s = 0; s < q.size(); ++s) starts.emplace_back(static_cast<int>(s) + 1, spread(q[s]));

    MultistartResult result;
    result.worst_change = std::numeric_limits<double>::infinity();
    double best_risk = std::numeric_limits<double>::infinity();
    for (auto& [index, x] : starts) {
        auto outcome = descend(tree, x, options.tolerance, options.max_sweeps);
        if (!outcome.converged) {
            if (outcome.last_change < result.worst_change || result.worst_x.empty()) {
                result.worst_change = outcome.last_change;
                result.worst_set = outcome.worst;
                result.worst_x = x;
            }
            continue;
        }
        const double r = tree.risk();
        if (result.x.empty() || r < best_risk - 1e-12 * std::max(1.0, std::fabs(best_risk))) {
            best_risk = r;
            result.x = x;
            result.sweeps = outcome.sweeps;
            result.start_index = index;
        }
    }
    if (!result.x.empty()) tree.evaluate(result.x);
    return result;
}

}  // namespace votefusion::detail
