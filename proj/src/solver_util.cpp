#include "solver_util.hpp"

#include <Eigen/Dense>

namespace votefusion {

namespace {

struct Residual {
    std::vector<int> active;
    Eigen::VectorXd g;
    double norm = std::numeric_limits<double>::infinity();
};

Residual residual_at(const std::vector<double>& x, const BestResponseMap& F) {
    Residual r;
    auto fx = F(x);
    for (int i = 0; i < static_cast<int>(x.size()); ++i) {
        if (std::isfinite(x[i]) && std::isfinite(fx[i])) r.active.push_back(i);
    }
    r.g.resize(static_cast<Eigen::Index>(r.active.size()));
    r.norm = 0.0;
    for (std::size_t k = 0; k < r.active.size(); ++k) {
        int i = r.active[k];
        r.g[k] = x[i] - fx[i];
        r.norm = std::max(r.norm, std::fabs(r.g[k]) / std::max(1.0, std::fabs(x[i])));
    }
    // A coordinate whose best response jumped to an infinity is not near a
    // fixed point; Newton cannot help.
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isfinite(x[i]) && !std::isnan(fx[i]) && !std::isfinite(fx[i])) {
            r.norm = std::numeric_limits<double>::infinity();
        }
    }
    return r;
}

}  // namespace

bool newton_fixed_point(std::vector<double>& x, const BestResponseMap& F, double tolerance, int max_iterations) {
    Residual cur = residual_at(x, F);
    for (int it = 0; it < max_iterations && cur.norm > tolerance && std::isfinite(cur.norm); ++it) {
        const auto n = static_cast<Eigen::Index>(cur.active.size());
        if (n == 0) break;
        Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
        for (Eigen::Index c = 0; c < n; ++c) {
            const int j = cur.active[c];
            const double h = 1e-6 * std::max(1.0, std::fabs(x[j]));
            auto xp = x;
            auto xm = x;
            xp[j] += h;
            xm[j] -= h;
            auto fp = F(xp);
            auto fm = F(xm);
            for (Eigen::Index r = 0; r < n; ++r) {
                const int i = cur.active[r];
                double d = (fp[i] - fm[i]) / (2.0 * h);
                if (!std::isfinite(d)) d = 0.0;
                J(r, c) -= d;
            }
        }
        Eigen::VectorXd step = J.colPivHouseholderQr().solve(-cur.g);
        if (!step.allFinite()) break;

        bool improved = false;
        double scale = 1.0;
        for (int halving = 0; halving < 8; ++halving, scale *= 0.5) {
            auto trial = x;
            for (Eigen::Index k = 0; k < n; ++k) trial[cur.active[k]] += scale * step[k];
            Residual next = residual_at(trial, F);
            if (next.norm < cur.norm) {
                x = std::move(trial);
                cur = std::move(next);
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return cur.norm <= tolerance;
}

DescentOutcome coordinate_descent(std::vector<double>& x, const std::function<double(std::vector<double>&)>& sweep,
                                  const BestResponseMap& F, const std::function<double(const std::vector<double>&)>& risk,
                                  double tolerance, int max_sweeps, int polish_every) {
    DescentOutcome out;
    while (out.sweeps < max_sweeps) {
        ++out.sweeps;
        out.last_change = sweep(x);
        if (out.last_change < tolerance) {
            out.converged = true;
            break;
        }
        if (polish_every > 0 && out.sweeps % polish_every == 0) {
            auto trial = x;
            newton_fixed_point(trial, F);
            const double before = risk(x);
            const double after = risk(trial);
            if (after <= before + 8 * std::numeric_limits<double>::epsilon() * std::fabs(before)) x = std::move(trial);
        }
    }
    return out;
}

}  // namespace votefusion
