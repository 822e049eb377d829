#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace votefusion {

// Change between two thresholds, relative for large magnitudes. Equal
// infinities count as no change.
inline double threshold_change(double before, double after) {
    if (before == after) return 0.0;
    if (!std::isfinite(before) || !std::isfinite(after)) return std::numeric_limits<double>::infinity();
    return std::fabs(after - before) / std::max(1.0, std::fabs(before));
}

// Simultaneous best-response map: out[i] is coordinate i's best response to
// x, or NaN when coordinate i does not affect the objective.
using BestResponseMap = std::function<std::vector<double>(const std::vector<double>&)>;

// Newton iteration on x - F(x) = 0 over the coordinates where both x and F(x)
// are finite, with a central-difference Jacobian. Returns true if the
// residual dropped below `tolerance`; x holds the best iterate either way.
bool newton_fixed_point(std::vector<double>& x, const BestResponseMap& F, double tolerance = 1e-13,
                        int max_iterations = 30);

struct DescentOutcome {
    int sweeps = 0;
    bool converged = false;
    double last_change = std::numeric_limits<double>::infinity();
};

// Gauss-Seidel best-response sweeps on x until the largest per-coordinate
// change drops below `tolerance` or `max_sweeps` is reached. Every
// `polish_every` sweeps a Newton step on the fixed-point condition is tried
// and kept only if it does not raise the objective.
//   sweep(x)  -> performs one sweep in place, returns the max change
//   F         -> simultaneous best responses (for Newton)
//   risk(x)   -> objective
DescentOutcome coordinate_descent(std::vector<double>& x, const std::function<double(std::vector<double>&)>& sweep,
                                  const BestResponseMap& F, const std::function<double(const std::vector<double>&)>& risk,
                                  double tolerance, int max_sweeps, int polish_every = 15);

}  // namespace votefusion
