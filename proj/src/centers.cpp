#include "kscale/centers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kscale/error.hpp"
#include "kscale/metric.hpp"

namespace kscale {

double center_objective(std::span<const double> values, double mu, double p) {
    double sum = 0.0;
    for (const double y : values) sum += abs_pow(y - mu, p);
    return sum;
}

namespace {

double median_of(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lower + upper);
}

// First derivative of gamma divided by p, and second derivative divided by p.
// The second is +inf when mu sits on a data point and p < 2.
struct Slope {
    double first;
    double second;
};

Slope slope_at(std::span<const double> values, double mu, double p) {
    double g = 0.0, h = 0.0;
    for (const double y : values) {
        const double d = mu - y;
        const double a = std::fabs(d);
        if (a == 0.0) {
            if (p < 2.0) h = std::numeric_limits<double>::infinity();
            else if (p == 2.0) h += 1.0;
            continue;
        }
        const double t = p == 2.0 ? 1.0 : std::pow(a, p - 2.0);
        g += d * t;  // sign(d) |d|^(p-1)
        h += t;
    }
    return {g, (p - 1.0) * h};
}

double solve_bracketing(std::span<const double> values, double p, double lo, double hi, double start,
                        const CenterSolverConfig& cfg) {
    const double tol = cfg.abs_tolerance * 1e-3;
    double x = start;
    double last_step = hi - lo;
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        const Slope s = slope_at(values, x, p);
        if (s.first == 0.0) return x;
        if (s.first > 0.0) hi = x;
        else lo = x;
        if (hi - lo <= tol) return 0.5 * (lo + hi);

        double next = 0.5 * (lo + hi);
        if (std::isfinite(s.second) && s.second > 0.0) {
            const double newton = x - s.first / s.second;
            // Accept Newton only inside the bracket and while it keeps shrinking the step.
            if (newton > lo && newton < hi && std::fabs(newton - x) <= 0.5 * last_step) next = newton;
        }
        const double step = std::fabs(next - x);
        if (step <= tol) {
            // A tiny Newton step only means convergence if the root is really bracketed nearby.
            const double left = std::max(lo, next - tol), right = std::min(hi, next + tol);
            const bool left_ok = left == lo || slope_at(values, left, p).first <= 0.0;
            const bool right_ok = right == hi || slope_at(values, right, p).first >= 0.0;
            if (left_ok && right_ok) return next;
            next = 0.5 * (lo + hi);
        }
        last_step = std::fabs(next - x);
        x = next;
    }
    throw numerical_error("minkowski_center: no convergence within " + std::to_string(cfg.max_iterations) +
                          " iterations");
}

double solve_fixed_step(std::span<const double> values, double p, double mean, const CenterSolverConfig& cfg) {
    double mu = mean;
    double best = center_objective(values, mu, p);
    const double step = cfg.descent_step;
    int direction = 0;
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        if (direction >= 0) {
            const double right = center_objective(values, mu + step, p);
            if (right < best) {
                mu += step;
                best = right;
                direction = 1;
                continue;
            }
        }
        if (direction <= 0) {
            const double left = center_objective(values, mu - step, p);
            if (left < best) {
                mu -= step;
                best = left;
                direction = -1;
                continue;
            }
        }
        return mu;
    }
    throw numerical_error("minkowski_center: fixed-step descent hit the iteration cap");
}

}  // namespace

double minkowski_center(std::span<const double> values, double p, const CenterSolverConfig& cfg,
                        std::optional<double> hint) {
    if (values.empty()) throw usage_error("minkowski_center: empty value list");
    validate_exponent(p);
    if (!(cfg.abs_tolerance > 0.0)) throw usage_error("center solver tolerance must be positive");
    if (values.size() == 1) return values.front();

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (lo == hi) return lo;

    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (p == 2.0) return std::clamp(mean, lo, hi);
    if (p == 1.0) return median_of(values);

    if (cfg.method == CenterMethod::fixed_step) return solve_fixed_step(values, p, mean, cfg);

    double start = std::clamp(mean, lo, hi);
    if (hint && *hint > lo && *hint < hi) start = *hint;
    return std::clamp(solve_bracketing(values, p, lo, hi, start, cfg), lo, hi);
}

std::vector<double> cluster_centroid(const DataMatrix& data, std::span<const std::size_t> members, double p,
                                     const CenterSolverConfig& cfg, std::span<const double> hint) {
    if (members.empty()) throw usage_error("cluster_centroid: empty member set");
    const std::size_t nv = data.n_features();
    std::vector<double> centroid(nv);
    std::vector<double> column(members.size());
    for (std::size_t v = 0; v < nv; ++v) {
        for (std::size_t m = 0; m < members.size(); ++m) column[m] = data(members[m], v);
        std::optional<double> h;
        if (hint.size() == nv) h = hint[v];
        centroid[v] = minkowski_center(column, p, cfg, h);
    }
    return centroid;
}

}  // namespace kscale
