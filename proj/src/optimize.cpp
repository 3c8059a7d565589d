#include "actukit/optimize.hpp"

#include "actukit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace actukit::opt {

namespace {

double safe_eval(const Objective& f, std::span<const double> x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

} // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadSettings& s) {
    const std::size_t n = x0.size();
    if (n == 0) throw ConfigError("Nelder-Mead needs at least one parameter");

    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += s.initial_step;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = safe_eval(f, pts[i]);

    std::vector<std::size_t> order(n + 1);
    NelderMeadResult r;
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    const auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };
    const auto size_ok = [&] {
        const auto& best = pts[order[0]];
        double scale = 1.0, spread = 0.0;
        for (double v : best) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t d = 0; d < n; ++d) spread = std::max(spread, std::abs(pts[order[i]][d] - best[d]));
        return spread / scale < s.tol;
    };

    int it = 0;
    sort_simplex();
    while (it < s.max_iter) {
        if (size_ok()) {
            r.converged = true;
            break;
        }
        ++it;
        const std::size_t worst = order[n];
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[order[i]][d];
        for (auto& c : centroid) c /= static_cast<double>(n);

        for (std::size_t d = 0; d < n; ++d) xr[d] = centroid[d] + (centroid[d] - pts[worst][d]);
        const double fr = safe_eval(f, xr);
        const double fbest = fv[order[0]];
        const double fsecond = fv[order[n - 1]];

        if (fr < fbest) {
            for (std::size_t d = 0; d < n; ++d) xe[d] = centroid[d] + 2.0 * (centroid[d] - pts[worst][d]);
            const double fe = safe_eval(f, xe);
            if (fe < fr) {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fsecond) {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            for (std::size_t d = 0; d < n; ++d)
                xc[d] = outside ? centroid[d] + 0.5 * (xr[d] - centroid[d])
                                : centroid[d] + 0.5 * (pts[worst][d] - centroid[d]);
            const double fc = safe_eval(f, xc);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                const auto best = pts[order[0]];
                for (std::size_t i = 1; i <= n; ++i) {
                    auto& p = pts[order[i]];
                    for (std::size_t d = 0; d < n; ++d) p[d] = best[d] + 0.5 * (p[d] - best[d]);
                    fv[order[i]] = safe_eval(f, p);
                }
            }
        }
        sort_simplex();
    }
    if (!r.converged && size_ok()) r.converged = true;
    r.x = pts[order[0]];
    r.f = fv[order[0]];
    r.iterations = it;
    return r;
}

TwoStageResult two_stage_minimize(const Objective& f, std::span<const double> lower, std::span<const double> upper,
                                  const TwoStageSettings& s) {
    if (lower.size() != upper.size() || lower.empty()) throw ConfigError("grid bounds mismatch");
    if (s.grid_points < 2) throw ConfigError("grid needs at least two points per axis");
    std::vector<std::vector<double>> axes(lower.size());
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < lower.size(); ++d) {
        if (!(upper[d] > lower[d])) throw ConfigError("grid upper bound must exceed lower bound");
        const double h = (upper[d] - lower[d]) / (s.grid_points - 1);
        spacing = std::min(spacing, h);
        axes[d].resize(static_cast<std::size_t>(s.grid_points));
        for (int k = 0; k < s.grid_points; ++k) axes[d][static_cast<std::size_t>(k)] = lower[d] + h * k;
    }
    const auto values = kernels::evaluate_grid(f, axes, s.exec);
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto n_starts = std::min(order.size(), static_cast<std::size_t>(std::max(1, s.starts)));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_starts), order.end(),
                      [&](std::size_t a, std::size_t b) { return values[a] < values[b] || (values[a] == values[b] && a < b); });

    TwoStageResult r;
    r.grid_x = kernels::grid_point(axes, order.front());
    r.grid_f = values[order.front()];
    if (!std::isfinite(r.grid_f)) throw FitError("objective is not finite anywhere on the search grid");

    auto nm = s.simplex;
    nm.initial_step = spacing;
    r.f = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_starts && std::isfinite(values[order[i]]); ++i) {
        const auto refined = nelder_mead(f, kernels::grid_point(axes, order[i]), nm);
        r.iterations += refined.iterations;
        if (refined.f < r.f) {
            r.x = refined.x;
            r.f = refined.f;
            r.converged = refined.converged;
        }
    }
    return r;
}

} // namespace actukit::opt
