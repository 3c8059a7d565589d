#pragma once

#include "actukit/kernels.hpp"

#include <span>
#include <vector>

namespace actukit::opt {

using Objective = kernels::Objective;

struct NelderMeadSettings {
    int max_iter = 500;
    double tol = 1e-9;          ///< relative simplex size at convergence
    double initial_step = 0.05; ///< simplex edge, in the caller's coordinates
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). Converged when max_i |x_i - x_best|_inf / max(1, |x_best|_inf)
/// falls below `tol`.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadSettings& s);

struct TwoStageSettings {
    int grid_points = 41; ///< per dimension
    int starts = 1;       ///< simplex runs from the best distinct grid points
    NelderMeadSettings simplex;
    Exec exec = Exec::Parallel;
};

struct TwoStageResult {
    std::vector<double> x;
    double f = 0.0;
    double grid_f = 0.0; ///< best value found by the grid stage
    std::vector<double> grid_x;
    int iterations = 0;
    bool converged = false;
};

/// Stage 1: evenly spaced grid over the box [lower, upper] (callers pass log
/// coordinates for log-spaced grids). Stage 2: Nelder-Mead from the `starts`
/// best grid points with an initial edge of one grid spacing; the lowest
/// refined value wins.
TwoStageResult two_stage_minimize(const Objective& f, std::span<const double> lower, std::span<const double> upper,
                                  const TwoStageSettings& s);

} // namespace actukit::opt
