#pragma once

#include "actukit/kernels.hpp"
#include "actukit/optimize.hpp"
#include "actukit/signals.hpp"

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace actukit::sysid {

/// Nonparametric frequency response. DC is not included; freq is strictly
/// increasing.
struct FrfEstimate {
    std::vector<double> freq;                 ///< [Hz]
    std::vector<std::complex<double>> H;
    std::vector<double> coherence;            ///< [0, 1]
    std::size_t nseg = 0;
    std::string window = "hann";

    std::size_t size() const noexcept { return freq.size(); }
    void validate() const;
};

struct FrfSettings {
    std::size_t seg_len = 0; ///< 0 selects the length giving `segments` at the overlap
    double overlap = 0.5;    ///< [0, 0.9]
    std::size_t segments = 8;
    Exec exec = Exec::Parallel;
};

/// H = S_uy/S_uu and coherence |S_uy|²/(S_uu·S_yy) from averaged Hann-windowed
/// segments. Throws EstimationError for fewer than two segments or for an
/// input without excitation.
FrfEstimate estimate_frf(std::span<const double> u, std::span<const double> y, double fs,
                         const FrfSettings& s = {});
FrfEstimate estimate_frf(const TimeSeries& x, const std::string& input, const std::string& output,
                         const FrfSettings& s = {});

/// 1/(J·i2πf + B) on the given grid, coherence 1.
FrfEstimate first_order_frf(double J, double B, std::span<const double> freq);

/// 1/(1 + i f/fc) on the given grid, coherence 1.
FrfEstimate lowpass_frf(double fc, std::span<const double> freq);

struct MechFit {
    double J = 0.0;       ///< [kg·m²]
    double B = 0.0;       ///< [Nms/rad]
    double vaf = -1.0;    ///< [%], negative until replayed against time data
    double ci_J = 0.0;    ///< 2σ half-width across fits
    double ci_B = 0.0;
    double cost = 0.0;    ///< final weighted loss
    int iterations = 0;
    std::size_t bins_used = 0;
    double f_lo = 0.0, f_hi = 0.0;
};

struct MechFitSettings {
    double coherence_threshold = 0.9;
    std::size_t min_bins = 5;
    opt::TwoStageSettings optimizer{}; ///< 41×41 grid, 500 simplex iterations, tol 1e-9
    double grid_decades = 4.0;
};

/// Fits 1/(J·s + B) to the FRF over [f_lo, f_hi]. Loss is the sum over bins
/// with coherence >= threshold of coherence²·|H_model − H|²/|H|². Search runs
/// in log10(J), log10(B): a grid spanning `grid_decades` around a data-derived
/// guess, then simplex refinement.
MechFit fit_first_order(const FrfEstimate& frf, double f_lo, double f_hi, const MechFitSettings& s = {});

/// Mean parameters of several fits (e.g. per input amplitude) with 2σ
/// half-widths from their spread; VAF is averaged over fits that have one.
MechFit combine_fits(std::span<const MechFit> fits);

/// Velocity predicted by 1/(J·s + B) driven by the sampled torque (linear
/// interpolation between samples, exact integration), starting at y0.
std::vector<double> replay_first_order(double J, double B, std::span<const double> torque, double fs, double y0 = 0.0);

struct RigSubtraction {
    FrfEstimate frf;
    std::vector<bool> degenerate; ///< per bin: impedances cancel, H set to +inf
    bool any_degenerate = false;
    bool nonpositive_dc = false;  ///< real impedance at the lowest bin <= 0
};

/// Removes a series rig (couplers, shafts) by impedance difference:
/// H = 1/(1/H_total − 1/H_rig). Coherence is the bin-wise minimum. An infinite
/// rig response means zero impedance. Grid mismatch throws AlignmentError.
RigSubtraction subtract_rig(const FrfEstimate& total, const FrfEstimate& rig);

/// Series combination by impedance sum, the inverse of subtract_rig.
FrfEstimate add_rig(const FrfEstimate& part, const FrfEstimate& rig);

/// 100·max(0, 1 − var(y_meas − y_pred)/var(y_meas)).
double vaf(std::span<const double> y_meas, std::span<const double> y_pred);

struct Bandwidth {
    double hz = 0.0;
    bool open_ended = false; ///< never fell below ref/√2; hz is then f_max
};

/// First frequency where |H| drops below |H(lowest bin)|/√2, linearly
/// interpolated between bins.
Bandwidth half_power_bandwidth(const FrfEstimate& frf);

/// Pointwise mean profile over aligned trials.
TimeSeries average_steps(std::span<const TimeSeries> trials);

/// 10-90 % rise time relative to the mean of the final 20 % of the profile.
/// Crossings are linearly interpolated. Throws MetricError if the steady
/// state is not positive, the profile already starts above 10 %, or a level
/// is never reached.
double rise_time(std::span<const double> profile, double fs);
double rise_time(const TimeSeries& profile, const std::string& channel);

} // namespace actukit::sysid
