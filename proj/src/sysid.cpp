#include "actukit/sysid.hpp"

#include "actukit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace actukit::sysid {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
    return m;
}

double variance(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double acc = 0.0;
    for (double v : x) acc += (v - mean) * (v - mean);
    return acc / n;
}
} // namespace

void FrfEstimate::validate() const {
    if (freq.size() != H.size() || freq.size() != coherence.size())
        throw InputError("FRF vectors differ in length");
    for (std::size_t i = 1; i < freq.size(); ++i)
        if (!(freq[i] > freq[i - 1])) throw InputError("FRF frequencies must be strictly increasing");
    for (double c : coherence)
        if (!(c >= 0.0 && c <= 1.0)) throw InputError("coherence outside [0, 1]");
}

FrfEstimate estimate_frf(std::span<const double> u, std::span<const double> y, double fs, const FrfSettings& s) {
    if (u.size() != y.size()) throw AlignmentError("input and output lengths differ");
    if (!(fs > 0.0)) throw InputError("sample rate must be positive");
    if (!(s.overlap >= 0.0 && s.overlap <= 0.9)) throw ConfigError("overlap must lie in [0, 0.9]");
    std::size_t seg = s.seg_len;
    if (seg == 0) {
        const double denom = 1.0 + (static_cast<double>(s.segments) - 1.0) * (1.0 - s.overlap);
        seg = static_cast<std::size_t>(std::floor(static_cast<double>(u.size()) / denom));
    }
    if (seg > u.size()) throw EstimationError("segment length exceeds record length");
    if (seg < 4) throw EstimationError("record too short for spectral estimation");
    const auto step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(seg) * (1.0 - s.overlap))));
    const std::size_t nseg = (u.size() - seg) / step + 1;
    if (nseg < 2) throw EstimationError("fewer than two segments; coherence undefined");

    const auto cs = kernels::welch(u, y, seg, step, s.exec);
    const double peak_uu = *std::max_element(cs.Suu.begin(), cs.Suu.end());
    if (!(peak_uu > 0.0)) throw EstimationError("input carries no excitation");

    FrfEstimate out;
    out.nseg = cs.nseg;
    out.window = "hann";
    const std::size_t nb = cs.Suu.size();
    out.freq.resize(nb);
    out.H.resize(nb);
    out.coherence.resize(nb);
    const double floor = peak_uu * 1e-300;
    for (std::size_t k = 0; k < nb; ++k) {
        out.freq[k] = static_cast<double>(k + 1) * fs / static_cast<double>(seg);
        const double suu = cs.Suu[k];
        if (suu > floor) {
            out.H[k] = cs.Suy[k] / suu;
            const double denom = suu * cs.Syy[k];
            out.coherence[k] = denom > 0.0 ? std::clamp(std::norm(cs.Suy[k]) / denom, 0.0, 1.0) : 0.0;
        } else {
            out.H[k] = {0.0, 0.0};
            out.coherence[k] = 0.0;
        }
    }
    return out;
}

FrfEstimate estimate_frf(const TimeSeries& x, const std::string& input, const std::string& output,
                         const FrfSettings& s) {
    return estimate_frf(x[input], x[output], x.fs(), s);
}

FrfEstimate first_order_frf(double J, double B, std::span<const double> freq) {
    FrfEstimate out;
    out.freq.assign(freq.begin(), freq.end());
    out.H.resize(freq.size());
    out.coherence.assign(freq.size(), 1.0);
    out.nseg = 0;
    out.window = "analytic";
    for (std::size_t k = 0; k < freq.size(); ++k) {
        const std::complex<double> z(B, J * kTwoPi * freq[k]);
        out.H[k] = z == std::complex<double>(0.0, 0.0)
                       ? std::complex<double>(std::numeric_limits<double>::infinity(), 0.0)
                       : 1.0 / z;
    }
    return out;
}

FrfEstimate lowpass_frf(double fc, std::span<const double> freq) {
    FrfEstimate out;
    out.freq.assign(freq.begin(), freq.end());
    out.H.resize(freq.size());
    out.coherence.assign(freq.size(), 1.0);
    out.window = "analytic";
    for (std::size_t k = 0; k < freq.size(); ++k) out.H[k] = 1.0 / std::complex<double>(1.0, freq[k] / fc);
    return out;
}

MechFit fit_first_order(const FrfEstimate& frf, double f_lo, double f_hi, const MechFitSettings& s) {
    frf.validate();
    if (!(f_hi > f_lo) || f_lo < 0.0) throw ConfigError("fit band must satisfy 0 <= f_lo < f_hi");
    if (frf.size() == 0 || f_lo > frf.freq.back() || f_hi < frf.freq.front())
        throw ConfigError("fit band lies outside the FRF range");

    struct Bin {
        double w;
        std::complex<double> h;
    };
    std::vector<Bin> bins;
    std::vector<double> weights, re_z, j_guess;
    for (std::size_t k = 0; k < frf.size(); ++k) {
        const double f = frf.freq[k];
        if (f < f_lo || f > f_hi) continue;
        const double c = frf.coherence[k];
        const auto h = frf.H[k];
        if (c < s.coherence_threshold || !(std::abs(h) > 0.0) || !std::isfinite(std::abs(h))) continue;
        bins.push_back({kTwoPi * f, h});
        weights.push_back(c * c / std::norm(h));
        const auto z = 1.0 / h;
        re_z.push_back(z.real());
        j_guess.push_back(z.imag() / (kTwoPi * f));
    }
    if (bins.empty()) throw FitError("no bins in band pass the coherence threshold");
    if (bins.size() < s.min_bins)
        throw FitError("only " + std::to_string(bins.size()) + " bins pass the coherence threshold (need " +
                       std::to_string(s.min_bins) + ")");

    const auto loss = [&](std::span<const double> p) {
        const double J = std::pow(10.0, p[0]);
        const double B = std::pow(10.0, p[1]);
        double acc = 0.0;
        for (std::size_t i = 0; i < bins.size(); ++i) {
            const auto model = 1.0 / std::complex<double>(B, J * bins[i].w);
            acc += weights[i] * std::norm(model - bins[i].h);
        }
        return acc;
    };

    const double w_hi = bins.back().w;
    double J0 = std::abs(median_of(j_guess));
    if (!(J0 > 0.0)) J0 = 1.0 / (w_hi * std::abs(bins.back().h));
    double B0 = std::abs(median_of(re_z));
    if (!(B0 > 1e-6 * J0 * w_hi)) B0 = 1e-3 * J0 * w_hi;

    const double half = 0.5 * s.grid_decades;
    const double lower[2] = {std::log10(J0) - half, std::log10(B0) - half};
    const double upper[2] = {std::log10(J0) + half, std::log10(B0) + half};
    const auto r = opt::two_stage_minimize(loss, lower, upper, s.optimizer);
    if (!r.converged)
        throw FitError("simplex did not converge after " + std::to_string(r.iterations) + " iterations; residual " +
                           std::to_string(r.f),
                       r.f);

    MechFit fit;
    fit.J = std::pow(10.0, r.x[0]);
    fit.B = std::pow(10.0, r.x[1]);
    fit.cost = r.f;
    fit.iterations = r.iterations;
    fit.bins_used = bins.size();
    fit.f_lo = f_lo;
    fit.f_hi = f_hi;
    return fit;
}

MechFit combine_fits(std::span<const MechFit> fits) {
    if (fits.empty()) throw FitError("no fits to combine");
    MechFit out = fits.front();
    const double n = static_cast<double>(fits.size());
    double mj = 0.0, mb = 0.0;
    for (const auto& f : fits) {
        mj += f.J;
        mb += f.B;
    }
    mj /= n;
    mb /= n;
    double vj = 0.0, vb = 0.0, vaf_sum = 0.0;
    int vaf_n = 0;
    for (const auto& f : fits) {
        vj += (f.J - mj) * (f.J - mj);
        vb += (f.B - mb) * (f.B - mb);
        if (f.vaf >= 0.0) {
            vaf_sum += f.vaf;
            ++vaf_n;
        }
    }
    out.J = mj;
    out.B = mb;
    out.ci_J = fits.size() > 1 ? 2.0 * std::sqrt(vj / (n - 1.0)) : 0.0;
    out.ci_B = fits.size() > 1 ? 2.0 * std::sqrt(vb / (n - 1.0)) : 0.0;
    out.vaf = vaf_n > 0 ? vaf_sum / vaf_n : -1.0;
    return out;
}

std::vector<double> replay_first_order(double J, double B, std::span<const double> torque, double fs, double y0) {
    if (!(J > 0.0) || B < 0.0) throw DomainError("replay needs J > 0 and B >= 0");
    std::vector<double> y(torque.size());
    if (torque.empty()) return y;
    const double h = 1.0 / fs;
    y[0] = y0;
    if (B == 0.0) {
        for (std::size_t k = 1; k < y.size(); ++k) y[k] = y[k - 1] + 0.5 * (torque[k - 1] + torque[k]) * h / J;
        return y;
    }
    const double T = J / B;
    const double a = std::exp(-h / T);
    const double ramp = 1.0 - T * (1.0 - a) / h;
    for (std::size_t k = 1; k < y.size(); ++k) {
        const double t0 = torque[k - 1];
        const double d = torque[k] - t0;
        y[k] = a * y[k - 1] + (t0 * (1.0 - a) + d * ramp) / B;
    }
    return y;
}

namespace {
std::complex<double> impedance_of(std::complex<double> h) {
    if (!std::isfinite(h.real()) || !std::isfinite(h.imag())) return {0.0, 0.0};
    return 1.0 / h;
}

void require_same_grid(const FrfEstimate& a, const FrfEstimate& b) {
    if (a.size() != b.size()) throw AlignmentError("FRF grids differ in length");
    for (std::size_t k = 0; k < a.size(); ++k)
        if (std::abs(a.freq[k] - b.freq[k]) > 1e-9 * std::max(1.0, std::abs(a.freq[k])))
            throw AlignmentError("FRF grids differ at bin " + std::to_string(k));
}
} // namespace

RigSubtraction subtract_rig(const FrfEstimate& total, const FrfEstimate& rig) {
    require_same_grid(total, rig);
    RigSubtraction r;
    r.frf = total;
    r.frf.nseg = std::min(total.nseg, rig.nseg);
    r.degenerate.assign(total.size(), false);
    for (std::size_t k = 0; k < total.size(); ++k) {
        const auto z = impedance_of(total.H[k]) - impedance_of(rig.H[k]);
        r.frf.coherence[k] = std::min(total.coherence[k], rig.coherence[k]);
        if (impedance_of(rig.H[k]) == std::complex<double>(0.0, 0.0)) {
            r.frf.H[k] = total.H[k];
        } else if (z == std::complex<double>(0.0, 0.0)) {
            r.frf.H[k] = {std::numeric_limits<double>::infinity(), 0.0};
            r.degenerate[k] = true;
            r.any_degenerate = true;
        } else {
            r.frf.H[k] = 1.0 / z;
        }
        if (k == 0 && !(z.real() > 0.0)) r.nonpositive_dc = true;
    }
    return r;
}

FrfEstimate add_rig(const FrfEstimate& part, const FrfEstimate& rig) {
    require_same_grid(part, rig);
    FrfEstimate out = part;
    for (std::size_t k = 0; k < part.size(); ++k) {
        const auto z = impedance_of(part.H[k]) + impedance_of(rig.H[k]);
        if (impedance_of(rig.H[k]) == std::complex<double>(0.0, 0.0)) {
            out.coherence[k] = std::min(part.coherence[k], rig.coherence[k]);
            continue;
        }
        out.H[k] = z == std::complex<double>(0.0, 0.0)
                       ? std::complex<double>(std::numeric_limits<double>::infinity(), 0.0)
                       : 1.0 / z;
        out.coherence[k] = std::min(part.coherence[k], rig.coherence[k]);
    }
    return out;
}

double vaf(std::span<const double> y_meas, std::span<const double> y_pred) {
    if (y_meas.size() != y_pred.size()) throw MetricError("VAF inputs differ in length");
    if (y_meas.size() < 2) throw MetricError("VAF needs at least two samples");
    const double vm = variance(y_meas);
    if (!(vm > 0.0)) throw MetricError("measured signal has zero variance");
    std::vector<double> resid(y_meas.size());
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = y_meas[i] - y_pred[i];
    return 100.0 * std::max(0.0, 1.0 - variance(resid) / vm);
}

Bandwidth half_power_bandwidth(const FrfEstimate& frf) {
    if (frf.size() == 0) throw MetricError("empty FRF");
    const double level = std::abs(frf.H.front()) / std::sqrt(2.0);
    for (std::size_t k = 1; k < frf.size(); ++k) {
        const double m = std::abs(frf.H[k]);
        if (m < level) {
            const double m0 = std::abs(frf.H[k - 1]);
            const double f0 = frf.freq[k - 1];
            const double frac = (m0 - level) / (m0 - m);
            return {f0 + frac * (frf.freq[k] - f0), false};
        }
    }
    return {frf.freq.back(), true};
}

TimeSeries average_steps(std::span<const TimeSeries> trials) { return average_trials(trials); }

double rise_time(std::span<const double> profile, double fs) {
    if (profile.size() < 5) throw MetricError("profile too short for a rise time");
    const std::size_t tail = std::max<std::size_t>(1, profile.size() / 5);
    double ss = 0.0;
    for (std::size_t i = profile.size() - tail; i < profile.size(); ++i) ss += profile[i];
    ss /= static_cast<double>(tail);
    if (!(ss > 0.0)) throw MetricError("steady-state value must be positive");

    const auto crossing = [&](double level) {
        for (std::size_t i = 0; i < profile.size(); ++i) {
            if (profile[i] >= level) {
                if (i == 0) throw MetricError("profile starts at or above the rise level; no step to measure");
                const double x0 = profile[i - 1], x1 = profile[i];
                return (static_cast<double>(i - 1) + (level - x0) / (x1 - x0)) / fs;
            }
        }
        throw MetricError("profile never reaches the rise level");
    };
    return crossing(0.9 * ss) - crossing(0.1 * ss);
}

double rise_time(const TimeSeries& profile, const std::string& channel) {
    return rise_time(profile[channel], profile.fs());
}

} // namespace actukit::sysid
