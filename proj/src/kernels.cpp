#include "actukit/kernels.hpp"

#include "actukit/error.hpp"

#include <fftw3.h>
#include <omp.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace actukit {

namespace {
int g_thread_cap = 0;
}

void set_thread_cap(int threads) {
    g_thread_cap = threads > 0 ? threads : 0;
    if (g_thread_cap > 0) omp_set_num_threads(g_thread_cap);
}

int thread_count() noexcept {
    const int max = omp_get_max_threads();
    return g_thread_cap > 0 ? std::min(g_thread_cap, max) : max;
}

namespace kernels {

std::vector<double> grid_point(std::span<const std::vector<double>> axes, std::size_t flat) {
    std::vector<double> x(axes.size());
    for (std::size_t d = axes.size(); d-- > 0;) {
        const std::size_t n = axes[d].size();
        x[d] = axes[d][flat % n];
        flat /= n;
    }
    return x;
}

std::vector<double> evaluate_grid(const Objective& f, std::span<const std::vector<double>> axes, Exec exec) {
    std::size_t total = 1;
    for (const auto& a : axes) {
        if (a.empty()) throw ConfigError("grid axis without points");
        total *= a.size();
    }
    std::vector<double> values(total);
    const auto n = static_cast<std::ptrdiff_t>(total);
    const auto eval = [&](std::ptrdiff_t i) {
        const auto x = grid_point(axes, static_cast<std::size_t>(i));
        const double v = f(x);
        values[static_cast<std::size_t>(i)] = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < n; ++i) eval(i);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) eval(i);
    }
    return values;
}

namespace {

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double, FftwFree>;
using CplxBuf = std::unique_ptr<fftw_complex, FftwFree>;

struct Plan {
    fftw_plan p = nullptr;
    ~Plan() {
        if (p) fftw_destroy_plan(p);
    }
};

// Windowed, detrended transform of one segment of one signal.
void segment_fft(const fftw_plan plan, std::span<const double> x, std::size_t start,
                 const std::vector<double>& window, double* in, fftw_complex* out) {
    const std::size_t len = window.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < len; ++i) mean += x[start + i];
    mean /= static_cast<double>(len);
    for (std::size_t i = 0; i < len; ++i) in[i] = (x[start + i] - mean) * window[i];
    fftw_execute_dft_r2c(plan, in, out);
}

} // namespace

CrossSpectra welch(std::span<const double> u, std::span<const double> y, std::size_t seg_len, std::size_t step,
                   Exec exec) {
    if (u.size() != y.size()) throw AlignmentError("input and output lengths differ");
    if (seg_len < 4 || seg_len > u.size()) throw EstimationError("segment length out of range");
    if (step == 0) throw EstimationError("segment step must be positive");
    const std::size_t nseg = (u.size() - seg_len) / step + 1;
    const std::size_t nbins = seg_len / 2; // bins 1..seg_len/2

    std::vector<double> window(seg_len);
    for (std::size_t i = 0; i < seg_len; ++i)
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(seg_len));
    double wss = 0.0;
    for (double w : window) wss += w * w;

    const std::size_t ncplx = seg_len / 2 + 1;
    Plan plan;
    {
        RealBuf in(static_cast<double*>(fftw_malloc(sizeof(double) * seg_len)));
        CplxBuf out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncplx)));
#pragma omp critical(actukit_fftw_planner)
        plan.p = fftw_plan_dft_r2c_1d(static_cast<int>(seg_len), in.get(), out.get(), FFTW_ESTIMATE);
    }

    // per-segment spectra, reduced afterwards in segment order so the serial
    // and parallel paths sum identically
    std::vector<double> suu(nseg * nbins), syy(nseg * nbins);
    std::vector<std::complex<double>> suy(nseg * nbins);

    const auto body = [&](std::size_t s, double* in, fftw_complex* fu, fftw_complex* fy) {
        segment_fft(plan.p, u, s * step, window, in, fu);
        segment_fft(plan.p, y, s * step, window, in, fy);
        for (std::size_t k = 1; k <= nbins; ++k) {
            const std::complex<double> U(fu[k][0], fu[k][1]);
            const std::complex<double> Y(fy[k][0], fy[k][1]);
            const std::size_t idx = s * nbins + (k - 1);
            suu[idx] = std::norm(U) / wss;
            syy[idx] = std::norm(Y) / wss;
            suy[idx] = std::conj(U) * Y / wss;
        }
    };

    const auto run_range = [&](bool parallel) {
        if (parallel) {
#pragma omp parallel
            {
                RealBuf in(static_cast<double*>(fftw_malloc(sizeof(double) * seg_len)));
                CplxBuf fu(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncplx)));
                CplxBuf fy(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncplx)));
#pragma omp for schedule(static)
                for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(nseg); ++s)
                    body(static_cast<std::size_t>(s), in.get(), fu.get(), fy.get());
            }
        } else {
            RealBuf in(static_cast<double*>(fftw_malloc(sizeof(double) * seg_len)));
            CplxBuf fu(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncplx)));
            CplxBuf fy(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncplx)));
            for (std::size_t s = 0; s < nseg; ++s) body(s, in.get(), fu.get(), fy.get());
        }
    };
    run_range(exec == Exec::Parallel);

    CrossSpectra cs;
    cs.nseg = nseg;
    cs.Suu.assign(nbins, 0.0);
    cs.Syy.assign(nbins, 0.0);
    cs.Suy.assign(nbins, {0.0, 0.0});
    for (std::size_t s = 0; s < nseg; ++s) {
        for (std::size_t k = 0; k < nbins; ++k) {
            cs.Suu[k] += suu[s * nbins + k];
            cs.Syy[k] += syy[s * nbins + k];
            cs.Suy[k] += suy[s * nbins + k];
        }
    }
    const double inv = 1.0 / static_cast<double>(nseg);
    for (std::size_t k = 0; k < nbins; ++k) {
        cs.Suu[k] *= inv;
        cs.Syy[k] *= inv;
        cs.Suy[k] *= inv;
    }
    return cs;
}

} // namespace kernels
} // namespace actukit
