#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

/// Data-parallel inner loops. Every kernel has a serial reference path that
/// produces bit-identical results; tests compare the two and `bench/` times
/// them.
namespace actukit {

enum class Exec { Serial, Parallel };

/// Upper bound on OpenMP threads; 0 leaves the runtime default. The CLI
/// feeds this from ACTUKIT_THREADS.
void set_thread_cap(int threads);
int thread_count() noexcept;

namespace kernels {

using Objective = std::function<double(std::span<const double>)>;

/// Evaluates `f` at every point of the tensor grid spanned by `axes`.
/// Values are returned flattened with the last axis varying fastest.
/// Non-finite objective values are stored as +inf.
std::vector<double> evaluate_grid(const Objective& f, std::span<const std::vector<double>> axes, Exec exec);

/// Grid point for a flat index of `evaluate_grid`.
std::vector<double> grid_point(std::span<const std::vector<double>> axes, std::size_t flat);

/// One-sided averaged spectra over Hann-windowed, mean-removed segments.
/// Bin k (1 <= k <= seg_len/2) sits at k·fs/seg_len; DC is dropped.
struct CrossSpectra {
    std::vector<double> Suu;
    std::vector<double> Syy;
    std::vector<std::complex<double>> Suy; ///< conj(U)·Y
    std::size_t nseg = 0;
};

CrossSpectra welch(std::span<const double> u, std::span<const double> y, std::size_t seg_len,
                   std::size_t step, Exec exec);

} // namespace kernels
} // namespace actukit
