#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace actukit {

struct Channel {
    std::string name;
    std::vector<double> samples;
    std::string unit; ///< free text, may be empty
};

using Meta = std::map<std::string, std::string>;

/// Uniformly sampled multichannel record. Immutable once built; the `with_*`
/// members return modified copies.
class TimeSeries {
public:
    /// Throws InputError unless fs > 0, there is at least one channel, all
    /// channels share a length >= 1 and names are unique.
    TimeSeries(double fs, double t0, std::vector<Channel> channels, Meta meta = {});

    double fs() const noexcept { return fs_; }
    double t0() const noexcept { return t0_; }
    double dt() const noexcept { return 1.0 / fs_; }
    std::size_t size() const noexcept { return channels_.front().samples.size(); }
    double time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) / fs_; }
    double duration() const noexcept { return static_cast<double>(size()) / fs_; }

    const std::vector<Channel>& channels() const noexcept { return channels_; }
    const Meta& meta() const noexcept { return meta_; }
    std::vector<std::string> names() const;

    bool has(std::string_view name) const noexcept;
    /// Throws InputError if the channel does not exist.
    const std::vector<double>& operator[](std::string_view name) const;
    const Channel& channel(std::string_view name) const;

    TimeSeries with_channel(Channel ch) const;
    TimeSeries with_meta(const std::string& key, const std::string& value) const;
    /// Copy holding only the named channels, in the given order.
    TimeSeries select(const std::vector<std::string>& names) const;

private:
    double fs_;
    double t0_;
    std::vector<Channel> channels_;
    Meta meta_;
};

enum class SignalKind { PiecewiseConstantRandom, BandLimitedRandom, Step, Ramp };

std::string_view to_string(SignalKind k) noexcept;
SignalKind signal_kind_from_string(std::string_view s);

struct SignalSpec {
    SignalKind kind = SignalKind::Step;
    double amplitude = 1.0;
    double hold_duration = 1.0; ///< [s] piecewise-constant kind
    double cutoff = 0.0;        ///< [Hz] band-limited kind
    double duration = 1.0;      ///< [s]
    std::uint64_t seed = 0;
    std::string channel = "u";
};

/// Name written into meta so a run can be reproduced.
inline constexpr std::string_view kGeneratorName = "std::mt19937_64";

/// Deterministic for a fixed seed. round(duration·fs) samples starting at t = 0.
///
/// Piecewise-constant random draws U[-A, A] per hold segment; band-limited
/// random is U[-A, A] white noise run through `lowpass`; Step is A
/// everywhere; Ramp rises linearly from 0 to A over the duration.
TimeSeries generate(const SignalSpec& spec, double fs);

/// Zero-phase fourth-order Butterworth low-pass (forward-backward, so the
/// effective magnitude is 1/(1 + (w/wc)^8) with w = tan(πf/fs)).
/// Unit DC gain; constant inputs pass through unchanged.
std::vector<double> lowpass(std::span<const double> x, double fs, double cutoff);

/// Filters one channel and returns a copy with that channel replaced.
TimeSeries lowpass(const TimeSeries& x, double cutoff, std::string_view channel);

/// Magnitude response of `lowpass` at frequency f.
double lowpass_gain(double f, double fs, double cutoff);

/// CSV layout: optional `# key: value` comment lines (`# units:` holds one
/// unit per column, `# meta:` holds key=value pairs), then a header row
/// `t,<name>...`, then one row per sample. Numbers use 17 significant digits.
void write_csv(const TimeSeries& x, const std::filesystem::path& path);
TimeSeries read_csv(const std::filesystem::path& path);

/// Stream variants used by the file functions.
std::string to_csv_string(const TimeSeries& x);
TimeSeries parse_csv(std::string_view text, const std::string& source = "<memory>");

/// Mean of each channel across trials, sample by sample. Trials must share
/// channel names, fs and length (AlignmentError otherwise).
TimeSeries average_trials(std::span<const TimeSeries> trials);

/// splitmix64 step, for deriving independent sub-seeds from a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

} // namespace actukit
