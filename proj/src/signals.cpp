#include "actukit/signals.hpp"

#include "actukit/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace actukit {

TimeSeries::TimeSeries(double fs, double t0, std::vector<Channel> channels, Meta meta)
    : fs_(fs), t0_(t0), channels_(std::move(channels)), meta_(std::move(meta)) {
    if (!(fs_ > 0.0) || !std::isfinite(fs_)) throw InputError("sample rate must be positive");
    if (channels_.empty()) throw InputError("time series needs at least one channel");
    std::set<std::string> seen;
    const std::size_t n = channels_.front().samples.size();
    if (n == 0) throw InputError("time series channels must hold at least one sample");
    for (const auto& ch : channels_) {
        if (ch.name.empty()) throw InputError("empty channel name");
        if (!seen.insert(ch.name).second) throw InputError("duplicate channel '" + ch.name + "'");
        if (ch.samples.size() != n)
            throw InputError("channel '" + ch.name + "' length differs from '" +
                             channels_.front().name + "'");
    }
}

std::vector<std::string> TimeSeries::names() const {
    std::vector<std::string> out;
    out.reserve(channels_.size());
    for (const auto& ch : channels_) out.push_back(ch.name);
    return out;
}

bool TimeSeries::has(std::string_view name) const noexcept {
    return std::any_of(channels_.begin(), channels_.end(),
                       [&](const Channel& c) { return c.name == name; });
}

const Channel& TimeSeries::channel(std::string_view name) const {
    for (const auto& ch : channels_)
        if (ch.name == name) return ch;
    throw InputError("missing channel '" + std::string(name) + "'");
}

const std::vector<double>& TimeSeries::operator[](std::string_view name) const {
    return channel(name).samples;
}

TimeSeries TimeSeries::with_channel(Channel ch) const {
    auto chans = channels_;
    auto it = std::find_if(chans.begin(), chans.end(),
                           [&](const Channel& c) { return c.name == ch.name; });
    if (it != chans.end())
        *it = std::move(ch);
    else
        chans.push_back(std::move(ch));
    return TimeSeries(fs_, t0_, std::move(chans), meta_);
}

TimeSeries TimeSeries::with_meta(const std::string& key, const std::string& value) const {
    auto m = meta_;
    m[key] = value;
    return TimeSeries(fs_, t0_, channels_, std::move(m));
}

TimeSeries TimeSeries::select(const std::vector<std::string>& names) const {
    std::vector<Channel> chans;
    for (const auto& n : names) chans.push_back(channel(n));
    return TimeSeries(fs_, t0_, std::move(chans), meta_);
}

std::string_view to_string(SignalKind k) noexcept {
    switch (k) {
    case SignalKind::PiecewiseConstantRandom: return "piecewise-constant-random";
    case SignalKind::BandLimitedRandom: return "band-limited-random";
    case SignalKind::Step: return "step";
    case SignalKind::Ramp: return "ramp";
    }
    return "step";
}

SignalKind signal_kind_from_string(std::string_view s) {
    for (auto k : {SignalKind::PiecewiseConstantRandom, SignalKind::BandLimitedRandom,
                   SignalKind::Step, SignalKind::Ramp})
        if (s == to_string(k)) return k;
    throw ConfigError("unknown signal kind '" + std::string(s) + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

TimeSeries generate(const SignalSpec& spec, double fs) {
    if (!(fs > 0.0)) throw ConfigError("sample rate must be positive");
    if (!(spec.duration > 0.0)) throw ConfigError("signal duration must be positive");
    if (!(spec.amplitude >= 0.0)) throw ConfigError("signal amplitude must be non-negative");
    if (spec.kind == SignalKind::BandLimitedRandom && !(spec.cutoff > 0.0 && spec.cutoff < fs / 2.0))
        throw ConfigError("band-limited cutoff must lie in (0, fs/2)");
    if (spec.kind == SignalKind::PiecewiseConstantRandom && !(spec.hold_duration > 0.0))
        throw ConfigError("hold duration must be positive");

    const auto n = static_cast<std::size_t>(std::llround(spec.duration * fs));
    if (n == 0) throw ConfigError("signal shorter than one sample");
    std::vector<double> x(n, 0.0);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uni(-spec.amplitude, spec.amplitude);

    switch (spec.kind) {
    case SignalKind::Step:
        std::fill(x.begin(), x.end(), spec.amplitude);
        break;
    case SignalKind::Ramp:
        for (std::size_t i = 0; i < n; ++i)
            x[i] = spec.amplitude * static_cast<double>(i) / (spec.duration * fs);
        break;
    case SignalKind::PiecewiseConstantRandom: {
        const double per_hold = spec.hold_duration * fs;
        std::size_t current = static_cast<std::size_t>(-1);
        double value = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            // small epsilon keeps i = k·per_hold from falling into segment k-1
            const auto seg = static_cast<std::size_t>(std::floor(static_cast<double>(i) / per_hold + 1e-9));
            if (seg != current) {
                current = seg;
                value = spec.amplitude > 0.0 ? uni(rng) : 0.0;
            }
            x[i] = value;
        }
        break;
    }
    case SignalKind::BandLimitedRandom:
        for (auto& v : x) v = spec.amplitude > 0.0 ? uni(rng) : 0.0;
        x = lowpass(x, fs, spec.cutoff);
        break;
    }

    Meta meta{{"generator", std::string(kGeneratorName)},
              {"seed", std::to_string(spec.seed)},
              {"signal", std::string(to_string(spec.kind))}};
    return TimeSeries(fs, 0.0, {Channel{spec.channel, std::move(x), ""}}, std::move(meta));
}

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;
};

// Bilinear transform with prewarping; Q values of the two 4th-order
// Butterworth pole pairs are 1/(2cos(π/8)) and 1/(2cos(3π/8)).
std::array<Biquad, 2> butterworth4(double fs, double cutoff) {
    const double k = std::tan(std::numbers::pi * cutoff / fs);
    std::array<Biquad, 2> s{};
    const double qs[2] = {1.0 / (2.0 * std::cos(std::numbers::pi / 8.0)),
                          1.0 / (2.0 * std::cos(3.0 * std::numbers::pi / 8.0))};
    for (int i = 0; i < 2; ++i) {
        const double q = qs[i];
        const double norm = 1.0 / (1.0 + k / q + k * k);
        Biquad b;
        b.b0 = k * k * norm;
        b.b1 = 2.0 * b.b0;
        b.b2 = b.b0;
        b.a1 = 2.0 * (k * k - 1.0) * norm;
        b.a2 = (1.0 - k / q + k * k) * norm;
        s[i] = b;
    }
    return s;
}

// Direct form II transposed, started in the steady state for a constant
// input equal to the first sample.
void run_section(const Biquad& q, std::vector<double>& x) {
    const double x0 = x.front();
    double z2 = (q.b2 - q.a2) * x0;
    double z1 = (q.b1 - q.a1) * x0 + z2;
    for (auto& v : x) {
        const double in = v;
        const double out = q.b0 * in + z1;
        z1 = q.b1 * in - q.a1 * out + z2;
        z2 = q.b2 * in - q.a2 * out;
        v = out;
    }
}

} // namespace

double lowpass_gain(double f, double fs, double cutoff) {
    const double w = std::tan(std::numbers::pi * std::min(f, fs / 2.0) / fs);
    const double wc = std::tan(std::numbers::pi * cutoff / fs);
    return 1.0 / (1.0 + std::pow(w / wc, 8.0));
}

std::vector<double> lowpass(std::span<const double> x, double fs, double cutoff) {
    if (!(fs > 0.0)) throw ConfigError("sample rate must be positive");
    if (!(cutoff > 0.0 && cutoff < fs / 2.0)) throw ConfigError("low-pass cutoff must lie in (0, fs/2)");
    const std::size_t n = x.size();
    if (n == 0) return {};
    if (n == 1) return {x[0]};

    // Odd reflection about the end points suppresses start-up transients.
    const std::size_t pad = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::ceil(3.0 * fs / cutoff)) + 12);
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    const auto sections = butterworth4(fs, cutoff);
    for (const auto& s : sections) run_section(s, ext);
    std::reverse(ext.begin(), ext.end());
    for (const auto& s : sections) run_section(s, ext);
    std::reverse(ext.begin(), ext.end());
    return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                               ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

TimeSeries lowpass(const TimeSeries& x, double cutoff, std::string_view channel) {
    const auto& ch = x.channel(channel);
    Channel out{ch.name, lowpass(ch.samples, x.fs(), cutoff), ch.unit};
    return x.with_channel(std::move(out));
}

TimeSeries average_trials(std::span<const TimeSeries> trials) {
    if (trials.empty()) throw AlignmentError("no trials to average");
    const auto& first = trials.front();
    std::vector<Channel> acc = first.channels();
    for (std::size_t t = 1; t < trials.size(); ++t) {
        const auto& tr = trials[t];
        if (tr.size() != first.size())
            throw AlignmentError("trial " + std::to_string(t) + " has " + std::to_string(tr.size()) +
                                 " samples, expected " + std::to_string(first.size()));
        if (tr.fs() != first.fs()) throw AlignmentError("trial " + std::to_string(t) + " sample rate differs");
        for (auto& ch : acc) {
            const auto& other = tr[ch.name];
            for (std::size_t i = 0; i < ch.samples.size(); ++i) ch.samples[i] += other[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(trials.size());
    for (auto& ch : acc)
        for (auto& v : ch.samples) v *= inv;
    auto meta = first.meta();
    meta["trials"] = std::to_string(trials.size());
    return TimeSeries(first.fs(), first.t0(), std::move(acc), std::move(meta));
}

} // namespace actukit
