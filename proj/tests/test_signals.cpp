#include "actukit/error.hpp"
#include "actukit/signals.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

using namespace actukit;
using doctest::Approx;

namespace {

TimeSeries three_channel() {
    std::vector<double> a, b, c;
    for (int i = 0; i < 257; ++i) {
        a.push_back(std::sin(0.1 * i) * 1e3);
        b.push_back(1.0 / (i + 1.0));
        c.push_back(-std::exp(-0.01 * i) * 1e-9);
    }
    return TimeSeries(2700.0, 0.25, {{"a", a, "Nm"}, {"b", b, "A"}, {"c", c, ""}}, {{"seed", "42"}});
}

double sine_amplitude(const std::vector<double>& y, std::size_t skip) {
    double m = 0.0;
    for (std::size_t i = skip; i + skip < y.size(); ++i) m = std::max(m, std::abs(y[i]));
    return m;
}

} // namespace

TEST_CASE("time series invariants") {
    CHECK_THROWS_AS(TimeSeries(0.0, 0.0, {{"x", {1.0}, ""}}), InputError);
    CHECK_THROWS_AS(TimeSeries(1.0, 0.0, {}), InputError);
    CHECK_THROWS_AS(TimeSeries(1.0, 0.0, {{"x", {}, ""}}), InputError);
    CHECK_THROWS_AS(TimeSeries(1.0, 0.0, {{"x", {1.0}, ""}, {"x", {2.0}, ""}}), InputError);
    CHECK_THROWS_AS(TimeSeries(1.0, 0.0, {{"x", {1.0}, ""}, {"y", {1.0, 2.0}, ""}}), InputError);
    const auto ts = three_channel();
    CHECK(ts.size() == 257);
    CHECK(ts.time(27) == Approx(0.26));
    CHECK(ts.has("b"));
    CHECK_FALSE(ts.has("z"));
    CHECK_THROWS_AS(ts["z"], InputError);
    CHECK(ts.select({"c", "a"}).names() == std::vector<std::string>{"c", "a"});
}

TEST_CASE("generate step and ramp") {
    SignalSpec s;
    s.kind = SignalKind::Step;
    s.amplitude = 1.0;
    s.duration = 1.0;
    const auto x = generate(s, 1000.0);
    REQUIRE(x.size() == 1000);
    for (double v : x["u"]) CHECK(v == 1.0);
    CHECK(x.meta().at("seed") == "0");

    s.kind = SignalKind::Ramp;
    const auto r = generate(s, 1000.0);
    CHECK(r["u"].front() == 0.0);
    CHECK(r["u"][500] == Approx(0.5));
}

TEST_CASE("piecewise-constant random holds") {
    SignalSpec s;
    s.kind = SignalKind::PiecewiseConstantRandom;
    s.amplitude = 8.0;
    s.hold_duration = 20.0;
    s.duration = 3600.0;
    s.seed = 11;
    const auto x = generate(s, 1.0);
    const auto& v = x["u"];
    std::size_t segments = 1;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] != v[i - 1]) {
            ++segments;
            CHECK(i % 20 == 0);
        }
    }
    CHECK(segments == 180);
    std::set<double> distinct(v.begin(), v.end());
    CHECK(distinct.size() == 180);
    for (double a : v) CHECK(std::abs(a) <= 8.0);
}

TEST_CASE("generation is deterministic and seed-sensitive") {
    SignalSpec s;
    s.kind = SignalKind::BandLimitedRandom;
    s.cutoff = 40.0;
    s.duration = 2.0;
    s.seed = 5;
    CHECK(to_csv_string(generate(s, 1000.0)) == to_csv_string(generate(s, 1000.0)));
    auto other = s;
    other.seed = 6;
    CHECK(generate(s, 1000.0)["u"] != generate(other, 1000.0)["u"]);
    CHECK(generate(s, 1000.0).meta().at("generator") == std::string(kGeneratorName));
}

TEST_CASE("generate rejects bad specs") {
    SignalSpec s;
    s.kind = SignalKind::BandLimitedRandom;
    s.cutoff = 500.0;
    CHECK_THROWS_AS(generate(s, 1000.0), ConfigError);
    s.cutoff = 10.0;
    s.duration = 0.0;
    CHECK_THROWS_AS(generate(s, 1000.0), ConfigError);
    s.duration = 1.0;
    s.amplitude = -1.0;
    CHECK_THROWS_AS(generate(s, 1000.0), ConfigError);
}

TEST_CASE("lowpass passes DC exactly") {
    const std::vector<double> x(500, 5.0);
    for (double v : lowpass(x, 1000.0, 40.0)) CHECK(v == Approx(5.0).epsilon(1e-12));
    CHECK_THROWS_AS(lowpass(x, 1000.0, 500.0), ConfigError);
    CHECK_THROWS_AS(lowpass(x, 1000.0, 0.0), ConfigError);
}

TEST_CASE("lowpass attenuates a sine at four times the cutoff") {
    const double fs = 1000.0, fc = 20.0, f = 4.0 * fc;
    std::vector<double> x(4000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * f * i / fs);
    const double amp = sine_amplitude(lowpass(x, fs, fc), 500);
    const double w = std::tan(std::numbers::pi * f / fs) / std::tan(std::numbers::pi * fc / fs);
    const double analytic = 1.0 / (1.0 + std::pow(w, 8.0));
    CHECK(amp < 0.05);
    CHECK(amp == Approx(analytic).epsilon(0.05));
    CHECK(lowpass_gain(f, fs, fc) == Approx(analytic).epsilon(1e-12));
}

TEST_CASE("lowpass gain is -6 dB at cutoff and falls monotonically above it") {
    const double fs = 1000.0, fc = 40.0;
    CHECK(lowpass_gain(fc, fs, fc) == Approx(0.5).epsilon(1e-12));
    double prev = 1.0;
    for (double f = fc; f < fs / 2.0; f += 5.0) {
        const double g = lowpass_gain(f, fs, fc);
        CHECK(g < prev);
        prev = g;
    }
    // measured gains agree with the analytic curve
    for (double f : {10.0, 40.0, 60.0}) {
        std::vector<double> x(8000);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * f * i / fs);
        CHECK(sine_amplitude(lowpass(x, fs, fc), 1000) == Approx(lowpass_gain(f, fs, fc)).epsilon(0.01));
    }
}

TEST_CASE("lowpass on a time series replaces one channel") {
    const auto ts = three_channel();
    const auto y = lowpass(ts, 100.0, "a");
    CHECK(y["b"] == ts["b"]);
    CHECK(y["a"] != ts["a"]);
    CHECK_THROWS_AS(lowpass(ts, 100.0, "nope"), InputError);
}

TEST_CASE("csv round trip") {
    const auto ts = three_channel();
    const auto back = parse_csv(to_csv_string(ts));
    CHECK(back.fs() == ts.fs());
    CHECK(back.t0() == ts.t0());
    CHECK(back.names() == ts.names());
    CHECK(back.channel("a").unit == "Nm");
    CHECK(back.meta().at("seed") == "42");
    for (const auto& name : ts.names())
        for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(back[name][i] - ts[name][i]) <= 1e-12);

    const auto path = std::filesystem::temp_directory_path() / "actukit_roundtrip.csv";
    write_csv(ts, path);
    const auto file = read_csv(path);
    CHECK(to_csv_string(file) == to_csv_string(ts));
    std::filesystem::remove(path);
}

TEST_CASE("csv format errors") {
    CHECK_THROWS_AS(parse_csv("0,1\n1,2\n"), FormatError);
    CHECK_THROWS_AS(parse_csv("t,x\n"), FormatError);
    CHECK_THROWS_AS(parse_csv("t,x\n0,1\n"), FormatError);
    CHECK_NOTHROW(parse_csv("# fs: 10\nt,x\n0,1\n"));
    CHECK_THROWS_AS(parse_csv("t,x\n0,1\n0.1,2\n0.2,abc\n"), FormatError);
    CHECK_THROWS_AS(parse_csv("t,x,y\n0,1\n"), FormatError);
    try {
        parse_csv("t,x\n0,1\n0.1,2\n0.2,3\n0.3001,4\n0.4,5\n0.5,6\n");
        FAIL("expected a format error");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("non-uniform timebase at data row 4") != std::string::npos);
    }
    // jitter below the tolerance is accepted
    CHECK(parse_csv("t,x\n0,1\n0.1,2\n0.20000000001,3\n0.3,4\n").fs() == Approx(10.0));
}

TEST_CASE("average trials") {
    const auto a = three_channel();
    std::vector<TimeSeries> same(50, a);
    const auto avg = average_trials(same);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(avg["a"][i] == Approx(a["a"][i]).epsilon(1e-14));
    std::vector<TimeSeries> bad{a, a.select({"a", "b", "c"})};
    CHECK_NOTHROW(average_trials(bad));
    std::vector<TimeSeries> shorter{a, TimeSeries(2700.0, 0.0, {{"a", {1.0}, ""}, {"b", {1.0}, ""}, {"c", {1.0}, ""}})};
    CHECK_THROWS_AS(average_trials(shorter), AlignmentError);
}

TEST_CASE("derived seeds differ per stream") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(derive_seed(7, k));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}
