#include "actukit/error.hpp"
#include "actukit/signals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace actukit {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    // strtod handles nan/inf spellings that from_chars accepts inconsistently
    std::string tmp(s);
    char* end = nullptr;
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size();
}

} // namespace

std::string to_csv_string(const TimeSeries& x) {
    std::ostringstream os;
    os << "# fs: " << fmt17(x.fs()) << '\n';
    bool any_unit = false;
    for (const auto& ch : x.channels()) any_unit = any_unit || !ch.unit.empty();
    if (any_unit) {
        os << "# units: s";
        for (const auto& ch : x.channels()) os << ',' << ch.unit;
        os << '\n';
    }
    for (const auto& [k, v] : x.meta()) os << "# meta: " << k << '=' << v << '\n';
    os << 't';
    for (const auto& ch : x.channels()) os << ',' << ch.name;
    os << '\n';
    for (std::size_t i = 0; i < x.size(); ++i) {
        os << fmt17(x.time(i));
        for (const auto& ch : x.channels()) os << ',' << fmt17(ch.samples[i]);
        os << '\n';
    }
    return os.str();
}

void write_csv(const TimeSeries& x, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open '" + path.string() + "' for writing");
    f << to_csv_string(x);
    if (!f) throw InputError("write failed for '" + path.string() + "'");
}

TimeSeries parse_csv(std::string_view text, const std::string& source) {
    Meta meta;
    std::vector<std::string> units;
    double declared_fs = 0.0;
    std::vector<std::string> header;
    std::vector<double> t;
    std::vector<std::vector<double>> cols;

    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto body = trim(line.substr(1));
            if (body.rfind("units:", 0) == 0) {
                for (auto u : split(trim(body.substr(6)), ',')) units.emplace_back(trim(u));
            } else if (body.rfind("meta:", 0) == 0) {
                auto kv = trim(body.substr(5));
                const auto eq = kv.find('=');
                if (eq != std::string_view::npos)
                    meta[std::string(trim(kv.substr(0, eq)))] = std::string(trim(kv.substr(eq + 1)));
            } else if (body.rfind("fs:", 0) == 0) {
                parse_double(body.substr(3), declared_fs);
            }
            continue;
        }
        if (header.empty()) {
            for (auto h : split(line, ',')) header.emplace_back(trim(h));
            if (header.size() < 2 || header.front() != "t")
                throw FormatError(source + ":" + std::to_string(line_no) + ": missing header row 't,<name>...'");
            cols.resize(header.size() - 1);
            continue;
        }
        auto fields = split(line, ',');
        if (fields.size() != header.size())
            throw FormatError(source + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        double tv = 0.0;
        if (!parse_double(fields[0], tv))
            throw FormatError(source + ":" + std::to_string(line_no) + ": bad time value");
        t.push_back(tv);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            double v = 0.0;
            if (!parse_double(fields[c], v))
                throw FormatError(source + ":" + std::to_string(line_no) + ": bad number in column '" +
                                  header[c] + "'");
            cols[c - 1].push_back(v);
        }
    }
    if (header.empty()) throw FormatError(source + ": missing header row");
    if (t.empty()) throw FormatError(source + ": no data rows");

    double fs = declared_fs;
    if (t.size() >= 2) {
        std::vector<double> steps(t.size() - 1);
        for (std::size_t i = 1; i < t.size(); ++i) steps[i - 1] = t[i] - t[i - 1];
        auto sorted = steps;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
        const double med = sorted[sorted.size() / 2];
        if (!(med > 0.0)) throw FormatError(source + ": time column is not strictly increasing");
        for (std::size_t i = 0; i < steps.size(); ++i) {
            // data row i+1 (0-based) is the offending row; report it 1-based among data rows
            if (!(steps[i] > 0.0) || std::abs(steps[i] - med) > 1e-6 * med)
                throw FormatError(source + ": non-uniform timebase at data row " + std::to_string(i + 2) +
                                  " (t=" + fmt17(t[i + 1]) + ")");
        }
        fs = 1.0 / med;
        // keep the writer's exact rate when the declared value agrees
        if (declared_fs > 0.0 && std::abs(fs - declared_fs) <= 1e-6 * declared_fs) fs = declared_fs;
    } else if (!(fs > 0.0)) {
        throw FormatError(source + ": single-row file needs a '# fs:' line");
    }

    std::vector<Channel> chans;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        std::string unit = (units.size() == header.size()) ? units[c + 1] : std::string{};
        chans.push_back(Channel{header[c + 1], std::move(cols[c]), unit});
    }
    try {
        return TimeSeries(fs, t.front(), std::move(chans), std::move(meta));
    } catch (const InputError& e) {
        throw FormatError(source + ": " + e.message());
    }
}

TimeSeries read_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str(), path.string());
}

} // namespace actukit
