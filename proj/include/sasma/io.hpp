#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sasma/error.hpp"
#include "sasma/estimate.hpp"
#include "sasma/simulate.hpp"

namespace sasma {

namespace detail {

/// 17 significant digits: parses back to the identical double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text, const std::string& context) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw IoError(context + ": cannot parse number '" + text + "'");
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0') throw IoError(context + ": trailing characters in '" + text + "'");
    return v;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

inline void finish_output(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

/// key=value tokens of a '#'-prefixed line.
inline std::map<std::string, std::string> parse_header_tokens(const std::string& line) {
    std::map<std::string, std::string> kv;
    std::istringstream is(line.substr(line.find_first_not_of("# ")));
    std::string token;
    while (is >> token) {
        const auto eq = token.find('=');
        if (eq != std::string::npos) kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return kv;
}

inline std::string sample_header(std::size_t n, double delta, double alpha, const SampleMeta& meta) {
    return "# n=" + std::to_string(n) + " delta=" + format_double(delta) + " alpha=" + format_double(alpha) +
           " kernel=" + (meta.kernel_id.empty() ? std::string("unknown") : meta.kernel_id) +
           " seed=" + std::to_string(meta.seed) + " stream=" + std::to_string(meta.stream_id);
}

}  // namespace detail

/// Contents of a path or field CSV file.
struct SampleFile {
    std::size_t n = 0;
    double delta = 0.0;
    double alpha = 0.0;
    SampleMeta meta;
    std::vector<double> values;

    bool is_field() const { return n >= 2 && values.size() == n * n; }
    SampledPath path() const { return SampledPath(values, delta, alpha, meta); }
    SampledField field() const { return SampledField(values, n, delta, alpha, meta); }
};

inline void write_path_csv(const SampledPath& path, const std::filesystem::path& file) {
    auto out = detail::open_output(file);
    out << detail::sample_header(path.size(), path.delta(), path.alpha(), path.meta()) << '\n';
    for (double v : path.values()) out << detail::format_double(v) << '\n';
    detail::finish_output(out, file);
}

/// Row-major, one value per line; the header carries the side length n.
inline void write_field_csv(const SampledField& field, const std::filesystem::path& file) {
    auto out = detail::open_output(file);
    out << detail::sample_header(field.n(), field.delta(), field.alpha(), field.meta()) << '\n';
    for (double v : field.values()) out << detail::format_double(v) << '\n';
    detail::finish_output(out, file);
}

inline SampleFile read_sample_csv(const std::filesystem::path& file) {
    auto in = detail::open_input(file);
    SampleFile s;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            if (have_header) continue;
            const auto kv = detail::parse_header_tokens(line);
            const std::string ctx = file.string() + " header";
            auto need = [&](const char* key) -> const std::string& {
                auto it = kv.find(key);
                if (it == kv.end()) throw IoError(ctx + ": missing '" + key + "='");
                return it->second;
            };
            s.n = static_cast<std::size_t>(detail::parse_double(need("n"), ctx));
            s.delta = detail::parse_double(need("delta"), ctx);
            s.alpha = detail::parse_double(need("alpha"), ctx);
            if (auto it = kv.find("kernel"); it != kv.end()) s.meta.kernel_id = it->second;
            if (auto it = kv.find("seed"); it != kv.end()) s.meta.seed = std::stoull(it->second);
            if (auto it = kv.find("stream"); it != kv.end()) s.meta.stream_id = std::stoull(it->second);
            have_header = true;
            continue;
        }
        s.values.push_back(detail::parse_double(line, file.string() + ":" + std::to_string(line_no)));
    }
    if (!have_header) throw IoError(file.string() + ": missing '# n=... delta=...' header");
    if (s.values.size() != s.n && s.values.size() != s.n * s.n)
        throw IoError(file.string() + ": header declares n=" + std::to_string(s.n) + " but the file holds " +
                      std::to_string(s.values.size()) + " values");
    return s;
}

inline SampledPath read_path_csv(const std::filesystem::path& file) {
    const SampleFile s = read_sample_csv(file);
    if (s.values.size() != s.n) throw IoError(file.string() + ": expected a path, found a field");
    return s.path();
}

inline SampledField read_field_csv(const std::filesystem::path& file) {
    const SampleFile s = read_sample_csv(file);
    if (!s.is_field()) throw IoError(file.string() + ": expected an n x n field");
    return s.field();
}

/// Columns t, g_tilde and, when a norm is attached, f_tilde.
inline void write_estimate_csv(const KernelEstimate& est, const std::filesystem::path& file) {
    auto out = detail::open_output(file);
    out << "# " << est.provenance << '\n';
    if (est.norm2) {
        out << "# norm2=" << detail::format_double(*est.norm2);
        if (est.scale) out << " scale=" << detail::format_double(*est.scale);
        if (est.norm_alpha) out << " norm_alpha=" << detail::format_double(*est.norm_alpha);
        out << '\n';
    }
    out << "# lambda_points=" << est.lambda_points << '\n';
    for (const auto& w : est.warnings) out << "# warning: " << w << '\n';
    out << (est.norm2 ? "t,g_tilde,f_tilde\n" : "t,g_tilde\n");
    for (std::size_t i = 0; i < est.t_grid.size(); ++i) {
        out << detail::format_double(est.t_grid[i]) << ',' << detail::format_double(est.g_values[i]);
        if (est.norm2) out << ',' << detail::format_double(est.values[i]);
        out << '\n';
    }
    detail::finish_output(out, file);
}

/// Columns t1, t2, g_tilde.
inline void write_estimate_2d_csv(const KernelEstimate2D& est, const std::filesystem::path& file) {
    auto out = detail::open_output(file);
    out << "# " << est.provenance << '\n';
    for (const auto& w : est.warnings) out << "# warning: " << w << '\n';
    out << "t1,t2,g_tilde\n";
    const std::size_t nt = est.t_grid.size();
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < nt; ++j)
            out << detail::format_double(est.t_grid[i]) << ',' << detail::format_double(est.t_grid[j]) << ','
                << detail::format_double(est.at(i, j)) << '\n';
    detail::finish_output(out, file);
}

/// Splits a CSV data line into numbers.
inline std::vector<double> parse_csv_numbers(const std::string& line, const std::string& context) {
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= line.size()) {
        const auto comma = line.find(',', start);
        const auto end = comma == std::string::npos ? line.size() : comma;
        std::string cell = line.substr(start, end - start);
        const auto first = cell.find_first_not_of(" \t");
        cell = first == std::string::npos ? std::string() : cell.substr(first);
        v.push_back(detail::parse_double(cell, context));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return v;
}

}  // namespace sasma
