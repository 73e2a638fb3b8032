#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twistlab/errors.hpp"

namespace twistlab::io {

inline constexpr const char* kVersionTag = "twistlab-0.1.0";

/// Full round-trip precision, dot decimal, locale independent.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Write-temp-then-rename; readers never observe partial files.
inline void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::Usage, "cannot open " + tmp.string());
        f << text;
    }
    fs::rename(tmp, path);
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Usage, "cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string csv_table(const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t j = 0; j < header.size(); ++j)
        out << (j ? "," : "") << header[j];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw Error(ErrorCode::Usage, "csv row width mismatch");
        for (std::size_t j = 0; j < row.size(); ++j)
            out << (j ? "," : "") << fmt(row[j]);
        out << "\n";
    }
    return out.str();
}

inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    write_text_atomic(path, csv_table(header, rows));
}

namespace detail {

/// Affine map of the data bounding box into an 800x600 viewport with margins;
/// coordinates rounded to 0.01 px so output is stable across platforms.
struct Viewport {
    double x0, x1, y0, y1;
    static constexpr double W = 800.0, H = 600.0, pad = 40.0;

    double px(double x) const {
        double t = (x1 > x0) ? (x - x0) / (x1 - x0) : 0.5;
        return pad + t * (W - 2 * pad);
    }
    double py(double y) const {
        double t = (y1 > y0) ? (y - y0) / (y1 - y0) : 0.5;
        return H - pad - t * (H - 2 * pad);
    }
};

inline std::string px_fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline Viewport fit(const std::vector<double>& x, const std::vector<double>& y) {
    Viewport v{1e300, -1e300, 1e300, -1e300};
    for (double a : x) { v.x0 = std::min(v.x0, a); v.x1 = std::max(v.x1, a); }
    for (double a : y) { v.y0 = std::min(v.y0, a); v.y1 = std::max(v.y1, a); }
    return v;
}

inline const char* palette(int k) {
    static const char* cols[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return cols[((k % 8) + 8) % 8];
}

} // namespace detail

/// Point cloud; optional per-point group id selects a small color palette.
/// No timestamps or other nondeterministic content.
inline std::string svg_scatter(const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<int>* group = nullptr, double r = 0.8) {
    if (x.size() != y.size() || (group && group->size() != x.size()))
        throw Error(ErrorCode::Usage, "svg_scatter: length mismatch");
    auto v = detail::fit(x, y);
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << "<circle cx=\"" << detail::px_fmt(v.px(x[i])) << "\" cy=\""
            << detail::px_fmt(v.py(y[i])) << "\" r=\"" << r << "\" fill=\""
            << detail::palette(group ? (*group)[i] : 0) << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

/// One polyline per series over a common x grid.
inline std::string svg_lines(const std::vector<double>& x,
                             const std::vector<std::vector<double>>& series) {
    std::vector<double> ally;
    for (const auto& s : series) {
        if (s.size() != x.size()) throw Error(ErrorCode::Usage, "svg_lines: length mismatch");
        ally.insert(ally.end(), s.begin(), s.end());
    }
    auto v = detail::fit(x, ally);
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        out << "<polyline fill=\"none\" stroke=\"" << detail::palette(int(k))
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.size(); ++i)
            out << (i ? " " : "") << detail::px_fmt(v.px(x[i])) << ","
                << detail::px_fmt(v.py(series[k][i]));
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Content hash of (operation, canonical argument string, code version tag).
struct CacheKey {
    std::uint64_t hash = 0;
    std::string describe; // the canonical string, kept for diagnostics
};

inline CacheKey cache_key(const std::string& op, const std::string& args) {
    CacheKey k;
    k.describe = std::string(kVersionTag) + "|" + op + "|" + args;
    k.hash = fnv1a64(k.describe);
    return k;
}

namespace detail {
inline std::filesystem::path cache_file(const std::filesystem::path& dir, const CacheKey& k) {
    return dir / (hex64(k.hash) + ".blob");
}
} // namespace detail

/// Atomic content-addressed store: a header line with the payload hash guards
/// against torn or tampered entries.
inline void cache_put(const std::filesystem::path& dir, const CacheKey& key,
                      const std::string& payload) {
    write_text_atomic(detail::cache_file(dir, key),
                      "twistlab-cache " + hex64(fnv1a64(payload)) + "\n" + payload);
}

/// Returns the stored payload on an exact hit, nullopt on a miss. A present
/// entry whose payload hash does not verify is evicted and reported.
inline std::optional<std::string> cache_get(const std::filesystem::path& dir,
                                            const CacheKey& key) {
    namespace fs = std::filesystem;
    fs::path f = detail::cache_file(dir, key);
    if (!fs::exists(f)) return std::nullopt;
    std::string blob = read_text(f);
    const std::string magic = "twistlab-cache ";
    bool ok = blob.rfind(magic, 0) == 0 && blob.size() >= magic.size() + 17 &&
              blob[magic.size() + 16] == '\n';
    if (ok) {
        std::string stored = blob.substr(magic.size(), 16);
        std::string payload = blob.substr(magic.size() + 17);
        if (stored == hex64(fnv1a64(payload))) return payload;
    }
    fs::remove(f);
    throw Error(ErrorCode::CorruptCache, "evicted corrupt entry " + f.string());
}

} // namespace twistlab::io
