#pragma once

// Artifact writers: CSV tables, JSON reports, SVG line plots and a raw
// binary snapshot format.

#include "burgers_lab/forcing.hpp"
#include "burgers_lab/integrator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace burgers_lab::io {

namespace fs = std::filesystem;

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

inline void write_text(const fs::path& path, const std::string& text) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Numeric table with a header row. Rows are written with %.17g and LF.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<double> row) {
        if (row.size() != header_.size()) throw std::invalid_argument("csv row width does not match header");
        rows_.push_back(std::move(row));
    }

    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (i) s += ',';
            s += header_[i];
        }
        s += '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) s += ',';
                s += format_double(row[i]);
            }
            s += '\n';
        }
        return s;
    }

    void write(const fs::path& path) const { write_text(path, str()); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

inline CsvTable norms_table(const Trajectory& traj) {
    CsvTable t({"t", "l1", "l2", "linf", "h1", "h2", "mean", "min", "max", "l2sq", "dx_l2sq", "h_dot_u",
                "dt_l2", "dt_h2"});
    for (const NormRecord& r : traj.records) {
        t.add_row({r.t, r.l1, r.l2, r.linf, r.h1, r.h2, r.mean, r.min, r.max, r.l2sq, r.dx_l2sq, r.h_dot_u,
                   r.dt_l2, r.dt_h2});
    }
    return t;
}

/// One row per path node: t, then alpha_m xi_m and alpha_m eta_m per mode, so
/// that h(t, x) = sum_m (a_m cos 2 pi m x + b_m sin 2 pi m x) at the nodes.
inline CsvTable forcing_path_table(const StochasticPath& path) {
    const std::size_t modes = static_cast<std::size_t>(path.spec().modes);
    std::vector<std::string> header{"t"};
    for (std::size_t k = 0; k < modes; ++k) {
        header.push_back("a" + std::to_string(k + 1));
        header.push_back("b" + std::to_string(k + 1));
    }
    CsvTable t(std::move(header));
    for (std::size_t s = 0; s <= path.steps(); ++s) {
        std::vector<double> row{path.node_time(s)};
        for (std::size_t k = 0; k < modes; ++k) {
            row.push_back(path.alpha(k) * path.xi(s, k));
            row.push_back(path.alpha(k) * path.eta(s, k));
        }
        t.add_row(std::move(row));
    }
    return t;
}

/// Keys come out sorted (std::map-backed objects), so reruns are byte-identical.
inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, dump_json(j)); }

/// Non-finite doubles become strings, since JSON has no literal for them.
inline nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

// Binary snapshot layout (native endianness): uint64 n, uint64 count,
// count doubles of times, then count * n doubles row-major.
inline void write_snapshots(const fs::path& path, const Trajectory& traj) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const std::uint64_t n = traj.grid.n();
    const std::uint64_t count = traj.snapshots.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    out.write(reinterpret_cast<const char*>(traj.snapshot_times.data()),
              static_cast<std::streamsize>(count * sizeof(double)));
    for (const Field& f : traj.snapshots) {
        out.write(reinterpret_cast<const char*>(f.values().data()), static_cast<std::streamsize>(n * sizeof(double)));
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct SnapshotFile {
    std::uint64_t n = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> values;
};

inline SnapshotFile read_snapshots(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    SnapshotFile s;
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&s.n), sizeof s.n);
    in.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!in || s.n == 0 || s.n > (1u << 26) || count > (1u << 26)) throw std::runtime_error("bad snapshot header");
    s.times.resize(count);
    in.read(reinterpret_cast<char*>(s.times.data()), static_cast<std::streamsize>(count * sizeof(double)));
    s.values.assign(count, std::vector<double>(s.n));
    for (auto& row : s.values) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(s.n * sizeof(double)));
    }
    if (!in) throw std::runtime_error("truncated snapshot file");
    return s;
}

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

struct PlotOptions {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    bool log_y = false;
    std::string stamp;  // optional footer text; empty keeps the file reproducible
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string o;
    for (char ch : s) {
        switch (ch) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '"': o += "&quot;"; break;
            default: o += ch;
        }
    }
    return o;
}

inline std::string fmt(double v, const char* f = "%.2f") {
    char buf[40];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace detail

/// Plain SVG line plot. Points with y <= 0 are dropped on a log axis.
inline std::string svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
    constexpr double W = 720, H = 420, L = 70, R = 150, T = 40, B = 50;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (opt.log_y && s.y[i] <= 0)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-300) x1 = x0 + 1;
    if (y1 - y0 < 1e-300) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::xml_escape(opt.title) << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0;
        const double fy = y0 + (y1 - y0) * i / 4.0;
        const double sx = L + (W - L - R) * i / 4.0;
        const double sy = H - B - (H - T - B) * i / 4.0;
        o << "<text x=\"" << sx << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
          << detail::fmt(fx, "%.3g") << "</text>\n";
        const std::string ylab = opt.log_y ? "1e" + detail::fmt(fy, "%.1f") : detail::fmt(fy, "%.3g");
        o << "<text x=\"" << L - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">" << ylab << "</text>\n";
    }
    o << "<text x=\"" << L + (W - L - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
      << detail::xml_escape(opt.x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << T + (H - T - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << T + (H - T - B) / 2 << ")\">" << detail::xml_escape(opt.y_label + (opt.log_y ? " (log10)" : ""))
      << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % 10];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (opt.log_y && s.y[i] <= 0)) continue;
            o << detail::fmt(px(s.x[i])) << ',' << detail::fmt(py(s.y[i])) << ' ';
        }
        o << "\"/>\n";
        const double ly = T + 14 + 18 * static_cast<double>(k);
        o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly - 4
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << W - R + 34 << "\" y=\"" << ly << "\">" << detail::xml_escape(s.label) << "</text>\n";
    }
    if (!opt.stamp.empty()) {
        o << "<text x=\"" << W - 6 << "\" y=\"" << H - 4 << "\" text-anchor=\"end\" font-size=\"9\" fill=\"#888\">"
          << detail::xml_escape(opt.stamp) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

inline void write_svg(const fs::path& path, const std::vector<PlotSeries>& series, const PlotOptions& opt) {
    write_text(path, svg_plot(series, opt));
}

}  // namespace burgers_lab::io
