#pragma once

#include "coreset/error.hpp"
#include "coreset/harness/dataset_io.hpp"
#include "coreset/harness/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coreset::harness {

inline constexpr std::string_view kCurveHeader =
    "seed,round,labeled,accuracy,cover_radius,coreset_loss,train_loss,wall_ms";

// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, end};
}

inline std::string encode_curve_csv(const LearningCurve& curve) {
    std::string out(kCurveHeader);
    out.push_back('\n');
    for (const auto& r : curve.rows) {
        out += std::to_string(r.seed) + ',' + std::to_string(r.round) + ',' + std::to_string(r.labeled) + ',' +
               format_double(r.accuracy) + ',' + format_double(r.cover_radius) + ',' +
               format_double(r.coreset_loss) + ',' + format_double(r.train_loss) + ',' +
               format_double(r.wall_ms) + '\n';
    }
    return out;
}

inline void save_curve_csv(const std::string& path, const LearningCurve& curve) {
    detail::write_file(path, encode_curve_csv(curve));
}

inline LearningCurve decode_curve_csv(std::string_view text) {
    LearningCurve curve;
    std::size_t start = 0, line_no = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line_no == 1) {
            require(line == kCurveHeader, ErrorCode::kFormat, "unexpected results CSV header");
            continue;
        }
        const auto f = detail::split_fields(line);
        if (f.size() != 8)
            fail(ErrorCode::kFormat, "line " + std::to_string(line_no) + ": expected 8 fields");
        CurveRow r;
        r.seed = detail::parse_field<std::uint64_t>(f[0], line_no);
        r.round = detail::parse_field<std::size_t>(f[1], line_no);
        r.labeled = detail::parse_field<std::size_t>(f[2], line_no);
        r.accuracy = detail::parse_field<double>(f[3], line_no);
        r.cover_radius = detail::parse_field<double>(f[4], line_no);
        r.coreset_loss = detail::parse_field<double>(f[5], line_no);
        r.train_loss = detail::parse_field<double>(f[6], line_no);
        r.wall_ms = detail::parse_field<double>(f[7], line_no);
        curve.rows.push_back(r);
    }
    require(line_no >= 1, ErrorCode::kFormat, "empty results CSV");
    return curve;
}

inline LearningCurve load_curve_csv(const std::string& path) { return decode_curve_csv(detail::read_file(path)); }

struct SeriesPoint {
    double labeled = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation over seeds
    std::size_t count = 0;
};

struct Series {
    std::string name;
    std::vector<SeriesPoint> points;  // ascending in labeled count
};

inline double population_stddev(std::span<const double> v) {
    require(!v.empty(), ErrorCode::kInvalidArgument, "standard deviation of an empty sequence");
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

// Accuracy mean and spread across seeds at each labeled count.
inline Series summarize(const LearningCurve& curve, std::string name) {
    require(!curve.rows.empty(), ErrorCode::kInvalidArgument, "learning curve is empty");
    std::map<std::size_t, std::vector<double>> by_count;
    for (const auto& r : curve.rows) by_count[r.labeled].push_back(r.accuracy);
    Series s{std::move(name), {}};
    for (const auto& [count, acc] : by_count) {
        SeriesPoint p;
        p.labeled = static_cast<double>(count);
        p.mean = mean(acc);
        p.stddev = population_stddev(acc);
        p.count = acc.size();
        s.points.push_back(p);
    }
    return s;
}

// gnuplot-readable: one block per series (select with `index k`), columns
// labeled, mean, stddev.
inline std::string encode_plot_table(std::span<const Series> series) {
    std::string out;
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (k) out += "\n\n";
        out += "# " + series[k].name + "\n# labeled mean_accuracy stddev\n";
        for (const auto& p : series[k].points)
            out += format_double(p.labeled) + ' ' + format_double(p.mean) + ' ' + format_double(p.stddev) + '\n';
    }
    return out;
}

inline std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string encode_plot_svg(std::span<const Series> series) {
    require(!series.empty(), ErrorCode::kInvalidArgument, "nothing to plot");
    static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    const double width = 640, height = 420, left = 60, right = 150, top = 20, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            x0 = std::min(x0, p.labeled);
            x1 = std::max(x1, p.labeled);
            y0 = std::min(y0, p.mean - p.stddev);
            y1 = std::max(y1, p.mean + p.stddev);
        }
    }
    require(std::isfinite(x0), ErrorCode::kInvalidArgument, "nothing to plot");
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 - y0 < 1e-9) {
        y0 -= 0.05;
        y1 += 0.05;
    }
    auto sx = [&](double x) { return format_double(std::round((left + (x - x0) / (x1 - x0) * pw) * 100) / 100); };
    auto sy = [&](double y) { return format_double(std::round((top + (y1 - y) / (y1 - y0) * ph) * 100) / 100); };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_double(width) + "\" height=\"" +
                      format_double(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<line x1=\"" + sx(x0) + "\" y1=\"" + sy(y0) + "\" x2=\"" + sx(x1) + "\" y2=\"" + sy(y0) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + sx(x0) + "\" y1=\"" + sy(y0) + "\" x2=\"" + sx(x0) + "\" y2=\"" + sy(y1) +
           "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double x = x0 + (x1 - x0) * t / 4.0, y = y0 + (y1 - y0) * t / 4.0;
        out += "<text x=\"" + sx(x) + "\" y=\"" + format_double(top + ph + 18) + "\" text-anchor=\"middle\">" +
               format_double(std::round(x)) + "</text>\n";
        out += "<text x=\"" + format_double(left - 6) + "\" y=\"" + sy(y) + "\" text-anchor=\"end\">" +
               format_double(std::round(y * 1000) / 1000) + "</text>\n";
    }
    out += "<text x=\"" + format_double(left + pw / 2) + "\" y=\"" + format_double(height - 10) +
           "\" text-anchor=\"middle\">labeled points</text>\n";
    out += "<text x=\"14\" y=\"" + format_double(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           format_double(top + ph / 2) + ")\">accuracy</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const std::string color = kColors[k % std::size(kColors)];
        std::string path;
        for (const auto& p : series[k].points) {
            path += (path.empty() ? "" : " ") + sx(p.labeled) + ',' + sy(p.mean);
            out += "<line x1=\"" + sx(p.labeled) + "\" y1=\"" + sy(p.mean - p.stddev) + "\" x2=\"" + sx(p.labeled) +
                   "\" y2=\"" + sy(p.mean + p.stddev) + "\" stroke=\"" + color + "\"/>\n";
        }
        out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + path + "\"/>\n";
        const double ly = top + 16.0 * static_cast<double>(k + 1);
        out += "<line x1=\"" + format_double(left + pw + 12) + "\" y1=\"" + format_double(ly - 4) + "\" x2=\"" +
               format_double(left + pw + 32) + "\" y2=\"" + format_double(ly - 4) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + format_double(left + pw + 36) + "\" y=\"" + format_double(ly) + "\">" +
               xml_escape(series[k].name) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

// Writes `<prefix>.dat` and `<prefix>.svg`.
inline void emit_plot_data(std::span<const Series> series, const std::string& prefix) {
    detail::write_file(prefix + ".dat", encode_plot_table(series));
    detail::write_file(prefix + ".svg", encode_plot_svg(series));
}

}  // namespace coreset::harness
