// Copyright 2026 The sgt-qudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file report.hpp
 * Text tables and SVG convergence plots built from experiment results.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "experiments.hpp"
#include "io.hpp"
#include "stats.hpp"

namespace sgt::report {

namespace detail {

inline std::string percent(double v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, 100.0 * v);
    return buf;
}

inline std::string cell(const FidelitySummary &f) {
    const int digits = f.median < 0.99 ? 1 : 2;
    return percent(f.median, digits) + " +" + percent(f.upper_quartile - f.median, digits) + "/-" +
           percent(f.median - f.lower_quartile, digits) + " %";
}

inline std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) {
        s.append(width - s.size(), ' ');
    }
    return s;
}

} // namespace detail

/// Median final fidelity with quartile offsets; rows are count levels from
/// high to low, columns SGT / MLST per dimension.
[[nodiscard]] inline std::string comparison_table_text(const ComparisonTable &table) {
    std::vector<std::size_t> dims;
    std::vector<std::uint64_t> levels;
    for (const auto &r : table.rows) {
        if (std::find(dims.begin(), dims.end(), r.dim) == dims.end()) dims.push_back(r.dim);
        if (std::find(levels.begin(), levels.end(), r.max_counts) == levels.end()) levels.push_back(r.max_counts);
    }
    std::sort(dims.begin(), dims.end());
    std::sort(levels.rbegin(), levels.rend());

    constexpr std::size_t w = 22;
    std::ostringstream out;
    out << detail::pad("", 9);
    for (const auto d : dims) {
        out << "| " << detail::pad("d=" + std::to_string(d), 2 * w);
    }
    out << "\n" << detail::pad("N", 9);
    for (std::size_t i = 0; i < dims.size(); ++i) {
        out << "| " << detail::pad("SGT", w) << detail::pad("MLST", w);
    }
    out << "\n";
    for (const auto n : levels) {
        out << detail::pad(std::to_string(n), 9);
        for (const auto d : dims) {
            out << "| ";
            for (const auto m : {Method::Sgt, Method::Mlst}) {
                try {
                    out << detail::pad(detail::cell(table.at(m, d, n).fidelity), w);
                } catch (const Error &) {
                    out << detail::pad("-", w);
                }
            }
        }
        out << "\n";
    }
    return out.str();
}

[[nodiscard]] inline std::string comparison_table_csv(const ComparisonTable &table) {
    std::ostringstream out;
    out << "method,dim,max_counts,median_fidelity,q25_fidelity,q75_fidelity,population\n";
    for (const auto &r : table.rows) {
        out << to_string(r.method) << ',' << r.dim << ',' << r.max_counts << ','
            << io::format_double(r.fidelity.median) << ',' << io::format_double(r.fidelity.lower_quartile) << ','
            << io::format_double(r.fidelity.upper_quartile) << ',' << r.fidelity.population << '\n';
    }
    return out.str();
}

[[nodiscard]] inline std::string budget_csv(const std::vector<BudgetEntry> &entries) {
    std::ostringstream out;
    out << "dim,max_counts,toggle,final_median_infidelity,final_q25,final_q75\n";
    for (const auto &e : entries) {
        out << e.condition.dim << ',' << e.condition.max_counts << ',' << e.condition.label << ','
            << io::format_double(e.stats.final_median()) << ',' << io::format_double(e.stats.final_lower()) << ','
            << io::format_double(e.stats.final_upper()) << '\n';
    }
    return out.str();
}

struct PlotSeries {
    std::string label;
    SummaryStats stats;
};

inline void check_series(const std::vector<PlotSeries> &series) {
    if (series.empty()) {
        throw Error("nothing to plot");
    }
    const std::size_t k = series.front().stats.iterations();
    for (const auto &s : series) {
        if (s.stats.iterations() == 0) {
            throw Error("series '" + s.label + "' is empty");
        }
        if (s.stats.iterations() != k) {
            throw Error("series '" + s.label + "' has " + std::to_string(s.stats.iterations()) +
                        " iterations, expected " + std::to_string(k));
        }
    }
}

/// Long-format table behind a plot: one row per (series, iteration).
[[nodiscard]] inline std::string plot_data_csv(const std::vector<PlotSeries> &series) {
    check_series(series);
    std::ostringstream out;
    out << "series,iteration,median,q25,q75\n";
    for (const auto &s : series) {
        for (std::size_t k = 0; k < s.stats.iterations(); ++k) {
            out << s.label << ',' << (k + 1) << ',' << io::format_double(s.stats.median[k]) << ','
                << io::format_double(s.stats.lower_quartile[k]) << ','
                << io::format_double(s.stats.upper_quartile[k]) << '\n';
        }
    }
    return out.str();
}

/**
 * Infidelity versus iteration, one median line and quartile band per
 * series. The y axis is log10 unless `log_y` is false; nonpositive values
 * are clipped to the bottom decade.
 */
[[nodiscard]] inline std::string render_svg(const std::vector<PlotSeries> &series, const std::string &title,
                                            bool log_y = true) {
    check_series(series);
    constexpr double width = 800.0;
    constexpr double height = 500.0;
    constexpr double left = 80.0;
    constexpr double right = 170.0;
    constexpr double top = 40.0;
    constexpr double bottom = 60.0;
    static constexpr std::array<const char *, 8> palette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    const std::size_t k = series.front().stats.iterations();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto &s : series) {
        for (const auto *arr : {&s.stats.lower_quartile, &s.stats.median, &s.stats.upper_quartile}) {
            for (const double v : *arr) {
                if (std::isfinite(v) && (!log_y || v > 0.0)) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
        }
    }
    if (!std::isfinite(lo)) {
        lo = log_y ? 1e-4 : 0.0;
        hi = 1.0;
    }
    double y0 = lo;
    double y1 = hi;
    if (log_y) {
        y0 = std::floor(std::log10(lo));
        y1 = std::ceil(std::log10(hi));
        if (y1 <= y0) y1 = y0 + 1.0;
    } else if (y1 <= y0) {
        y1 = y0 + 1.0;
    }
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const auto px = [&](std::size_t iter) {
        return left + (k <= 1 ? 0.0 : plot_w * static_cast<double>(iter) / static_cast<double>(k - 1));
    };
    const auto py = [&](double v) {
        double u = 0.0;
        if (log_y) {
            u = (std::isfinite(v) && v > 0.0) ? std::log10(v) : y0;
        } else {
            u = std::isfinite(v) ? v : y0;
        }
        u = std::clamp(u, y0, y1);
        return top + plot_h * (1.0 - (u - y0) / (y1 - y0));
    };
    const auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
        << "</text>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // y ticks
    if (log_y) {
        for (double e = y0; e <= y1 + 1e-9; e += 1.0) {
            const double y = py(std::pow(10.0, e));
            svg << "<line x1=\"" << left << "\" y1=\"" << num(y) << "\" x2=\"" << left + plot_w << "\" y2=\""
                << num(y) << "\" stroke=\"#dddddd\"/>\n";
            svg << "<text x=\"" << left - 8 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e"
                << static_cast<int>(e) << "</text>\n";
        }
    } else {
        for (int i = 0; i <= 5; ++i) {
            const double v = y0 + (y1 - y0) * i / 5.0;
            const double y = py(v);
            svg << "<text x=\"" << left - 8 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << num(v)
                << "</text>\n";
        }
    }
    // x ticks
    for (int i = 0; i <= 5; ++i) {
        const auto iter = static_cast<std::size_t>(std::llround(static_cast<double>(k - 1) * i / 5.0));
        svg << "<text x=\"" << num(px(iter)) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\">" << iter + 1 << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\">iteration</text>\n";
    svg << "<text transform=\"translate(20," << top + plot_h / 2
        << ") rotate(-90)\" text-anchor=\"middle\">infidelity</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto &s = series[si];
        const char *color = palette[si % palette.size()];
        svg << "<g class=\"series\" data-label=\"" << s.label << "\">\n";
        svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < k; ++i) {
            svg << num(px(i)) << ',' << num(py(s.stats.upper_quartile[i])) << ' ';
        }
        for (std::size_t i = k; i-- > 0;) {
            svg << num(px(i)) << ',' << num(py(s.stats.lower_quartile[i])) << ' ';
        }
        svg << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < k; ++i) {
            svg << num(px(i)) << ',' << num(py(s.stats.median[i])) << ' ';
        }
        svg << "\"/>\n";
        const double ly = top + 16.0 + 20.0 * static_cast<double>(si);
        svg << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 36
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
        svg << "<text x=\"" << left + plot_w + 42 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace sgt::report
