// Copyright 2026 The miesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Self-contained SVG line plots of purity scan CSVs.

#ifndef MIESIM_SVG_HPP
#define MIESIM_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace miesim {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string &name) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw std::invalid_argument("CSV has no column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }
};

/// Plain comma-separated values without quoting. Lines starting with '#' are skipped.
inline CsvTable read_csv(std::istream &is) {
    CsvTable t;
    auto split = [](const std::string &line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
        if (!line.empty() && line.back() == ',') out.push_back("");
        return out;
    };
    std::size_t lineno = 0;
    for (std::string line; std::getline(is, line);) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw std::invalid_argument("CSV line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                                        " fields, header has " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    if (t.header.empty()) throw std::invalid_argument("empty CSV");
    return t;
}

inline CsvTable load_csv(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_csv(f);
}

inline const std::vector<std::string> &scan_csv_schema() {
    static const std::vector<std::string> s = {"arch", "param", "L", "grid", "trials", "mean_purity", "stderr", "seed"};
    return s;
}

inline const std::vector<std::string> &plot_kinds() {
    static const std::vector<std::string> k = {"mie-scan"};
    return k;
}

namespace detail {

inline double parse_number(const std::string &s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception &) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

/// Tick positions at 1, 2 or 5 times a power of ten, about `target` of them.
inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    double span = hi - lo;
    double raw = span / target;
    double p = std::pow(10.0, std::floor(std::log10(raw)));
    double step = p;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * p;
        if (step >= raw) break;
    }
    std::vector<double> out;
    for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + 1e-9 * step; v += step) {
        out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
}

inline std::string fmt(double v, int prec = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

inline std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace detail

struct ScanPoint {
    double x = 0, y = 0, se = 0;
};

/// Curves keyed by the scan parameter (depth or tau). x is the grid side, or the shield side
/// L when every row shares one grid.
struct ScanCurves {
    std::string x_label;
    std::map<std::size_t, std::vector<ScanPoint>> curves;
    std::string arch;
};

inline ScanCurves scan_curves(const CsvTable &t) {
    if (t.header != scan_csv_schema()) {
        std::string want;
        for (const auto &h : scan_csv_schema()) want += (want.empty() ? "" : ",") + h;
        throw std::invalid_argument("CSV does not match the mie-scan schema (" + want + ")");
    }
    if (t.rows.empty()) throw std::invalid_argument("CSV has no data rows");
    std::size_t ca = t.column("arch"), cp = t.column("param"), cl = t.column("L"), cg = t.column("grid"),
                cy = t.column("mean_purity"), cs = t.column("stderr");
    bool one_grid = std::all_of(t.rows.begin(), t.rows.end(), [&](const auto &r) { return r[cg] == t.rows[0][cg]; });
    ScanCurves out;
    out.arch = t.rows[0][ca];
    out.x_label = one_grid ? "shield side L" : "grid side";
    for (const auto &r : t.rows) {
        ScanPoint p;
        p.x = one_grid ? detail::parse_number(r[cl]) : detail::parse_number(r[cg].substr(0, r[cg].find('x')));
        p.y = detail::parse_number(r[cy]);
        p.se = detail::parse_number(r[cs]);
        out.curves[static_cast<std::size_t>(detail::parse_number(r[cp]))].push_back(p);
    }
    for (auto &[k, pts] : out.curves) std::sort(pts.begin(), pts.end(), [](auto &a, auto &b) { return a.x < b.x; });
    return out;
}

/// Mean purity against grid size, one polyline per parameter with stderr error bars.
inline std::string plot_scan_svg(const CsvTable &t) {
    ScanCurves sc = scan_curves(t);
    const double W = 720, H = 480, ml = 70, mr = 130, mt = 40, mb = 60;
    double xlo = 1e300, xhi = -1e300, ylo = 0.5, yhi = 1.0;
    for (const auto &[k, pts] : sc.curves) {
        for (const auto &p : pts) {
            xlo = std::min(xlo, p.x), xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y - p.se), yhi = std::max(yhi, p.y + p.se);
        }
    }
    if (xhi - xlo < 1e-9) xlo -= 1, xhi += 1;
    double xpad = 0.04 * (xhi - xlo), ypad = 0.04 * (yhi - ylo);
    xlo -= xpad, xhi += xpad, ylo -= ypad, yhi += ypad;
    auto X = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
    auto Y = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };
    static const char *palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    bool brick = sc.arch == "brickwork";
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << detail::px((ml + W - mr) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
       << "Post-measurement purity of A (" << sc.arch << ")</text>\n";
    // Axes and ticks.
    os << "<g stroke=\"black\" fill=\"none\"><path d=\"M" << ml << ' ' << (H - mb) << " H" << (W - mr) << " M" << ml
       << ' ' << (H - mb) << " V" << mt << "\"/></g>\n";
    os << "<g class=\"xticks\">\n";
    for (double v : detail::nice_ticks(xlo, xhi)) {
        os << "<line x1=\"" << detail::px(X(v)) << "\" y1=\"" << (H - mb) << "\" x2=\"" << detail::px(X(v)) << "\" y2=\""
           << (H - mb + 5) << "\" stroke=\"black\"/><text x=\"" << detail::px(X(v)) << "\" y=\"" << (H - mb + 18)
           << "\" text-anchor=\"middle\">" << detail::fmt(v) << "</text>\n";
    }
    os << "</g>\n<g class=\"yticks\">\n";
    for (double v : detail::nice_ticks(ylo, yhi)) {
        os << "<line x1=\"" << (ml - 5) << "\" y1=\"" << detail::px(Y(v)) << "\" x2=\"" << ml << "\" y2=\""
           << detail::px(Y(v)) << "\" stroke=\"black\"/><text x=\"" << (ml - 8) << "\" y=\"" << detail::px(Y(v) + 4)
           << "\" text-anchor=\"end\">" << detail::fmt(v) << "</text>\n";
    }
    os << "</g>\n";
    os << "<text x=\"" << detail::px((ml + W - mr) / 2) << "\" y=\"" << (H - 15) << "\" text-anchor=\"middle\">"
       << sc.x_label << "</text>\n";
    os << "<text transform=\"translate(18 " << detail::px((mt + H - mb) / 2)
       << ") rotate(-90)\" text-anchor=\"middle\">mean purity</text>\n";
    std::size_t idx = 0;
    for (const auto &[k, pts] : sc.curves) {
        const char *col = palette[idx % 10];
        os << "<g class=\"curve\" stroke=\"" << col << "\" fill=\"" << col << "\">\n";
        if (pts.size() > 1) {
            os << "<polyline fill=\"none\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << detail::px(X(pts[i].x)) << ',' << detail::px(Y(pts[i].y));
            os << "\"/>\n";
        }
        for (const auto &p : pts) {
            double x = X(p.x);
            os << "<line class=\"errorbar\" x1=\"" << detail::px(x) << "\" y1=\"" << detail::px(Y(p.y - p.se))
               << "\" x2=\"" << detail::px(x) << "\" y2=\"" << detail::px(Y(p.y + p.se)) << "\"/>";
            os << "<circle cx=\"" << detail::px(x) << "\" cy=\"" << detail::px(Y(p.y)) << "\" r=\"3\"/>\n";
        }
        os << "</g>\n";
        double ly = mt + 10 + 18.0 * static_cast<double>(idx);
        os << "<g class=\"legend\"><line x1=\"" << (W - mr + 15) << "\" y1=\"" << detail::px(ly) << "\" x2=\""
           << (W - mr + 35) << "\" y2=\"" << detail::px(ly) << "\" stroke=\"" << col
           << "\" stroke-width=\"2\"/><text x=\"" << (W - mr + 40) << "\" y=\"" << detail::px(ly + 4) << "\">"
           << (brick ? "d = " : "tau = ") << k << "</text></g>\n";
        ++idx;
    }
    os << "</svg>\n";
    return os.str();
}

inline std::string plot_svg(const CsvTable &t, const std::string &kind) {
    if (kind == "mie-scan") return plot_scan_svg(t);
    throw std::invalid_argument("unknown plot kind '" + kind + "'");
}

}  // namespace miesim

#endif
