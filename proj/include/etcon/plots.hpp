#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "simulator.hpp"

namespace etcon {
namespace svg {

inline const char* palette(int k) {
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colors[k % 10];
}

struct Series {
    std::string label; // empty: skip in the legend
    int color = 0;
    bool step = false;
    std::vector<double> t, y;
};

inline std::string fmt(double v, const char* spec = "%.6g") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// Fixed-size canvas, linear axes, legend from labeled series.
inline void write_plot(std::ostream& os, const std::string& title, const std::string& ylabel,
                       const std::vector<Series>& series) {
    const double W = 800, H = 480, ml = 64, mr = 16, mt = 34, mb = 40;
    double t0 = std::numeric_limits<double>::infinity(), t1 = -t0;
    double y0 = t0, y1 = -t0;
    for (const Series& s : series)
        for (size_t k = 0; k < s.t.size(); ++k) {
            t0 = std::min(t0, s.t[k]);
            t1 = std::max(t1, s.t[k]);
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    if (!std::isfinite(t0)) { t0 = 0; t1 = 1; }
    if (!std::isfinite(y0)) { y0 = 0; y1 = 1; }
    if (t1 <= t0) t1 = t0 + 1;
    if (y1 <= y0) { y0 -= 0.5; y1 += 0.5; }
    double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto X = [&](double t) { return ml + (t - t0) / (t1 - t0) * (W - ml - mr); };
    auto Y = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << ' ' << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
       << title << "</text>\n";
    // axes and ticks
    os << "<g stroke=\"#333\" stroke-width=\"1\">";
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
       << H - mb << "\"/>";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
       << "\"/></g>\n";
    for (int k = 0; k <= 5; ++k) {
        double tv = t0 + (t1 - t0) * k / 5.0;
        double yv = y0 + (y1 - y0) * k / 5.0;
        os << "<line x1=\"" << fmt(X(tv)) << "\" y1=\"" << H - mb << "\" x2=\"" << fmt(X(tv))
           << "\" y2=\"" << H - mb + 4 << "\" stroke=\"#333\"/>";
        os << "<text x=\"" << fmt(X(tv)) << "\" y=\"" << H - mb + 17
           << "\" text-anchor=\"middle\">" << fmt(tv, "%.3g") << "</text>\n";
        os << "<line x1=\"" << ml - 4 << "\" y1=\"" << fmt(Y(yv)) << "\" x2=\"" << ml
           << "\" y2=\"" << fmt(Y(yv)) << "\" stroke=\"#333\"/>";
        os << "<text x=\"" << ml - 7 << "\" y=\"" << fmt(Y(yv) + 4)
           << "\" text-anchor=\"end\">" << fmt(yv, "%.3g") << "</text>\n";
    }
    os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 8
       << "\" text-anchor=\"middle\">t</text>\n";
    os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (mt + H - mb) / 2 << ")\">"
       << ylabel << "</text>\n";
    // series
    for (const Series& s : series) {
        if (s.t.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << palette(s.color)
           << "\" stroke-width=\"1.3\" points=\"";
        for (size_t k = 0; k < s.t.size(); ++k) {
            if (s.step && k > 0)
                os << fmt(X(s.t[k])) << ',' << fmt(Y(s.y[k - 1])) << ' ';
            os << fmt(X(s.t[k])) << ',' << fmt(Y(s.y[k])) << ' ';
        }
        os << "\"/>\n";
    }
    // legend
    double ly = mt + 6;
    for (const Series& s : series) {
        if (s.label.empty()) continue;
        os << "<line x1=\"" << W - mr - 130 << "\" y1=\"" << ly << "\" x2=\"" << W - mr - 106
           << "\" y2=\"" << ly << "\" stroke=\"" << palette(s.color)
           << "\" stroke-width=\"2\"/>";
        os << "<text x=\"" << W - mr - 100 << "\" y=\"" << ly + 4 << "\">" << s.label
           << "</text>\n";
        ly += 16;
    }
    os << "</svg>\n";
}

} // namespace svg

// Per-agent disagreement against a reference agent, every state coordinate.
inline void plot_disagreement(std::ostream& os, const Trajectory& tr, int ref_agent = 0) {
    std::vector<svg::Series> series;
    if (!tr.samples.empty()) {
        const int N = static_cast<int>(tr.samples.front().x.rows());
        const int n = static_cast<int>(tr.samples.front().x.cols());
        for (int i = 0; i < N; ++i) {
            if (i == ref_agent && N > 1) continue;
            for (int j = 0; j < n; ++j) {
                svg::Series s;
                s.color = i;
                if (j == 0) s.label = "agent " + std::to_string(i + 1);
                for (const Sample& smp : tr.samples) {
                    s.t.push_back(smp.t);
                    s.y.push_back(smp.x(i, j) - smp.x(ref_agent, j));
                }
                series.push_back(std::move(s));
            }
        }
    }
    svg::write_plot(os, "Pairwise disagreement", "x_i - x_ref", series);
}

inline void plot_gains(std::ostream& os, const Trajectory& tr) {
    std::vector<svg::Series> series;
    if (!tr.samples.empty()) {
        const int N = static_cast<int>(tr.samples.front().d.size());
        for (int i = 0; i < N; ++i) {
            svg::Series s;
            s.color = i;
            s.label = "agent " + std::to_string(i + 1);
            for (const Sample& smp : tr.samples) {
                s.t.push_back(smp.t);
                s.y.push_back(smp.d(i));
            }
            series.push_back(std::move(s));
        }
    }
    svg::write_plot(os, "Adaptive gains", "d_i", series);
}

inline void plot_control(std::ostream& os, const Trajectory& tr) {
    std::vector<svg::Series> series;
    if (!tr.samples.empty()) {
        const int N = static_cast<int>(tr.samples.front().u.rows());
        const int p = static_cast<int>(tr.samples.front().u.cols());
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < p; ++j) {
                svg::Series s;
                s.color = i;
                s.step = true;
                if (j == 0) s.label = "agent " + std::to_string(i + 1);
                for (const Sample& smp : tr.samples) {
                    s.t.push_back(smp.t);
                    s.y.push_back(smp.u(i, j));
                }
                series.push_back(std::move(s));
            }
        }
    }
    svg::write_plot(os, "Control inputs", "u_i", series);
}

// Raster of triggering instants: one row per agent, one tick per event.
inline void plot_events(std::ostream& os, const Trajectory& tr, int agents, double t_end) {
    const double W = 800, H = 480, ml = 64, mr = 16, mt = 34, mb = 40;
    double t1 = t_end > 0 ? t_end : 1.0;
    auto X = [&](double t) { return ml + t / t1 * (W - ml - mr); };
    auto Y = [&](double a) { return mt + (a + 0.5) / std::max(agents, 1) * (H - mt - mb); };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << ' ' << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2
       << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">Triggering instants</text>\n";
    os << "<g stroke=\"#333\" stroke-width=\"1\"><line x1=\"" << ml << "\" y1=\"" << H - mb
       << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb << "\"/><line x1=\"" << ml << "\" y1=\""
       << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\"/></g>\n";
    for (int k = 0; k <= 5; ++k) {
        double tv = t1 * k / 5.0;
        os << "<text x=\"" << svg::fmt(X(tv)) << "\" y=\"" << H - mb + 17
           << "\" text-anchor=\"middle\">" << svg::fmt(tv, "%.3g") << "</text>\n";
    }
    for (int i = 0; i < agents; ++i)
        os << "<text x=\"" << ml - 7 << "\" y=\"" << svg::fmt(Y(i) + 4)
           << "\" text-anchor=\"end\">" << (i + 1) << "</text>\n";
    const double half = (H - mt - mb) / std::max(agents, 1) * 0.3;
    for (const EventRecord& ev : tr.events) {
        double y = Y(ev.agent);
        os << "<line x1=\"" << svg::fmt(X(ev.t)) << "\" y1=\"" << svg::fmt(y - half)
           << "\" x2=\"" << svg::fmt(X(ev.t)) << "\" y2=\"" << svg::fmt(y + half)
           << "\" stroke=\"" << svg::palette(ev.agent) << "\" stroke-width=\"1\"/>\n";
    }
    os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 8
       << "\" text-anchor=\"middle\">t</text>\n";
    os << "</svg>\n";
}

} // namespace etcon
