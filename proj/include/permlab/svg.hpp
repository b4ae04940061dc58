#pragma once

#include <algorithm>
#include <string>

#include "permlab/coalescent.hpp"
#include "permlab/permutation.hpp"

namespace permlab {

namespace detail {
inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}
}  // namespace detail

// Scatter plot of the diagram: one dot per (i, sigma(i)) on an n x n frame.
inline std::string svg_diagram(const Permutation& sigma) {
    const double size = 800, margin = 20;
    const double inner = size - 2 * margin;
    int n = sigma.size();
    double r = std::max(0.4, std::min(3.0, inner / (3.0 * n)));
    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"white\"/>\n";
    s += "<rect x=\"" + detail::svg_num(margin) + "\" y=\"" + detail::svg_num(margin) + "\" width=\"" +
         detail::svg_num(inner) + "\" height=\"" + detail::svg_num(inner) +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 1; i <= n; ++i) {
        double cx = margin + inner * (i - 0.5) / n;
        double cy = margin + inner - inner * (sigma(i) - 0.5) / n;
        s += "<circle cx=\"" + detail::svg_num(cx) + "\" cy=\"" + detail::svg_num(cy) + "\" r=\"" +
             detail::svg_num(r) + "\" fill=\"black\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

// Fan of coalescent trajectories driven by a walk. Start times are thinned
// above a few hundred so the file stays viewable.
inline std::string svg_coalescent(const Walk& w, Family f, int max_trajectories = 256) {
    CoalescentProcess proc(w, f, /*materialize_threshold=*/0);
    int n = proc.size();
    int stride = std::max(1, (n + max_trajectories - 1) / max_trajectories);
    const double width = 1000, height = 600, margin = 20;
    int zmin = 0, zmax = 0;
    std::vector<std::vector<int>> trs;
    std::vector<int> starts;
    for (int t = 1; t <= n; t += stride) {
        trs.push_back(proc.trajectory(t));
        starts.push_back(t);
        for (int z : trs.back()) {
            zmin = std::min(zmin, z);
            zmax = std::max(zmax, z);
        }
    }
    double xs = (width - 2 * margin) / std::max(1, n - 1);
    double ys = (height - 2 * margin) / std::max(1, zmax - zmin);
    auto px = [&](int time) { return margin + xs * (time - 1); };
    auto py = [&](int z) { return height - margin - ys * (z - zmin); };
    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(width) + "\" height=\"" +
         detail::svg_num(height) + "\" viewBox=\"0 0 " + detail::svg_num(width) + " " + detail::svg_num(height) +
         "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + detail::svg_num(width) + "\" height=\"" + detail::svg_num(height) +
         "\" fill=\"white\"/>\n";
    s += "<line x1=\"" + detail::svg_num(margin) + "\" y1=\"" + detail::svg_num(py(0)) + "\" x2=\"" +
         detail::svg_num(width - margin) + "\" y2=\"" + detail::svg_num(py(0)) +
         "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
    for (size_t i = 0; i < trs.size(); ++i) {
        s += "<polyline fill=\"none\" stroke=\"#2a7e43\" stroke-width=\"0.8\" points=\"";
        for (size_t j = 0; j < trs[i].size(); ++j) {
            if (j) s += ' ';
            s += detail::svg_num(px(starts[i] + static_cast<int>(j)));
            s += ',';
            s += detail::svg_num(py(trs[i][j]));
        }
        s += "\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace permlab
