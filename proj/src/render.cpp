#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "hcb/bijection.hpp"

namespace hcb {

std::string render_svg(const LoopTriangulation& t) {
    constexpr double W = 640, H = 480, R = 200;
    std::vector<int> primal, dual;
    for (int v = 0; v < int(t.vertices.size()); ++v) (t.vertices[v] == VertexKind::primal ? primal : dual).push_back(v);
    std::vector<double> x(t.vertices.size()), y(t.vertices.size());
    const auto place = [&](const std::vector<int>& vs, double cx) {
        for (std::size_t k = 0; k < vs.size(); ++k) {
            const double a = std::numbers::pi * (k + 0.5) / double(vs.size());
            x[vs[k]] = cx + (cx < W / 2 ? -1 : 1) * 0.5 * R * std::sin(a);
            y[vs[k]] = H / 2 - R * std::cos(a);
        }
    };
    place(primal, W / 2 - 40);
    place(dual, W / 2 + 40);

    std::string out = fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}">)" "\n", W, H);
    for (std::size_t d = 0; d < t.darts.size(); ++d) {
        const int tw = t.darts[d].twin;
        if (tw < int(d)) continue;
        const int a = t.darts[d].origin, b = t.darts[tw].origin;
        const bool q = t.vertices[a] != t.vertices[b];
        const char* colour = q ? "#bbbbbb" : (t.vertices[a] == VertexKind::primal ? "#1f5fbf" : "#bf3f1f");
        out += fmt::format(R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="{}" stroke-width="{}"/>)" "\n",
                           x[a], y[a], x[b], y[b], colour, q ? 0.5 : 1.5);
    }
    static constexpr const char* loop_colours[] = {"#2a9d2a", "#9d2a9d", "#d08a00", "#2a8a9d", "#6a6a2a"};
    for (std::size_t l = 0; l < t.loops.size(); ++l) {
        std::string pts;
        for (int f : t.loops[l]) {
            double cx = 0, cy = 0;
            for (int d : t.triangles[f].darts) cx += x[t.darts[d].origin] / 3, cy += y[t.darts[d].origin] / 3;
            pts += fmt::format("{:.1f},{:.1f} ", cx, cy);
        }
        out += fmt::format(R"(<polygon points="{}" fill="none" stroke="{}" stroke-width="2"/>)" "\n", pts,
                           loop_colours[l % std::size(loop_colours)]);
    }
    for (std::size_t v = 0; v < t.vertices.size(); ++v)
        out += fmt::format(R"(<circle cx="{:.1f}" cy="{:.1f}" r="4" fill="{}"/>)" "\n", x[v], y[v],
                           t.vertices[v] == VertexKind::primal ? "#1f5fbf" : "#bf3f1f");
    out += "</svg>\n";
    return out;
}

}  // namespace hcb
