#include "nbcs/svg.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <limits>

#include "nbcs/error.hpp"
#include "nbcs/polytope_approx.hpp"

namespace nbcs {

namespace {

struct Canvas {
    Vector2 lo;
    double scale = 1.0;
    double x_pad = 0.0;
    double y_pad = 0.0;

    // y grows downwards on screen.
    Vector2 map(const Vector2& p) const {
        return {x_pad + scale * (p.x() - lo.x()), kSvgHeight - y_pad - scale * (p.y() - lo.y())};
    }
};

Canvas fit_canvas(const Simplex& root) {
    constexpr double margin = 40.0;
    Vector2 lo(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
    Vector2 hi = -lo;
    for (std::size_t i = 0; i < root.vertex_count(); ++i) {
        const Point v = root.vertex(i);
        lo = lo.cwiseMin(Vector2(v[0], v[1]));
        hi = hi.cwiseMax(Vector2(v[0], v[1]));
    }
    const Vector2 span = hi - lo;
    Canvas c;
    c.lo = lo;
    c.scale = std::min((kSvgWidth - 2 * margin) / span.x(), (kSvgHeight - 2 * margin) / span.y());
    c.x_pad = (kSvgWidth - c.scale * span.x()) / 2;
    c.y_pad = (kSvgHeight - c.scale * span.y()) / 2;
    return c;
}

std::string points_attr(const Canvas& c, const Polygon2D& p) {
    std::string s;
    for (const auto& v : p.vertices) {
        const Vector2 m = c.map(v);
        s += fmt::format("{}{:.2f},{:.2f}", s.empty() ? "" : " ", m.x(), m.y());
    }
    return s;
}

}  // namespace

std::string render_stage_svg(const NestedSystem& sys, const WeightVector& w, const Polygon2D& target,
                             const std::string& title) {
    if (sys.dim() != 2) throw DomainError("SVG output requires d = 2");
    const Canvas c = fit_canvas(sys.root().simplex);
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
        "<title>{2}</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kSvgWidth, kSvgHeight, title);

    const auto leaves = sys.leaves();
    out += "<g fill=\"#9ecae1\" stroke=\"none\">\n";
    for (NodeId leaf : leaves) {
        const Polygon2D region = leaf_region(sys, w, leaf);
        if (region.size() >= 3) out += fmt::format("<polygon points=\"{}\"/>\n", points_attr(c, region));
    }
    out += "</g>\n<g fill=\"none\" stroke=\"#d62728\" stroke-width=\"0.8\">\n";
    for (NodeId leaf : leaves)
        out += fmt::format("<polygon points=\"{}\"/>\n", points_attr(c, triangle_polygon(sys.node(leaf).simplex)));
    out += "</g>\n";
    if (!target.empty())
        out += fmt::format("<polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n",
                           points_attr(c, target));
    out += fmt::format("<text x=\"20\" y=\"30\" font-family=\"sans-serif\" font-size=\"20\">{}</text>\n", title);
    out += "</svg>\n";
    return out;
}

}  // namespace nbcs
