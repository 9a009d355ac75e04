#include "bisurf/geometry.hpp"

#include <algorithm>

namespace bisurf {

bool point_in_polygon(Point p, const Polyline& poly) {
    if (!poly.closed)
        throw std::invalid_argument("point_in_polygon requires a closed polyline");
    bool inside = false;
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        // Edge crosses the horizontal ray through p?
        const bool crosses = (v[i].y > p.y) != (v[j].y > p.y);
        if (crosses) {
            const double x_int = v[j].x + (v[i].x - v[j].x) * (p.y - v[j].y) / (v[i].y - v[j].y);
            if (p.x < x_int) inside = !inside;
        }
    }
    return inside;
}

bool on_polyline(Point p, const Polyline& poly, double tol) {
    for (std::size_t s = 0; s < poly.segment_count(); ++s) {
        const Point a = poly.segment_start(s), b = poly.segment_end(s);
        const Point ab = b - a;
        const double len2 = dot(ab, ab);
        double u = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        if (dist(p, a + u * ab) <= tol) return true;
    }
    return false;
}

std::vector<Point> sample_curve_points(const Polyline& curve, int n) {
    if (n < 1) throw std::invalid_argument("sample_curve_points: n must be >= 1");
    const double L = curve.length();
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    if (curve.closed) {
        const double step = L / n;
        for (int i = 0; i < n; ++i) pts.push_back(curve.at_arclength(i * step));
    } else {
        if (n == 1) {
            pts.push_back(curve.vertices.front());
        } else {
            const double step = L / (n - 1);
            for (int i = 0; i < n; ++i) pts.push_back(curve.at_arclength(i * step));
        }
    }
    return pts;
}

} // namespace bisurf
