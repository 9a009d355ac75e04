#ifndef BISURF_GEOMETRY_HPP
#define BISURF_GEOMETRY_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace bisurf {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double dist(Point a, Point b) { return norm(a - b); }

/// Axis-aligned rectangle (x0,y0) .. (x1,y1) in map units.
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool contains(Point p, double tol = 0.0) const {
        return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
    }
};

/// Ordered vertex chain in map units. Closed polylines wrap from the last
/// vertex back to the first; the closing vertex is not duplicated.
struct Polyline {
    std::vector<Point> vertices;
    bool closed = false;

    Polyline() = default;
    Polyline(std::vector<Point> v, bool c) : vertices(std::move(v)), closed(c) {
        validate();
    }

    void validate() const {
        if (vertices.size() < 2)
            throw std::invalid_argument("polyline needs at least 2 vertices");
        for (std::size_t i = 1; i < vertices.size(); ++i)
            if (dist(vertices[i - 1], vertices[i]) == 0.0)
                throw std::invalid_argument("polyline has duplicate consecutive vertices at index " +
                                            std::to_string(i));
        if (closed && dist(vertices.front(), vertices.back()) == 0.0)
            throw std::invalid_argument("closed polyline repeats its first vertex");
    }

    std::size_t segment_count() const {
        return closed ? vertices.size() : vertices.size() - 1;
    }

    Point segment_start(std::size_t s) const { return vertices[s]; }
    Point segment_end(std::size_t s) const {
        return vertices[(s + 1) % vertices.size()];
    }

    double length() const {
        double L = 0.0;
        for (std::size_t s = 0; s < segment_count(); ++s)
            L += dist(segment_start(s), segment_end(s));
        return L;
    }

    /// Position at arclength t in [0, length]; closed curves wrap.
    Point at_arclength(double t) const {
        const double L = length();
        if (closed) {
            t = std::fmod(t, L);
            if (t < 0.0) t += L;
        } else {
            t = std::clamp(t, 0.0, L);
        }
        for (std::size_t s = 0; s < segment_count(); ++s) {
            const Point a = segment_start(s), b = segment_end(s);
            const double seg = dist(a, b);
            if (t <= seg || s + 1 == segment_count()) {
                const double u = seg > 0.0 ? std::min(t / seg, 1.0) : 0.0;
                return a + u * (b - a);
            }
            t -= seg;
        }
        return vertices.back();
    }
};

/// Even-odd ray casting. Points exactly on an edge are reported by
/// on_polygon_boundary, not by this predicate.
bool point_in_polygon(Point p, const Polyline& poly);

/// True if p lies within tol of some edge of the polyline.
bool on_polyline(Point p, const Polyline& poly, double tol);

/// n points at equal arclength spacing. Closed: spacing L/n starting at
/// vertex 0. Open: endpoints included, spacing L/(n-1); n==1 gives the
/// start vertex.
std::vector<Point> sample_curve_points(const Polyline& curve, int n);

} // namespace bisurf

#endif
