#include "bisurf/contour.hpp"

#include <map>
#include <stdexcept>

namespace bisurf {

namespace {

// A contour vertex lies on a lattice edge; keying segments by edge index
// makes stitching exact.
struct EdgeKey {
    int orient; // 0: horizontal (i,j)-(i+1,j), 1: vertical (i,j)-(i,j+1)
    int i, j;
    bool operator<(const EdgeKey& o) const {
        if (orient != o.orient) return orient < o.orient;
        if (j != o.j) return j < o.j;
        return i < o.i;
    }
};

struct Segment {
    EdgeKey from, to;
    Point p_from, p_to;
};

} // namespace

std::vector<Polyline> extract_level_curves(int ncols, int nrows,
                                           const std::vector<double>& node_values,
                                           Point origin, double spacing, double level) {
    if (static_cast<int>(node_values.size()) != ncols * nrows)
        throw std::invalid_argument("raster dimensions do not match value count");

    const auto value = [&](int i, int j) { return node_values[j * ncols + i]; };
    const auto pos = [&](int i, int j) {
        return Point{origin.x + i * spacing, origin.y + j * spacing};
    };
    // Crossing point on the edge from (i0,j0) to (i1,j1), linear interpolation.
    const auto crossing = [&](int i0, int j0, int i1, int j1) {
        const double v0 = value(i0, j0), v1 = value(i1, j1);
        const double t = (level - v0) / (v1 - v0);
        const Point a = pos(i0, j0), b = pos(i1, j1);
        return a + t * (b - a);
    };

    std::vector<Segment> segments;
    for (int j = 0; j + 1 < nrows; ++j) {
        for (int i = 0; i + 1 < ncols; ++i) {
            const bool in_a = value(i, j) >= level;         // bottom-left
            const bool in_b = value(i + 1, j) >= level;     // bottom-right
            const bool in_c = value(i + 1, j + 1) >= level; // top-right
            const bool in_d = value(i, j + 1) >= level;     // top-left
            const int code = (in_a ? 1 : 0) | (in_b ? 2 : 0) | (in_c ? 4 : 0) | (in_d ? 8 : 0);
            if (code == 0 || code == 15) continue;

            const EdgeKey eB{0, i, j}, eR{1, i + 1, j}, eT{0, i, j + 1}, eL{1, i, j};
            const Point pB = crossing(i, j, i + 1, j);
            const Point pR = crossing(i + 1, j, i + 1, j + 1);
            const Point pT = crossing(i, j + 1, i + 1, j + 1);
            const Point pL = crossing(i, j, i, j + 1);

            const auto emit = [&](EdgeKey ka, Point pa, EdgeKey kb, Point pb) {
                segments.push_back({ka, kb, pa, pb});
            };

            // Oriented falling -> rising along the counter-clockwise cell walk
            // a->b->c->d, keeping the inside region on the left.
            switch (code) {
            case 1:  emit(eB, pB, eL, pL); break;
            case 2:  emit(eR, pR, eB, pB); break;
            case 3:  emit(eR, pR, eL, pL); break;
            case 4:  emit(eT, pT, eR, pR); break;
            case 6:  emit(eT, pT, eB, pB); break;
            case 7:  emit(eT, pT, eL, pL); break;
            case 8:  emit(eL, pL, eT, pT); break;
            case 9:  emit(eB, pB, eT, pT); break;
            case 11: emit(eR, pR, eT, pT); break;
            case 12: emit(eL, pL, eR, pR); break;
            case 13: emit(eB, pB, eR, pR); break;
            case 14: emit(eL, pL, eB, pB); break;
            case 5: { // a,c inside
                const double avg = 0.25 * (value(i, j) + value(i + 1, j) +
                                           value(i + 1, j + 1) + value(i, j + 1));
                if (avg >= level) { // filled center: pockets at b and d
                    emit(eB, pB, eR, pR);
                    emit(eT, pT, eL, pL);
                } else {
                    emit(eB, pB, eL, pL);
                    emit(eT, pT, eR, pR);
                }
                break;
            }
            case 10: { // b,d inside
                const double avg = 0.25 * (value(i, j) + value(i + 1, j) +
                                           value(i + 1, j + 1) + value(i, j + 1));
                if (avg >= level) {
                    emit(eR, pR, eT, pT);
                    emit(eL, pL, eB, pB);
                } else {
                    emit(eR, pR, eB, pB);
                    emit(eL, pL, eT, pT);
                }
                break;
            }
            default: break;
            }
        }
    }

    // Stitch directed segments into chains. Orientation consistency gives
    // each crossing edge exactly one incoming and one outgoing segment.
    std::map<EdgeKey, std::size_t> by_start, by_end;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        by_start.emplace(segments[s].from, s);
        by_end.emplace(segments[s].to, s);
    }

    std::vector<bool> used(segments.size(), false);
    std::vector<Polyline> curves;
    for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
        if (used[s0]) continue;
        // rewind to the chain start; a return to s0 means the chain is a loop
        std::size_t start = s0;
        bool closed = false;
        for (std::size_t guard = 0; guard <= segments.size(); ++guard) {
            const auto prev = by_end.find(segments[start].from);
            if (prev == by_end.end() || used[prev->second]) break;
            if (prev->second == s0) {
                closed = true;
                break;
            }
            start = prev->second;
        }
        Polyline curve;
        curve.closed = closed;
        curve.vertices.push_back(segments[start].p_from);
        std::size_t cur = start;
        while (true) {
            used[cur] = true;
            curve.vertices.push_back(segments[cur].p_to);
            const auto next = by_start.find(segments[cur].to);
            if (next == by_start.end() || used[next->second]) break;
            cur = next->second;
        }
        if (closed) curve.vertices.pop_back(); // last vertex repeats the first
        if (curve.vertices.size() >= 2) curves.push_back(std::move(curve));
    }
    return curves;
}

} // namespace bisurf
