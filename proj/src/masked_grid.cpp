#include "bisurf/masked_grid.hpp"

#include <cmath>
#include <queue>
#include <sstream>

namespace bisurf {

namespace {

constexpr int kSteps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

std::string node_str(int i, int j) {
    std::ostringstream os;
    os << "(" << i << "," << j << ")";
    return os.str();
}

} // namespace

MaskedGrid::MaskedGrid(Point origin, double spacing, int ncols, int nrows,
                       std::vector<BoundaryTag> tags)
    : origin_(origin), spacing_(spacing), ncols_(ncols), nrows_(nrows), tags_(std::move(tags)) {
    if (spacing_ <= 0.0) throw std::invalid_argument("grid spacing must be positive");
    if (ncols_ < 2 || nrows_ < 2) throw std::invalid_argument("grid needs at least 2x2 nodes");
    if (static_cast<int>(tags_.size()) != ncols_ * nrows_)
        throw std::invalid_argument("tag array size does not match grid dimensions");
    for (const BoundaryTag t : tags_) {
        if (t != BoundaryTag::Outside) ++active_count_;
        if (t == BoundaryTag::Interior) ++interior_count_;
    }
}

std::optional<std::pair<int, int>> MaskedGrid::outward_normal(int i, int j) const {
    if (!is_boundary(node_id(i, j))) return std::nullopt;
    std::optional<std::pair<int, int>> dir;
    int count = 0;
    for (const auto& s : kSteps) {
        const int ni = i + s[0], nj = j + s[1];
        const bool out = !in_range(ni, nj) || tag(ni, nj) == BoundaryTag::Outside;
        if (out) {
            ++count;
            dir = {s[0], s[1]};
        }
    }
    if (count != 1) return std::nullopt;
    return dir;
}

bool MaskedGrid::is_corner(int i, int j) const {
    return is_boundary(node_id(i, j)) && !outward_normal(i, j).has_value();
}

MaskedGrid::CellRef MaskedGrid::locate(Point p) const {
    const double tol = 1e-9 * spacing_;
    const double fx = (p.x - origin_.x) / spacing_;
    const double fy = (p.y - origin_.y) / spacing_;
    if (fx < -tol || fx > ncols_ - 1 + tol || fy < -tol || fy > nrows_ - 1 + tol)
        throw std::invalid_argument("point outside grid rectangle");
    int i = static_cast<int>(std::floor(fx));
    int j = static_cast<int>(std::floor(fy));
    i = std::clamp(i, 0, ncols_ - 2);
    j = std::clamp(j, 0, nrows_ - 2);
    const double u = std::clamp(fx - i, 0.0, 1.0);
    const double v = std::clamp(fy - j, 0.0, 1.0);
    return {i, j, u, v};
}

namespace {

struct Classifier {
    const Rect& rect;
    int ncols, nrows;
    double h;
    const std::vector<Polyline>& cutouts;
    const DirichletSpec& spec;
    std::vector<bool> outside;       // nodes strictly inside a cut-out
    std::vector<bool> on_rim_edge;   // nodes exactly on a cut-out edge

    Classifier(const Rect& r, int nc, int nr, double spacing,
               const std::vector<Polyline>& cuts, const DirichletSpec& sp)
        : rect(r), ncols(nc), nrows(nr), h(spacing), cutouts(cuts), spec(sp),
          outside(nc * nr, false), on_rim_edge(nc * nr, false) {
        const double tol = 1e-9 * h;
        for (const auto& cut : cutouts) {
            if (!cut.closed) throw std::invalid_argument("cutout polyline is not closed");
            for (const Point& v : cut.vertices)
                if (!rect.contains(v, tol))
                    throw std::invalid_argument("cutout vertex outside the domain rectangle");
        }
        for (int j = 0; j < nrows; ++j) {
            for (int i = 0; i < ncols; ++i) {
                const Point p{rect.x0 + i * h, rect.y0 + j * h};
                const int id = j * ncols + i;
                for (const auto& cut : cutouts) {
                    if (on_polyline(p, cut, tol)) {
                        on_rim_edge[id] = true;
                    } else if (point_in_polygon(p, cut)) {
                        outside[id] = true;
                    }
                }
                if (on_rim_edge[id]) outside[id] = false;
            }
        }
    }

    bool on_rect_rim(int i, int j) const {
        return i == 0 || i == ncols - 1 || j == 0 || j == nrows - 1;
    }

    BoundaryTag rect_edge_tag(int i, int j) const {
        bool dirichlet = false;
        if (i == 0 && spec.left) dirichlet = true;
        if (i == ncols - 1 && spec.right) dirichlet = true;
        if (j == 0 && spec.bottom) dirichlet = true;
        if (j == nrows - 1 && spec.top) dirichlet = true;
        return dirichlet ? BoundaryTag::DirichletClamped : BoundaryTag::NeumannNatural;
    }

    std::vector<BoundaryTag> classify() const {
        std::vector<BoundaryTag> tags(ncols * nrows, BoundaryTag::Interior);
        for (int j = 0; j < nrows; ++j) {
            for (int i = 0; i < ncols; ++i) {
                const int id = j * ncols + i;
                if (outside[id]) {
                    tags[id] = BoundaryTag::Outside;
                    continue;
                }
                bool rim = on_rim_edge[id];
                for (const auto& s : kSteps) {
                    const int ni = i + s[0], nj = j + s[1];
                    if (ni >= 0 && ni < ncols && nj >= 0 && nj < nrows &&
                        outside[nj * ncols + ni])
                        rim = true;
                }
                if (rim)
                    tags[id] = BoundaryTag::DirichletClamped;
                else if (on_rect_rim(i, j))
                    tags[id] = rect_edge_tag(i, j);
            }
        }
        return tags;
    }
};

void check_connectivity(const MaskedGrid& g) {
    if (g.interior_count() == 0)
        throw std::runtime_error("grid has no interior nodes");
    int seed = -1;
    for (int id = 0; id < g.node_count() && seed < 0; ++id)
        if (g.tag(id) == BoundaryTag::Interior) seed = id;
    std::vector<bool> seen(g.node_count(), false);
    std::queue<int> q;
    q.push(seed);
    seen[seed] = true;
    int reached = 0;
    while (!q.empty()) {
        const int id = q.front();
        q.pop();
        ++reached;
        const auto [i, j] = g.node_ij(id);
        for (const auto& s : kSteps) {
            const int ni = i + s[0], nj = j + s[1];
            if (!g.in_range(ni, nj)) continue;
            const int nid = g.node_id(ni, nj);
            if (!seen[nid] && g.tag(nid) == BoundaryTag::Interior) {
                seen[nid] = true;
                q.push(nid);
            }
        }
    }
    if (reached != g.interior_count())
        throw std::runtime_error("resulting interior is disconnected (" +
                                 std::to_string(reached) + " of " +
                                 std::to_string(g.interior_count()) + " nodes reachable)");
}

void check_stencil_support(const MaskedGrid& g) {
    for (int j = 0; j < g.nrows(); ++j) {
        for (int i = 0; i < g.ncols(); ++i) {
            if (!g.is_interior(i, j)) continue;
            // one-cell-wide strips
            const bool ew = !g.in_range(i - 1, j) || !g.is_interior(i - 1, j);
            const bool ee = !g.in_range(i + 1, j) || !g.is_interior(i + 1, j);
            const bool en = !g.in_range(i, j + 1) || !g.is_interior(i, j + 1);
            const bool es = !g.in_range(i, j - 1) || !g.is_interior(i, j - 1);
            if ((ew && ee) || (en && es))
                throw std::runtime_error(
                    "interior too thin for the 13-point stencil: one-cell-wide strip at node " +
                    node_str(i, j));
            for (int di = -1; di <= 1; di += 2) {
                for (int dj = -1; dj <= 1; dj += 2) {
                    if (!g.inside(i + di, j + dj))
                        throw std::runtime_error(
                            "interior too thin for the 13-point stencil: outside diagonal "
                            "neighbor of node " + node_str(i, j));
                }
            }
            // two-step references must be active or ghost-eliminable
            for (const auto& s : kSteps) {
                const int ti = i + 2 * s[0], tj = j + 2 * s[1];
                const bool target_out = !g.in_range(ti, tj) || !g.inside(ti, tj);
                if (!target_out) continue;
                const int mi = i + s[0], mj = j + s[1];
                if (!g.is_boundary(g.node_id(mi, mj)))
                    throw std::runtime_error("stencil reference crosses untagged node " +
                                             node_str(mi, mj));
                const auto n = g.outward_normal(mi, mj);
                if (!n || n->first != s[0] || n->second != s[1])
                    throw std::runtime_error(
                        "boundary node " + node_str(mi, mj) +
                        " has ambiguous normal but is required for ghost elimination");
            }
        }
    }
    // natural-condition closures reach three layers inward
    for (int j = 0; j < g.nrows(); ++j) {
        for (int i = 0; i < g.ncols(); ++i) {
            if (g.tag(i, j) != BoundaryTag::NeumannNatural) continue;
            const auto n = g.outward_normal(i, j);
            if (!n) continue; // corner nodes close with one-sided rows along both edges
            const int ei = -n->first, ej = -n->second;
            for (int step = 1; step <= 3; ++step) {
                const int ti = i + step * ei, tj = j + step * ej;
                if (!g.in_range(ti, tj) || !g.inside(ti, tj))
                    throw std::runtime_error(
                        "domain too thin for natural boundary closure at node " + node_str(i, j));
            }
            const int ti = n->second != 0 ? 1 : 0, tj = n->first != 0 ? 1 : 0;
            for (int step = 1; step <= 2; ++step) {
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    const int qi = i + step * ei + sgn * ti, qj = j + step * ej + sgn * tj;
                    if (!g.in_range(qi, qj) || !g.inside(qi, qj))
                        throw std::runtime_error(
                            "domain too thin for natural boundary closure at node " +
                            node_str(i, j));
                }
            }
        }
    }
}

} // namespace

MaskedGrid build_grid(const Rect& rect, int n_x, const std::vector<Polyline>& cutouts,
                      const DirichletSpec& spec) {
    if (rect.x1 <= rect.x0 || rect.y1 <= rect.y0)
        throw std::invalid_argument("degenerate domain rectangle");
    if (n_x < 4) throw std::invalid_argument("n_x must be at least 4");
    const double h = rect.width() / n_x;
    const double ny_real = rect.height() / h;
    const int n_y = static_cast<int>(std::lround(ny_real));
    if (n_y < 4 || std::abs(ny_real - n_y) > 1e-9 * std::max(1.0, ny_real))
        throw std::invalid_argument(
            "rectangle height is not an integer multiple of the spacing");
    const int ncols = n_x + 1, nrows = n_y + 1;

    Classifier cls(rect, ncols, nrows, h, cutouts, spec);

    // Retag degenerate boundary nodes until stable: rim nodes with no
    // interior neighbor are swallowed by the cut-out; rim nodes with no
    // outside neighbor come from sub-resolution cut-outs and revert.
    std::vector<BoundaryTag> tags;
    for (int pass = 0; pass < ncols * nrows + 2; ++pass) {
        tags = cls.classify();
        bool changed = false;
        for (int j = 0; j < nrows; ++j) {
            for (int i = 0; i < ncols; ++i) {
                const int id = j * ncols + i;
                if (tags[id] != BoundaryTag::DirichletClamped &&
                    tags[id] != BoundaryTag::NeumannNatural)
                    continue;
                if (cls.on_rect_rim(i, j)) continue;
                bool has_interior = false, has_outside = false;
                for (const auto& s : kSteps) {
                    const int ni = i + s[0], nj = j + s[1];
                    if (ni < 0 || ni >= ncols || nj < 0 || nj >= nrows) continue;
                    if (tags[nj * ncols + ni] == BoundaryTag::Interior) has_interior = true;
                }
                // rim corners touch the outside only diagonally
                for (int di = -1; di <= 1; ++di) {
                    for (int dj = -1; dj <= 1; ++dj) {
                        const int ni = i + di, nj = j + dj;
                        if (ni < 0 || ni >= ncols || nj < 0 || nj >= nrows) continue;
                        if (tags[nj * ncols + ni] == BoundaryTag::Outside) has_outside = true;
                    }
                }
                if (!has_interior) {
                    cls.outside[id] = true;
                    cls.on_rim_edge[id] = false;
                    changed = true;
                } else if (!has_outside && cls.on_rim_edge[id] && !cls.outside[id]) {
                    cls.on_rim_edge[id] = false;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }

    MaskedGrid grid({rect.x0, rect.y0}, h, ncols, nrows, std::move(tags));
    check_connectivity(grid);
    check_stencil_support(grid);
    return grid;
}

} // namespace bisurf
