#ifndef BISURF_MASKED_GRID_HPP
#define BISURF_MASKED_GRID_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "bisurf/geometry.hpp"

namespace bisurf {

enum class BoundaryTag : std::uint8_t {
    Interior = 0,
    DirichletClamped = 1,
    NeumannNatural = 2,
    Outside = 3,
};

/// Which parts of the boundary carry clamped (value + normal derivative)
/// conditions. Rectangle edges default to natural conditions; cut-out rims
/// are always clamped.
struct DirichletSpec {
    bool left = false, right = false, bottom = false, top = false;

    static DirichletSpec all_edges() { return {true, true, true, true}; }
    static DirichletSpec no_edges() { return {}; }
};

/// Structured rectangular node grid with uniform spacing, an inside/outside
/// mask and per-node boundary tags. Immutable after construction.
class MaskedGrid {
public:
    MaskedGrid(Point origin, double spacing, int ncols, int nrows,
               std::vector<BoundaryTag> tags);

    Point origin() const { return origin_; }
    double spacing() const { return spacing_; }
    int ncols() const { return ncols_; }
    int nrows() const { return nrows_; }
    int node_count() const { return ncols_ * nrows_; }

    int node_id(int i, int j) const { return j * ncols_ + i; }
    std::pair<int, int> node_ij(int id) const { return {id % ncols_, id / ncols_}; }
    Point node_pos(int i, int j) const {
        return {origin_.x + i * spacing_, origin_.y + j * spacing_};
    }
    Point node_pos(int id) const {
        auto [i, j] = node_ij(id);
        return node_pos(i, j);
    }
    bool in_range(int i, int j) const {
        return i >= 0 && i < ncols_ && j >= 0 && j < nrows_;
    }

    BoundaryTag tag(int i, int j) const { return tags_[node_id(i, j)]; }
    BoundaryTag tag(int id) const { return tags_[id]; }
    bool inside(int i, int j) const { return tag(i, j) != BoundaryTag::Outside; }
    bool inside(int id) const { return tags_[id] != BoundaryTag::Outside; }
    bool is_interior(int i, int j) const { return tag(i, j) == BoundaryTag::Interior; }
    bool is_boundary(int id) const {
        return tags_[id] == BoundaryTag::DirichletClamped ||
               tags_[id] == BoundaryTag::NeumannNatural;
    }

    /// Outward normal direction of a boundary node as a lattice step
    /// (+-1,0)/(0,+-1), or nullopt when ambiguous (corner-like nodes).
    std::optional<std::pair<int, int>> outward_normal(int i, int j) const;

    /// Boundary node with two outward directions (rectangle corner or a
    /// cut-out rim corner). Such nodes carry a value dof but no normal dof.
    bool is_corner(int i, int j) const;

    const std::vector<BoundaryTag>& tags() const { return tags_; }

    int interior_count() const { return interior_count_; }
    int active_count() const { return active_count_; }

    /// Locates the cell containing p and its local coordinates; throws if p
    /// is outside the rectangle.
    struct CellRef {
        int i, j;      // lower-left node of the cell
        double u, v;   // local coords in [0,1]
    };
    CellRef locate(Point p) const;

private:
    Point origin_;
    double spacing_;
    int ncols_, nrows_;
    std::vector<BoundaryTag> tags_;
    int interior_count_ = 0;
    int active_count_ = 0;
};

/// Builds a masked grid over rect with n_x intervals in x. Cut-out polygons
/// must be closed and contained in rect; nodes strictly inside a cut-out are
/// Outside, rim nodes are clamped. Rectangle edge tags follow spec. Throws
/// std::invalid_argument on geometric errors and std::runtime_error when the
/// resulting domain cannot support the 13-point stencil.
MaskedGrid build_grid(const Rect& rect, int n_x,
                      const std::vector<Polyline>& cutouts = {},
                      const DirichletSpec& spec = DirichletSpec::no_edges());

} // namespace bisurf

#endif
