#ifndef BISURF_CONTOUR_HPP
#define BISURF_CONTOUR_HPP

#include <vector>

#include "bisurf/geometry.hpp"

namespace bisurf {

/// Extracts level-set curves of a node-aligned scalar field by marching
/// squares with linear interpolation. Values >= level count as inside.
/// Saddle cells are resolved by the average of the four corners. Contours
/// are oriented with the inside region on the left; curves that reach the
/// raster border stay open with both endpoints on the border.
///
/// node_values is row-major with node (i,j) at index j*ncols+i and position
/// origin + (i,j)*spacing.
std::vector<Polyline> extract_level_curves(int ncols, int nrows,
                                           const std::vector<double>& node_values,
                                           Point origin, double spacing,
                                           double level = 0.5);

/// 0.5-level interface curves of a binary exposed-region mask.
inline std::vector<Polyline> extract_inner_curves(int ncols, int nrows,
                                                  const std::vector<double>& mask,
                                                  Point origin, double spacing) {
    return extract_level_curves(ncols, nrows, mask, origin, spacing, 0.5);
}

} // namespace bisurf

#endif
