#pragma once

#include <string>

#include "yaoyao/measures.hpp"
#include "yaoyao/partition.hpp"

namespace yaoyao::cli {

/// SVG 1.1 drawing of a planar partition: the four regions clipped to the
/// points' bounding box enlarged by 1.2, the boundary rays, the points and
/// the center. `points` are in ambient coordinates. Throws InputError for
/// n != 2.
std::string render_svg(const PartitionTree& tree, const WeightedPointCloud& points);

}  // namespace yaoyao::cli
