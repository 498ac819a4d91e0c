#pragma once

#include "tabletop/common/image.hpp"

namespace tabletop {

// Exact squared Euclidean distance from every pixel to the nearest background
// (zero) pixel, computed with the separable lower-envelope-of-parabolas
// method. Background pixels get 0. A mask with no background at all gets a
// large finite value everywhere.
Image<double> squared_distance_transform(const MaskImage& mask);

}  // namespace tabletop
