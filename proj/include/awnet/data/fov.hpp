#pragma once

#include "awnet/data/image.hpp"

namespace awnet {

// Recovers the illuminated circular retina region from a colour fundus image:
// grayscale -> Otsu threshold -> largest connected component -> morphological
// closing with a disk. Throws DataError when the frame is essentially dark.
BinaryMask extract_fov_mask(const ImageU8& image);

double mask_fraction(const BinaryMask& m);

}  // namespace awnet
