#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "awnet/data/image.hpp"

namespace awnet {

enum class DatasetId { Drive, Chase };
enum class Split { Train, Test };

// Expected raster dimensions (width x height) per dataset.
inline constexpr int kDriveWidth = 565, kDriveHeight = 584;
inline constexpr int kChaseWidth = 999, kChaseHeight = 960;

struct FundusSample {
    std::string id;
    ImageU8 image;          // H x W x 3, RGB
    BinaryMask vessel_mask; // ground truth
    BinaryMask fov_mask;    // field-of-view; computed when the tree has none
    DatasetId dataset = DatasetId::Drive;
};

std::string to_string(DatasetId d);
DatasetId dataset_from_string(const std::string& s);
std::string to_string(Split s);

// Directory layout, fixed and documented in the README:
//   <root>/<drive|chase>/<training|test>/images/...
//   <root>/<drive|chase>/<training|test>/labels/...
//   <root>/<drive|chase>/<training|test>/masks/...   (optional for chase)
// Images pair with labels/masks by sorted filename order. Raster sizes are
// validated against the dataset's published dimensions.
std::vector<FundusSample> load_dataset(const std::filesystem::path& root, DatasetId ds, Split split);

std::filesystem::path dataset_dir(const std::filesystem::path& root, DatasetId ds, Split split);

}  // namespace awnet
