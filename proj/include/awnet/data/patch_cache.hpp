#pragma once

#include <filesystem>

#include "awnet/data/dataset.hpp"
#include "awnet/data/patches.hpp"
#include "awnet/data/preprocess.hpp"

namespace awnet {

// On-disk patch archive plus a JSON manifest carrying the extraction
// geometry, the preprocessing version hash and a payload checksum. A rerun
// with identical inputs is a cache hit; a manifest/payload mismatch triggers
// a rebuild.
struct PrepareResult {
    std::filesystem::path archive;
    std::filesystem::path manifest;
    bool cache_hit = false;
    bool rebuilt_corrupt = false;
    int patch_count = 0;
};

PrepareResult prepare_patch_cache(const std::filesystem::path& out_dir,
                                  const std::vector<FundusSample>& samples, DatasetId ds, Split split,
                                  int stride, const PreprocessSettings& pp);

PatchSet load_patch_cache(const std::filesystem::path& archive);

}  // namespace awnet
