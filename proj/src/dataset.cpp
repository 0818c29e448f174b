#include "awnet/data/dataset.hpp"

#include <algorithm>
#include <iostream>

#include "awnet/data/fov.hpp"

namespace awnet {

namespace fs = std::filesystem;

std::string to_string(DatasetId d) { return d == DatasetId::Drive ? "drive" : "chase"; }

DatasetId dataset_from_string(const std::string& s) {
    std::string t = s;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "drive") return DatasetId::Drive;
    if (t == "chase" || t == "chase-db1" || t == "chasedb1") return DatasetId::Chase;
    throw ConfigError("unknown dataset: " + s);
}

std::string to_string(Split s) { return s == Split::Train ? "training" : "test"; }

fs::path dataset_dir(const fs::path& root, DatasetId ds, Split split) {
    return root / to_string(ds) / to_string(split);
}

namespace {

std::vector<fs::path> sorted_files(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

void check_dims(const std::string& what, const std::string& id, int h, int w, int exp_h, int exp_w) {
    if (h != exp_h || w != exp_w)
        throw DataError(what + " for sample '" + id + "' is " + std::to_string(w) + "x" + std::to_string(h) +
                        ", expected " + std::to_string(exp_w) + "x" + std::to_string(exp_h));
}

}  // namespace

std::vector<FundusSample> load_dataset(const fs::path& root, DatasetId ds, Split split) {
    const fs::path base = dataset_dir(root, ds, split);
    const fs::path images_dir = base / "images";
    const fs::path labels_dir = base / "labels";
    const fs::path masks_dir = base / "masks";

    if (!fs::exists(images_dir)) throw DataError("missing directory: " + images_dir.string());
    if (!fs::exists(labels_dir)) throw DataError("missing directory: " + labels_dir.string());

    const auto image_files = sorted_files(images_dir);
    const auto label_files = sorted_files(labels_dir);
    const auto mask_files = sorted_files(masks_dir);
    if (image_files.empty()) throw DataError("no images found under " + images_dir.string());
    if (label_files.size() != image_files.size())
        throw DataError("image/label count mismatch under " + base.string() + ": " +
                        std::to_string(image_files.size()) + " images vs " +
                        std::to_string(label_files.size()) + " labels");
    const bool have_masks = !mask_files.empty();
    if (have_masks && mask_files.size() != image_files.size())
        throw DataError("image/mask count mismatch under " + base.string());
    if (!have_masks && ds == DatasetId::Drive)
        throw DataError("missing directory: " + masks_dir.string() + " (field-of-view masks ship with this dataset)");

    const int exp_w = ds == DatasetId::Drive ? kDriveWidth : kChaseWidth;
    const int exp_h = ds == DatasetId::Drive ? kDriveHeight : kChaseHeight;

    std::vector<FundusSample> samples;
    samples.reserve(image_files.size());
    for (std::size_t i = 0; i < image_files.size(); ++i) {
        FundusSample s;
        s.dataset = ds;
        s.id = image_files[i].stem().string();
        s.image = read_image_rgb(image_files[i]);
        check_dims("image", s.id, s.image.h, s.image.w, exp_h, exp_w);
        s.vessel_mask = read_binary_mask(label_files[i]);
        check_dims("label", s.id, s.vessel_mask.h, s.vessel_mask.w, exp_h, exp_w);
        if (have_masks) {
            s.fov_mask = read_binary_mask(mask_files[i]);
            check_dims("mask", s.id, s.fov_mask.h, s.fov_mask.w, exp_h, exp_w);
        } else {
            s.fov_mask = extract_fov_mask(s.image);
        }
        samples.push_back(std::move(s));
    }

    // The published archives carry fixed counts; a different number usually
    // means a partially assembled tree, so say so (not fatal: subsets are
    // legitimate for smoke runs).
    const std::size_t expected = ds == DatasetId::Drive ? 20 : (split == Split::Train ? 20 : 8);
    if (samples.size() != expected)
        std::cerr << "note: " << to_string(ds) << "/" << to_string(split) << " has " << samples.size()
                  << " samples (published archive has " << expected << ")\n";
    return samples;
}

}  // namespace awnet
