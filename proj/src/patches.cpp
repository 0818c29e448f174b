#include "awnet/data/patches.hpp"

#include <algorithm>
#include <cmath>

#include "awnet/rng.hpp"

namespace awnet {

PatchGrid patch_grid(int h, int w, int size, int stride) {
    if (stride <= 0) throw InputError("stride must be >= 1");
    if (size <= 0) throw InputError("patch size must be >= 1");
    PatchGrid g;
    auto steps = [&](int dim) {
        if (dim <= size) return 1;
        return (dim - size + stride - 1) / stride + 1;  // ceil((dim-size)/stride) + 1
    };
    g.rows = steps(h);
    g.cols = steps(w);
    g.padded_h = std::max(h, size + (g.rows - 1) * stride);
    g.padded_w = std::max(w, size + (g.cols - 1) * stride);
    g.origins.reserve(static_cast<std::size_t>(g.rows) * g.cols);
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c) g.origins.emplace_back(r * stride, c * stride);
    return g;
}

ImageF pad_reflect(const ImageF& img, int padded_h, int padded_w) {
    if (padded_h < img.h || padded_w < img.w) throw InputError("padded size smaller than image");
    ImageF out(padded_h, padded_w, 1);
    auto reflect = [](int i, int n) {
        // mirror without edge duplication: n, n+1, ... -> n-2, n-3, ...
        if (i < n) return i;
        const int r = 2 * n - 2 - i;
        return r < 0 ? 0 : r;
    };
    for (int y = 0; y < padded_h; ++y) {
        const int sy = reflect(y, img.h);
        for (int x = 0; x < padded_w; ++x) out.at(y, x) = img.at(sy, reflect(x, img.w));
    }
    return out;
}

void copy_patch(const ImageF& padded, int row, int col, int size, float* dst) {
    for (int y = 0; y < size; ++y) {
        const float* src = &padded.at(row + y, col);
        std::copy(src, src + size, dst + static_cast<std::size_t>(y) * size);
    }
}

PatchSet extract_patches(const ImageF& image, const ImageF* label, const std::string& id, int size,
                         int stride) {
    if (label && (label->h != image.h || label->w != image.w))
        throw InputError("label size differs from image size");
    const PatchGrid grid = patch_grid(image.h, image.w, size, stride);
    const ImageF padded = pad_reflect(image, grid.padded_h, grid.padded_w);
    ImageF padded_label;
    if (label) padded_label = pad_reflect(*label, grid.padded_h, grid.padded_w);

    PatchSet ps;
    ps.patch = size;
    ps.sources.push_back({id, image.h, image.w, grid.padded_h, grid.padded_w});
    const int n = grid.count();
    ps.patches = Tensor<float>(n, 1, size, size);
    if (label) ps.labels = Tensor<float>(n, 1, size, size);
    ps.origins.reserve(n);
    for (int i = 0; i < n; ++i) {
        const auto [r, c] = grid.origins[i];
        ps.origins.push_back({0, r, c});
        copy_patch(padded, r, c, size, ps.patches.sample(i));
        if (label) copy_patch(padded_label, r, c, size, ps.labels.sample(i));
    }
    return ps;
}

void PatchSet::append(const PatchSet& other) {
    if (other.count() == 0) return;
    if (patch != other.patch) throw InputError("patch size mismatch in append");
    if (count() == 0) {
        *this = other;
        return;
    }
    if (has_labels() != other.has_labels()) throw InputError("label presence mismatch in append");
    const int base_sources = static_cast<int>(sources.size());
    sources.insert(sources.end(), other.sources.begin(), other.sources.end());
    Tensor<float> merged(count() + other.count(), 1, patch, patch);
    std::copy(patches.data(), patches.data() + patches.size(), merged.data());
    std::copy(other.patches.data(), other.patches.data() + other.patches.size(),
              merged.data() + patches.size());
    patches = std::move(merged);
    if (has_labels()) {
        Tensor<float> ml(labels.n() + other.labels.n(), 1, patch, patch);
        std::copy(labels.data(), labels.data() + labels.size(), ml.data());
        std::copy(other.labels.data(), other.labels.data() + other.labels.size(), ml.data() + labels.size());
        labels = std::move(ml);
    }
    for (const auto& o : other.origins) origins.push_back({o.source + base_sources, o.row, o.col});
}

ImageF reassemble_padded(const PatchSet& ps, int source_index, bool from_labels) {
    if (from_labels && !ps.has_labels()) throw InputError("patch set has no labels to reassemble");
    const auto& src = ps.sources.at(source_index);
    ImageF out(src.padded_h, src.padded_w, 1);
    const Tensor<float>& t = from_labels ? ps.labels : ps.patches;
    for (int i = 0; i < ps.count(); ++i) {
        const auto& o = ps.origins[i];
        if (o.source != source_index) continue;
        for (int y = 0; y < ps.patch; ++y)
            for (int x = 0; x < ps.patch; ++x) out.at(o.row + y, o.col + x) = t(i, 0, y, x);
    }
    return out;
}

std::pair<std::vector<int>, std::vector<int>> split_validation_indices(int n, double fraction,
                                                                       std::uint64_t seed) {
    if (fraction <= 0.0 || fraction >= 1.0) throw InputError("validation fraction must be in (0,1)");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    Rng rng(mix_seed(seed, 0x5417));
    rng.shuffle(idx);
    const int n_val = static_cast<int>(std::llround(n * fraction));
    std::vector<int> val(idx.begin(), idx.begin() + n_val);
    std::vector<int> train(idx.begin() + n_val, idx.end());
    std::sort(train.begin(), train.end());
    std::sort(val.begin(), val.end());
    return {train, val};
}

namespace {

PatchSet take(const PatchSet& ps, const std::vector<int>& idx) {
    PatchSet out;
    out.patch = ps.patch;
    out.sources = ps.sources;
    out.patches = Tensor<float>(static_cast<int>(idx.size()), 1, ps.patch, ps.patch);
    if (ps.has_labels()) out.labels = Tensor<float>(static_cast<int>(idx.size()), 1, ps.patch, ps.patch);
    out.origins.reserve(idx.size());
    const std::size_t plane = static_cast<std::size_t>(ps.patch) * ps.patch;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        std::copy(ps.patches.sample(idx[i]), ps.patches.sample(idx[i]) + plane, out.patches.sample(static_cast<int>(i)));
        if (ps.has_labels())
            std::copy(ps.labels.sample(idx[i]), ps.labels.sample(idx[i]) + plane, out.labels.sample(static_cast<int>(i)));
        out.origins.push_back(ps.origins[idx[i]]);
    }
    return out;
}

}  // namespace

std::pair<PatchSet, PatchSet> split_validation(const PatchSet& ps, double fraction, std::uint64_t seed) {
    auto [train_idx, val_idx] = split_validation_indices(ps.count(), fraction, seed);
    return {take(ps, train_idx), take(ps, val_idx)};
}

}  // namespace awnet
