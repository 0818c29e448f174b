#include "awnet/infer/predict.hpp"

#include <algorithm>
#include <cmath>

#include "awnet/data/patches.hpp"

namespace awnet {

ImageF predict_map(AttentionWNet<float>& model, const ImageF& input, int stride, int batch_size) {
    if (batch_size < 1) throw InputError("batch_size must be >= 1");
    const int size = kPatchSize;
    const PatchGrid grid = patch_grid(input.h, input.w, size, stride);
    const ImageF padded = pad_reflect(input, grid.padded_h, grid.padded_w);

    // Sum/count planes accumulated in grid order; scoring batch size cannot
    // change the result because each patch is scored independently.
    std::vector<double> sum(static_cast<std::size_t>(grid.padded_h) * grid.padded_w, 0.0);
    std::vector<std::int32_t> cnt(sum.size(), 0);

    const int total = grid.count();
    for (int start = 0; start < total; start += batch_size) {
        const int bn = std::min(batch_size, total - start);
        Tensor<float> x(bn, 1, size, size);
        for (int i = 0; i < bn; ++i) {
            const auto [r, c] = grid.origins[start + i];
            copy_patch(padded, r, c, size, x.sample(i));
        }
        const Tensor<float> pred = model.forward(x, /*training=*/false);
        for (int i = 0; i < bn; ++i) {
            const auto [r, c] = grid.origins[start + i];
            for (int y = 0; y < size; ++y) {
                const std::size_t row = static_cast<std::size_t>(r + y) * grid.padded_w + c;
                const float* p = pred.sample(i) + static_cast<std::size_t>(y) * size;
                for (int xk = 0; xk < size; ++xk) {
                    sum[row + xk] += p[xk];
                    cnt[row + xk] += 1;
                }
            }
        }
    }

    ImageF out(input.h, input.w, 1);
    for (int y = 0; y < input.h; ++y)
        for (int x = 0; x < input.w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * grid.padded_w + x;
            out.at(y, x) = static_cast<float>(sum[i] / cnt[i]);
        }
    return out;
}

ProbabilityMap predict_image(AttentionWNet<float>& model, const FundusSample& sample,
                             const PreprocessSettings& pp, const std::optional<GrayStats>& stats,
                             int stride, int batch_size) {
    ProbabilityMap pm;
    pm.id = sample.id;
    pm.fov = sample.fov_mask;
    const ImageF pre = preprocess(sample, pp, stats);
    pm.values = predict_map(model, pre, stride, batch_size);
    return pm;
}

Image<std::int32_t> coverage_counts(int h, int w, int size, int stride) {
    const PatchGrid grid = patch_grid(h, w, size, stride);
    Image<std::int32_t> cnt(grid.padded_h, grid.padded_w, 1);
    for (const auto& [r, c] : grid.origins)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) cnt.at(r + y, c + x) += 1;
    return cnt;
}

BinaryMask binarize(const ProbabilityMap& pm, double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0) throw InputError("threshold must be in (0,1)");
    if (pm.fov.h != pm.values.h || pm.fov.w != pm.values.w)
        throw InputError("probability map / fov size mismatch");
    BinaryMask out(pm.values.h, pm.values.w, 1);
    for (int y = 0; y < pm.values.h; ++y)
        for (int x = 0; x < pm.values.w; ++x)
            out.at(y, x) = (pm.fov.at(y, x) && pm.values.at(y, x) >= threshold) ? 1 : 0;
    return out;
}

}  // namespace awnet
