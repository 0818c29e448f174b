#include "doctest.h"

#include "awnet/data/patches.hpp"
#include "awnet/infer/predict.hpp"
#include "testutil.hpp"

using namespace awnet;
using namespace awnet::testutil;

TEST_SUITE_BEGIN("infer");

namespace {

ModelConfig small_config() {
    ModelConfig cfg;
    cfg.levels = 3;
    cfg.base_channels = 3;
    cfg.dropout_rate = 0.0;
    return cfg;
}

ImageF random_image(int h, int w, std::uint64_t seed) {
    ImageF img(h, w, 1);
    Rng rng(seed);
    for (auto& v : img.px) v = static_cast<float>(rng.uniform());
    return img;
}

}  // namespace

TEST_CASE("stride equal to the patch width reduces to plain tiling") {
    AttentionWNet<float> net(small_config(), 2);
    const ImageF img = random_image(96, 96, 3);
    const ImageF avg = predict_map(net, img, /*stride=*/48, /*batch=*/16);

    const PatchGrid grid = patch_grid(96, 96, kPatchSize, 48);
    const ImageF padded = pad_reflect(img, grid.padded_h, grid.padded_w);
    for (const auto& [r, c] : grid.origins) {
        Tensor<float> x(1, 1, kPatchSize, kPatchSize);
        copy_patch(padded, r, c, kPatchSize, x.sample(0));
        const Tensor<float> y = net.forward(x);
        for (int yy = 0; yy < kPatchSize; ++yy)
            for (int xx = 0; xx < kPatchSize; ++xx)
                CHECK(avg.at(r + yy, c + xx) == doctest::Approx(y(0, 0, yy, xx)).epsilon(1e-7));
    }
}

TEST_CASE("stride-5 averaging equals the per-pixel covering-patch oracle") {
    AttentionWNet<float> net(small_config(), 4);
    const ImageF img = random_image(96, 96, 7);
    const int stride = 5;
    const ImageF got = predict_map(net, img, stride, /*batch=*/64);

    // Oracle: score every patch once, then for each pixel enumerate all
    // covering patch positions and average their contributions directly.
    const PatchGrid grid = patch_grid(96, 96, kPatchSize, stride);
    const ImageF padded = pad_reflect(img, grid.padded_h, grid.padded_w);
    std::vector<Tensor<float>> outs(grid.count());
    for (int i = 0; i < grid.count(); ++i) {
        Tensor<float> x(1, 1, kPatchSize, kPatchSize);
        copy_patch(padded, grid.origins[i].first, grid.origins[i].second, kPatchSize, x.sample(0));
        outs[i] = net.forward(x);
    }
    double max_diff = 0.0;
    for (int y = 0; y < 96; ++y)
        for (int x = 0; x < 96; ++x) {
            double sum = 0.0;
            int cover = 0;
            for (int i = 0; i < grid.count(); ++i) {
                const auto [r, c] = grid.origins[i];
                if (y >= r && y < r + kPatchSize && x >= c && x < c + kPatchSize) {
                    sum += outs[i](0, 0, y - r, x - c);
                    ++cover;
                }
            }
            REQUIRE(cover >= 1);
            max_diff = std::max(max_diff, std::abs(sum / cover - static_cast<double>(got.at(y, x))));
        }
    CHECK(max_diff < 1e-6);
}

TEST_CASE("scoring batch size does not change a single bit") {
    AttentionWNet<float> net(small_config(), 5);
    const ImageF img = random_image(64, 64, 11);
    const ImageF a = predict_map(net, img, 8, 1);
    const ImageF b = predict_map(net, img, 8, 7);
    const ImageF c = predict_map(net, img, 8, 1024);
    for (std::size_t i = 0; i < a.px.size(); ++i) {
        CHECK(a.px[i] == b.px[i]);
        CHECK(a.px[i] == c.px[i]);
    }
}

TEST_CASE("coverage counts: every pixel covered, peak interior multiplicity is 100 at stride 5") {
    // 48 = 9*5 + 3, so a 48-wide window catches 9 or 10 grid rows depending
    // on its residue; the peak interior multiplicity is ceil(48/5)^2 = 100.
    const auto cnt = coverage_counts(96, 96, kPatchSize, 5);
    int min_cover = 1 << 30, max_cover = 0;
    for (int y = 0; y < cnt.h; ++y)
        for (int x = 0; x < cnt.w; ++x) {
            min_cover = std::min(min_cover, cnt.at(y, x));
            max_cover = std::max(max_cover, cnt.at(y, x));
        }
    CHECK(min_cover >= 1);
    CHECK(max_cover == 100);  // ceil(48/5)^2
    CHECK(cnt.at(47, 47) == 100);
    CHECK(cnt.at(48, 48) == 81);  // floor(48/5+1)... the off-phase interior multiplicity 9*9
}

TEST_CASE("binarize: zero map, tie rule at the threshold, and fov masking") {
    ProbabilityMap pm;
    pm.values = ImageF(4, 4, 1);
    pm.fov = BinaryMask(4, 4, 1);
    for (auto& v : pm.fov.px) v = 1;

    BinaryMask zero = binarize(pm, 0.5);
    for (auto v : zero.px) CHECK(v == 0);

    pm.values.at(1, 1) = 0.5f;   // exactly at the threshold -> vessel
    pm.values.at(2, 2) = 0.49f;  // below -> background
    pm.values.at(3, 3) = 0.9f;
    pm.fov.at(3, 3) = 0;  // outside fov -> background regardless
    const BinaryMask m = binarize(pm, 0.5);
    CHECK(m.at(1, 1) == 1);
    CHECK(m.at(2, 2) == 0);
    CHECK(m.at(3, 3) == 0);

    CHECK_THROWS_AS(binarize(pm, 0.0), InputError);
    CHECK_THROWS_AS(binarize(pm, 1.0), InputError);
}

TEST_SUITE_END();
