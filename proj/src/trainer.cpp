#include "awnet/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "awnet/data/patches.hpp"
#include "awnet/model/checkpoint.hpp"
#include "awnet/train/loss.hpp"
#include "awnet/train/optimizer.hpp"

namespace awnet {

namespace fs = std::filesystem;

namespace {

struct PatchRef {
    int image = 0;
    int row = 0, col = 0;
};

// Holds run_dir/.lock for the lifetime of a training run.
class RunLock {
public:
    explicit RunLock(const fs::path& run_dir) : path_(run_dir / ".lock") {
        fs::create_directories(run_dir);
        if (fs::exists(path_))
            throw IoError("run directory is locked by another trainer: " + path_.string());
        std::ofstream out(path_);
        out << "locked\n";
    }
    ~RunLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }

private:
    fs::path path_;
};

void slice_patch(const ImageF& plane, int row, int col, int size, float* dst) {
    for (int y = 0; y < size; ++y) {
        const float* src = &plane.at(row + y, col);
        std::copy(src, src + size, dst + static_cast<std::size_t>(y) * size);
    }
}

double mean_loss_eval(AttentionWNet<float>& model, const std::vector<ImageF>& images,
                      const std::vector<ImageF>& labels, const std::vector<PatchRef>& refs, int batch,
                      int size) {
    long double total = 0.0L;
    std::size_t count = 0;
    for (std::size_t start = 0; start < refs.size(); start += batch) {
        const int bn = static_cast<int>(std::min<std::size_t>(batch, refs.size() - start));
        Tensor<float> x(bn, 1, size, size), y(bn, 1, size, size);
        for (int i = 0; i < bn; ++i) {
            const PatchRef& r = refs[start + i];
            slice_patch(images[r.image], r.row, r.col, size, x.sample(i));
            slice_patch(labels[r.image], r.row, r.col, size, y.sample(i));
        }
        const Tensor<float> pred = model.forward(x, /*training=*/false);
        total += static_cast<long double>(bce_loss(pred, y)) * bn;
        count += bn;
    }
    return count ? static_cast<double>(total / count) : 0.0;
}

}  // namespace

TrainResult train(const ModelConfig& model_cfg, const TrainConfig& train_cfg, const AugmentConfig& aug_cfg,
                  const PreprocessSettings& pp, const std::vector<FundusSample>& samples,
                  const fs::path& run_dir) {
    model_cfg.validate();
    train_cfg.validate();
    aug_cfg.validate();
    if (samples.empty()) throw DataError("no training samples");
    if (model_cfg.in_channels != 1)
        throw ConfigError("the patch pipeline feeds single-channel preprocessed patches; "
                          "in_channels must be 1 for training");

    RunLock lock(run_dir);
    fs::create_directories(run_dir / "checkpoints");

    // Preprocess once; patches are sliced lazily per batch.
    const GrayStats stats = dataset_gray_stats(samples);
    std::vector<ImageF> images, labels;
    images.reserve(samples.size());
    labels.reserve(samples.size());
    std::vector<PatchRef> all_refs;
    const int size = kPatchSize;
    for (std::size_t si = 0; si < samples.size(); ++si) {
        const ImageF img = preprocess(samples[si], pp, stats);
        const PatchGrid grid = patch_grid(img.h, img.w, size, train_cfg.train_stride);
        images.push_back(pad_reflect(img, grid.padded_h, grid.padded_w));
        labels.push_back(pad_reflect(mask_to_float(samples[si].vessel_mask), grid.padded_h, grid.padded_w));
        for (const auto& [r, c] : grid.origins) all_refs.push_back({static_cast<int>(si), r, c});
    }

    Rng pool_rng(mix_seed(train_cfg.seed, 0xa11));
    if (train_cfg.max_train_patches > 0 &&
        all_refs.size() > static_cast<std::size_t>(train_cfg.max_train_patches)) {
        pool_rng.shuffle(all_refs);
        all_refs.resize(train_cfg.max_train_patches);
    }

    // Validation holdout: by patch (default) or by whole image.
    std::vector<PatchRef> train_refs, val_refs;
    if (train_cfg.val_split_by_image) {
        std::vector<int> img_idx(samples.size());
        for (std::size_t i = 0; i < img_idx.size(); ++i) img_idx[i] = static_cast<int>(i);
        Rng rng(mix_seed(train_cfg.seed, 0x1307));
        rng.shuffle(img_idx);
        const int n_val = std::max(1, static_cast<int>(std::llround(img_idx.size() * train_cfg.val_fraction)));
        std::vector<bool> is_val(samples.size(), false);
        for (int i = 0; i < n_val; ++i) is_val[img_idx[i]] = true;
        for (const auto& r : all_refs) (is_val[r.image] ? val_refs : train_refs).push_back(r);
    } else {
        auto [ti, vi] = split_validation_indices(static_cast<int>(all_refs.size()), train_cfg.val_fraction,
                                                 train_cfg.seed);
        train_refs.reserve(ti.size());
        val_refs.reserve(vi.size());
        for (int i : ti) train_refs.push_back(all_refs[i]);
        for (int i : vi) val_refs.push_back(all_refs[i]);
    }
    if (train_refs.empty()) throw DataError("training patch pool is empty");

    AttentionWNet<float> model(model_cfg, train_cfg.seed);
    Adam<float> adam(model.params());

    TrainResult result;
    result.history.best_val_loss = std::numeric_limits<double>::infinity();

    std::ofstream history_out(run_dir / "history.jsonl", std::ios::trunc);
    if (!history_out) throw IoError("cannot write " + (run_dir / "history.jsonl").string());

    const double lr_floor = [&] {
        double f = train_cfg.lr_stages.front().lr;
        for (const auto& s : train_cfg.lr_stages) f = std::min(f, s.lr);
        return f;
    }();
    double plateau_scale = 1.0;
    int plateau_wait = 0;
    double last_lr = std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch < train_cfg.epochs_total; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        double lr = lr_at(epoch, train_cfg);
        if (train_cfg.plateau_enabled) lr = std::max(lr * plateau_scale, lr_floor);
        lr = std::min(lr, last_lr);  // never increase over the run
        last_lr = lr;

        std::vector<std::size_t> order(train_refs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng shuffle_rng(mix_seed(train_cfg.seed, 0xe90c + static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        long double loss_sum = 0.0L;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += train_cfg.batch_size) {
            const int bn = static_cast<int>(std::min<std::size_t>(train_cfg.batch_size, order.size() - start));
            Tensor<float> x(bn, 1, size, size), y(bn, 1, size, size);
#pragma omp parallel for schedule(static)
            for (int i = 0; i < bn; ++i) {
                const PatchRef& r = train_refs[order[start + i]];
                ImageF patch(size, size, 1), label(size, size, 1);
                slice_patch(images[r.image], r.row, r.col, size, patch.px.data());
                slice_patch(labels[r.image], r.row, r.col, size, label.px.data());
                if (train_cfg.augmentation_on) {
                    // Stream derived from (seed, epoch, global patch index):
                    // reproducible under any worker scheduling.
                    Rng arng(mix_seed(train_cfg.seed,
                                      0xa06u + (static_cast<std::uint64_t>(epoch) << 32) + order[start + i]));
                    augment(patch, label, aug_cfg, arng);
                }
                std::copy(patch.px.begin(), patch.px.end(), x.sample(i));
                std::copy(label.px.begin(), label.px.end(), y.sample(i));
            }
            Rng drop_rng(mix_seed(train_cfg.seed, 0xd209 + (static_cast<std::uint64_t>(epoch) << 24) + start));
            model.zero_grad();
            const Tensor<float> pred = model.forward(x, /*training=*/true, &drop_rng);
            auto [loss, grad] = bce_loss_with_grad(pred, y);
            if (!std::isfinite(loss))
                throw Error("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(start / train_cfg.batch_size) + " (lr=" + std::to_string(lr) + ")");
            model.backward(grad);
            adam.step(lr);
            loss_sum += static_cast<long double>(loss) * bn;
            seen += bn;
        }
        const double train_loss = static_cast<double>(loss_sum / seen);
        const double val_loss =
            val_refs.empty() ? train_loss
                             : mean_loss_eval(model, images, labels, val_refs, train_cfg.batch_size, size);

        if (train_cfg.plateau_enabled) {
            if (val_loss < result.history.best_val_loss - 1e-12) {
                plateau_wait = 0;
            } else if (++plateau_wait >= train_cfg.plateau_patience) {
                plateau_scale *= train_cfg.plateau_factor;
                plateau_wait = 0;
            }
        }

        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        EpochRecord rec{epoch, train_loss, val_loss, lr, wall};
        result.history.epochs.push_back(rec);
        history_out << nlohmann::json{{"epoch", rec.epoch},
                                      {"train_loss", rec.train_loss},
                                      {"val_loss", rec.val_loss},
                                      {"lr", rec.lr},
                                      {"wall_seconds", rec.wall_seconds}}
                            .dump()
                    << "\n";
        history_out.flush();

        if (train_cfg.checkpoint_every > 0 &&
            ((epoch + 1) % train_cfg.checkpoint_every == 0 || epoch + 1 == train_cfg.epochs_total)) {
            char name[32];
            std::snprintf(name, sizeof name, "epoch_%04d.awn", epoch);
            result.last_checkpoint = run_dir / "checkpoints" / name;
            save_checkpoint(result.last_checkpoint, model, epoch, train_cfg.seed);
        }
        if (val_loss < result.history.best_val_loss) {
            result.history.best_val_loss = val_loss;
            result.history.best_epoch = epoch;
            result.best_checkpoint = run_dir / "checkpoints" / "best.awn";
            save_checkpoint(result.best_checkpoint, model, epoch, train_cfg.seed);
        }
    }
    return result;
}

}  // namespace awnet
