#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "awnet/model/wnet.hpp"
#include "awnet/train/loss.hpp"
#include "awnet/train/optimizer.hpp"
#include "awnet/train/trainer.hpp"
#include "testutil.hpp"

using namespace awnet;
using namespace awnet::testutil;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("train");

TEST_CASE("bce: closed forms") {
    Tensor<double> pred(1, 1, 1, 2), target(1, 1, 1, 2);

    // perfect prediction -> ~0
    pred.fill(1.0 - 1e-9);
    target.fill(1.0);
    CHECK(bce_loss(pred, target) < 1e-6);

    // y=1, p=0.5 -> ln 2; y=0, p=0.5 -> ln 2
    pred.fill(0.5);
    target.data()[0] = 1.0;
    target.data()[1] = 0.0;
    CHECK(bce_loss(pred, target) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(bce_loss(pred, target) == doctest::Approx(0.693147).epsilon(1e-5));

    Tensor<double> wrong(1, 1, 2, 2);
    CHECK_THROWS_AS(bce_loss(pred, wrong), InputError);
}

TEST_CASE("bce: agrees with a scalar-loop oracle to 1e-9 relative") {
    Rng rng(50);
    Tensor<double> pred(3, 1, 9, 9), target(3, 1, 9, 9);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pred.data()[i] = 0.001 + 0.998 * rng.uniform();
        target.data()[i] = rng.bernoulli(0.4) ? 1.0 : 0.0;
    }
    double oracle = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = pred.data()[i], y = target.data()[i];
        oracle += -y * std::log(p) - (1 - y) * std::log(1 - p);
    }
    oracle /= static_cast<double>(pred.size());
    const double got = bce_loss(pred, target);
    CHECK(std::abs(got - oracle) / oracle < 1e-9);
    CHECK(got >= 0.0);
}

TEST_CASE("bce: gradient matches finite differences") {
    Rng rng(51);
    Tensor<double> pred(1, 1, 4, 4), target(1, 1, 4, 4);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pred.data()[i] = 0.05 + 0.9 * rng.uniform();
        target.data()[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    auto [loss, grad] = bce_loss_with_grad(pred, target);
    (void)loss;
    const double eps = 1e-7;
    for (std::size_t i : {std::size_t{0}, std::size_t{7}, std::size_t{15}}) {
        const double keep = pred.data()[i];
        pred.data()[i] = keep + eps;
        const double up = bce_loss(pred, target);
        pred.data()[i] = keep - eps;
        const double dn = bce_loss(pred, target);
        pred.data()[i] = keep;
        CHECK(grad.data()[i] == doctest::Approx((up - dn) / (2 * eps)).epsilon(1e-5));
    }
}

TEST_CASE("lr_at: staged schedule values") {
    const TrainConfig drive = default_train_config(DatasetId::Drive);
    CHECK(lr_at(0, drive) == 1e-3);
    CHECK(lr_at(99, drive) == 1e-3);
    CHECK(lr_at(100, drive) == 1e-4);
    CHECK(lr_at(150, drive) == 1e-4);
    CHECK(drive.epochs_total == 250);

    const TrainConfig chase = default_train_config(DatasetId::Chase);
    CHECK(chase.epochs_total == 300);
    CHECK(lr_at(270, chase) == 5e-5);

    // non-increasing across the run
    for (const auto& cfg : {drive, chase}) {
        double prev = lr_at(0, cfg);
        for (int e = 1; e < cfg.epochs_total; ++e) {
            const double lr = lr_at(e, cfg);
            CHECK(lr <= prev);
            prev = lr;
        }
    }
    CHECK_THROWS_AS(lr_at(250, drive), InputError);
    CHECK_THROWS_AS(lr_at(-1, drive), InputError);
}

TEST_CASE("train config validation") {
    TrainConfig bad = default_train_config(DatasetId::Drive);
    bad.lr_stages = {{0, 1e-3}, {0, 1e-4}};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = default_train_config(DatasetId::Drive);
    bad.batch_size = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("adam: a nonzero gradient moves parameters, zero lr does not") {
    ModelConfig cfg;
    cfg.levels = 2;
    cfg.base_channels = 2;
    cfg.dropout_rate = 0.0;
    AttentionWNet<float> net(cfg, 1);
    Adam<float> adam(net.params());

    Rng rng(60);
    Tensor<float> x(1, 1, 8, 8), target(1, 1, 8, 8);
    fill_random(x, rng, 0.5);
    for (std::size_t i = 0; i < target.size(); ++i) target.data()[i] = rng.bernoulli(0.5) ? 1.f : 0.f;

    const std::vector<float> before(net.params()[0].param->value.data(),
                                    net.params()[0].param->value.data() + net.params()[0].param->size());
    net.zero_grad();
    auto [l1, g1] = bce_loss_with_grad(net.forward(x, true), target);
    (void)l1;
    net.backward(g1);
    adam.step(0.0);  // zero rate: everything stays put
    for (std::size_t i = 0; i < before.size(); ++i)
        CHECK(net.params()[0].param->value.data()[i] == before[i]);

    adam.step(1e-3);
    bool moved = false;
    for (std::size_t i = 0; i < before.size(); ++i)
        if (net.params()[0].param->value.data()[i] != before[i]) moved = true;
    CHECK(moved);
}

TEST_CASE("trainer: two-epoch run on synthetic data logs history and improves") {
    const fs::path tmp = fs::temp_directory_path() / "awnet_train_test";
    fs::remove_all(tmp);

    std::vector<FundusSample> samples;
    for (int i = 0; i < 2; ++i)
        samples.push_back(make_synthetic_sample("t" + std::to_string(i), 192, 192, 900 + i));

    ModelConfig mc;
    mc.levels = 3;
    mc.base_channels = 4;
    TrainConfig tc = default_train_config(DatasetId::Drive);
    tc.epochs_total = 2;
    tc.batch_size = 32;
    tc.train_stride = 48;
    tc.max_train_patches = 96;
    tc.seed = 5;
    AugmentConfig ac;
    PreprocessSettings pp;

    const TrainResult r1 = train(mc, tc, ac, pp, samples, tmp / "run1");
    REQUIRE(r1.history.epochs.size() == 2);
    CHECK(r1.history.epochs[1].train_loss < r1.history.epochs[0].train_loss);
    for (std::size_t e = 1; e < r1.history.epochs.size(); ++e)
        CHECK(r1.history.epochs[e].lr <= r1.history.epochs[e - 1].lr);  // never raised
    CHECK(fs::exists(r1.last_checkpoint));
    CHECK(fs::exists(r1.best_checkpoint));
    CHECK(fs::exists(tmp / "run1" / "history.jsonl"));
    CHECK(!fs::exists(tmp / "run1" / ".lock"));  // released

    // same seed, fresh directory: identical loss trajectory
    const TrainResult r2 = train(mc, tc, ac, pp, samples, tmp / "run2");
    CHECK(r2.history.epochs[0].train_loss == r1.history.epochs[0].train_loss);
    CHECK(r2.history.epochs[1].train_loss == r1.history.epochs[1].train_loss);

    fs::remove_all(tmp);
}

TEST_CASE("trainer: a held lock blocks a second writer") {
    const fs::path tmp = fs::temp_directory_path() / "awnet_lock_test";
    fs::remove_all(tmp);
    fs::create_directories(tmp / "run");
    { std::ofstream lock(tmp / "run" / ".lock"); lock << "held\n"; }

    std::vector<FundusSample> samples{make_synthetic_sample("a", 128, 128, 1)};
    ModelConfig mc;
    mc.levels = 2;
    mc.base_channels = 2;
    TrainConfig tc = default_train_config(DatasetId::Drive);
    tc.epochs_total = 1;
    tc.batch_size = 8;
    tc.train_stride = 48;
    CHECK_THROWS_WITH_AS(train(mc, tc, AugmentConfig{}, PreprocessSettings{}, samples, tmp / "run"),
                         doctest::Contains("locked"), IoError);
    fs::remove_all(tmp);
}

TEST_SUITE_END();
