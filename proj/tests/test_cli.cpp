#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "awnet/experiment.hpp"
#include "testutil.hpp"

using namespace awnet;
using namespace awnet::testutil;
namespace fs = std::filesystem;
using nlohmann::json;

TEST_SUITE_BEGIN("cli");

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(AWNET_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WEXITSTATUS(rc);
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

// One shared fixture tree + config for the pipeline tests.
struct CliFixture {
    fs::path root;
    fs::path config_path;

    CliFixture() : root(fs::temp_directory_path() / "awnet_cli_fixture") {
        config_path = root / "config.json";
        if (fs::exists(config_path)) return;  // reuse across cases in one process
        fs::create_directories(root);
        write_synthetic_tree(root / "data", DatasetId::Drive, Split::Train, 2, 41, "gif");
        write_synthetic_tree(root / "data", DatasetId::Drive, Split::Test, 2, 42, "png");

        ExperimentConfig cfg;
        cfg.data_root = (root / "data").string();
        cfg.model.levels = 3;
        cfg.model.base_channels = 4;
        cfg.train.epochs_total = 1;
        cfg.train.batch_size = 32;
        cfg.train.train_stride = 48;
        cfg.train.max_train_patches = 128;
        cfg.train.seed = 3;
        cfg.infer_stride = 48;
        cfg.infer_batch = 64;
        save_experiment_config(config_path, cfg);
    }
};

}  // namespace

TEST_CASE("prepare-data writes a manifest, hits the cache, and heals corruption") {
    CliFixture fx;
    const fs::path run = fx.root / "prep";
    fs::remove_all(run);  // the fixture tree persists across processes; the cache must not
    const std::string base = "prepare-data --config " + fx.config_path.string() + " --run-dir " + run.string();

    const CliResult first = run_cli(base, fx.root / "log1.txt");
    CHECK(first.exit_code == 0);
    CHECK(first.output.find("wrote:") != std::string::npos);
    CHECK(first.output.find("manifest:") != std::string::npos);

    const fs::path manifest = run / "patches_drive_training_s48.manifest.json";
    REQUIRE(fs::exists(manifest));
    {
        std::ifstream in(manifest);
        const json m = json::parse(in);
        CHECK(m.at("sources").size() == 2);  // one entry per training image
        CHECK(m.at("stride") == 48);
        CHECK(m.at("patch") == 48);
        CHECK(!m.at("preprocess_hash").get<std::string>().empty());
    }

    const CliResult second = run_cli(base, fx.root / "log2.txt");
    CHECK(second.exit_code == 0);
    CHECK(second.output.find("cache hit") != std::string::npos);

    // flip one payload byte -> checksum mismatch -> rebuild with a warning
    const fs::path archive = run / "patches_drive_training_s48.bin";
    {
        std::fstream f(archive, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4096);
        char b = 0;
        f.read(&b, 1);
        f.seekp(4096);
        b = static_cast<char>(b ^ 0x40);
        f.write(&b, 1);
    }
    const CliResult third = run_cli(base, fx.root / "log3.txt");
    CHECK(third.exit_code == 0);
    CHECK(third.output.find("rebuilt") != std::string::npos);
}

TEST_CASE("train, infer, evaluate round-trip on the synthetic tree") {
    CliFixture fx;
    const fs::path run = fx.root / "run";
    const CliResult tr = run_cli("train --config " + fx.config_path.string() + " --run-dir " + run.string(),
                                 fx.root / "train.log");
    INFO(tr.output);
    REQUIRE(tr.exit_code == 0);
    CHECK(fs::exists(run / "config.json"));
    CHECK(fs::exists(run / "history.jsonl"));
    const fs::path best = run / "checkpoints" / "best.awn";
    REQUIRE(fs::exists(best));

    const CliResult inf = run_cli("infer --config " + fx.config_path.string() + " --run-dir " + run.string() +
                                      " --checkpoint " + best.string(),
                                  fx.root / "infer.log");
    INFO(inf.output);
    REQUIRE(inf.exit_code == 0);
    CHECK(fs::exists(run / "predictions" / "manifest.json"));

    const CliResult ev = run_cli("evaluate --config " + fx.config_path.string() + " --run-dir " + run.string(),
                                 fx.root / "eval.log");
    INFO(ev.output);
    REQUIRE(ev.exit_code == 0);
    CHECK(fs::exists(run / "eval.json"));
    CHECK(fs::exists(run / "roc.tsv"));
    CHECK(ev.output.find("aggregate") != std::string::npos);

    // removing a prediction must produce an explicit missing-file error
    fs::path victim;
    for (const auto& e : fs::directory_iterator(run / "predictions"))
        if (e.path().filename().string().find("_prob.png") != std::string::npos) victim = e.path();
    REQUIRE(!victim.empty());
    fs::remove(victim);
    const CliResult bad = run_cli("evaluate --config " + fx.config_path.string() + " --run-dir " + run.string(),
                                  fx.root / "eval_bad.log");
    CHECK(bad.exit_code != 0);
    CHECK(bad.output.find("missing prediction for image") != std::string::npos);
    CHECK(bad.output.find("_test") != std::string::npos);  // names the image id
}

TEST_CASE("significance reproduces the published p-values from an injected table") {
    CliFixture fx;
    const fs::path run = fx.root / "sig";
    const fs::path values = fx.root / "table5.json";
    {
        json v;
        v["baseline"]["f1"] = {0.8202, 0.8195, 0.8210, 0.8203, 0.8191};
        v["candidate"]["f1"] = {0.8407, 0.8390, 0.8374, 0.8397, 0.8389};
        v["baseline"]["auc"] = {0.9793, 0.9801, 0.9812, 0.9785, 0.9790};
        v["candidate"]["auc"] = {0.9833, 0.9835, 0.9844, 0.9844, 0.9824};
        std::ofstream(values) << v.dump(2);
    }
    const CliResult r = run_cli("significance --run-dir " + run.string() + " --values-file " + values.string(),
                                fx.root / "sig.log");
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    std::ifstream in(run / "significance.json");
    const json out = json::parse(in);
    const double p_f1 = out.at("f1").at("p_value").get<double>();
    const double p_auc = out.at("auc").at("p_value").get<double>();
    CHECK(std::abs(p_f1 - 5.55e-6) / 5.55e-6 < 0.05);
    CHECK(p_auc == doctest::Approx(6.66e-4).epsilon(0.01));
    CHECK(out.at("f1").at("reject").get<bool>());
    CHECK(out.at("auc").at("reject").get<bool>());
    CHECK(out.at("f1").at("degrees_of_freedom").get<int>() == 4);
}

TEST_CASE("ablate produces one run directory and one table row per configuration") {
    CliFixture fx;
    const fs::path run = fx.root / "ablate";
    const CliResult r = run_cli("ablate --config " + fx.config_path.string() + " --run-dir " + run.string() +
                                    " --epochs 1",
                                fx.root / "ablate.log");
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    for (const char* row : {"row1_backbone", "row2_resblock", "row3_augment", "row4_type1", "row5_type2"}) {
        CHECK(fs::exists(run / row / "config.json"));
        CHECK(fs::exists(run / row / "eval.json"));
    }
    std::ifstream in(run / "ablation.json");
    const json rows = json::parse(in);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].at("attention") == "none");
    CHECK(rows[4].at("attention") == "type2");
    for (const auto& row : rows) CHECK(!row.at("f1").is_null());
}

TEST_CASE("--smoke collapses any config to the desk-scale budget") {
    CliFixture fx;
    const CliResult r = run_cli("info --config " + fx.config_path.string() + " --smoke",
                                fx.root / "smoke_info.log");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("2 epochs, batch 64") != std::string::npos);
    CHECK(r.output.find("stride 48") != std::string::npos);
}

TEST_CASE("bad invocations exit nonzero with a diagnostic") {
    CliFixture fx;
    const CliResult r = run_cli("train --config /nonexistent.json --run-dir " + (fx.root / "x").string(),
                                fx.root / "bad.log");
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("error") != std::string::npos);
}

TEST_SUITE_END();
