// Command-line front end: prepare-data, train, infer, evaluate, ablate,
// significance, info. Every run directory receives a snapshot of the fully
// resolved configuration so any artifact can be reproduced from it.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "awnet/data/patch_cache.hpp"
#include "awnet/eval/report.hpp"
#include "awnet/eval/significance.hpp"
#include "awnet/experiment.hpp"
#include "awnet/infer/predict.hpp"
#include "awnet/model/checkpoint.hpp"
#include "awnet/train/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace awnet;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string run_dir = "runs/default";
    std::string dataset;
    std::optional<std::uint64_t> seed;
    std::optional<int> stride;
    std::optional<double> threshold;
    std::string ab_type;
    bool no_augment = false;
    std::string resblock;
    std::optional<int> epochs;
    bool smoke = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "experiment config file (json)");
    cmd->add_option("--run-dir", f.run_dir, "artifact directory for this run");
    cmd->add_option("--dataset", f.dataset, "drive or chase")->check(CLI::IsMember({"drive", "chase"}));
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--stride", f.stride, "patch stride (training and inference)");
    cmd->add_option("--threshold", f.threshold, "binarisation threshold");
    cmd->add_option("--ab-type", f.ab_type, "attention block type: none, 1 or 2")
        ->check(CLI::IsMember({"none", "1", "2", "type1", "type2"}));
    cmd->add_flag("--no-augment", f.no_augment, "disable training augmentation");
    cmd->add_option("--resblock", f.resblock, "residual block variant: shared, plain or nobn")
        ->check(CLI::IsMember({"shared", "plain", "nobn", "laddernet"}));
    cmd->add_option("--epochs", f.epochs, "override epoch count");
    cmd->add_flag("--smoke", f.smoke, "tiny desk-scale budget (2 epochs, batch 64, sparse patches)");
}

ExperimentConfig resolve_config(const CommonFlags& f) {
    ExperimentConfig cfg;
    if (!f.config_path.empty()) cfg = load_experiment_config(f.config_path);
    if (!f.dataset.empty()) {
        const DatasetId ds = dataset_from_string(f.dataset);
        if (ds != cfg.train.dataset) {
            const TrainConfig fresh = default_train_config(ds);
            cfg.train.dataset = ds;
            cfg.train.epochs_total = fresh.epochs_total;
            cfg.train.lr_stages = fresh.lr_stages;
        }
    }
    if (f.seed) cfg.train.seed = *f.seed;
    if (f.stride) {
        cfg.train.train_stride = *f.stride;
        cfg.infer_stride = *f.stride;
    }
    if (f.threshold) cfg.threshold = *f.threshold;
    if (!f.ab_type.empty()) cfg.model.attention = attention_from_string(f.ab_type);
    if (f.no_augment) cfg.train.augmentation_on = false;
    if (!f.resblock.empty()) cfg.model.resblock = resblock_from_string(f.resblock);
    if (f.epochs) cfg.train.epochs_total = *f.epochs;
    if (f.smoke) {
        cfg.train.epochs_total = f.epochs ? *f.epochs : 2;
        cfg.train.batch_size = 64;
        cfg.train.train_stride = std::max(cfg.train.train_stride, 48);
        cfg.train.max_train_patches = 512;
        cfg.infer_stride = std::max(cfg.infer_stride, 24);
    }
    cfg.validate();
    return cfg;
}

void snapshot_config(const fs::path& run_dir, const ExperimentConfig& cfg) {
    fs::create_directories(run_dir);
    save_experiment_config(run_dir / "config.json", cfg);
}

int run_train(const CommonFlags& flags) {
    const ExperimentConfig cfg = resolve_config(flags);
    const fs::path run_dir = flags.run_dir;
    snapshot_config(run_dir, cfg);
    const auto samples = load_dataset(cfg.data_root, cfg.train.dataset, Split::Train);
    std::cout << "training on " << samples.size() << " images, " << cfg.train.epochs_total
              << " epochs, batch " << cfg.train.batch_size << "\n";
    const TrainResult res = train(cfg.model, cfg.train, cfg.augment, cfg.preprocess, samples, run_dir);
    const auto& last = res.history.epochs.back();
    std::cout << "done: train_loss " << last.train_loss << ", val_loss " << last.val_loss
              << ", best epoch " << res.history.best_epoch << "\n"
              << "best checkpoint: " << res.best_checkpoint.string() << "\n";
    return 0;
}

int run_prepare(const CommonFlags& flags, const std::string& split_name) {
    const ExperimentConfig cfg = resolve_config(flags);
    const Split split = split_name == "test" ? Split::Test : Split::Train;
    const auto samples = load_dataset(cfg.data_root, cfg.train.dataset, split);
    const PrepareResult res = prepare_patch_cache(flags.run_dir, samples, cfg.train.dataset, split,
                                                  cfg.train.train_stride, cfg.preprocess);
    if (res.rebuilt_corrupt) std::cerr << "warning: cache was stale or corrupt, rebuilt\n";
    std::cout << (res.cache_hit ? "cache hit: " : "wrote: ") << res.archive.string() << " ("
              << res.patch_count << " patches)\nmanifest: " << res.manifest.string() << "\n";
    return 0;
}

int run_infer(const CommonFlags& flags, const std::string& checkpoint, const std::string& split_name) {
    const ExperimentConfig cfg = resolve_config(flags);
    const fs::path run_dir = flags.run_dir;
    const fs::path pred_dir = run_dir / "predictions";
    fs::create_directories(pred_dir);
    snapshot_config(run_dir, cfg);

    CheckpointMeta meta;
    AttentionWNet<float> model = load_checkpoint(checkpoint, &meta);
    const Split split = split_name == "training" ? Split::Train : Split::Test;
    const auto samples = load_dataset(cfg.data_root, cfg.train.dataset, split);
    const auto train_samples = load_dataset(cfg.data_root, cfg.train.dataset, Split::Train);
    const GrayStats stats = dataset_gray_stats(train_samples);

    json manifest;
    manifest["checkpoint"] = fs::path(checkpoint).string();
    manifest["stride"] = cfg.infer_stride;
    manifest["threshold"] = cfg.threshold;
    manifest["images"] = json::array();
    for (const auto& s : samples) {
        const ProbabilityMap pm = predict_image(model, s, cfg.preprocess, stats, cfg.infer_stride,
                                                cfg.infer_batch);
        write_png_gray16(pred_dir / (s.id + "_prob.png"), pm.values);
        write_png_mask(pred_dir / (s.id + "_mask.png"), binarize(pm, cfg.threshold));
        manifest["images"].push_back(s.id);
        std::cout << "predicted " << s.id << "\n";
    }
    std::ofstream(pred_dir / "manifest.json") << manifest.dump(2) << "\n";
    std::cout << "predictions in " << pred_dir.string() << "\n";
    return 0;
}

EvalReport evaluate_predictions(const ExperimentConfig& cfg, const fs::path& pred_dir,
                                const std::vector<FundusSample>& samples) {
    EvalReport report;
    report.threshold = cfg.threshold;
    std::vector<float> pooled_scores;
    std::vector<std::uint8_t> pooled_labels;
    for (const auto& s : samples) {
        const fs::path prob_path = pred_dir / (s.id + "_prob.png");
        if (!fs::exists(prob_path))
            throw DataError("missing prediction for image '" + s.id + "': " + prob_path.string());
        ProbabilityMap pm;
        pm.id = s.id;
        pm.values = read_png_gray16(prob_path);
        pm.fov = s.fov_mask;
        if (pm.values.h != s.fov_mask.h || pm.values.w != s.fov_mask.w)
            throw DataError("prediction size mismatch for image '" + s.id + "'");

        ImageEval ie;
        ie.id = s.id;
        ie.counts = confusion_counts(binarize(pm, cfg.threshold), s.vessel_mask, s.fov_mask);
        const F1Acc fa = f1_accuracy(ie.counts);
        ie.f1 = fa.f1;
        ie.acc = fa.acc;
        std::vector<float> scores;
        std::vector<std::uint8_t> labels;
        collect_fov_scores(pm.values, s.vessel_mask, s.fov_mask, scores, labels);
        try {
            ie.auc = roc_auc(scores, labels).auc;
        } catch (const InputError&) {
            ie.auc_valid = false;  // single-class image
        }
        pooled_scores.insert(pooled_scores.end(), scores.begin(), scores.end());
        pooled_labels.insert(pooled_labels.end(), labels.begin(), labels.end());
        report.pooled += ie.counts;
        report.per_image.push_back(std::move(ie));
    }
    const F1Acc pooled_fa = f1_accuracy(report.pooled);
    report.f1 = pooled_fa.f1;
    report.acc = pooled_fa.acc;
    report.roc = roc_auc(pooled_scores, pooled_labels);
    report.auc = report.roc.auc;
    std::vector<double> sweep;
    for (double t = 0.10; t < 0.91; t += 0.05) sweep.push_back(t);
    report.threshold_sweep = threshold_sensitivity(pooled_scores, pooled_labels, sweep);
    return report;
}

json report_to_json(const EvalReport& r) {
    json j;
    j["threshold"] = r.threshold;
    j["f1"] = r.f1;
    j["accuracy"] = r.acc;
    j["auc"] = r.auc;
    j["pooled_counts"] = {{"tp", r.pooled.tp}, {"fp", r.pooled.fp}, {"tn", r.pooled.tn}, {"fn", r.pooled.fn}};
    j["per_image"] = json::array();
    for (const auto& e : r.per_image)
        j["per_image"].push_back({{"id", e.id},
                                  {"f1", e.f1},
                                  {"accuracy", e.acc},
                                  {"auc", e.auc_valid ? json(e.auc) : json()},
                                  {"tp", e.counts.tp},
                                  {"fp", e.counts.fp},
                                  {"tn", e.counts.tn},
                                  {"fn", e.counts.fn}});
    j["threshold_sweep"] = json::array();
    for (const auto& p : r.threshold_sweep)
        j["threshold_sweep"].push_back({{"threshold", p.threshold}, {"f1", p.f1}, {"accuracy", p.acc}});
    return j;
}

int run_evaluate(const CommonFlags& flags, const std::string& pred_dir_arg) {
    const ExperimentConfig cfg = resolve_config(flags);
    const fs::path run_dir = flags.run_dir;
    const fs::path pred_dir = pred_dir_arg.empty() ? run_dir / "predictions" : fs::path(pred_dir_arg);
    const auto samples = load_dataset(cfg.data_root, cfg.train.dataset, Split::Test);
    const EvalReport report = evaluate_predictions(cfg, pred_dir, samples);

    fs::create_directories(run_dir);
    std::ofstream(run_dir / "eval.json") << report_to_json(report).dump(2) << "\n";
    std::ofstream roc_out(run_dir / "roc.tsv");
    roc_out << "fpr\ttpr\n";
    for (const auto& p : report.roc.points) roc_out << p.fpr << "\t" << p.tpr << "\n";
    std::ofstream sweep_out(run_dir / "threshold_sweep.tsv");
    sweep_out << "threshold\tf1\taccuracy\n";
    for (const auto& p : report.threshold_sweep)
        sweep_out << p.threshold << "\t" << p.f1 << "\t" << p.acc << "\n";
    const std::string table = render_eval_table(report);
    std::ofstream(run_dir / "eval.txt") << table;
    std::cout << table;
    return 0;
}

struct AblationPlan {
    std::string name;
    AblationKey key;
};

int run_ablate(const CommonFlags& flags) {
    const ExperimentConfig base = resolve_config(flags);
    const fs::path run_dir = flags.run_dir;
    fs::create_directories(run_dir);
    const auto train_samples = load_dataset(base.data_root, base.train.dataset, Split::Train);
    const auto test_samples = load_dataset(base.data_root, base.train.dataset, Split::Test);
    const GrayStats stats = dataset_gray_stats(train_samples);

    const std::vector<AblationPlan> plans = {
        {"row1_backbone", {false, false, AttentionType::None}},
        {"row2_resblock", {true, false, AttentionType::None}},
        {"row3_augment", {true, true, AttentionType::None}},
        {"row4_type1", {true, true, AttentionType::Type1}},
        {"row5_type2", {true, true, AttentionType::Type2}},
    };
    std::map<AblationKey, AblationCell> results;
    for (const auto& plan : plans) {
        ExperimentConfig cfg = base;
        cfg.model.resblock = plan.key.modified_resblock ? ResBlockVariant::Shared : ResBlockVariant::NoBatchNorm;
        cfg.train.augmentation_on = plan.key.augmentation;
        cfg.model.attention = plan.key.attention;
        const fs::path row_dir = run_dir / plan.name;
        snapshot_config(row_dir, cfg);
        std::cout << "=== " << plan.name << " ===\n";
        const TrainResult tr = train(cfg.model, cfg.train, cfg.augment, cfg.preprocess, train_samples, row_dir);

        CheckpointMeta meta;
        AttentionWNet<float> model = load_checkpoint(tr.best_checkpoint, &meta);
        const fs::path pred_dir = row_dir / "predictions";
        fs::create_directories(pred_dir);
        for (const auto& s : test_samples) {
            const ProbabilityMap pm =
                predict_image(model, s, cfg.preprocess, stats, cfg.infer_stride, cfg.infer_batch);
            write_png_gray16(pred_dir / (s.id + "_prob.png"), pm.values);
        }
        const EvalReport report = evaluate_predictions(cfg, pred_dir, test_samples);
        results[plan.key] = {report.f1, report.auc};
        std::ofstream(row_dir / "eval.json") << report_to_json(report).dump(2) << "\n";
    }

    const auto rows = ablation_report(results);
    const std::string table = render_ablation_table(rows);
    std::ofstream(run_dir / "ablation.txt") << table;
    json j = json::array();
    for (const auto& row : rows)
        j.push_back({{"resblock", row.key.modified_resblock},
                     {"augmentation", row.key.augmentation},
                     {"attention", to_string(row.key.attention)},
                     {"f1", row.result ? json(row.result->f1) : json()},
                     {"auc", row.result ? json(row.result->auc) : json()}});
    std::ofstream(run_dir / "ablation.json") << j.dump(2) << "\n";
    std::cout << table;
    return 0;
}

json significance_to_json(const SignificanceResult& r) {
    return json{{"t_statistic", r.t_statistic},
                {"degrees_of_freedom", r.degrees_of_freedom},
                {"p_value", r.p_value},
                {"alpha", r.alpha},
                {"reject", r.reject},
                {"sample_a", r.sample_a},
                {"sample_b", r.sample_b}};
}

int run_significance(const CommonFlags& flags, const std::string& values_file) {
    const fs::path run_dir = flags.run_dir;
    fs::create_directories(run_dir);
    json out;

    if (!values_file.empty()) {
        // Offline mode: per-seed metric columns provided directly.
        std::ifstream in(values_file);
        if (!in) throw IoError("cannot open values file: " + values_file);
        const json v = json::parse(in);
        for (const std::string metric : {"f1", "auc"}) {
            if (!v.at("baseline").contains(metric)) continue;
            const auto a = v.at("baseline").at(metric).get<std::vector<double>>();
            const auto b = v.at("candidate").at(metric).get<std::vector<double>>();
            const SignificanceResult r = paired_t_test(a, b);
            out[metric] = significance_to_json(r);
            std::cout << metric << ": t=" << r.t_statistic << " dof=" << r.degrees_of_freedom
                      << " p=" << r.p_value << (r.reject ? "  (reject at " : "  (keep at ")
                      << r.alpha << ")\n";
        }
    } else {
        // Full mode: one training run per seed for candidate and baseline.
        const ExperimentConfig base = resolve_config(flags);
        const auto train_samples = load_dataset(base.data_root, base.train.dataset, Split::Train);
        const auto test_samples = load_dataset(base.data_root, base.train.dataset, Split::Test);
        const GrayStats stats = dataset_gray_stats(train_samples);

        std::vector<double> f1_a, f1_b, auc_a, auc_b;
        for (const std::uint64_t seed : base.seeds) {
            for (const bool candidate : {false, true}) {
                ExperimentConfig cfg = base;
                cfg.train.seed = seed;
                if (!candidate) {
                    cfg.model.attention = AttentionType::None;
                    cfg.model.resblock = ResBlockVariant::NoBatchNorm;
                    cfg.train.augmentation_on = false;
                }
                const fs::path row_dir =
                    run_dir / ((candidate ? "candidate_seed" : "baseline_seed") + std::to_string(seed));
                snapshot_config(row_dir, cfg);
                const TrainResult tr =
                    train(cfg.model, cfg.train, cfg.augment, cfg.preprocess, train_samples, row_dir);
                AttentionWNet<float> model = load_checkpoint(tr.best_checkpoint);
                const fs::path pred_dir = row_dir / "predictions";
                fs::create_directories(pred_dir);
                for (const auto& s : test_samples) {
                    const ProbabilityMap pm =
                        predict_image(model, s, cfg.preprocess, stats, cfg.infer_stride, cfg.infer_batch);
                    write_png_gray16(pred_dir / (s.id + "_prob.png"), pm.values);
                }
                const EvalReport rep = evaluate_predictions(cfg, pred_dir, test_samples);
                (candidate ? f1_b : f1_a).push_back(rep.f1);
                (candidate ? auc_b : auc_a).push_back(rep.auc);
            }
        }
        const SignificanceResult rf = paired_t_test(f1_a, f1_b);
        const SignificanceResult ra = paired_t_test(auc_a, auc_b);
        out["f1"] = significance_to_json(rf);
        out["auc"] = significance_to_json(ra);
        std::cout << "f1: t=" << rf.t_statistic << " p=" << rf.p_value << "\n"
                  << "auc: t=" << ra.t_statistic << " p=" << ra.p_value << "\n";
    }
    std::ofstream(run_dir / "significance.json") << out.dump(2) << "\n";
    return 0;
}

int run_info(const CommonFlags& flags) {
    const ExperimentConfig cfg = resolve_config(flags);
    std::cout << "model: levels " << cfg.model.levels << ", base channels " << cfg.model.base_channels
              << ", attention " << to_string(cfg.model.attention) << ", resblock "
              << to_string(cfg.model.resblock) << "\n"
              << "parameters: " << count_parameters(cfg.model) << "\n"
              << "train: " << cfg.train.epochs_total << " epochs, batch " << cfg.train.batch_size
              << ", stride " << cfg.train.train_stride << "\n"
              << "infer: stride " << cfg.infer_stride << ", threshold " << cfg.threshold << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Attention W-Net retinal vessel segmentation pipeline"};
    app.require_subcommand(1);

    CommonFlags fprep, ftrain, finfer, feval, fablate, fsig, finfo;
    std::string prep_split = "training";
    std::string infer_checkpoint, infer_split = "test";
    std::string eval_pred_dir;
    std::string sig_values_file;

    CLI::App* prep = app.add_subcommand("prepare-data", "extract and cache preprocessed patches");
    add_common_flags(prep, fprep);
    prep->add_option("--split", prep_split, "training or test")->check(CLI::IsMember({"training", "test"}));

    CLI::App* trn = app.add_subcommand("train", "run the training protocol");
    add_common_flags(trn, ftrain);

    CLI::App* inf = app.add_subcommand("infer", "predict full images from a checkpoint");
    add_common_flags(inf, finfer);
    inf->add_option("--checkpoint", infer_checkpoint, "checkpoint file")->required();
    inf->add_option("--split", infer_split, "training or test")->check(CLI::IsMember({"training", "test"}));

    CLI::App* ev = app.add_subcommand("evaluate", "score predictions against ground truth");
    add_common_flags(ev, feval);
    ev->add_option("--pred-dir", eval_pred_dir, "directory holding <id>_prob.png files");

    CLI::App* abl = app.add_subcommand("ablate", "train and score the five-configuration ladder");
    add_common_flags(abl, fablate);

    CLI::App* sig = app.add_subcommand("significance", "paired one-tailed t-test over seed runs");
    add_common_flags(sig, fsig);
    sig->add_option("--values-file", sig_values_file, "json with baseline/candidate f1 and auc columns");

    CLI::App* info = app.add_subcommand("info", "print the resolved configuration and parameter count");
    add_common_flags(info, finfo);

    CLI11_PARSE(app, argc, argv);

    try {
        if (prep->parsed()) return run_prepare(fprep, prep_split);
        if (trn->parsed()) return run_train(ftrain);
        if (inf->parsed()) return run_infer(finfer, infer_checkpoint, infer_split);
        if (ev->parsed()) return run_evaluate(feval, eval_pred_dir);
        if (abl->parsed()) return run_ablate(fablate);
        if (sig->parsed()) return run_significance(fsig, sig_values_file);
        if (info->parsed()) return run_info(finfo);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
