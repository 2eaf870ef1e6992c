#include "augsearch/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "augsearch/augmentor.hpp"
#include "augsearch/errors.hpp"
#include "augsearch/filter.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace augsearch::pipeline {

StagePaths StagePaths::under(const std::string& out_dir) {
    StagePaths p;
    p.augment_dir = out_dir + "/augment";
    p.train_filter_dir = out_dir + "/train_filter";
    p.filter_dir = out_dir + "/filter";
    p.train_dir = out_dir + "/train";
    p.eval_dir = out_dir + "/eval";
    p.sweep_dir = out_dir + "/sweep";
    p.dict_q = p.augment_dir + "/dict_q.jsonl";
    p.dict_c = p.augment_dir + "/dict_c.jsonl";
    p.failures = p.augment_dir + "/failures.jsonl";
    p.cross_ckpt = p.train_filter_dir + "/cross.ckpt";
    p.cross_trace = p.train_filter_dir + "/loss_trace.csv";
    p.filtered_pairs = p.filter_dir + "/pairs.jsonl";
    p.filtered_codebase = p.filter_dir + "/codebase.jsonl";
    p.filter_report = p.filter_dir + "/filter_report.json";
    p.eval_report = p.eval_dir + "/eval_report.json";
    return p;
}

std::string StagePaths::bi_ckpt(std::uint64_t seed) const {
    return train_dir + "/bi_seed" + std::to_string(seed) + ".ckpt";
}

std::string StagePaths::bi_trace(std::uint64_t seed) const {
    return train_dir + "/loss_trace_seed" + std::to_string(seed) + ".csv";
}

std::unique_ptr<augmentor::RewriteClient> make_client(const config::PipelineConfig& cfg) {
    if (cfg.client == "mock")
        return std::make_unique<augmentor::MockClient>(cfg.mock_seed);
    return std::make_unique<augmentor::RemoteClient>(augmentor::RemoteClient::from_environment());
}

namespace {

corpus::Dataset load_train_set(const config::PipelineConfig& cfg) {
    return corpus::load_dataset(cfg.train_pairs, cfg.train_codebase);
}

corpus::Dataset load_eval_set(const config::PipelineConfig& cfg) {
    if (!cfg.eval_pairs.empty() && !cfg.eval_codebase.empty())
        return corpus::load_dataset(cfg.eval_pairs, cfg.eval_codebase);
    return load_train_set(cfg);
}

void require_artifact(const std::string& path, const std::string& producer) {
    if (!fs::exists(path))
        throw ValidationError("missing artifact " + path + "; run the `" + producer +
                              "` subcommand first");
}

void write_trace_csv(const neural::TrainTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "epoch,mean_loss\n";
    char buf[40];
    for (std::size_t i = 0; i < trace.epoch_mean_loss.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g", trace.epoch_mean_loss[i]);
        out << (i + 1) << "," << buf << "\n";
    }
}

SeedStats seed_stats(const std::vector<double>& values) {
    SeedStats s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double acc = 0;
        for (double v : values) acc += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(acc / static_cast<double>(values.size() - 1));
    }
    return s;
}

corpus::Dataset select_train_input(const config::PipelineConfig& cfg, const StagePaths& paths) {
    bool filtered_present = fs::exists(paths.filtered_pairs) && fs::exists(paths.filtered_codebase);
    bool want_augmented = cfg.train_input == "augmented" ||
                          (cfg.train_input == "auto" && filtered_present);
    if (!want_augmented) return load_train_set(cfg);
    require_artifact(paths.filtered_pairs, "filter");
    require_artifact(paths.filtered_codebase, "filter");
    auto d_aug = corpus::load_dataset(paths.filtered_pairs, paths.filtered_codebase);
    if (cfg.n_aug >= 0)
        return filter::subsample_augmentations(d_aug, load_train_set(cfg), cfg.n_aug,
                                               cfg.filtering.seed);
    return d_aug;
}

}  // namespace

void run_stats(const config::PipelineConfig& cfg, std::ostream& out) {
    auto dataset = load_train_set(cfg);
    auto stats = corpus::dataset_stats(dataset);
    out << "pairs: " << stats.pair_count << "\n"
        << "codebase entries: " << dataset.codebase.size() << "\n"
        << "query words mean/max: " << stats.mean_query_words << " / " << stats.max_query_words
        << "\n"
        << "query tokens mean/max: " << stats.mean_query_tokens << " / "
        << stats.max_query_tokens << "\n"
        << "code tokens mean/max: " << stats.mean_code_tokens << " / " << stats.max_code_tokens
        << "\n"
        << "pairs over token ceiling: " << stats.over_ceiling_ids.size() << "\n";
    for (auto id : stats.over_ceiling_ids) out << "  over ceiling: pair " << id << "\n";
}

void run_augment(const config::PipelineConfig& cfg, std::ostream& out) {
    auto paths = StagePaths::under(cfg.out_dir);
    fs::create_directories(paths.augment_dir);
    auto dataset = load_train_set(cfg);
    auto client = make_client(cfg);
    augmentor::AugmentOptions options;
    options.budget = cfg.budget;
    options.dict_q_path = paths.dict_q;
    options.dict_c_path = paths.dict_c;
    options.failure_manifest_path = paths.failures;
    auto result = augmentor::augment_dataset(dataset, *client, options);
    out << "augment: " << result.requests_made << " requests, "
        << result.dict_q.entries.size() << " query origins, "
        << result.dict_c.entries.size() << " code origins, " << result.failed_origins
        << " failed origins\n";
}

void run_train_filter(const config::PipelineConfig& cfg, std::ostream& out) {
    auto paths = StagePaths::under(cfg.out_dir);
    fs::create_directories(paths.train_filter_dir);
    auto dataset = load_train_set(cfg);
    auto tc = cfg.cross_train;
    tc.seed = cfg.seeds.front();
    neural::TrainTrace trace;
    auto model = neural::train_cross_encoder(dataset, tc, cfg.tokenizer, cfg.d, cfg.h, &trace);
    neural::save_cross_checkpoint(model, paths.cross_ckpt);
    write_trace_csv(trace, paths.cross_trace);
    out << "train-filter: " << tc.epochs << " epochs, final mean loss "
        << (trace.epoch_mean_loss.empty() ? 0.0 : trace.epoch_mean_loss.back()) << "\n";
}

void run_filter(const config::PipelineConfig& cfg, std::ostream& out) {
    auto paths = StagePaths::under(cfg.out_dir);
    require_artifact(paths.dict_q, "augment");
    require_artifact(paths.dict_c, "augment");
    require_artifact(paths.cross_ckpt, "train-filter");
    fs::create_directories(paths.filter_dir);

    auto dataset = load_train_set(cfg);
    auto dict_q = corpus::load_augmentation_map(paths.dict_q);
    auto dict_c = corpus::load_augmentation_map(paths.dict_c);
    auto model = neural::load_cross_checkpoint(paths.cross_ckpt);
    auto filtered = filter::filter_augmented(dataset, dict_q, dict_c, model, cfg.filtering);
    corpus::save_pairs(filtered.d_aug.pairs, paths.filtered_pairs);
    corpus::save_codebase(filtered.d_aug.codebase, paths.filtered_codebase);
    filtered.report.save(paths.filter_report);
    out << "filter: kept " << filtered.report.codes_kept << "/"
        << (filtered.report.codes_kept + filtered.report.codes_dropped) << " code rewrites, "
        << filtered.report.queries_kept << "/"
        << (filtered.report.queries_kept + filtered.report.queries_dropped)
        << " query rewrites; " << filtered.d_aug.pairs.size() << " pairs total\n";
}

void run_train(const config::PipelineConfig& cfg, std::ostream& out) {
    auto paths = StagePaths::under(cfg.out_dir);
    fs::create_directories(paths.train_dir);
    auto train_set = select_train_input(cfg, paths);
    for (auto seed : cfg.seeds) {
        auto tc = cfg.bi_train;
        tc.seed = seed;
        neural::TrainTrace trace;
        auto model = neural::train_bi_encoder(train_set, tc, cfg.tokenizer, cfg.d, &trace);
        neural::save_bi_checkpoint(model, paths.bi_ckpt(seed));
        write_trace_csv(trace, paths.bi_trace(seed));
        out << "train: seed " << seed << ", " << train_set.pairs.size() << " pairs, final loss "
            << (trace.epoch_mean_loss.empty() ? 0.0 : trace.epoch_mean_loss.back()) << "\n";
    }
}

void EvalSummary::save(const std::string& path) const {
    auto stat_json = [](const SeedStats& s) {
        return json{{"mean", s.mean}, {"stddev", s.stddev}};
    };
    json per = json::array();
    for (std::size_t i = 0; i < per_seed.size(); ++i) {
        const auto& r = per_seed[i];
        json r_at = json::object();
        for (const auto& [k, v] : r.r_at) r_at[std::to_string(k)] = v;
        per.push_back({{"seed", seeds[i]},
                       {"mrr", r.mrr},
                       {"r_at", r_at},
                       {"align_loss", r.align_loss},
                       {"uniformity_loss", r.uniformity}});
    }
    json doc = {{"mrr", stat_json(mrr)},
                {"r_at_1", stat_json(r1)},
                {"r_at_5", stat_json(r5)},
                {"r_at_10", stat_json(r10)},
                {"align_loss", stat_json(align_loss)},
                {"uniformity_loss", stat_json(uniformity)},
                {"per_seed", per}};
    std::ofstream fout(path);
    if (!fout) throw IoError("cannot write " + path);
    fout << doc.dump(2) << "\n";
    if (!fout) throw IoError("write failure on " + path);
}

namespace {

EvalSummary summarize(std::vector<std::uint64_t> seeds, std::vector<eval::EvalReport> reports) {
    EvalSummary summary;
    summary.seeds = std::move(seeds);
    summary.per_seed = std::move(reports);
    std::vector<double> mrrs, r1s, r5s, r10s, aligns, unifs;
    for (const auto& r : summary.per_seed) {
        mrrs.push_back(r.mrr);
        r1s.push_back(r.r_at.at(1));
        r5s.push_back(r.r_at.at(5));
        r10s.push_back(r.r_at.at(10));
        aligns.push_back(r.align_loss);
        unifs.push_back(r.uniformity);
    }
    summary.mrr = seed_stats(mrrs);
    summary.r1 = seed_stats(r1s);
    summary.r5 = seed_stats(r5s);
    summary.r10 = seed_stats(r10s);
    summary.align_loss = seed_stats(aligns);
    summary.uniformity = seed_stats(unifs);
    return summary;
}

}  // namespace

EvalSummary run_eval(const config::PipelineConfig& cfg, std::ostream& out,
                     const EvalOptions& options) {
    auto paths = StagePaths::under(cfg.out_dir);
    fs::create_directories(paths.eval_dir);
    auto eval_set = load_eval_set(cfg);
    std::vector<eval::EvalReport> reports;
    for (auto seed : cfg.seeds) {
        require_artifact(paths.bi_ckpt(seed), "train");
        auto model = neural::load_bi_checkpoint(paths.bi_ckpt(seed));
        auto report = eval::evaluate(model, eval_set);
        report.seeds = {seed};
        reports.push_back(std::move(report));
        if (!options.export_embeddings_path.empty() && seed == cfg.seeds.front()) {
            eval::ExportOptions export_options;
            export_options.project = options.project;
            eval::export_embeddings(model, eval_set, options.export_embeddings_path,
                                    export_options);
        }
    }
    auto summary = summarize(cfg.seeds, std::move(reports));
    summary.save(paths.eval_report);
    out << "eval: mrr " << summary.mrr.mean << " (std " << summary.mrr.stddev << "), r@1 "
        << summary.r1.mean << ", r@5 " << summary.r5.mean << ", r@10 " << summary.r10.mean
        << "\n";
    return summary;
}

EvalSummary train_and_eval(const config::PipelineConfig& cfg, const corpus::Dataset& train_set,
                           const corpus::Dataset& eval_set) {
    std::vector<eval::EvalReport> reports;
    for (auto seed : cfg.seeds) {
        auto tc = cfg.bi_train;
        tc.seed = seed;
        auto model = neural::train_bi_encoder(train_set, tc, cfg.tokenizer, cfg.d);
        auto report = eval::evaluate(model, eval_set);
        report.seeds = {seed};
        reports.push_back(std::move(report));
    }
    return summarize(cfg.seeds, std::move(reports));
}

void run_sweep(const config::PipelineConfig& cfg, const std::string& param,
               const std::vector<double>& values, std::ostream& out) {
    static const std::vector<std::string> kParams = {"theta_q", "theta_c", "n_aug",
                                                     "lr_multiplier"};
    if (std::find(kParams.begin(), kParams.end(), param) == kParams.end())
        throw ValidationError("sweep: unsupported parameter \"" + param + "\"");
    if (values.empty()) throw ValidationError("sweep: no values given");

    auto paths = StagePaths::under(cfg.out_dir);
    require_artifact(paths.dict_q, "augment");
    require_artifact(paths.dict_c, "augment");
    require_artifact(paths.cross_ckpt, "train-filter");
    fs::create_directories(paths.sweep_dir);

    auto dataset = load_train_set(cfg);
    auto eval_set = load_eval_set(cfg);
    auto dict_q = corpus::load_augmentation_map(paths.dict_q);
    auto dict_c = corpus::load_augmentation_map(paths.dict_c);
    auto cross = neural::load_cross_checkpoint(paths.cross_ckpt);

    std::string csv_path = paths.sweep_dir + "/sweep_" + param + ".csv";
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot write " + csv_path);
    csv << "param,value,mrr,r1,mrr_std,r1_std\n";
    char buf[40];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };

    for (double value : values) {
        auto run_cfg = cfg;
        if (param == "theta_q") run_cfg.filtering.theta_q = value;
        else if (param == "theta_c") run_cfg.filtering.theta_c = value;
        else if (param == "n_aug") run_cfg.n_aug = value;
        else run_cfg.bi_train.lr_multiplier = value;
        run_cfg.validate();

        auto filtered = filter::filter_augmented(dataset, dict_q, dict_c, cross,
                                                 run_cfg.filtering);
        corpus::Dataset train_set = run_cfg.n_aug >= 0
            ? filter::subsample_augmentations(filtered.d_aug, dataset, run_cfg.n_aug,
                                              run_cfg.filtering.seed)
            : filtered.d_aug;
        auto summary = train_and_eval(run_cfg, train_set, eval_set);
        csv << param << "," << fmt(value) << "," << fmt(summary.mrr.mean) << ","
            << fmt(summary.r1.mean) << "," << fmt(summary.mrr.stddev) << ","
            << fmt(summary.r1.stddev) << "\n";
        out << "sweep " << param << "=" << value << ": mrr " << summary.mrr.mean << ", r@1 "
            << summary.r1.mean << "\n";
    }
    if (!csv) throw IoError("write failure on " + csv_path);
}

void run_pipeline(const config::PipelineConfig& cfg, std::ostream& out) {
    run_augment(cfg, out);
    run_train_filter(cfg, out);
    run_filter(cfg, out);
    run_train(cfg, out);
    run_eval(cfg, out);
}

}  // namespace augsearch::pipeline
