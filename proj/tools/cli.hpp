#pragma once

// seglens command-line front end: features -> 1-D embedding -> change
// points -> evaluation against labels.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 input/schema error,
// 3 numerical degeneracy, 4 infeasible parameters.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "seglens/seglens.hpp"

namespace seglens::cli {

namespace fs = std::filesystem;

inline constexpr Index kKernelFrameLimit = 20000;

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kInputError = 2,
    kDegenerate = 3,
    kInfeasible = 4,
};

struct Options {
    std::string input;
    std::vector<std::string> inputs;
    std::string labels;
    std::vector<std::string> label_files;
    std::string output;
    std::string report;
    std::string embedding = "pca";
    std::optional<double> gamma;
    std::string algorithm = "pelt";
    double beta = 250.0;
    std::string betas;
    std::optional<Index> k;
    Index min_len = 1;
    Index window = 5;
    Index tolerance = 0;
    double var_floor = kDefaultVarFloor;
    std::uint64_t seed = 0;
    bool has_frame_ids = false;
    bool force = false;
    bool no_timestamp = false;

    // synth
    Index frames = 2000;
    Index dims = 64;
    Index runs = 8;
    Index run_min = 40;
    Index run_max = 150;
    double shift = 3.0;
};

inline std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

inline void write_json(const fs::path& path, nlohmann::ordered_json j, const Options& opt) {
    if (!opt.no_timestamp) {
        j["generated_at"] = timestamp();
    }
    detail::write_file(path, j.dump(2) + "\n");
}

inline EmbeddingConfig embedding_config(const Options& opt) {
    const auto method = parse_embedding_method(opt.embedding);
    if (!method || *method == EmbeddingMethod::kpca_linear) {
        throw InfeasibleError("unknown embedding '" + opt.embedding + "'");
    }
    return {*method, opt.gamma};
}

inline Embedding1D embed_features(const FeatureMatrix& x, const Options& opt) {
    const EmbeddingConfig cfg = embedding_config(opt);
    if (cfg.method != EmbeddingMethod::pca && x.frames() > kKernelFrameLimit && !opt.force) {
        throw InfeasibleError("kernel PCA on " + std::to_string(x.frames()) +
                              " frames needs a dense " + std::to_string(x.frames()) + "^2 Gram " +
                              "matrix; pass --force to proceed or use --embedding pca");
    }
    Embedding1D e = embed(x, cfg);
    if (e.degenerate) {
        throw DegenerateError("embedding collapsed to zero (top kernel eigenvalue <= 1e-12)");
    }
    e.source = opt.embedding;
    return e;
}

inline SearchParams search_params(const Options& opt) {
    SearchParams p;
    p.beta = opt.beta;
    p.min_len = opt.min_len;
    p.max_changepoints = opt.k;
    p.window_width = opt.window;
    return p;
}

inline void warn_degenerate_penalty(double beta, const Options& opt) {
    if (opt.min_len == 1 && beta < std::abs(std::log(opt.var_floor))) {
        std::cerr << "warning: beta " << beta << " is below |log var_floor| = "
                  << std::abs(std::log(opt.var_floor))
                  << "; single-frame segments may be cheaper than the penalty "
                     "(degenerate over-segmentation)\n";
    }
}

inline Segmentation run_detection(const Embedding1D& e, const Options& opt) {
    const auto algorithm = parse_algorithm(opt.algorithm);
    if (!algorithm) {
        throw InfeasibleError("unknown algorithm '" + opt.algorithm + "'");
    }
    if (*algorithm != Algorithm::dpk) {
        warn_degenerate_penalty(opt.beta, opt);
    }
    const GaussianCost model(e, opt.var_floor);
    return detect(model, *algorithm, search_params(opt));
}

inline std::vector<double> parse_betas(const std::string& text) {
    if (text.empty()) {
        return default_beta_grid();
    }
    std::vector<double> out;
    for (auto cell : detail::split(text, ',')) {
        double v = 0.0;
        if (!detail::parse_number(cell, v)) {
            throw InputError("cannot parse penalty '" + std::string(detail::trim(cell)) + "'",
                             InputError::Kind::parse);
        }
        out.push_back(v);
    }
    return out;
}

inline fs::path default_report_path(const fs::path& output) {
    fs::path p = output;
    p.replace_extension();
    p += ".eval.json";
    return p;
}

inline int cmd_embed(const Options& opt) {
    const FeatureMatrix x = load_feature_matrix(opt.input, opt.has_frame_ids);
    detail::write_file(opt.output, embedding_csv(embed_features(x, opt)));
    return kOk;
}

inline int cmd_detect(const Options& opt) {
    const Embedding1D e = load_embedding(opt.input, opt.embedding);
    write_json(opt.output, to_json(run_detection(e, opt)), opt);
    return kOk;
}

inline int cmd_evaluate(const Options& opt) {
    const Segmentation seg = load_segmentation(opt.input);
    const TransitionTruth truth = transitions_from_labels(load_labels(opt.labels));
    if (!is_valid_segmentation(seg.changepoints, truth.length)) {
        throw InputError("segmentation does not fit a sequence of " +
                         std::to_string(truth.length) + " labels");
    }
    write_json(opt.output, to_json(evaluate_segmentation(seg, truth, opt.tolerance)), opt);
    return kOk;
}

inline int cmd_sweep(const Options& opt) {
    if (opt.inputs.size() != opt.label_files.size()) {
        throw InputError("sweep needs one --labels file per --input file");
    }
    std::vector<GaussianCost> models;
    std::vector<TransitionTruth> truths;
    models.reserve(opt.inputs.size());
    for (std::size_t i = 0; i < opt.inputs.size(); ++i) {
        const FeatureMatrix x = load_feature_matrix(opt.inputs[i], opt.has_frame_ids);
        truths.push_back(transitions_from_labels(load_labels(opt.label_files[i], x.frames())));
        models.emplace_back(embed_features(x, opt), opt.var_floor);
    }
    std::vector<SweepCase> cases;
    for (std::size_t i = 0; i < models.size(); ++i) {
        cases.push_back({&models[i], truths[i]});
    }
    const std::vector<double> betas = parse_betas(opt.betas);
    SearchParams base = search_params(opt);
    const EvalReport report =
        roc_sweep(cases, betas, opt.tolerance, base, sweep_threads_from_env());
    detail::write_file(opt.output, roc_csv(report));
    if (!opt.report.empty()) {
        write_json(opt.report, to_json(report), opt);
    }
    std::cout << "auc " << format_number(report.auc) << " best_beta "
              << format_number(report.best_beta) << "\n";
    return kOk;
}

inline int cmd_synth(const Options& opt) {
    const fs::path dir = opt.output;
    fs::create_directories(dir);
    const auto runs = place_runs(opt.seed ^ 0x5EED0F2A1B3C4D5EULL, opt.frames, opt.runs,
                                 opt.run_min, opt.run_max);
    const SyntheticFeatures s = gen_feature_matrix(opt.seed, opt.frames, opt.dims, runs, opt.shift);
    write_feature_matrix(dir / "features.csv", s.features);
    detail::write_file(dir / "labels.csv", labels_csv(s.labels));
    nlohmann::ordered_json truth;
    truth["transitions"] = s.truth.transitions;
    auto run_list = nlohmann::ordered_json::array();
    for (const auto& r : runs) {
        run_list.push_back({r.begin, r.end});
    }
    truth["runs"] = std::move(run_list);
    truth["frames"] = opt.frames;
    truth["dims"] = opt.dims;
    truth["shift"] = round_sig(opt.shift);
    truth["seed"] = opt.seed;
    write_json(dir / "truth.json", std::move(truth), opt);
    return kOk;
}

inline int cmd_pipeline(const Options& opt) {
    const FeatureMatrix x = load_feature_matrix(opt.input, opt.has_frame_ids);
    std::optional<LabelSequence> labels;
    if (!opt.labels.empty()) {
        labels = load_labels(opt.labels, x.frames());
    }
    const Segmentation seg = run_detection(embed_features(x, opt), opt);
    write_json(opt.output, to_json(seg), opt);
    if (labels) {
        const fs::path report_path =
            opt.report.empty() ? default_report_path(opt.output) : fs::path(opt.report);
        write_json(report_path,
                   to_json(evaluate_segmentation(seg, transitions_from_labels(*labels),
                                                 opt.tolerance)),
                   opt);
    }
    return kOk;
}

/// Parses argv and runs one subcommand; returns the process exit code.
inline int run(int argc, const char* const* argv) {
    Options opt;
    CLI::App app{"seglens: 1-D embedding and penalized change-point segmentation of "
                 "per-frame feature sequences"};
    app.require_subcommand(1);

    auto add_embedding = [&](CLI::App* cmd) {
        cmd->add_option("--embedding", opt.embedding, "pca | kpca-cosine | kpca-rbf")
            ->check(CLI::IsMember({"pca", "kpca-cosine", "kpca-rbf"}));
        cmd->add_option("--gamma", opt.gamma, "RBF bandwidth (default: median heuristic)");
        cmd->add_flag("--has-frame-ids", opt.has_frame_ids, "first CSV column is a frame id");
        cmd->add_flag("--force", opt.force, "allow kernel PCA above 20000 frames");
    };
    auto add_search = [&](CLI::App* cmd) {
        cmd->add_option("--algorithm", opt.algorithm, "pelt | op | binseg | window | dpk")
            ->check(CLI::IsMember({"pelt", "op", "binseg", "window", "dpk"}));
        cmd->add_option("--beta", opt.beta, "penalty per change point");
        cmd->add_option("--k", opt.k, "change-point count for dpk");
        cmd->add_option("--min-len", opt.min_len, "minimum segment length");
        cmd->add_option("--window", opt.window, "half-width for window search");
        cmd->add_option("--var-floor", opt.var_floor, "variance floor of the segment cost");
    };

    auto* embed_cmd = app.add_subcommand("embed", "project features to a 1-D embedding CSV");
    embed_cmd->add_option("--input", opt.input, "feature CSV")->required();
    embed_cmd->add_option("--output", opt.output, "embedding CSV")->required();
    add_embedding(embed_cmd);

    auto* detect_cmd = app.add_subcommand("detect", "find change points in an embedding CSV");
    detect_cmd->add_option("--input", opt.input, "embedding CSV (one column)")->required();
    detect_cmd->add_option("--output", opt.output, "segmentation JSON")->required();
    detect_cmd->add_option("--embedding", opt.embedding, "embedding name recorded in the output");
    detect_cmd->add_flag("--no-timestamp", opt.no_timestamp, "omit generated_at");
    add_search(detect_cmd);

    auto* eval_cmd = app.add_subcommand("evaluate", "score a segmentation against labels");
    eval_cmd->add_option("--input", opt.input, "segmentation JSON")->required();
    eval_cmd->add_option("--labels", opt.labels, "label CSV")->required();
    eval_cmd->add_option("--output", opt.output, "report JSON")->required();
    eval_cmd->add_option("--tolerance", opt.tolerance, "matching tolerance in frames");
    eval_cmd->add_flag("--no-timestamp", opt.no_timestamp, "omit generated_at");

    auto* sweep_cmd = app.add_subcommand("sweep", "ROC over a penalty grid (PELT)");
    sweep_cmd->add_option("--input", opt.inputs, "feature CSV (repeatable)")->required();
    sweep_cmd->add_option("--labels", opt.label_files, "label CSV per input")->required();
    sweep_cmd->add_option("--output", opt.output, "ROC CSV")->required();
    sweep_cmd->add_option("--report", opt.report, "report JSON");
    sweep_cmd->add_option("--betas", opt.betas, "comma-separated penalties");
    sweep_cmd->add_option("--tolerance", opt.tolerance, "matching tolerance in frames");
    sweep_cmd->add_option("--min-len", opt.min_len, "minimum segment length");
    sweep_cmd->add_option("--var-floor", opt.var_floor, "variance floor of the segment cost");
    sweep_cmd->add_flag("--no-timestamp", opt.no_timestamp, "omit generated_at");
    add_embedding(sweep_cmd);

    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic feature/label fixture");
    synth_cmd->add_option("--output", opt.output, "output directory")->required();
    synth_cmd->add_option("--seed", opt.seed, "generator seed");
    synth_cmd->add_option("--frames", opt.frames, "number of frames T");
    synth_cmd->add_option("--dims", opt.dims, "feature width p");
    synth_cmd->add_option("--runs", opt.runs, "number of abnormal runs");
    synth_cmd->add_option("--run-min", opt.run_min, "shortest run");
    synth_cmd->add_option("--run-max", opt.run_max, "longest run");
    synth_cmd->add_option("--shift", opt.shift, "mean shift inside runs");
    synth_cmd->add_flag("--no-timestamp", opt.no_timestamp, "omit generated_at");

    auto* pipe_cmd = app.add_subcommand("pipeline", "features -> embedding -> change points");
    pipe_cmd->add_option("--input", opt.input, "feature CSV")->required();
    pipe_cmd->add_option("--labels", opt.labels, "label CSV (optional)");
    pipe_cmd->add_option("--output", opt.output, "segmentation JSON")->required();
    pipe_cmd->add_option("--report", opt.report, "report JSON (default: <output>.eval.json)");
    pipe_cmd->add_option("--tolerance", opt.tolerance, "matching tolerance in frames");
    pipe_cmd->add_flag("--no-timestamp", opt.no_timestamp, "omit generated_at");
    add_embedding(pipe_cmd);
    add_search(pipe_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        if (*embed_cmd) return cmd_embed(opt);
        if (*detect_cmd) return cmd_detect(opt);
        if (*eval_cmd) return cmd_evaluate(opt);
        if (*sweep_cmd) return cmd_sweep(opt);
        if (*synth_cmd) return cmd_synth(opt);
        if (*pipe_cmd) return cmd_pipeline(opt);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const DegenerateError& e) {
        std::cerr << "degenerate: " << e.what() << "\n";
        return kDegenerate;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

} // namespace seglens::cli
