// Command-line front end; talks to the library only through the C API.
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "misboost.h"

namespace {

struct CommonOpts {
    std::string data;
    std::string format = "mil-csv";
    misb_train_options train{};
    bool verbose = false;
};

void add_train_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--k", o.train.k, "Number of k-means clusters");
    cmd->add_option("--max-m", o.train.max_m, "Maximum boosting stages");
    cmd->add_option("--sel-folds", o.train.sel_folds,
                    "Folds for selecting the stage count");
    cmd->add_option("--alpha", o.train.alpha,
                    "Soft-min sharpness (<=0: data-driven)");
    cmd->add_option("--tol", o.train.tol, "Base-learner convergence tolerance");
    cmd->add_option("--seed", o.train.seed, "Random seed");
    cmd->add_option("--jobs", o.train.jobs,
                    "Worker threads (<=0: all processors)");
    cmd->add_flag_callback("--restricted",
                           [&o] { o.train.restricted = 1; },
                           "Confine prototypes to training instances");
    cmd->add_flag_callback("--no-normalize", [&o] { o.train.normalize = 0; },
                           "Skip z-score feature normalization");
}

void add_data_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--data", o.data, "Dataset file")->required();
    cmd->add_option("--format", o.format, "Dataset format")
        ->check(CLI::IsMember({"mil-csv", "mil-sparse"}));
}

int fail(const char* what, misb_status status) {
    std::cerr << "error: " << what << ": " << misb_status_name(status) << ": "
              << misb_last_error() << "\n";
    return 1;
}

struct Str {
    char* s = nullptr;
    ~Str() { misb_string_free(s); }
};

struct DatasetHandle {
    misb_dataset* ds = nullptr;
    ~DatasetHandle() { misb_dataset_free(ds); }
};

struct ModelHandle {
    misb_model* m = nullptr;
    ~ModelHandle() { misb_model_free(m); }
};

struct ReportHandle {
    misb_report* r = nullptr;
    ~ReportHandle() { misb_report_free(r); }
};

int write_file(const std::string& path, const char* text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return 1;
    }
    return 0;
}

int cmd_train(const CommonOpts& o, const std::string& out_path) {
    DatasetHandle ds;
    if (auto s = misb_dataset_load(o.data.c_str(), o.format.c_str(), &ds.ds))
        return fail("loading dataset", s);
    if (o.verbose)
        std::cerr << "loaded " << misb_dataset_num_bags(ds.ds) << " bags, dim "
                  << misb_dataset_dim(ds.ds) << "\n";

    ModelHandle model;
    if (auto s = misb_train(ds.ds, &o.train, &model.m))
        return fail("training", s);
    if (auto s = misb_model_save(model.m, out_path.c_str()))
        return fail("saving model", s);

    Str summary;
    if (auto s = misb_model_summary_json(model.m, &summary.s))
        return fail("summarizing model", s);
    double acc = 0.0;
    if (auto s = misb_accuracy(model.m, ds.ds, &acc))
        return fail("scoring training data", s);
    std::cout << summary.s << "\n";
    std::cout << "training accuracy: " << acc << "\n";
    std::cout << "model written to " << out_path << "\n";
    return 0;
}

int cmd_predict(const CommonOpts& o, const std::string& model_path,
                const std::string& out_path) {
    ModelHandle model;
    if (auto s = misb_model_load(model_path.c_str(), &model.m))
        return fail("loading model", s);
    DatasetHandle ds;
    if (auto s = misb_dataset_load(o.data.c_str(), o.format.c_str(), &ds.ds))
        return fail("loading dataset", s);
    Str csv;
    if (auto s = misb_predict_csv(model.m, ds.ds, &csv.s))
        return fail("predicting", s);
    if (out_path.empty()) {
        std::cout << csv.s;
        return 0;
    }
    return write_file(out_path, csv.s);
}

int cmd_cv(const CommonOpts& o, int folds, bool with_ap,
           const std::string& out_path) {
    DatasetHandle ds;
    if (auto s = misb_dataset_load(o.data.c_str(), o.format.c_str(), &ds.ds))
        return fail("loading dataset", s);
    ReportHandle report;
    if (auto s = misb_cross_validate(ds.ds, folds, &o.train, with_ap ? 1 : 0,
                                     &report.r))
        return fail("cross-validating", s);
    misb_report_set_name(report.r,
                         std::filesystem::path(o.data).stem().string().c_str());
    Str table;
    if (auto s = misb_report_table(report.r, &table.s))
        return fail("rendering report", s);
    std::cout << table.s;
    if (!out_path.empty()) {
        Str json;
        if (auto s = misb_report_json(report.r, &json.s))
            return fail("rendering report", s);
        return write_file(out_path, json.s);
    }
    return 0;
}

int cmd_inspect(const CommonOpts& o, const std::string& model_path, int top_k) {
    namespace fs = std::filesystem;
    if (fs::is_directory(model_path)) {
        // Directory of one-vs-all models: per-class stage-count table.
        std::vector<std::pair<std::string, size_t>> rows;
        for (const auto& entry : fs::directory_iterator(model_path)) {
            if (entry.path().extension() != ".json") continue;
            ModelHandle model;
            if (auto s = misb_model_load(entry.path().string().c_str(), &model.m))
                return fail("loading model", s);
            rows.emplace_back(entry.path().stem().string(),
                              misb_model_num_stages(model.m));
        }
        if (rows.empty()) {
            std::cerr << "error: no .json models in '" << model_path << "'\n";
            return 1;
        }
        std::sort(rows.begin(), rows.end());
        std::cout << "class\tprototypes\n";
        for (const auto& [name, m] : rows) std::cout << name << "\t" << m << "\n";
        return 0;
    }

    ModelHandle model;
    if (auto s = misb_model_load(model_path.c_str(), &model.m))
        return fail("loading model", s);
    DatasetHandle ds;
    if (auto s = misb_dataset_load(o.data.c_str(), o.format.c_str(), &ds.ds))
        return fail("loading dataset", s);
    Str table;
    if (auto s = misb_inspect(model.m, ds.ds, top_k, &table.s))
        return fail("inspecting prototypes", s);
    std::cout << table.s;
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs,
               const std::string& out_path) {
    std::vector<const char*> paths;
    for (const auto& p : inputs) paths.push_back(p.c_str());
    Str table;
    if (auto s = misb_report_merge_files(paths.data(), paths.size(), &table.s))
        return fail("merging reports", s);
    std::cout << table.s;
    if (!out_path.empty()) return write_file(out_path, table.s);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIS-Boost: multiple-instance boosting with learned prototypes"};
    app.require_subcommand(1);

    CommonOpts o;
    misb_train_options_init(&o.train);
    app.add_flag("--verbose", o.verbose, "Chatty progress output");

    std::string out_path, model_path;
    int folds = 10, top_k = 3;
    bool with_ap = false;
    std::vector<std::string> report_inputs;

    auto* train = app.add_subcommand("train", "Train a model");
    add_data_flags(train, o);
    add_train_flags(train, o);
    train->add_option("--out", out_path, "Model output path")->required();

    auto* predict = app.add_subcommand("predict", "Predict bags with a model");
    add_data_flags(predict, o);
    predict->add_option("--model", model_path, "Model file")->required();
    predict->add_option("--out", out_path, "Prediction CSV path (default stdout)");

    auto* cv = app.add_subcommand("cv", "Cross-validated benchmark");
    add_data_flags(cv, o);
    add_train_flags(cv, o);
    cv->add_option("--folds", folds, "Evaluation folds");
    cv->add_flag("--ap", with_ap, "Also report pooled average precision");
    cv->add_option("--out", out_path, "Report JSON output path");

    auto* inspect = app.add_subcommand("inspect", "Nearest instances per prototype");
    inspect->add_option("--model", model_path,
                        "Model file, or directory of one-vs-all models")
        ->required();
    inspect->add_option("--data", o.data, "Dataset file");
    inspect->add_option("--format", o.format, "Dataset format")
        ->check(CLI::IsMember({"mil-csv", "mil-sparse"}));
    inspect->add_option("--top", top_k, "Number of leading prototypes");

    auto* report = app.add_subcommand("report", "Merge report JSONs into a table");
    report->add_option("inputs", report_inputs, "Report JSON files")->required();
    report->add_option("--out", out_path, "Table output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (train->parsed()) return cmd_train(o, out_path);
    if (predict->parsed()) return cmd_predict(o, model_path, out_path);
    if (cv->parsed()) return cmd_cv(o, folds, with_ap, out_path);
    if (inspect->parsed()) {
        if (o.data.empty() && !std::filesystem::is_directory(model_path)) {
            std::cerr << "error: --data is required when --model is a file\n";
            return 2;
        }
        return cmd_inspect(o, model_path, top_k);
    }
    if (report->parsed()) return cmd_report(report_inputs, out_path);
    return 2;
}
