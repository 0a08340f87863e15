#include "misboost.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "boosting.hpp"
#include "data.hpp"
#include "evaluation.hpp"

using namespace misboost;

struct misb_dataset {
    Dataset ds;
};
struct misb_model {
    BoostedModel model;
};
struct misb_report {
    EvalReport report;
};

namespace {

thread_local std::string g_last_error;

misb_status status_of(const MilError& e) {
    switch (e.kind()) {
        case ErrorKind::Argument: return MISB_ERR_ARG;
        case ErrorKind::Io: return MISB_ERR_IO;
        case ErrorKind::Parse: return MISB_ERR_PARSE;
        case ErrorKind::Dimension: return MISB_ERR_DIM;
        case ErrorKind::Data: return MISB_ERR_DATA;
    }
    return MISB_ERR_INTERNAL;
}

template <typename Fn>
misb_status guarded(Fn&& fn) {
    try {
        fn();
        return MISB_OK;
    } catch (const MilError& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MISB_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return MISB_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

misb_status need(bool ok, const char* msg) {
    if (ok) return MISB_OK;
    g_last_error = msg;
    return MISB_ERR_ARG;
}

TrainConfig to_config(const misb_train_options& o) {
    TrainConfig cfg;
    cfg.k = o.k;
    cfg.max_m = o.max_m;
    cfg.sel_folds = o.sel_folds;
    cfg.alpha = o.alpha;
    cfg.fit.tol = o.tol;
    cfg.seed = o.seed;
    cfg.jobs = o.jobs;
    cfg.fit.restricted_mode = o.restricted != 0;
    cfg.normalize = o.normalize != 0;
    cfg.fit.restarts = o.restarts;
    return cfg;
}

}  // namespace

extern "C" {

const char* misb_status_name(misb_status status) {
    switch (status) {
        case MISB_OK: return "ok";
        case MISB_ERR_ARG: return "invalid argument";
        case MISB_ERR_IO: return "io error";
        case MISB_ERR_PARSE: return "parse error";
        case MISB_ERR_DIM: return "dimension mismatch";
        case MISB_ERR_DATA: return "data error";
        case MISB_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* misb_last_error(void) { return g_last_error.c_str(); }

void misb_string_free(char* s) { std::free(s); }

misb_status misb_dataset_load(const char* path, const char* format,
                              misb_dataset** out) {
    if (auto s = need(path && format && out, "null argument")) return s;
    return guarded([&] {
        auto ds = std::make_unique<misb_dataset>();
        ds->ds = load_dataset(path, parse_format(format));
        *out = ds.release();
    });
}

void misb_dataset_free(misb_dataset* ds) { delete ds; }

size_t misb_dataset_num_bags(const misb_dataset* ds) {
    return ds ? ds->ds.num_bags() : 0;
}

size_t misb_dataset_dim(const misb_dataset* ds) { return ds ? ds->ds.dim : 0; }

void misb_train_options_init(misb_train_options* opts) {
    if (opts == nullptr) return;
    TrainConfig cfg;
    opts->k = cfg.k;
    opts->max_m = cfg.max_m;
    opts->sel_folds = cfg.sel_folds;
    opts->alpha = cfg.alpha;
    opts->tol = cfg.fit.tol;
    opts->seed = cfg.seed;
    opts->jobs = cfg.jobs;
    opts->restricted = cfg.fit.restricted_mode ? 1 : 0;
    opts->normalize = cfg.normalize ? 1 : 0;
    opts->restarts = cfg.fit.restarts;
}

misb_status misb_train(const misb_dataset* ds, const misb_train_options* opts,
                       misb_model** out) {
    if (auto s = need(ds && opts && out, "null argument")) return s;
    return guarded([&] {
        auto model = std::make_unique<misb_model>();
        model->model = train(ds->ds, to_config(*opts));
        *out = model.release();
    });
}

misb_status misb_model_save(const misb_model* model, const char* path) {
    if (auto s = need(model && path, "null argument")) return s;
    return guarded([&] { save_model(model->model, path); });
}

misb_status misb_model_load(const char* path, misb_model** out) {
    if (auto s = need(path && out, "null argument")) return s;
    return guarded([&] {
        auto model = std::make_unique<misb_model>();
        model->model = load_model(path);
        *out = model.release();
    });
}

void misb_model_free(misb_model* model) { delete model; }

size_t misb_model_num_stages(const misb_model* model) {
    return model ? model->model.num_stages() : 0;
}

size_t misb_model_dim(const misb_model* model) {
    return model ? model->model.dim : 0;
}

misb_status misb_model_summary_json(const misb_model* model, char** out) {
    if (auto s = need(model && out, "null argument")) return s;
    return guarded([&] {
        nlohmann::json j{{"selected_m", model->model.selected_m},
                         {"stages", model->model.num_stages()},
                         {"dim", model->model.dim},
                         {"alpha_used", model->model.alpha_used},
                         {"restricted", model->model.config.fit.restricted_mode},
                         {"validation_curve", model->model.validation_curve}};
        *out = dup_string(j.dump(2));
    });
}

misb_status misb_predict_csv(const misb_model* model, const misb_dataset* ds,
                             char** out) {
    if (auto s = need(model && ds && out, "null argument")) return s;
    return guarded([&] {
        auto preds = predict_all(model->model, ds->ds);
        std::ostringstream csv;
        csv << "bag_id,predicted_label,margin\n";
        char buf[32];
        for (std::size_t i = 0; i < preds.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", preds[i].margin);
            csv << ds->ds.bags[i].id << "," << preds[i].label << "," << buf << "\n";
        }
        *out = dup_string(csv.str());
    });
}

misb_status misb_accuracy(const misb_model* model, const misb_dataset* ds,
                          double* out) {
    if (auto s = need(model && ds && out, "null argument")) return s;
    return guarded([&] { *out = accuracy(model->model, ds->ds); });
}

misb_status misb_cross_validate(const misb_dataset* ds, int folds,
                                const misb_train_options* opts, int with_ap,
                                misb_report** out) {
    if (auto s = need(ds && opts && out, "null argument")) return s;
    return guarded([&] {
        auto report = std::make_unique<misb_report>();
        report->report = cross_validate(ds->ds, folds, to_config(*opts),
                                        with_ap != 0);
        *out = report.release();
    });
}

void misb_report_free(misb_report* report) { delete report; }

misb_status misb_report_json(const misb_report* report, char** out) {
    if (auto s = need(report && out, "null argument")) return s;
    return guarded([&] { *out = dup_string(report_to_json(report->report)); });
}

misb_status misb_report_table(const misb_report* report, char** out) {
    if (auto s = need(report && out, "null argument")) return s;
    return guarded([&] { *out = dup_string(report_to_table(report->report)); });
}

misb_status misb_report_set_name(misb_report* report, const char* name) {
    if (auto s = need(report && name, "null argument")) return s;
    report->report.dataset_name = name;
    return MISB_OK;
}

misb_status misb_report_merge_files(const char* const* paths, size_t n,
                                    char** out_table) {
    if (auto s = need(paths && out_table && n > 0, "null or empty argument"))
        return s;
    return guarded([&] {
        std::vector<EvalReport> reports;
        for (size_t i = 0; i < n; ++i) {
            std::ifstream in(paths[i], std::ios::binary);
            if (!in)
                throw MilError(ErrorKind::Io,
                               std::string("cannot open report file '") + paths[i] +
                                   "'");
            std::ostringstream buf;
            buf << in.rdbuf();
            EvalReport r = report_from_json(buf.str());
            if (r.dataset_name.empty()) r.dataset_name = paths[i];
            reports.push_back(std::move(r));
        }
        *out_table = dup_string(merge_reports_table(reports));
    });
}

misb_status misb_inspect(const misb_model* model, const misb_dataset* ds,
                         int top_k, char** out) {
    if (auto s = need(model && ds && out, "null argument")) return s;
    return guarded([&] {
        *out = dup_string(
            inspect_table(inspect_prototypes(model->model, ds->ds, top_k)));
    });
}

}  // extern "C"
