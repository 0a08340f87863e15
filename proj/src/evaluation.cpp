#include "evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "data.hpp"
#include "rng.hpp"

namespace misboost {

using nlohmann::json;

EvalReport cross_validate(const Dataset& dataset, int folds,
                          const TrainConfig& cfg, bool with_ap) {
    cfg.validate();
    auto splits = stratified_split(dataset, folds, cfg.seed);

    EvalReport report;
    report.folds = folds;
    report.config_fp = config_fingerprint(cfg);
    report.dataset_fp = dataset_fingerprint(dataset);

    std::vector<std::pair<double, int>> pooled;  // held-out margins + labels
    for (std::size_t f = 0; f < splits.size(); ++f) {
        auto t0 = std::chrono::steady_clock::now();
        TrainConfig fold_cfg = cfg;
        fold_cfg.seed = mix_seed(cfg.seed, 0xcf01d + f);
        BoostedModel model = train(splits[f].train, fold_cfg);

        std::size_t correct = 0;
        for (const Bag& b : splits[f].held_out.bags) {
            Prediction p = predict(model, b);
            if (p.label == b.label) ++correct;
            if (b.label == kPositive) {
                (p.label == kPositive ? report.tp : report.fn) += 1;
            } else {
                (p.label == kNegative ? report.tn : report.fp) += 1;
            }
            pooled.emplace_back(p.margin, b.label);
        }
        report.fold_accuracies.push_back(
            static_cast<double>(correct) /
            static_cast<double>(splits[f].held_out.bags.size()));
        auto t1 = std::chrono::steady_clock::now();
        report.fold_seconds.push_back(
            std::chrono::duration<double>(t1 - t0).count());
    }

    const double n = static_cast<double>(report.fold_accuracies.size());
    report.mean_accuracy =
        std::accumulate(report.fold_accuracies.begin(),
                        report.fold_accuracies.end(), 0.0) / n;
    double var = 0.0;
    for (double a : report.fold_accuracies) {
        double c = a - report.mean_accuracy;
        var += c * c;
    }
    report.stddev_accuracy = std::sqrt(var / n);
    report.total_seconds = std::accumulate(report.fold_seconds.begin(),
                                           report.fold_seconds.end(), 0.0);
    if (with_ap) {
        report.has_ap = true;
        report.ap = average_precision(pooled);
    }
    return report;
}

double average_precision(const std::vector<std::pair<double, int>>& scored) {
    std::size_t positives = 0;
    for (const auto& [margin, label] : scored)
        if (label == kPositive) ++positives;
    if (positives == 0)
        throw MilError(ErrorKind::Data,
                       "average precision needs at least one positive");

    std::vector<std::size_t> order(scored.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scored[a].first > scored[b].first;
    });

    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (scored[order[rank]].second == kPositive) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
        }
    }
    return sum / static_cast<double>(positives);
}

std::vector<InspectRow> inspect_prototypes(const BoostedModel& model,
                                           const Dataset& ds, int top_k) {
    if (top_k < 1 || static_cast<std::size_t>(top_k) > model.num_stages())
        throw MilError(ErrorKind::Argument,
                       "top_k must be in [1, " +
                           std::to_string(model.num_stages()) + "]");
    Dataset local = model.normalized ? apply_normalization(ds, model.norm) : ds;
    std::vector<InspectRow> rows;
    rows.reserve(local.bags.size() * static_cast<std::size_t>(top_k));
    for (const Bag& b : local.bags) {
        for (int m = 0; m < top_k; ++m) {
            auto [dist, idx] = bag_distance(model.stages[m].prototype, b);
            rows.push_back({b.id, m + 1, idx, dist});
        }
    }
    return rows;
}

namespace {

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string inspect_table(const std::vector<InspectRow>& rows) {
    std::ostringstream out;
    out << "# nearest training-space instance per (bag, prototype); stages "
           "ordered by boosting index\n";
    out << "bag_id\tstage\tinstance\tdistance\n";
    for (const InspectRow& r : rows)
        out << r.bag_id << "\t" << r.stage << "\t" << r.instance << "\t"
            << fmt_full(r.distance) << "\n";
    return out.str();
}

std::string report_to_json(const EvalReport& report) {
    json j{{"format", "misboost-report"},
           {"version", 1},
           {"dataset", report.dataset_name},
           {"folds", report.folds},
           {"fold_accuracies", report.fold_accuracies},
           {"mean_accuracy", report.mean_accuracy},
           {"stddev_accuracy", report.stddev_accuracy},
           {"confusion",
            {{"tp", report.tp}, {"fp", report.fp}, {"tn", report.tn}, {"fn", report.fn}}},
           {"config_fingerprint", report.config_fp},
           {"dataset_fingerprint", report.dataset_fp},
           {"timing",
            {{"fold_seconds", report.fold_seconds},
             {"total_seconds", report.total_seconds}}}};
    if (report.has_ap) j["average_precision"] = report.ap;
    return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MilError(ErrorKind::Parse,
                       std::string("report is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "misboost-report")
            throw MilError(ErrorKind::Parse, "not a misboost report document");
        EvalReport r;
        r.dataset_name = j.at("dataset").get<std::string>();
        r.folds = j.at("folds").get<int>();
        r.fold_accuracies = j.at("fold_accuracies").get<std::vector<double>>();
        r.mean_accuracy = j.at("mean_accuracy").get<double>();
        r.stddev_accuracy = j.at("stddev_accuracy").get<double>();
        r.tp = j.at("confusion").at("tp").get<long>();
        r.fp = j.at("confusion").at("fp").get<long>();
        r.tn = j.at("confusion").at("tn").get<long>();
        r.fn = j.at("confusion").at("fn").get<long>();
        r.config_fp = j.at("config_fingerprint").get<std::uint64_t>();
        r.dataset_fp = j.at("dataset_fingerprint").get<std::uint64_t>();
        r.fold_seconds = j.at("timing").at("fold_seconds").get<std::vector<double>>();
        r.total_seconds = j.at("timing").at("total_seconds").get<double>();
        if (j.contains("average_precision")) {
            r.has_ap = true;
            r.ap = j.at("average_precision").get<double>();
        }
        return r;
    } catch (const json::exception& e) {
        throw MilError(ErrorKind::Parse,
                       std::string("malformed report document: ") + e.what());
    }
}

std::string report_to_table(const EvalReport& report) {
    std::ostringstream out;
    out << "cross-validation report";
    if (!report.dataset_name.empty()) out << " for " << report.dataset_name;
    out << "\n";
    out << "folds: " << report.folds << "\n";
    out << "fold\taccuracy\tseconds\n";
    for (std::size_t f = 0; f < report.fold_accuracies.size(); ++f)
        out << (f + 1) << "\t" << fmt(report.fold_accuracies[f]) << "\t"
            << fmt(report.fold_seconds[f], 2) << "\n";
    out << "mean accuracy: " << fmt(report.mean_accuracy) << " +/- "
        << fmt(report.stddev_accuracy) << "\n";
    out << "confusion: tp=" << report.tp << " fp=" << report.fp
        << " tn=" << report.tn << " fn=" << report.fn << "\n";
    if (report.has_ap) out << "average precision: " << fmt(report.ap) << "\n";
    out << "total seconds: " << fmt(report.total_seconds, 2) << "\n";
    return out.str();
}

std::string merge_reports_table(const std::vector<EvalReport>& reports) {
    std::ostringstream out;
    out << "dataset\tfolds\tmean_acc\tstddev\tap\tconfig_fp\n";
    for (const EvalReport& r : reports) {
        out << (r.dataset_name.empty() ? "-" : r.dataset_name) << "\t" << r.folds
            << "\t" << fmt(r.mean_accuracy) << "\t" << fmt(r.stddev_accuracy)
            << "\t" << (r.has_ap ? fmt(r.ap) : std::string("-")) << "\t" << std::hex
            << r.config_fp << std::dec << "\n";
    }
    return out.str();
}

}  // namespace misboost
