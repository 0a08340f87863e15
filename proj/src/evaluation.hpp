#ifndef MISBOOST_EVALUATION_HPP
#define MISBOOST_EVALUATION_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "boosting.hpp"
#include "types.hpp"

namespace misboost {

struct EvalReport {
    std::string dataset_name;
    int folds = 0;
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    double stddev_accuracy = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;
    bool has_ap = false;
    double ap = 0.0;
    std::uint64_t config_fp = 0;
    std::uint64_t dataset_fp = 0;
    // Timing lives apart from the deterministic fields; diffs of two runs
    // with the same seed differ only here.
    std::vector<double> fold_seconds;
    double total_seconds = 0.0;
};

// k-fold cross validation of the full training procedure. Normalization,
// clustering and stage selection see only the training portion of each fold.
EvalReport cross_validate(const Dataset& dataset, int folds,
                          const TrainConfig& cfg, bool with_ap);

// All-points average precision: mean of precision at each positive's rank,
// ranking by margin descending, ties stable by input order. Labels are +1
// for positives; anything else counts negative.
double average_precision(const std::vector<std::pair<double, int>>& scored);

struct InspectRow {
    std::string bag_id;
    int stage = 0;           // 1-based boosting stage
    std::size_t instance = 0;  // 0-based index within the bag
    double distance = 0.0;     // in the model's (normalized) feature space
};

// Nearest instance per (bag, prototype) for the first top_k stages.
std::vector<InspectRow> inspect_prototypes(const BoostedModel& model,
                                           const Dataset& ds, int top_k);

std::string inspect_table(const std::vector<InspectRow>& rows);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
std::string report_to_table(const EvalReport& report);

// Comparison table for several reports (one row per report).
std::string merge_reports_table(const std::vector<EvalReport>& reports);

}  // namespace misboost

#endif
