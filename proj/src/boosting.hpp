#ifndef MISBOOST_BOOSTING_HPP
#define MISBOOST_BOOSTING_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "base_learner.hpp"
#include "clustering.hpp"
#include "data.hpp"
#include "types.hpp"

namespace misboost {

struct TrainConfig {
    int k = 100;
    int max_m = 100;
    int sel_folds = 4;
    double alpha = 0.0;    // <= 0: 10 / median exact bag distance to the
                           // first cluster center, per training run
    double epsilon = 1e-8;
    FitConfig fit;
    std::uint64_t seed = 42;
    int jobs = 0;          // <= 0: all available processors
    bool normalize = true;
    std::size_t kmeans_max_iters = 100;

    int effective_jobs() const;
    void validate() const;
};

struct BoostedModel {
    std::size_t dim = 0;
    bool normalized = true;
    NormalizationStats norm;
    std::vector<BaseClassifier> stages;
    TrainConfig config;
    std::uint64_t dataset_fp = 0;
    std::vector<double> validation_curve;  // averaged over selection folds
    int selected_m = 0;
    double alpha_used = 0.0;

    std::size_t num_stages() const { return stages.size(); }
};

struct Prediction {
    int label = 0;     // sign of the margin, sign(0) = +1
    double margin = 0.0;
};

struct BoostingState {
    std::vector<double> weights;
    std::vector<BaseClassifier> ensemble;
};

// One Gentle-AdaBoost round: learn a base classifier under the current
// weights, append it, update w_i <- w_i * exp(-y_i f_m(B_i)) with exact
// distances, renormalize. Returns the soft cost of the new stage.
double boost_round(BoostingState& state, const TrainingSet& ts,
                   const ClusterCenters& centers, const FitConfig& fcfg,
                   const SoftMinConfig& scfg,
                   const std::vector<std::vector<double>>* restricted_pool,
                   int jobs);

// Averaged 4-fold validation-error curve and its smallest argmin (1-based).
struct StageSelection {
    int m_star = 1;
    std::vector<double> curve;
};

StageSelection select_num_stages(const Dataset& dataset, const TrainConfig& cfg);

// Smallest index (1-based) of the minimum value.
int smallest_argmin(const std::vector<double>& curve);

BoostedModel train(const Dataset& dataset, const TrainConfig& cfg);

Prediction predict(const BoostedModel& model, const Bag& bag);
std::vector<Prediction> predict_all(const BoostedModel& model,
                                    const Dataset& ds);

// Fraction of labeled bags predicted correctly.
double accuracy(const BoostedModel& model, const Dataset& ds);

// One binary model per class (that class = +1, rest = -1), classes in
// ascending label order. Prediction is argmax margin, ties -> lowest class.
std::vector<std::pair<int, BoostedModel>> train_one_vs_all(
    const Dataset& dataset, const TrainConfig& cfg);

std::pair<int, double> predict_multiclass(
    const std::vector<std::pair<int, BoostedModel>>& models, const Bag& bag);

double resolve_alpha(const TrainConfig& cfg, const ClusterCenters& centers,
                     const TrainingSet& ts);

// JSON model document; doubles keep round-trip precision.
std::string model_to_json(const BoostedModel& model);
BoostedModel model_from_json(const std::string& text);
void save_model(const BoostedModel& model, const std::string& path);
BoostedModel load_model(const std::string& path);

std::uint64_t config_fingerprint(const TrainConfig& cfg);

}  // namespace misboost

#endif
