#ifndef MISBOOST_BASE_LEARNER_HPP
#define MISBOOST_BASE_LEARNER_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "clustering.hpp"
#include "geometry.hpp"
#include "types.hpp"

namespace misboost {

struct BaseClassifier {
    std::vector<double> prototype;
    double beta0 = 0.0;
    double beta1 = 0.0;
};

struct FitConfig {
    double tol = 1e-5;           // outer alternation, absolute cost difference
    int max_outer_iters = 50;

    // Prototype gradient descent with Armijo backtracking.
    double ls_initial_step = 1.0;
    double ls_shrink = 0.5;
    int ls_max_backtracks = 30;
    int p_max_iters = 100;
    double p_rel_tol = 1e-8;

    // Damped Newton on (beta0, beta1).
    int beta_max_iters = 200;
    double beta_grad_tol = 1e-8;
    double beta_init_damping = 1e-3;

    int restarts = 0;            // 0 = one restart per cluster center
    bool restricted_mode = false;
};

// Bags with labels and boosting weights; bags are borrowed, not owned.
struct TrainingSet {
    std::vector<const Bag*> bags;
    std::vector<double> labels;
    std::vector<double> weights;

    std::size_t size() const { return bags.size(); }
};

TrainingSet make_training_set(const Dataset& ds);

double score_bag(const BaseClassifier& clf, const Bag& bag);

// Eq-style weighted least squares cost; soft selects the training surrogate
// distance, exact is used for reporting and inference.
double weighted_cost(const BaseClassifier& clf, const TrainingSet& ts, bool soft,
                     const SoftMinConfig& scfg);

// Minimize the cost over (beta0, beta1) with the prototype fixed. Distances
// are computed once up front. An optional warm start is tried alongside the
// data-driven initialization and the better result wins.
std::pair<double, double> fit_betas(
    const std::vector<double>& distances, const TrainingSet& ts,
    const FitConfig& cfg,
    std::optional<std::pair<double, double>> warm_start = std::nullopt);

std::pair<double, double> fit_betas(const std::vector<double>& prototype,
                                    const TrainingSet& ts, bool soft,
                                    const FitConfig& cfg,
                                    const SoftMinConfig& scfg);

// One prototype coordinate step with (beta0, beta1) fixed: gradient descent
// with backtracking on the soft cost, or an exhaustive scan over the
// instance pool in restricted mode. Never increases the soft cost.
std::vector<double> fit_prototype_step(
    const BaseClassifier& clf, const TrainingSet& ts, const FitConfig& cfg,
    const SoftMinConfig& scfg,
    const std::vector<std::vector<double>>* restricted_pool = nullptr);

// Observer called after every coordinate step: (restart, step, soft cost).
using CostObserver = std::function<void(std::size_t, std::size_t, double)>;

struct BaseLearnResult {
    BaseClassifier classifier;
    double soft_cost = 0.0;
    std::size_t restart_index = 0;
};

// Coordinate descent from each cluster-center restart; returns the restart
// with the smallest soft cost (ties -> lowest restart index). In restricted
// mode restart points are snapped to the nearest pool instance.
BaseLearnResult learn_base_classifier(
    const TrainingSet& ts, const ClusterCenters& centers, const FitConfig& cfg,
    const SoftMinConfig& scfg,
    const std::vector<std::vector<double>>* restricted_pool = nullptr,
    int jobs = 1, const CostObserver& observer = nullptr);

// Analytic gradient of the soft cost with respect to (beta0, beta1, p);
// exposed for gradient checking.
struct CostGradient {
    double d_beta0 = 0.0;
    double d_beta1 = 0.0;
    std::vector<double> d_prototype;
};

CostGradient soft_cost_gradient(const BaseClassifier& clf, const TrainingSet& ts,
                                const SoftMinConfig& scfg);

}  // namespace misboost

#endif
