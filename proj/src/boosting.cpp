#include "boosting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "rng.hpp"

namespace misboost {

using nlohmann::json;

namespace {

constexpr double kEarlyStopCost = 1e-10;

// Seed salts for the independent random streams inside one training run.
constexpr std::uint64_t kSaltSelectionSplit = 0x5e1ec7;
constexpr std::uint64_t kSaltFinalKmeans = 0xc1a55;
constexpr std::uint64_t kSaltFoldKmeans = 0xf01d00;

void check_binary(const Dataset& ds) {
    bool pos = false, neg = false;
    for (const Bag& b : ds.bags) {
        if (b.label == kPositive) pos = true;
        if (b.label == kNegative) neg = true;
    }
    if (!pos || !neg)
        throw MilError(ErrorKind::Data,
                       "training requires both positive and negative bags");
}

struct BoostRun {
    std::vector<BaseClassifier> stages;
    bool stopped_early = false;
};

// Stage callback receives the just-learned classifier after the weight
// update; used to grow validation margins incrementally.
BoostRun run_boosting(const TrainingSet& ts, const ClusterCenters& centers,
                      const FitConfig& fcfg, const SoftMinConfig& scfg,
                      const std::vector<std::vector<double>>* restricted_pool,
                      int m_max, int jobs,
                      const std::function<void(const BaseClassifier&)>& on_stage) {
    BoostRun run;
    BoostingState state;
    state.weights.assign(ts.size(), 1.0 / static_cast<double>(ts.size()));
    TrainingSet work = ts;
    for (int m = 0; m < m_max; ++m) {
        work.weights = state.weights;
        double soft_cost =
            boost_round(state, work, centers, fcfg, scfg, restricted_pool, jobs);
        if (on_stage) on_stage(state.ensemble.back());
        if (soft_cost <= kEarlyStopCost) {
            std::cerr << "note: boosting stopped early at stage " << (m + 1)
                      << " (soft cost " << soft_cost << ")\n";
            run.stopped_early = true;
            break;
        }
    }
    run.stages = std::move(state.ensemble);
    return run;
}

double validation_error(const std::vector<double>& margins,
                        const std::vector<int>& labels) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < margins.size(); ++i) {
        int pred = margins[i] >= 0.0 ? kPositive : kNegative;
        if (pred != labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(margins.size());
}

}  // namespace

int TrainConfig::effective_jobs() const {
    return jobs <= 0 ? default_jobs() : jobs;
}

void TrainConfig::validate() const {
    if (k < 1) throw MilError(ErrorKind::Argument, "k must be at least 1");
    if (max_m < 1)
        throw MilError(ErrorKind::Argument, "max stages must be at least 1");
    if (sel_folds < 2)
        throw MilError(ErrorKind::Argument,
                       "model-selection folds must be at least 2");
    if (!(fit.tol > 0.0))
        throw MilError(ErrorKind::Argument, "tolerance must be positive");
    if (!(epsilon > 0.0))
        throw MilError(ErrorKind::Argument, "epsilon must be positive");
}

double boost_round(BoostingState& state, const TrainingSet& ts,
                   const ClusterCenters& centers, const FitConfig& fcfg,
                   const SoftMinConfig& scfg,
                   const std::vector<std::vector<double>>* restricted_pool,
                   int jobs) {
    BaseLearnResult learned =
        learn_base_classifier(ts, centers, fcfg, scfg, restricted_pool, jobs);
    state.ensemble.push_back(learned.classifier);

    double sum = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double f = score_bag(learned.classifier, *ts.bags[i]);
        state.weights[i] *= std::exp(-ts.labels[i] * f);
        sum += state.weights[i];
    }
    for (double& w : state.weights) w /= sum;
    return learned.soft_cost;
}

double resolve_alpha(const TrainConfig& cfg, const ClusterCenters& centers,
                     const TrainingSet& ts) {
    if (cfg.alpha > 0.0) return cfg.alpha;
    std::vector<double> dists(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i)
        dists[i] = bag_distance(centers.centers[0], *ts.bags[i]).first;
    std::sort(dists.begin(), dists.end());
    double median = dists.size() % 2 == 1
                        ? dists[dists.size() / 2]
                        : 0.5 * (dists[dists.size() / 2 - 1] + dists[dists.size() / 2]);
    return 10.0 / std::max(median, 1e-6);
}

int smallest_argmin(const std::vector<double>& curve) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i] < curve[best]) best = i;
    return static_cast<int>(best) + 1;
}

StageSelection select_num_stages(const Dataset& dataset, const TrainConfig& cfg) {
    cfg.validate();
    check_binary(dataset);

    std::vector<Split> splits;
    try {
        splits = stratified_split(dataset, cfg.sel_folds,
                                  mix_seed(cfg.seed, kSaltSelectionSplit));
    } catch (const MilError& e) {
        std::cerr << "warning: " << e.what()
                  << "; falling back to a single 75/25 stratified holdout\n";
        splits.push_back(stratified_holdout(dataset, 0.25,
                                            mix_seed(cfg.seed, kSaltSelectionSplit)));
    }

    std::vector<std::vector<double>> curves(splits.size());
    for (std::size_t f = 0; f < splits.size(); ++f) {
        Dataset train_part = splits[f].train;
        Dataset val_part = splits[f].held_out;
        if (cfg.normalize) {
            NormalizationStats stats = fit_normalization(train_part);
            train_part = apply_normalization(train_part, stats);
            val_part = apply_normalization(val_part, stats);
        }
        auto pool = pool_instances(train_part);
        ClusterCenters centers =
            kmeans(pool, static_cast<std::size_t>(cfg.k),
                   mix_seed(cfg.seed, kSaltFoldKmeans + f), cfg.kmeans_max_iters);

        TrainingSet ts = make_training_set(train_part);
        SoftMinConfig scfg{resolve_alpha(cfg, centers, ts), cfg.epsilon};
        const auto* restricted = cfg.fit.restricted_mode ? &pool : nullptr;

        std::vector<double> margins(val_part.bags.size(), 0.0);
        std::vector<int> labels;
        for (const Bag& b : val_part.bags) labels.push_back(b.label);

        auto& curve = curves[f];
        run_boosting(ts, centers, cfg.fit, scfg, restricted, cfg.max_m,
                     cfg.effective_jobs(), [&](const BaseClassifier& clf) {
                         for (std::size_t i = 0; i < val_part.bags.size(); ++i)
                             margins[i] += score_bag(clf, val_part.bags[i]);
                         curve.push_back(validation_error(margins, labels));
                     });
        // Early stop leaves a short curve; later stages would not change
        // the ensemble, so the last error carries forward.
        while (curve.size() < static_cast<std::size_t>(cfg.max_m))
            curve.push_back(curve.back());
    }

    StageSelection sel;
    sel.curve.assign(cfg.max_m, 0.0);
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.size(); ++i) sel.curve[i] += c[i];
    for (double& v : sel.curve) v /= static_cast<double>(curves.size());
    sel.m_star = smallest_argmin(sel.curve);
    return sel;
}

BoostedModel train(const Dataset& dataset, const TrainConfig& cfg) {
    cfg.validate();
    check_binary(dataset);
    if (dataset.dim == 0)
        throw MilError(ErrorKind::Data, "dataset has zero dimension");

    BoostedModel model;
    model.dim = dataset.dim;
    model.config = cfg;
    model.normalized = cfg.normalize;
    model.dataset_fp = dataset_fingerprint(dataset);

    StageSelection sel = select_num_stages(dataset, cfg);
    model.validation_curve = sel.curve;

    Dataset training = dataset;
    if (cfg.normalize) {
        model.norm = fit_normalization(dataset);
        training = apply_normalization(dataset, model.norm);
    } else {
        model.norm.mean.assign(dataset.dim, 0.0);
        model.norm.stddev.assign(dataset.dim, 1.0);
    }

    auto pool = pool_instances(training);
    ClusterCenters centers =
        kmeans(pool, static_cast<std::size_t>(cfg.k),
               mix_seed(cfg.seed, kSaltFinalKmeans), cfg.kmeans_max_iters);
    TrainingSet ts = make_training_set(training);
    SoftMinConfig scfg{resolve_alpha(cfg, centers, ts), cfg.epsilon};
    model.alpha_used = scfg.alpha;
    const auto* restricted = cfg.fit.restricted_mode ? &pool : nullptr;

    BoostRun run = run_boosting(ts, centers, cfg.fit, scfg, restricted,
                                sel.m_star, cfg.effective_jobs(), nullptr);
    model.stages = std::move(run.stages);
    model.selected_m = static_cast<int>(model.stages.size());

    // Soft-vs-exact drift check on the deployed stages; advisory only.
    for (std::size_t m = 0; m < model.stages.size(); ++m) {
        TrainingSet uniform = ts;
        double soft = weighted_cost(model.stages[m], uniform, true, scfg);
        double exact = weighted_cost(model.stages[m], uniform, false, scfg);
        // negligible absolute costs are noise, not drift
        if (std::abs(soft - exact) > 0.05 * std::abs(exact) &&
            std::abs(soft - exact) > 1e-6)
            std::cerr << "warning: stage " << (m + 1)
                      << " soft/exact training cost differ by more than 5% ("
                      << soft << " vs " << exact << ")\n";
    }
    return model;
}

Prediction predict(const BoostedModel& model, const Bag& bag) {
    if (bag.instances.empty())
        throw MilError(ErrorKind::Data, "bag '" + bag.id + "' is empty");
    if (bag.instances[0].size() != model.dim)
        throw MilError(ErrorKind::Dimension,
                       "model dimension " + std::to_string(model.dim) +
                           " does not match bag dimension " +
                           std::to_string(bag.instances[0].size()));
    Bag local = bag;
    if (model.normalized) apply_normalization_inplace(local, model.norm);
    double margin = 0.0;
    for (const BaseClassifier& clf : model.stages) margin += score_bag(clf, local);
    return {margin >= 0.0 ? kPositive : kNegative, margin};
}

std::vector<Prediction> predict_all(const BoostedModel& model,
                                    const Dataset& ds) {
    std::vector<Prediction> out(ds.bags.size());
    for (std::size_t i = 0; i < ds.bags.size(); ++i)
        out[i] = predict(model, ds.bags[i]);
    return out;
}

double accuracy(const BoostedModel& model, const Dataset& ds) {
    std::size_t labeled = 0, correct = 0;
    for (const Bag& b : ds.bags) {
        if (b.label == kUnlabeled) continue;
        ++labeled;
        if (predict(model, b).label == b.label) ++correct;
    }
    if (labeled == 0)
        throw MilError(ErrorKind::Data, "no labeled bags to score");
    return static_cast<double>(correct) / static_cast<double>(labeled);
}

std::vector<std::pair<int, BoostedModel>> train_one_vs_all(
    const Dataset& dataset, const TrainConfig& cfg) {
    std::vector<int> classes;
    for (const Bag& b : dataset.bags)
        if (std::find(classes.begin(), classes.end(), b.label) == classes.end())
            classes.push_back(b.label);
    std::sort(classes.begin(), classes.end());
    if (classes.size() < 2)
        throw MilError(ErrorKind::Data,
                       "one-vs-all training needs at least two classes");

    std::vector<std::pair<int, BoostedModel>> models;
    for (int cls : classes) {
        Dataset relabeled = dataset;
        for (Bag& b : relabeled.bags)
            b.label = b.label == cls ? kPositive : kNegative;
        models.emplace_back(cls, train(relabeled, cfg));
    }
    return models;
}

std::pair<int, double> predict_multiclass(
    const std::vector<std::pair<int, BoostedModel>>& models, const Bag& bag) {
    if (models.empty())
        throw MilError(ErrorKind::Argument, "no models given");
    int best_cls = models[0].first;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (const auto& [cls, model] : models) {
        double margin = predict(model, bag).margin;
        if (margin > best_margin) {  // ties keep the earlier (lowest) class
            best_margin = margin;
            best_cls = cls;
        }
    }
    return {best_cls, best_margin};
}

namespace {

json config_to_json(const TrainConfig& cfg) {
    return json{{"k", cfg.k},
                {"max_m", cfg.max_m},
                {"sel_folds", cfg.sel_folds},
                {"alpha", cfg.alpha},
                {"epsilon", cfg.epsilon},
                {"seed", cfg.seed},
                {"jobs", cfg.jobs},
                {"normalize", cfg.normalize},
                {"kmeans_max_iters", cfg.kmeans_max_iters},
                {"fit",
                 {{"tol", cfg.fit.tol},
                  {"max_outer_iters", cfg.fit.max_outer_iters},
                  {"ls_initial_step", cfg.fit.ls_initial_step},
                  {"ls_shrink", cfg.fit.ls_shrink},
                  {"ls_max_backtracks", cfg.fit.ls_max_backtracks},
                  {"p_max_iters", cfg.fit.p_max_iters},
                  {"p_rel_tol", cfg.fit.p_rel_tol},
                  {"beta_max_iters", cfg.fit.beta_max_iters},
                  {"beta_grad_tol", cfg.fit.beta_grad_tol},
                  {"beta_init_damping", cfg.fit.beta_init_damping},
                  {"restarts", cfg.fit.restarts},
                  {"restricted_mode", cfg.fit.restricted_mode}}}};
}

TrainConfig config_from_json(const json& j) {
    TrainConfig cfg;
    cfg.k = j.at("k").get<int>();
    cfg.max_m = j.at("max_m").get<int>();
    cfg.sel_folds = j.at("sel_folds").get<int>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.jobs = j.at("jobs").get<int>();
    cfg.normalize = j.at("normalize").get<bool>();
    cfg.kmeans_max_iters = j.at("kmeans_max_iters").get<std::size_t>();
    const json& f = j.at("fit");
    cfg.fit.tol = f.at("tol").get<double>();
    cfg.fit.max_outer_iters = f.at("max_outer_iters").get<int>();
    cfg.fit.ls_initial_step = f.at("ls_initial_step").get<double>();
    cfg.fit.ls_shrink = f.at("ls_shrink").get<double>();
    cfg.fit.ls_max_backtracks = f.at("ls_max_backtracks").get<int>();
    cfg.fit.p_max_iters = f.at("p_max_iters").get<int>();
    cfg.fit.p_rel_tol = f.at("p_rel_tol").get<double>();
    cfg.fit.beta_max_iters = f.at("beta_max_iters").get<int>();
    cfg.fit.beta_grad_tol = f.at("beta_grad_tol").get<double>();
    cfg.fit.beta_init_damping = f.at("beta_init_damping").get<double>();
    cfg.fit.restarts = f.at("restarts").get<int>();
    cfg.fit.restricted_mode = f.at("restricted_mode").get<bool>();
    return cfg;
}

}  // namespace

std::string model_to_json(const BoostedModel& model) {
    json stages = json::array();
    for (const BaseClassifier& clf : model.stages) {
        stages.push_back({{"prototype", clf.prototype},
                          {"beta0", clf.beta0},
                          {"beta1", clf.beta1}});
    }
    json j{{"format", "misboost-model"},
           {"version", 1},
           {"dim", model.dim},
           {"normalized", model.normalized},
           {"normalization",
            {{"mean", model.norm.mean}, {"stddev", model.norm.stddev}}},
           {"stages", stages},
           {"config", config_to_json(model.config)},
           {"dataset_fingerprint", model.dataset_fp},
           {"validation_curve", model.validation_curve},
           {"selected_m", model.selected_m},
           {"alpha_used", model.alpha_used}};
    return j.dump(2) + "\n";
}

BoostedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MilError(ErrorKind::Parse,
                       std::string("model document is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "misboost-model")
            throw MilError(ErrorKind::Parse, "not a misboost model document");
        if (j.at("version").get<int>() != 1)
            throw MilError(ErrorKind::Parse,
                           "unsupported model format version " +
                               j.at("version").dump());
        BoostedModel model;
        model.dim = j.at("dim").get<std::size_t>();
        model.normalized = j.at("normalized").get<bool>();
        model.norm.mean = j.at("normalization").at("mean").get<std::vector<double>>();
        model.norm.stddev =
            j.at("normalization").at("stddev").get<std::vector<double>>();
        for (const json& s : j.at("stages")) {
            BaseClassifier clf;
            clf.prototype = s.at("prototype").get<std::vector<double>>();
            clf.beta0 = s.at("beta0").get<double>();
            clf.beta1 = s.at("beta1").get<double>();
            if (clf.prototype.size() != model.dim)
                throw MilError(ErrorKind::Parse,
                               "stage prototype dimension does not match model");
            model.stages.push_back(std::move(clf));
        }
        if (model.stages.empty())
            throw MilError(ErrorKind::Parse, "model has no stages");
        model.config = config_from_json(j.at("config"));
        model.dataset_fp = j.at("dataset_fingerprint").get<std::uint64_t>();
        model.validation_curve =
            j.at("validation_curve").get<std::vector<double>>();
        model.selected_m = j.at("selected_m").get<int>();
        model.alpha_used = j.at("alpha_used").get<double>();
        return model;
    } catch (const json::exception& e) {
        throw MilError(ErrorKind::Parse,
                       std::string("malformed model document: ") + e.what());
    }
}

void save_model(const BoostedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw MilError(ErrorKind::Io, "cannot write model file '" + path + "'");
    out << model_to_json(model);
    if (!out) throw MilError(ErrorKind::Io, "write failed for '" + path + "'");
}

BoostedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MilError(ErrorKind::Io, "cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

std::uint64_t config_fingerprint(const TrainConfig& cfg) {
    std::string s = config_to_json(cfg).dump();
    return fnv1a(s.data(), s.size());
}

}  // namespace misboost
