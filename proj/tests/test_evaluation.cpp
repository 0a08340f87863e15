#include <doctest.h>

#include <cmath>
#include <random>

#include "evaluation.hpp"
#include "rng.hpp"
#include "test_helpers.hpp"

using namespace misboost;

namespace {

TrainConfig small_config() {
    TrainConfig cfg;
    cfg.k = 4;
    cfg.max_m = 3;
    cfg.sel_folds = 2;
    cfg.jobs = 1;
    cfg.seed = 42;
    return cfg;
}

// Definition-based oracle: precision at each positive's rank.
double ap_oracle(std::vector<std::pair<double, int>> scored) {
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    double sum = 0.0;
    int hits = 0, positives = 0;
    for (std::size_t r = 0; r < scored.size(); ++r) {
        if (scored[r].second == 1) {
            ++hits;
            ++positives;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return sum / positives;
}

}  // namespace

TEST_CASE("average_precision basics") {
    SUBCASE("perfect ranking") {
        CHECK(average_precision({{3.0, 1}, {2.0, 1}, {1.0, -1}, {0.0, -1}}) == 1.0);
    }
    SUBCASE("single positive ranked second of two") {
        CHECK(average_precision({{2.0, -1}, {1.0, 1}}) == 0.5);
    }
    SUBCASE("requires a positive") {
        CHECK_THROWS_AS(average_precision({{1.0, -1}}), MilError);
    }
    SUBCASE("ties are stable by input order") {
        CHECK(average_precision({{1.0, 1}, {1.0, -1}}) == 1.0);
        CHECK(average_precision({{1.0, -1}, {1.0, 1}}) == 0.5);
    }
}

TEST_CASE("average_precision matches the oracle on random rankings") {
    std::mt19937 gen(107);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<std::pair<double, int>> scored;
        int positives = 0;
        for (int i = 0; i < 20; ++i) {
            int label = gen() % 2 ? 1 : -1;
            positives += label == 1;
            scored.emplace_back(u(gen), label);
        }
        if (positives == 0) scored[0].second = 1;
        CHECK(average_precision(scored) ==
              doctest::Approx(ap_oracle(scored)).epsilon(1e-12));
    }
}

TEST_CASE("average_precision is invariant under monotone margin transforms") {
    std::mt19937 gen(109);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<std::pair<double, int>> scored;
    for (int i = 0; i < 30; ++i) scored.emplace_back(u(gen), gen() % 2 ? 1 : -1);
    scored[0].second = 1;
    double base = average_precision(scored);
    auto transformed = scored;
    for (auto& [m, l] : transformed) m = std::exp(0.5 * m) + 3.0;
    CHECK(average_precision(transformed) == base);
}

TEST_CASE("cross_validate on a separable dataset") {
    Dataset ds = testutil::separable_dataset(12, 12, 113);
    TrainConfig cfg = small_config();
    EvalReport report = cross_validate(ds, 4, cfg, true);

    CHECK(report.folds == 4);
    REQUIRE(report.fold_accuracies.size() == 4);
    for (double a : report.fold_accuracies) CHECK(a == 1.0);
    CHECK(report.mean_accuracy == 1.0);
    CHECK(report.stddev_accuracy == 0.0);
    CHECK(report.ap == 1.0);
    CHECK(report.tp == 12);
    CHECK(report.tn == 12);
    CHECK(report.fp == 0);
    CHECK(report.fn == 0);
}

TEST_CASE("constant predictor scores chance accuracy") {
    // a model that always outputs +1 regardless of input
    BoostedModel constant;
    constant.dim = 2;
    constant.normalized = false;
    constant.norm.mean = {0.0, 0.0};
    constant.norm.stddev = {1.0, 1.0};
    constant.stages = {{{0.0, 0.0}, 20.0, 0.0}};

    Dataset ds = testutil::separable_dataset(10, 10, 127);
    CHECK(accuracy(constant, ds) == 0.5);
}

TEST_CASE("cross_validate with identical class cohorts gives identical folds") {
    // every positive bag identical, every negative bag identical: any
    // stratified 2-fold split trains and tests on the same content
    Dataset ds;
    ds.dim = 1;
    for (int i = 0; i < 6; ++i) {
        ds.bags.push_back(testutil::make_bag("p" + std::to_string(i), 1,
                                             {{0.0}, {7.0}}));
        ds.bags.push_back(testutil::make_bag("n" + std::to_string(i), -1,
                                             {{7.0}, {9.0}}));
    }
    TrainConfig cfg = small_config();
    EvalReport report = cross_validate(ds, 2, cfg, false);
    REQUIRE(report.fold_accuracies.size() == 2);
    CHECK(report.fold_accuracies[0] == report.fold_accuracies[1]);
}

TEST_CASE("report JSON round trip and rendering") {
    Dataset ds = testutil::separable_dataset(8, 8, 131);
    TrainConfig cfg = small_config();
    EvalReport report = cross_validate(ds, 2, cfg, true);
    report.dataset_name = "synthetic";

    EvalReport back = report_from_json(report_to_json(report));
    CHECK(back.dataset_name == report.dataset_name);
    CHECK(back.fold_accuracies == report.fold_accuracies);
    CHECK(back.mean_accuracy == report.mean_accuracy);
    CHECK(back.ap == report.ap);
    CHECK(back.config_fp == report.config_fp);
    CHECK(back.dataset_fp == report.dataset_fp);

    std::string table = report_to_table(report);
    CHECK(table.find("mean accuracy") != std::string::npos);
    std::string merged = merge_reports_table({report, back});
    CHECK(merged.find("synthetic") != std::string::npos);

    CHECK_THROWS_AS(report_from_json("{}"), MilError);
    CHECK_THROWS_AS(report_from_json("not json"), MilError);
}

TEST_CASE("inspect_prototypes") {
    Dataset ds = testutil::separable_dataset(6, 6, 137);
    TrainConfig cfg = small_config();
    BoostedModel model = train(ds, cfg);
    const int top_k = static_cast<int>(model.num_stages());

    auto rows = inspect_prototypes(model, ds, top_k);
    CHECK(rows.size() == ds.bags.size() * static_cast<std::size_t>(top_k));

    SUBCASE("rows match a brute-force nearest scan") {
        Dataset norm = apply_normalization(ds, model.norm);
        for (const auto& row : rows) {
            const Bag* bag = nullptr;
            for (const auto& b : norm.bags)
                if (b.id == row.bag_id) bag = &b;
            REQUIRE(bag != nullptr);
            const auto& proto = model.stages[row.stage - 1].prototype;
            double best = 1e300;
            std::size_t best_j = 0;
            for (std::size_t j = 0; j < bag->instances.size(); ++j) {
                double d = instance_distance(proto, bag->instances[j]);
                if (d < best) {
                    best = d;
                    best_j = j;
                }
            }
            CHECK(row.instance == best_j);
            CHECK(row.distance == best);
        }
    }

    SUBCASE("a bag containing the prototype reports distance zero") {
        BoostedModel direct;
        direct.dim = 2;
        direct.normalized = false;
        direct.norm.mean = {0.0, 0.0};
        direct.norm.stddev = {1.0, 1.0};
        direct.stages = {{{1.0, 2.0}, 0.0, -1.0}};
        Dataset tiny;
        tiny.dim = 2;
        tiny.bags.push_back(testutil::make_bag("m", 1, {{9.0, 9.0}, {1.0, 2.0}}));
        auto r = inspect_prototypes(direct, tiny, 1);
        REQUIRE(r.size() == 1);
        CHECK(r[0].instance == 1);
        CHECK(r[0].distance == 0.0);
    }

    SUBCASE("top_k beyond the stage count is rejected") {
        CHECK_THROWS_AS(inspect_prototypes(model, ds, top_k + 1), MilError);
    }
}

TEST_CASE("no leakage: fold models carry training-portion statistics only") {
    Dataset ds = testutil::separable_dataset(10, 10, 139);
    TrainConfig cfg = small_config();
    auto splits = stratified_split(ds, 2, cfg.seed);
    // reproduce what cross_validate trains for fold 0 and check its stats
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = mix_seed(cfg.seed, 0xcf01d + 0);
    BoostedModel fold_model = train(splits[0].train, fold_cfg);
    NormalizationStats train_stats = fit_normalization(splits[0].train);
    NormalizationStats full_stats = fit_normalization(ds);
    CHECK(fold_model.norm.mean == train_stats.mean);
    CHECK(fold_model.norm.stddev == train_stats.stddev);
    CHECK(fold_model.norm.mean != full_stats.mean);
}
