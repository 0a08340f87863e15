#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "data.hpp"
#include "test_helpers.hpp"

using namespace misboost;

namespace {

const char* kTinyCsv =
    "#dim=2\n"
    "a,1,0.5,1.5\n"
    "a,1,2.5,3.5\n"
    "b,-1,4.0,5.0\n";

}  // namespace

TEST_CASE("mil-csv grouping preserves file order") {
    Dataset ds = parse_dataset(kTinyCsv, DatasetFormat::MilCsv);
    REQUIRE(ds.bags.size() == 2);
    CHECK(ds.dim == 2);
    CHECK(ds.bags[0].id == "a");
    CHECK(ds.bags[0].label == 1);
    CHECK(ds.bags[0].instances.size() == 2);
    CHECK(ds.bags[1].id == "b");
    CHECK(ds.bags[1].label == -1);
    CHECK(ds.bags[1].instances.size() == 1);
    CHECK(ds.bags[0].instances[1][1] == 3.5);
}

TEST_CASE("mil-csv rejects malformed input with line numbers") {
    CHECK_THROWS_WITH_AS(
        parse_dataset("#dim=2\na,1,0.5\n", DatasetFormat::MilCsv, "f"),
        doctest::Contains("f:2"), MilError);
    CHECK_THROWS_WITH_AS(
        parse_dataset("#dim=2\na,2,0.5,1.0\n", DatasetFormat::MilCsv, "f"),
        doctest::Contains("unknown label"), MilError);
    CHECK_THROWS_WITH_AS(
        parse_dataset("#dim=2\na,1,0.5,nope\n", DatasetFormat::MilCsv, "f"),
        doctest::Contains("bad number"), MilError);
    CHECK_THROWS_WITH_AS(
        parse_dataset("#dim=2\na,1,1,2\nb,-1,3,4\na,1,5,6\n",
                      DatasetFormat::MilCsv, "f"),
        doctest::Contains("not contiguous"), MilError);
    CHECK_THROWS_AS(parse_dataset("", DatasetFormat::MilCsv), MilError);
    CHECK_THROWS_AS(parse_dataset("#dim=0\n", DatasetFormat::MilCsv), MilError);
}

TEST_CASE("dimension mismatch row is a parse error") {
    CHECK_THROWS_AS(
        parse_dataset("#dim=2\na,1,1.0,2.0,3.0\n", DatasetFormat::MilCsv),
        MilError);
}

TEST_CASE("mil-sparse fills unspecified indices with zero") {
    Dataset ds = parse_dataset("#dim=4\nb1 1 1:2.5 4:-1\nb2 ? 2:7\n",
                               DatasetFormat::MilSparse);
    REQUIRE(ds.bags.size() == 2);
    CHECK(ds.bags[0].instances[0] == std::vector<double>{2.5, 0.0, 0.0, -1.0});
    CHECK(ds.bags[1].label == kUnlabeled);
    CHECK(ds.bags[1].instances[0] == std::vector<double>{0.0, 7.0, 0.0, 0.0});

    CHECK_THROWS_WITH_AS(
        parse_dataset("#dim=2\nb1 1 0:1\n", DatasetFormat::MilSparse, "f"),
        doctest::Contains("1-based"), MilError);
    CHECK_THROWS_WITH_AS(
        parse_dataset("#dim=2\nb1 1 3:1\n", DatasetFormat::MilSparse, "f"),
        doctest::Contains("exceeds dim"), MilError);
}

TEST_CASE("csv round trip is bit exact") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    Dataset ds;
    ds.dim = 3;
    for (int i = 0; i < 5; ++i) {
        std::vector<std::vector<double>> inst;
        for (int j = 0; j <= i % 3; ++j) inst.push_back({u(gen), u(gen), u(gen)});
        ds.bags.push_back(testutil::make_bag("bag" + std::to_string(i),
                                             i % 2 ? 1 : -1, std::move(inst)));
    }
    Dataset back = parse_dataset(format_dataset(ds), DatasetFormat::MilCsv);
    REQUIRE(back.bags.size() == ds.bags.size());
    for (std::size_t i = 0; i < ds.bags.size(); ++i) {
        CHECK(back.bags[i].id == ds.bags[i].id);
        CHECK(back.bags[i].label == ds.bags[i].label);
        CHECK(back.bags[i].instances == ds.bags[i].instances);
    }
}

TEST_CASE("fit_normalization basics") {
    Dataset ds;
    ds.dim = 2;
    ds.bags.push_back(testutil::make_bag("a", 1, {{0, 0}, {2, 0}}));
    NormalizationStats stats = fit_normalization(ds);
    CHECK(stats.mean == std::vector<double>{1.0, 0.0});
    CHECK(stats.stddev == std::vector<double>{1.0, 1.0});  // dim 2 clamped

    Dataset single;
    single.dim = 1;
    single.bags.push_back(testutil::make_bag("a", 1, {{5}}));
    NormalizationStats s2 = fit_normalization(single);
    CHECK(s2.mean == std::vector<double>{5.0});
    CHECK(s2.stddev == std::vector<double>{1.0});
}

TEST_CASE("fit_normalization matches column statistics oracle") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    Dataset ds;
    ds.dim = 4;
    std::vector<std::vector<double>> all;
    for (int i = 0; i < 25; ++i) {
        std::vector<std::vector<double>> inst;
        for (int j = 0; j < 4; ++j) {
            inst.push_back({u(gen), u(gen), u(gen), u(gen)});
            all.push_back(inst.back());
        }
        ds.bags.push_back(testutil::make_bag(std::to_string(i), 1, std::move(inst)));
    }
    NormalizationStats stats = fit_normalization(ds);
    for (std::size_t j = 0; j < 4; ++j) {
        double mean = 0.0;
        for (const auto& row : all) mean += row[j];
        mean /= static_cast<double>(all.size());
        double var = 0.0;
        for (const auto& row : all) var += (row[j] - mean) * (row[j] - mean);
        double sd = std::sqrt(var / static_cast<double>(all.size()));
        CHECK(stats.mean[j] == doctest::Approx(mean).epsilon(1e-10));
        CHECK(stats.stddev[j] == doctest::Approx(sd).epsilon(1e-10));
    }
}

TEST_CASE("apply_normalization contract") {
    Dataset ds = testutil::separable_dataset(5, 5, 3);

    SUBCASE("identity stats leave data unchanged") {
        NormalizationStats id;
        id.mean = {0.0, 0.0};
        id.stddev = {1.0, 1.0};
        Dataset out = apply_normalization(ds, id);
        CHECK(out.bags[0].instances == ds.bags[0].instances);
    }

    SUBCASE("self-fit stats center every dimension") {
        NormalizationStats stats = fit_normalization(ds);
        Dataset out = apply_normalization(ds, stats);
        std::vector<double> mean(2, 0.0);
        std::size_t n = 0;
        for (const auto& b : out.bags)
            for (const auto& inst : b.instances) {
                ++n;
                for (int j = 0; j < 2; ++j) mean[j] += inst[j];
            }
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(mean[j] / static_cast<double>(n)) < 1e-10);
    }

    SUBCASE("train-fit stats applied to a disjoint test split") {
        auto splits = stratified_split(ds, 2, 1);
        NormalizationStats train_stats = fit_normalization(splits[0].train);
        Dataset test_out = apply_normalization(splits[0].held_out, train_stats);
        const auto& raw = splits[0].held_out.bags[0].instances[0];
        const auto& got = test_out.bags[0].instances[0];
        for (int j = 0; j < 2; ++j)
            CHECK(got[j] ==
                  doctest::Approx((raw[j] - train_stats.mean[j]) /
                                  train_stats.stddev[j]));
    }

    SUBCASE("normalization composed with its inverse recovers inputs") {
        NormalizationStats stats = fit_normalization(ds);
        Dataset out = apply_normalization(ds, stats);
        for (std::size_t i = 0; i < ds.bags.size(); ++i)
            for (std::size_t k = 0; k < ds.bags[i].instances.size(); ++k)
                for (int j = 0; j < 2; ++j) {
                    double recovered =
                        out.bags[i].instances[k][j] * stats.stddev[j] +
                        stats.mean[j];
                    CHECK(recovered ==
                          doctest::Approx(ds.bags[i].instances[k][j])
                              .epsilon(1e-10));
                }
    }

    SUBCASE("dimension mismatch rejected") {
        NormalizationStats bad;
        bad.mean = {0.0};
        bad.stddev = {1.0};
        CHECK_THROWS_AS(apply_normalization(ds, bad), MilError);
    }
}

TEST_CASE("stratified_split balance and determinism") {
    Dataset ds = testutil::separable_dataset(5, 5, 9);
    auto splits = stratified_split(ds, 5, 42);
    REQUIRE(splits.size() == 5);
    for (const auto& s : splits) {
        int pos = 0, neg = 0;
        for (const auto& b : s.held_out.bags) (b.label == 1 ? pos : neg)++;
        CHECK(pos == 1);
        CHECK(neg == 1);
        CHECK(s.train.bags.size() == 8);
    }

    auto again = stratified_split(ds, 5, 42);
    for (int f = 0; f < 5; ++f) {
        REQUIRE(again[f].held_out.bags.size() == splits[f].held_out.bags.size());
        for (std::size_t i = 0; i < again[f].held_out.bags.size(); ++i)
            CHECK(again[f].held_out.bags[i].id == splits[f].held_out.bags[i].id);
    }
}

TEST_CASE("stratified_split partitions the bag ids for many seeds") {
    Dataset ds = testutil::separable_dataset(13, 17, 21);
    for (std::uint64_t seed : {0ull, 1ull, 99ull, 12345ull}) {
        for (int folds : {2, 3, 5}) {
            auto splits = stratified_split(ds, folds, seed);
            std::multiset<std::string> held;
            for (const auto& s : splits) {
                std::set<std::string> train_ids, held_ids;
                for (const auto& b : s.train.bags) train_ids.insert(b.id);
                for (const auto& b : s.held_out.bags) {
                    held_ids.insert(b.id);
                    held.insert(b.id);
                }
                for (const auto& id : held_ids) CHECK(train_ids.count(id) == 0);
                CHECK(train_ids.size() + held_ids.size() == ds.bags.size());
            }
            CHECK(held.size() == ds.bags.size());  // disjoint cover
        }
    }
}

TEST_CASE("stratified_split rejects too-small classes") {
    Dataset ds = testutil::separable_dataset(2, 8, 5);
    CHECK_THROWS_AS(stratified_split(ds, 3, 0), MilError);
    CHECK_THROWS_AS(stratified_split(ds, 1, 0), MilError);
}
