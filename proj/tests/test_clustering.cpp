#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "clustering.hpp"
#include "test_helpers.hpp"

using namespace misboost;

namespace {

double wcss_of(const std::vector<std::vector<double>>& pts,
               const std::vector<std::vector<double>>& centers) {
    double total = 0.0;
    for (const auto& p : pts) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) {
            double s = 0.0;
            for (std::size_t j = 0; j < p.size(); ++j)
                s += (p[j] - c[j]) * (p[j] - c[j]);
            best = std::min(best, s);
        }
        total += best;
    }
    return total;
}

// Plain Lloyd with random-point initialization; the reference the spec pits
// the real implementation against.
std::vector<std::vector<double>> naive_lloyd(
    const std::vector<std::vector<double>>& pts, std::size_t k,
    std::mt19937& gen) {
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), gen);
    std::vector<std::vector<double>> centers;
    for (std::size_t c = 0; c < k; ++c) centers.push_back(pts[idx[c]]);

    const std::size_t d = pts[0].size();
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (const auto& p : pts) {
            std::size_t best = 0;
            double best_s = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j)
                    s += (p[j] - centers[c][j]) * (p[j] - centers[c][j]);
                if (s < best_s) {
                    best_s = s;
                    best = c;
                }
            }
            ++counts[best];
            for (std::size_t j = 0; j < d; ++j) sums[best][j] += p[j];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c] > 0)
                for (std::size_t j = 0; j < d; ++j)
                    centers[c][j] = sums[c][j] / static_cast<double>(counts[c]);
    }
    return centers;
}

}  // namespace

TEST_CASE("kmeans separates well-separated pairs") {
    std::vector<std::vector<double>> pts{
        {0.0, 0.0}, {0.1, 0.0}, {10.0, 0.0}, {10.1, 0.0}};
    ClusterCenters cc = kmeans(pts, 2, 1);
    REQUIRE(cc.centers.size() == 2);
    std::vector<double> xs{cc.centers[0][0], cc.centers[1][0]};
    std::sort(xs.begin(), xs.end());
    CHECK(xs[0] == doctest::Approx(0.05));
    CHECK(xs[1] == doctest::Approx(10.05));
}

TEST_CASE("kmeans with k equal to instance count returns the instances") {
    std::vector<std::vector<double>> pts{{1.0}, {2.0}, {5.0}, {9.0}};
    ClusterCenters cc = kmeans(pts, 4, 3);
    REQUIRE(cc.centers.size() == 4);
    auto centers = cc.centers;
    std::sort(centers.begin(), centers.end());
    CHECK(centers == pts);
}

TEST_CASE("kmeans beats worst-of-10 naive Lloyd restarts") {
    std::mt19937 gen(19);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> p(5);
        for (auto& v : p) v = u(gen);
        pts.push_back(std::move(p));
    }
    ClusterCenters cc = kmeans(pts, 4, 7);
    double ours = wcss_of(pts, cc.centers);
    double worst = 0.0;
    for (int restart = 0; restart < 10; ++restart)
        worst = std::max(worst, wcss_of(pts, naive_lloyd(pts, 4, gen)));
    CHECK(ours <= worst + 1e-9);
}

TEST_CASE("kmeans invariants") {
    std::mt19937 gen(29);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 60; ++i) pts.push_back({u(gen), u(gen), u(gen)});

    ClusterCenters cc = kmeans(pts, 5, 11);

    SUBCASE("wcss non-increasing across Lloyd iterations") {
        for (std::size_t i = 1; i < cc.wcss_history.size(); ++i)
            CHECK(cc.wcss_history[i] <= cc.wcss_history[i - 1] + 1e-9);
    }

    SUBCASE("centers finite, clusters non-empty") {
        std::vector<std::size_t> counts(cc.centers.size(), 0);
        for (std::size_t a : cc.assignments) counts[a]++;
        for (std::size_t c = 0; c < cc.centers.size(); ++c) {
            CHECK(counts[c] > 0);
            for (double v : cc.centers[c]) CHECK(std::isfinite(v));
        }
    }

    SUBCASE("fixed seed gives bitwise-identical centers") {
        ClusterCenters again = kmeans(pts, 5, 11);
        CHECK(again.centers == cc.centers);
        CHECK(again.assignments == cc.assignments);
    }
}

TEST_CASE("kmeans errors and k clamping") {
    std::vector<std::vector<double>> pts{{1.0}, {2.0}};
    CHECK_THROWS_AS(kmeans({}, 2, 0), MilError);
    CHECK_THROWS_AS(kmeans(pts, 0, 0), MilError);
    ClusterCenters cc = kmeans(pts, 5, 0);  // k silently lowered
    CHECK(cc.centers.size() == 2);
}
