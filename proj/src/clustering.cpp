#include "clustering.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "rng.hpp"

namespace misboost {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double c = a[j] - b[j];
        s += c * c;
    }
    return s;
}

}  // namespace

std::vector<std::vector<double>> pool_instances(const Dataset& ds) {
    std::vector<std::vector<double>> out;
    out.reserve(ds.num_instances());
    for (const Bag& b : ds.bags)
        for (const auto& inst : b.instances) out.push_back(inst);
    return out;
}

ClusterCenters kmeans(const std::vector<std::vector<double>>& instances,
                      std::size_t k, std::uint64_t seed,
                      std::size_t max_iters) {
    const std::size_t n = instances.size();
    if (n == 0) throw MilError(ErrorKind::Data, "k-means: no instances");
    if (k == 0) throw MilError(ErrorKind::Argument, "k-means: k must be positive");
    if (k > n) {
        std::cerr << "warning: k-means k=" << k << " lowered to instance count "
                  << n << "\n";
        k = n;
    }
    const std::size_t d = instances[0].size();
    Rng rng(seed);

    // k-means++ seeding.
    std::vector<std::vector<double>> centers;
    centers.reserve(k);
    centers.push_back(instances[rng.index(n)]);
    std::vector<double> min_sq(n);
    for (std::size_t i = 0; i < n; ++i) min_sq[i] = sq_dist(instances[i], centers[0]);
    while (centers.size() < k) {
        double total = 0.0;
        for (double v : min_sq) total += v;
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.index(n);  // all points coincide with a center
        } else {
            double r = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += min_sq[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(instances[pick]);
        for (std::size_t i = 0; i < n; ++i)
            min_sq[i] = std::min(min_sq[i], sq_dist(instances[i], centers.back()));
    }

    std::vector<std::size_t> assign(n, 0);
    std::vector<double> best_sq(n);
    ClusterCenters result;

    auto assign_all = [&] {
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t bc = 0;
            for (std::size_t c = 0; c < k; ++c) {
                double s = sq_dist(instances[i], centers[c]);
                if (s < best) {
                    best = s;
                    bc = c;
                }
            }
            assign[i] = bc;
            best_sq[i] = best;
            wcss += best;
        }
        return wcss;
    };

    double wcss = assign_all();
    result.wcss_history.push_back(wcss);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        // Center update; accumulation order is fixed by instance index.
        std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[assign[i]];
            for (std::size_t j = 0; j < d; ++j) sums[assign[i]][j] += instances[i][j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seed to the point farthest from its assigned center.
                std::size_t far = 0;
                double far_sq = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (best_sq[i] > far_sq) {
                        far_sq = best_sq[i];
                        far = i;
                    }
                }
                centers[c] = instances[far];
                best_sq[far] = 0.0;  // do not pick the same point twice
            } else {
                for (std::size_t j = 0; j < d; ++j)
                    centers[c][j] = sums[c][j] / static_cast<double>(counts[c]);
            }
        }

        std::vector<std::size_t> prev = assign;
        wcss = assign_all();
        result.wcss_history.push_back(wcss);
        if (assign == prev) break;
    }

    result.centers = std::move(centers);
    result.assignments = std::move(assign);
    return result;
}

}  // namespace misboost
