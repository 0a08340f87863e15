#ifndef MISBOOST_CLUSTERING_HPP
#define MISBOOST_CLUSTERING_HPP

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace misboost {

struct ClusterCenters {
    std::vector<std::vector<double>> centers;
    std::vector<std::size_t> assignments;  // instance -> center
    std::vector<double> wcss_history;      // within-cluster SS per Lloyd iter
};

// Lloyd's algorithm with k-means++ seeding. Deterministic given seed. Empty
// clusters are re-seeded to the point farthest from its assigned center.
// If k exceeds the instance count it is lowered to it (warning on stderr).
ClusterCenters kmeans(const std::vector<std::vector<double>>& instances,
                      std::size_t k, std::uint64_t seed,
                      std::size_t max_iters = 100);

// All instances of all bags, in dataset order.
std::vector<std::vector<double>> pool_instances(const Dataset& ds);

}  // namespace misboost

#endif
