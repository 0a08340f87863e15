#ifndef MISBOOST_TEST_HELPERS_HPP
#define MISBOOST_TEST_HELPERS_HPP

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "types.hpp"

namespace testutil {

using misboost::Bag;
using misboost::Dataset;

inline Bag make_bag(std::string id, int label,
                    std::vector<std::vector<double>> instances) {
    Bag b;
    b.id = std::move(id);
    b.label = label;
    b.instances = std::move(instances);
    return b;
}

// Separable planted-prototype problem: positive bags carry one instance near
// the target point plus background noise, negative bags carry noise only.
// Noise is sampled uniformly in [0,10]^2 outside the exclusion disk.
inline Dataset separable_dataset(std::size_t pos_bags, std::size_t neg_bags,
                                 unsigned seed, double signal_radius = 0.1,
                                 double target_x = 5.0, double target_y = 5.0,
                                 double exclusion_radius = 3.0,
                                 std::size_t noise_per_bag = 3,
                                 double signal_min_radius = 0.0) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> coord(0.0, 10.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> radius(signal_min_radius,
                                                  signal_radius);

    auto noise_point = [&] {
        for (;;) {
            double x = coord(gen), y = coord(gen);
            double dx = x - target_x, dy = y - target_y;
            if (std::sqrt(dx * dx + dy * dy) > exclusion_radius)
                return std::vector<double>{x, y};
        }
    };

    Dataset ds;
    ds.dim = 2;
    for (std::size_t i = 0; i < pos_bags; ++i) {
        std::vector<std::vector<double>> inst;
        double a = angle(gen), r = radius(gen);
        inst.push_back({target_x + r * std::cos(a), target_y + r * std::sin(a)});
        for (std::size_t j = 0; j < noise_per_bag; ++j) inst.push_back(noise_point());
        ds.bags.push_back(make_bag("pos" + std::to_string(i), +1, std::move(inst)));
    }
    for (std::size_t i = 0; i < neg_bags; ++i) {
        std::vector<std::vector<double>> inst;
        for (std::size_t j = 0; j < noise_per_bag + 1; ++j)
            inst.push_back(noise_point());
        ds.bags.push_back(make_bag("neg" + std::to_string(i), -1, std::move(inst)));
    }
    return ds;
}

// Three well-separated classes for the one-vs-all wrapper.
inline Dataset three_class_dataset(std::size_t bags_per_class, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> jitter(0.0, 0.15);
    const double centers[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};
    Dataset ds;
    ds.dim = 2;
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < bags_per_class; ++i) {
            std::vector<std::vector<double>> inst;
            for (int j = 0; j < 3; ++j)
                inst.push_back({centers[c][0] + jitter(gen),
                                centers[c][1] + jitter(gen)});
            ds.bags.push_back(make_bag("c" + std::to_string(c) + "_" +
                                           std::to_string(i),
                                       c, std::move(inst)));
        }
    }
    return ds;
}

}  // namespace testutil

#endif
