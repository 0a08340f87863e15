#ifndef MISBOOST_GEOMETRY_HPP
#define MISBOOST_GEOMETRY_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "types.hpp"

namespace misboost {

struct SoftMinConfig {
    double alpha = 10.0;    // soft-min sharpness
    double epsilon = 1e-8;  // distance smoothing, gradients only

    void validate() const {
        if (!(alpha > 0.0))
            throw MilError(ErrorKind::Argument, "soft-min alpha must be positive");
        if (!(epsilon > 0.0))
            throw MilError(ErrorKind::Argument, "soft-min epsilon must be positive");
    }
};

// Euclidean distance, no smoothing.
double instance_distance(std::span<const double> p, std::span<const double> x);

// Minimum instance distance and the minimizing index; ties -> lowest index.
std::pair<double, std::size_t> bag_distance(std::span<const double> p,
                                            const Bag& bag);

// Softmax-weighted surrogate of the min distance; exponents are max-shifted
// so large alpha*distance products stay finite.
double soft_bag_distance(std::span<const double> p, const Bag& bag,
                         const SoftMinConfig& cfg);

// Full derivative of the soft distance with respect to p, including the
// dependence of the softmax weights on p. Per-instance distance gradients
// use sqrt(||p-x||^2 + eps^2) to stay finite at p == x.
std::vector<double> soft_bag_distance_gradient(std::span<const double> p,
                                               const Bag& bag,
                                               const SoftMinConfig& cfg);

// Value + gradient in one pass; the hot path of prototype optimization.
double soft_bag_distance_with_gradient(std::span<const double> p, const Bag& bag,
                                       const SoftMinConfig& cfg,
                                       std::vector<double>& grad_out);

}  // namespace misboost

#endif
