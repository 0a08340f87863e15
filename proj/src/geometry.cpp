#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace misboost {

namespace {

void check_dims(std::size_t a, std::size_t b) {
    if (a != b)
        throw MilError(ErrorKind::Dimension,
                       "dimension mismatch: " + std::to_string(a) + " vs " +
                           std::to_string(b));
}

void check_bag(const Bag& bag) {
    if (bag.instances.empty())
        throw MilError(ErrorKind::Data, "bag '" + bag.id + "' is empty");
}

}  // namespace

double instance_distance(std::span<const double> p, std::span<const double> x) {
    check_dims(p.size(), x.size());
    double s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        double c = p[j] - x[j];
        s += c * c;
    }
    return std::sqrt(s);
}

std::pair<double, std::size_t> bag_distance(std::span<const double> p,
                                            const Bag& bag) {
    check_bag(bag);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < bag.instances.size(); ++j) {
        double d = instance_distance(p, bag.instances[j]);
        if (d < best) {
            best = d;
            best_j = j;
        }
    }
    return {best, best_j};
}

double soft_bag_distance(std::span<const double> p, const Bag& bag,
                         const SoftMinConfig& cfg) {
    check_bag(bag);
    cfg.validate();
    const std::size_t n = bag.instances.size();
    std::vector<double> dist(n);
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        dist[j] = instance_distance(p, bag.instances[j]);
        dmin = std::min(dmin, dist[j]);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double e = std::exp(-cfg.alpha * (dist[j] - dmin));
        num += e * dist[j];
        den += e;
    }
    return num / den;
}

double soft_bag_distance_with_gradient(std::span<const double> p, const Bag& bag,
                                       const SoftMinConfig& cfg,
                                       std::vector<double>& grad_out) {
    check_bag(bag);
    cfg.validate();
    const std::size_t n = bag.instances.size();
    const std::size_t d = p.size();
    check_dims(d, bag.instances[0].size());

    std::vector<double> dist(n);
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        dist[j] = instance_distance(p, bag.instances[j]);
        dmin = std::min(dmin, dist[j]);
    }
    std::vector<double> pi(n);
    double den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        pi[j] = std::exp(-cfg.alpha * (dist[j] - dmin));
        den += pi[j];
    }
    double soft = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        pi[j] /= den;
        soft += pi[j] * dist[j];
    }

    // dSoft/dp = sum_j pi_j (1 - alpha (d_j - soft)) grad d_j, with the
    // per-instance gradient smoothed: grad d_j = (p - x_j)/sqrt(d_j^2+eps^2).
    grad_out.assign(d, 0.0);
    const double eps2 = cfg.epsilon * cfg.epsilon;
    for (std::size_t j = 0; j < n; ++j) {
        double coef = pi[j] * (1.0 - cfg.alpha * (dist[j] - soft)) /
                      std::sqrt(dist[j] * dist[j] + eps2);
        const auto& x = bag.instances[j];
        for (std::size_t k = 0; k < d; ++k) grad_out[k] += coef * (p[k] - x[k]);
    }
    return soft;
}

std::vector<double> soft_bag_distance_gradient(std::span<const double> p,
                                               const Bag& bag,
                                               const SoftMinConfig& cfg) {
    std::vector<double> grad;
    soft_bag_distance_with_gradient(p, bag, cfg, grad);
    return grad;
}

}  // namespace misboost
