#include "base_learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"

namespace misboost {

namespace {

// f(u) = 2/(1+e^{-u}) - 1 = tanh(u/2)
double sigmoid_score(double u) { return std::tanh(0.5 * u); }

double cost_given_distances(const std::vector<double>& dist,
                            const TrainingSet& ts, double beta0, double beta1) {
    double c = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double r = ts.labels[i] - sigmoid_score(beta1 * dist[i] + beta0);
        c += ts.weights[i] * r * r;
    }
    return c;
}

std::vector<double> bag_distances(const std::vector<double>& prototype,
                                  const TrainingSet& ts, bool soft,
                                  const SoftMinConfig& scfg) {
    std::vector<double> dist(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        dist[i] = soft ? soft_bag_distance(prototype, *ts.bags[i], scfg)
                       : bag_distance(prototype, *ts.bags[i]).first;
    }
    return dist;
}

struct BetaDerivs {
    double cost = 0.0;
    double g0 = 0.0, g1 = 0.0;
    double h00 = 0.0, h01 = 0.0, h11 = 0.0;
};

BetaDerivs beta_derivs(const std::vector<double>& dist, const TrainingSet& ts,
                       double beta0, double beta1) {
    BetaDerivs out;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double w = ts.weights[i];
        const double f = sigmoid_score(beta1 * dist[i] + beta0);
        const double s = 1.0 - f * f;
        const double r = ts.labels[i] - f;
        out.cost += w * r * r;
        const double g = -w * r * s;  // d cost / d u_i
        const double h = w * (0.5 * s * s + r * f * s);
        out.g0 += g;
        out.g1 += g * dist[i];
        out.h00 += h;
        out.h01 += h * dist[i];
        out.h11 += h * dist[i] * dist[i];
    }
    return out;
}

// Damped Newton from a given start, accepting only cost-decreasing steps.
std::pair<double, double> newton_betas(const std::vector<double>& dist,
                                       const TrainingSet& ts,
                                       const FitConfig& cfg, double b0,
                                       double b1) {
    double lambda = cfg.beta_init_damping;
    for (int iter = 0; iter < cfg.beta_max_iters; ++iter) {
        BetaDerivs d = beta_derivs(dist, ts, b0, b1);
        double gnorm = std::sqrt(d.g0 * d.g0 + d.g1 * d.g1);
        if (gnorm <= cfg.beta_grad_tol) break;

        bool accepted = false;
        while (lambda <= 1e10) {
            const double a00 = d.h00 + lambda, a11 = d.h11 + lambda, a01 = d.h01;
            const double det = a00 * a11 - a01 * a01;
            if (det > 0.0 && a00 > 0.0) {
                const double s0 = (-d.g0 * a11 + d.g1 * a01) / det;
                const double s1 = (-d.g1 * a00 + d.g0 * a01) / det;
                if (cost_given_distances(dist, ts, b0 + s0, b1 + s1) < d.cost) {
                    b0 += s0;
                    b1 += s1;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // Gradient descent with backtracking as a last resort.
            double t = 1.0;
            bool ok = false;
            for (int bt = 0; bt < cfg.ls_max_backtracks; ++bt) {
                if (cost_given_distances(dist, ts, b0 - t * d.g0, b1 - t * d.g1) <
                    d.cost - 1e-4 * t * gnorm * gnorm) {
                    b0 -= t * d.g0;
                    b1 -= t * d.g1;
                    ok = true;
                    break;
                }
                t *= cfg.ls_shrink;
            }
            if (!ok) break;
            lambda = cfg.beta_init_damping;
        }
    }
    return {b0, b1};
}

}  // namespace

TrainingSet make_training_set(const Dataset& ds) {
    TrainingSet ts;
    ts.bags.reserve(ds.bags.size());
    const double w = 1.0 / static_cast<double>(ds.bags.size());
    for (const Bag& b : ds.bags) {
        if (b.label != kPositive && b.label != kNegative)
            throw MilError(ErrorKind::Data,
                           "bag '" + b.id + "' is not labeled +1/-1");
        ts.bags.push_back(&b);
        ts.labels.push_back(static_cast<double>(b.label));
        ts.weights.push_back(w);
    }
    return ts;
}

double score_bag(const BaseClassifier& clf, const Bag& bag) {
    double d = bag_distance(clf.prototype, bag).first;
    return sigmoid_score(clf.beta1 * d + clf.beta0);
}

double weighted_cost(const BaseClassifier& clf, const TrainingSet& ts, bool soft,
                     const SoftMinConfig& scfg) {
    return cost_given_distances(bag_distances(clf.prototype, ts, soft, scfg), ts,
                                clf.beta0, clf.beta1);
}

std::pair<double, double> fit_betas(
    const std::vector<double>& distances, const TrainingSet& ts,
    const FitConfig& cfg, std::optional<std::pair<double, double>> warm_start) {
    double wsum = 0.0, mu = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        wsum += ts.weights[i];
        mu += ts.weights[i] * distances[i];
    }
    if (!(wsum > 0.0))
        throw MilError(ErrorKind::Data, "weights must have positive sum");
    mu /= wsum;
    double var = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double c = distances[i] - mu;
        var += ts.weights[i] * c * c;
    }
    double sd = std::sqrt(var / wsum);

    if (sd < 1e-12) {
        // All distances equal: best fit is the constant tanh(beta0/2) at the
        // weighted label mean.
        double ybar = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i)
            ybar += ts.weights[i] * ts.labels[i];
        ybar = std::clamp(ybar / wsum, -1.0 + 1e-12, 1.0 - 1e-12);
        return {std::log((1.0 + ybar) / (1.0 - ybar)), 0.0};
    }

    // Start decreasing in distance, crossing zero at the mean distance.
    double b1 = -1.0 / sd;
    auto [r0, r1] = newton_betas(distances, ts, cfg, -b1 * mu, b1);
    if (warm_start) {
        auto [w0, w1] =
            newton_betas(distances, ts, cfg, warm_start->first, warm_start->second);
        if (cost_given_distances(distances, ts, w0, w1) <
            cost_given_distances(distances, ts, r0, r1))
            return {w0, w1};
    }
    return {r0, r1};
}

std::pair<double, double> fit_betas(const std::vector<double>& prototype,
                                    const TrainingSet& ts, bool soft,
                                    const FitConfig& cfg,
                                    const SoftMinConfig& scfg) {
    return fit_betas(bag_distances(prototype, ts, soft, scfg), ts, cfg);
}

namespace {

double soft_cost_and_p_grad(const std::vector<double>& p, double beta0,
                            double beta1, const TrainingSet& ts,
                            const SoftMinConfig& scfg,
                            std::vector<double>& grad_out) {
    grad_out.assign(p.size(), 0.0);
    std::vector<double> bag_grad;
    double cost = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double soft = soft_bag_distance_with_gradient(p, *ts.bags[i], scfg, bag_grad);
        double f = sigmoid_score(beta1 * soft + beta0);
        double s = 1.0 - f * f;
        double r = ts.labels[i] - f;
        cost += ts.weights[i] * r * r;
        double coef = -ts.weights[i] * r * s * beta1;
        for (std::size_t k = 0; k < p.size(); ++k)
            grad_out[k] += coef * bag_grad[k];
    }
    return cost;
}

double soft_cost_at(const std::vector<double>& p, double beta0, double beta1,
                    const TrainingSet& ts, const SoftMinConfig& scfg) {
    return cost_given_distances(bag_distances(p, ts, true, scfg), ts, beta0,
                                beta1);
}

}  // namespace

CostGradient soft_cost_gradient(const BaseClassifier& clf, const TrainingSet& ts,
                                const SoftMinConfig& scfg) {
    CostGradient out;
    out.d_prototype =
        std::vector<double>(clf.prototype.size(), 0.0);
    std::vector<double> bag_grad;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double soft = soft_bag_distance_with_gradient(clf.prototype, *ts.bags[i],
                                                      scfg, bag_grad);
        double f = sigmoid_score(clf.beta1 * soft + clf.beta0);
        double s = 1.0 - f * f;
        double r = ts.labels[i] - f;
        double g = -ts.weights[i] * r * s;
        out.d_beta0 += g;
        out.d_beta1 += g * soft;
        for (std::size_t k = 0; k < bag_grad.size(); ++k)
            out.d_prototype[k] += g * clf.beta1 * bag_grad[k];
    }
    return out;
}

std::vector<double> fit_prototype_step(
    const BaseClassifier& clf, const TrainingSet& ts, const FitConfig& cfg,
    const SoftMinConfig& scfg,
    const std::vector<std::vector<double>>* restricted_pool) {
    if (cfg.restricted_mode) {
        if (restricted_pool == nullptr || restricted_pool->empty())
            throw MilError(ErrorKind::Argument,
                           "restricted mode requires an instance pool");
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < restricted_pool->size(); ++i) {
            double c =
                soft_cost_at((*restricted_pool)[i], clf.beta0, clf.beta1, ts, scfg);
            if (c < best) {
                best = c;
                best_i = i;
            }
        }
        return (*restricted_pool)[best_i];
    }

    std::vector<double> p = clf.prototype;
    std::vector<double> grad;
    for (int iter = 0; iter < cfg.p_max_iters; ++iter) {
        double c = soft_cost_and_p_grad(p, clf.beta0, clf.beta1, ts, scfg, grad);
        double gsq = 0.0;
        for (double g : grad) gsq += g * g;
        if (gsq <= 1e-30) break;

        double t = cfg.ls_initial_step;
        bool accepted = false;
        std::vector<double> cand(p.size());
        double c_new = c;
        for (int bt = 0; bt < cfg.ls_max_backtracks; ++bt) {
            for (std::size_t k = 0; k < p.size(); ++k)
                cand[k] = p[k] - t * grad[k];
            c_new = soft_cost_at(cand, clf.beta0, clf.beta1, ts, scfg);
            if (c_new <= c - 1e-4 * t * gsq) {
                accepted = true;
                break;
            }
            t *= cfg.ls_shrink;
        }
        if (!accepted) break;  // includes "unchanged at the starting point"
        p.swap(cand);
        double rel = (c - c_new) / std::max(std::abs(c), 1e-300);
        if (rel < cfg.p_rel_tol) break;
    }
    return p;
}

BaseLearnResult learn_base_classifier(
    const TrainingSet& ts, const ClusterCenters& centers, const FitConfig& cfg,
    const SoftMinConfig& scfg,
    const std::vector<std::vector<double>>* restricted_pool, int jobs,
    const CostObserver& observer) {
    if (centers.centers.empty())
        throw MilError(ErrorKind::Argument, "no cluster centers");
    std::size_t n_restarts = centers.centers.size();
    if (cfg.restarts > 0)
        n_restarts = std::min<std::size_t>(n_restarts,
                                           static_cast<std::size_t>(cfg.restarts));

    std::vector<BaseLearnResult> results(n_restarts);
    // Observer output must follow restart order, so run serially with it.
    const int effective_jobs = observer ? 1 : jobs;

    parallel_for(n_restarts, effective_jobs, [&](std::size_t r) {
        BaseClassifier clf;
        clf.prototype = centers.centers[r];
        if (cfg.restricted_mode) {
            // Restart points live in the pool too, keeping every visited
            // prototype a training instance.
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_i = 0;
            for (std::size_t i = 0; i < restricted_pool->size(); ++i) {
                double d = instance_distance((*restricted_pool)[i], clf.prototype);
                if (d < best) {
                    best = d;
                    best_i = i;
                }
            }
            clf.prototype = (*restricted_pool)[best_i];
        }

        std::size_t step = 0;
        auto distances = bag_distances(clf.prototype, ts, true, scfg);
        std::tie(clf.beta0, clf.beta1) = fit_betas(distances, ts, cfg);
        double err = cost_given_distances(distances, ts, clf.beta0, clf.beta1);
        if (observer) observer(r, step++, err);

        for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
            clf.prototype = fit_prototype_step(clf, ts, cfg, scfg, restricted_pool);
            distances = bag_distances(clf.prototype, ts, true, scfg);
            if (observer)
                observer(r, step++,
                         cost_given_distances(distances, ts, clf.beta0, clf.beta1));
            std::tie(clf.beta0, clf.beta1) = fit_betas(
                distances, ts, cfg, std::make_pair(clf.beta0, clf.beta1));
            double err_new =
                cost_given_distances(distances, ts, clf.beta0, clf.beta1);
            if (observer) observer(r, step++, err_new);
            bool converged = std::abs(err - err_new) < cfg.tol;
            err = err_new;
            if (converged) break;
        }
        results[r] = {std::move(clf), err, r};
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < n_restarts; ++r) {
        if (results[r].soft_cost < results[best].soft_cost) best = r;
    }
    return results[best];
}

}  // namespace misboost
