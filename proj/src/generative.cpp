// Factor-model denoiser: P(votes, y) proportional to exp(sum_i theta_i v_i y)
// with latent y in {-1, +1}, fitted by gradient ascent on the marginal
// likelihood. For one item the marginal is
//   log cosh(sum_j theta_j v_j) - sum over voting sources of log(2 cosh theta_j)
// up to a constant, which yields the gradient used below.

#include <algorithm>
#include <cmath>
#include <vector>

#include "verdict/errors.hpp"
#include "verdict/label_models.hpp"

namespace verdict {

namespace {

constexpr double kThetaInit = 0.7;
constexpr double kThetaClip = 4.0;

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

GenerativeResult fit_generative_model(const VoteMatrix& matrix,
                                      const FitConfig& config,
                                      double class_balance) {
    if (matrix.non_abstain_count() == 0) {
        throw EmptyInput("generative model: matrix has no non-abstain votes");
    }
    if (config.max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
    if (config.tolerance <= 0.0) throw InvalidArgument("tolerance must be positive");
    if (config.step_size <= 0.0) throw InvalidArgument("step_size must be positive");
    if (class_balance <= 0.0 || class_balance >= 1.0) {
        throw InvalidArgument("class_balance must be in (0, 1)");
    }

    const std::size_t n_items = matrix.item_count();
    const std::size_t n_sources = matrix.source_count();
    std::vector<double> theta(n_sources, kThetaInit);
    std::vector<double> grad(n_sources);

    GenerativeResult result;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n_items; ++i) {
            double field = 0.0;
            for (std::size_t s = 0; s < n_sources; ++s) {
                field += theta[s] * vote_value(matrix.at(i, s));
            }
            const double soft = std::tanh(field);
            for (std::size_t s = 0; s < n_sources; ++s) {
                grad[s] += vote_value(matrix.at(i, s)) * soft;
            }
        }

        double max_delta = 0.0;
        for (std::size_t s = 0; s < n_sources; ++s) {
            grad[s] = grad[s] / static_cast<double>(n_items) - std::tanh(theta[s]);
            if (!std::isfinite(grad[s])) {
                throw NumericalFailure("generative model: non-finite gradient");
            }
            const double updated = std::clamp(theta[s] + config.step_size * grad[s],
                                              -kThetaClip, kThetaClip);
            max_delta = std::max(max_delta, std::abs(updated - theta[s]));
            theta[s] = updated;
        }
        result.iterations = iter + 1;
        if (max_delta < config.tolerance) {
            result.converged = true;
            break;
        }
    }

    const double balance_logit = std::log(class_balance) - std::log(1.0 - class_balance);
    result.posteriors.item_ids = matrix.item_ids();
    result.posteriors.p.reserve(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
        double field = 0.0;
        for (std::size_t s = 0; s < n_sources; ++s) {
            field += theta[s] * vote_value(matrix.at(i, s));
        }
        result.posteriors.p.push_back(logistic(2.0 * field + balance_logit));
    }

    result.params.source_ids = matrix.source_ids();
    result.params.correlation.reserve(n_sources);
    for (double t : theta) result.params.correlation.push_back(std::tanh(t));
    result.params.class_balance = class_balance;
    result.params.clip();
    result.theta = std::move(theta);
    return result;
}

}  // namespace verdict
