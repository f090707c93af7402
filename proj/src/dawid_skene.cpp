// Two-class Dawid-Skene EM with Laplace-smoothed M-step.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "verdict/errors.hpp"
#include "verdict/label_models.hpp"

namespace verdict {

namespace {

constexpr double kParamFloor = 0.005;
constexpr double kParamCeil = 0.995;
constexpr double kMonotonicitySlack = 1e-9;

double clip_param(double x) { return std::clamp(x, kParamFloor, kParamCeil); }

struct Params {
    std::vector<double> alpha;  // P(vote=+1 | y=+1)
    std::vector<double> beta;   // P(vote=-1 | y=-1)
    double prior = 0.5;
};

// Closed-form weighted counts with pseudocount 1 on each binomial outcome.
Params m_step(const VoteMatrix& m, const std::vector<double>& posterior) {
    Params params;
    params.alpha.resize(m.source_count());
    params.beta.resize(m.source_count());
    for (std::size_t s = 0; s < m.source_count(); ++s) {
        double pos_weight = 0.0, pos_mass = 0.0;
        double neg_weight = 0.0, neg_mass = 0.0;
        for (std::size_t i = 0; i < m.item_count(); ++i) {
            const Vote v = m.at(i, s);
            if (is_abstain(v)) continue;
            pos_mass += posterior[i];
            neg_mass += 1.0 - posterior[i];
            if (v == Vote::yes) pos_weight += posterior[i];
            if (v == Vote::no) neg_weight += 1.0 - posterior[i];
        }
        params.alpha[s] = clip_param((1.0 + pos_weight) / (2.0 + pos_mass));
        params.beta[s] = clip_param((1.0 + neg_weight) / (2.0 + neg_mass));
    }
    double mass = 0.0;
    for (double p : posterior) mass += p;
    params.prior = clip_param((1.0 + mass) / (2.0 + static_cast<double>(m.item_count())));
    return params;
}

// Returns the observed-data log-likelihood and fills the posteriors.
double e_step(const VoteMatrix& m, const Params& params, std::vector<double>& posterior) {
    double ll = 0.0;
    for (std::size_t i = 0; i < m.item_count(); ++i) {
        double lp = std::log(params.prior);
        double ln = std::log(1.0 - params.prior);
        for (std::size_t s = 0; s < m.source_count(); ++s) {
            switch (m.at(i, s)) {
                case Vote::yes:
                    lp += std::log(params.alpha[s]);
                    ln += std::log(1.0 - params.beta[s]);
                    break;
                case Vote::no:
                    lp += std::log(1.0 - params.alpha[s]);
                    ln += std::log(params.beta[s]);
                    break;
                case Vote::abstain:
                    break;
            }
        }
        const double hi = std::max(lp, ln);
        ll += hi + std::log(std::exp(lp - hi) + std::exp(ln - hi));
        posterior[i] = 1.0 / (1.0 + std::exp(ln - lp));
    }
    return ll;
}

}  // namespace

DawidSkeneResult fit_dawid_skene(const VoteMatrix& matrix, const FitConfig& config) {
    if (matrix.non_abstain_count() == 0) {
        throw EmptyInput("dawid_skene: matrix has no non-abstain votes");
    }
    if (config.max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
    if (config.tolerance <= 0.0) throw InvalidArgument("tolerance must be positive");

    std::vector<double> posterior = majority_vote(matrix).p;
    Params params = m_step(matrix, posterior);

    DawidSkeneResult result;
    std::vector<double> next = posterior;
    Params prev_params = params;
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        if (iter > 0) {
            prev_params = params;
            params = m_step(matrix, posterior);
        }
        const double ll = e_step(matrix, params, next);
        if (!std::isfinite(ll)) throw NumericalFailure("dawid_skene: non-finite log-likelihood");
        if (ll < prev_ll - kMonotonicitySlack) {
            // The smoothed M-step optimizes a penalized objective; never commit
            // a step that lowers the observed likelihood.
            params = prev_params;
            result.converged = true;
            break;
        }
        posterior = next;
        result.log_likelihood.push_back(ll);
        result.iterations = iter + 1;
        if (ll - prev_ll < config.tolerance) {
            result.converged = true;
            break;
        }
        prev_ll = ll;
    }

    result.params.source_ids = matrix.source_ids();
    result.params.sensitivity = std::move(params.alpha);
    result.params.specificity = std::move(params.beta);
    result.params.prior = params.prior;
    result.posteriors.item_ids = matrix.item_ids();
    result.posteriors.p = std::move(posterior);
    return result;
}

}  // namespace verdict
