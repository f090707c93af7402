#pragma once
// Label models: estimators that consolidate a VoteMatrix into per-item
// posterior probabilities of the positive class.
//
// Vote semantics throughout: abstains drop out of every likelihood and
// moment; they are never modeled as a third outcome.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "verdict/votes.hpp"

namespace verdict {

// Symmetric-channel reliability per source: a_i = E[vote_i * y] over
// non-abstain votes, equivalently accuracy q_i = (1 + a_i) / 2.
struct SourceParams {
    std::vector<std::string> source_ids;
    std::vector<double> correlation;  // a_i, clipped to [-0.98, 0.98]
    double class_balance = 0.5;       // P(y = +1), clipped to [0.01, 0.99]

    double symmetric_accuracy(std::size_t i) const { return (1.0 + correlation[i]) / 2.0; }

    // Applies the clipping invariants in place.
    void clip();
};

// Dawid-Skene confusion entries per source, plus the class prior.
struct ConfusionParams {
    std::vector<std::string> source_ids;
    std::vector<double> sensitivity;  // alpha_i = P(vote=+1 | y=+1)
    std::vector<double> specificity;  // beta_i  = P(vote=-1 | y=-1)
    double prior = 0.5;               // pi = P(y=+1)
    // All entries in [0.005, 0.995] after smoothing.
};

// Per-item probability of the positive label, aligned with the matrix rows.
struct PosteriorLabels {
    std::vector<std::string> item_ids;
    std::vector<double> p;  // each in [0, 1]
};

// Shared fit knobs. seed is recorded for report provenance; the estimators
// here are deterministic and do not draw random numbers.
struct FitConfig {
    int max_iterations = 500;
    double tolerance = 1e-6;
    std::uint64_t seed = 0;
    double step_size = 0.05;  // generative model only

    static FitConfig dawid_skene_defaults() { return {500, 1e-9, 0, 0.0}; }
    static FitConfig generative_defaults() { return {500, 1e-6, 0, 0.05}; }
};

// p_i = positives / non-abstains per item; 0.5 when every source abstains.
PosteriorLabels majority_vote(const VoteMatrix& matrix);

// Posterior threshold rule: p > threshold -> +1, p < threshold -> -1,
// p == threshold -> +1.
LabelMap harden(const PosteriorLabels& posteriors, double threshold = 0.5);
std::vector<Vote> harden_votes(const PosteriorLabels& posteriors, double threshold = 0.5);

// --- Dawid-Skene -----------------------------------------------------------

struct DawidSkeneResult {
    ConfusionParams params;
    PosteriorLabels posteriors;
    std::vector<double> log_likelihood;  // observed-data LL after each iteration
    int iterations = 0;
    bool converged = false;
};

// Two-class Dawid-Skene EM. Initialized from majority-vote posteriors;
// M-step uses Laplace smoothing (pseudocount 1); stops when the observed-data
// log-likelihood improves by less than config.tolerance. The observed LL is
// non-decreasing across the returned trace.
DawidSkeneResult fit_dawid_skene(const VoteMatrix& matrix,
                                 const FitConfig& config = FitConfig::dawid_skene_defaults());

// --- Triplet method (FlyingSquid-style) -------------------------------------

// Recovers a_i from pairwise agreement moments: for sources (i, j, k),
// a_i = sqrt(|M_ij * M_ik / M_jk|). Each source's estimate is the median over
// its usable triplets; triplets with |M_jk| < min_moment are skipped. The
// latent-label sign ambiguity is resolved against majority vote: if the
// hardened naive-Bayes labels disagree with majority vote on more than half
// of the items, every a_i is negated. class_balance is the positive fraction
// of hardened majority-vote labels.
SourceParams estimate_triplet_accuracies(const VoteMatrix& matrix, double min_moment = 1e-3);

// Closed-form core of the triplet method: given the pairwise moment matrix
// (moments[j][k] ~ a_j * a_k, diagonal ignored, nullopt = unobserved pair),
// recovers |a_i| as the median over triplets of sqrt(|M_ij * M_ik / M_jk|),
// skipping triplets whose denominator is below min_moment. Unclipped.
std::vector<double> triplet_magnitudes(
    const std::vector<std::vector<std::optional<double>>>& moments,
    double min_moment = 1e-3);

// Per-item logit = log(p/(1-p)) + sum over non-abstaining sources of
// vote_i * log(q_i / (1 - q_i)), with q_i = (1 + a_i)/2.
PosteriorLabels posterior_naive_bayes(const VoteMatrix& matrix, const SourceParams& params);

// --- Generative model -------------------------------------------------------

struct GenerativeResult {
    SourceParams params;  // correlation[i] = tanh(theta_i)
    PosteriorLabels posteriors;
    std::vector<double> theta;
    int iterations = 0;
    bool converged = false;
};

// Maximizes the marginal likelihood of P(votes, y) proportional to
// exp(sum_i theta_i * vote_i * y), y in {-1,+1} uniform, abstains contributing
// no factor. Gradient ascent from theta_i = 0.7:
//   grad_i = mean over items of [vote_i * tanh(sum_j theta_j vote_j)] - tanh(theta_i)
// theta clipped to [-4, 4]; converged when max |delta theta| < config.tolerance.
// Posteriors: p = logistic(2 * sum_j theta_j vote_j + balance logit).
GenerativeResult fit_generative_model(const VoteMatrix& matrix,
                                      const FitConfig& config = FitConfig::generative_defaults(),
                                      double class_balance = 0.5);

// --- Estimator registry ------------------------------------------------------

// The extension point for additional label models: anything that maps a
// VoteMatrix to PosteriorLabels under a FitConfig.
using EstimatorFn = std::function<PosteriorLabels(const VoteMatrix&, const FitConfig&)>;

class EstimatorRegistry {
public:
    // Registry preloaded with "majority", "flyingsquid", "dawid_skene",
    // "generative".
    static EstimatorRegistry builtin();

    void add(const std::string& name, EstimatorFn fn);
    const EstimatorFn& get(const std::string& name) const;  // throws UnknownModel
    bool contains(const std::string& name) const;
    std::vector<std::string> names() const;  // sorted

private:
    std::map<std::string, EstimatorFn> estimators_;
};

}  // namespace verdict
