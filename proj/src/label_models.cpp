// Majority vote, hardening, the naive-Bayes posterior, and the estimator
// registry. The iterative fitters live in dawid_skene.cpp, triplet.cpp and
// generative.cpp.

#include "verdict/label_models.hpp"

#include <algorithm>
#include <cmath>

#include "verdict/errors.hpp"

namespace verdict {

namespace {

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

void SourceParams::clip() {
    for (double& a : correlation) a = std::clamp(a, -0.98, 0.98);
    class_balance = std::clamp(class_balance, 0.01, 0.99);
}

PosteriorLabels majority_vote(const VoteMatrix& matrix) {
    PosteriorLabels out;
    out.item_ids = matrix.item_ids();
    out.p.reserve(matrix.item_count());
    for (std::size_t i = 0; i < matrix.item_count(); ++i) {
        long long pos = 0, neg = 0;
        for (std::size_t s = 0; s < matrix.source_count(); ++s) {
            switch (matrix.at(i, s)) {
                case Vote::yes: ++pos; break;
                case Vote::no: ++neg; break;
                case Vote::abstain: break;
            }
        }
        out.p.push_back(pos + neg == 0 ? 0.5
                                       : static_cast<double>(pos) / static_cast<double>(pos + neg));
    }
    return out;
}

std::vector<Vote> harden_votes(const PosteriorLabels& posteriors, double threshold) {
    std::vector<Vote> out;
    out.reserve(posteriors.p.size());
    for (double p : posteriors.p) {
        out.push_back(p >= threshold ? Vote::yes : Vote::no);  // tie goes to +1
    }
    return out;
}

LabelMap harden(const PosteriorLabels& posteriors, double threshold) {
    if (posteriors.item_ids.size() != posteriors.p.size()) {
        throw InvalidArgument("posterior ids and probabilities have different lengths");
    }
    LabelMap out;
    const auto votes = harden_votes(posteriors, threshold);
    for (std::size_t i = 0; i < votes.size(); ++i) out[posteriors.item_ids[i]] = votes[i];
    return out;
}

PosteriorLabels posterior_naive_bayes(const VoteMatrix& matrix, const SourceParams& params) {
    if (params.source_ids.size() != matrix.source_count() ||
        params.correlation.size() != matrix.source_count()) {
        throw InvalidArgument("source params do not cover every matrix source");
    }
    const double prior_logit =
        std::log(params.class_balance) - std::log(1.0 - params.class_balance);
    std::vector<double> weight(matrix.source_count());
    for (std::size_t s = 0; s < matrix.source_count(); ++s) {
        const double q = params.symmetric_accuracy(s);
        weight[s] = std::log(q) - std::log(1.0 - q);
    }

    PosteriorLabels out;
    out.item_ids = matrix.item_ids();
    out.p.reserve(matrix.item_count());
    for (std::size_t i = 0; i < matrix.item_count(); ++i) {
        double logit = prior_logit;
        for (std::size_t s = 0; s < matrix.source_count(); ++s) {
            logit += vote_value(matrix.at(i, s)) * weight[s];
        }
        out.p.push_back(logistic(logit));
    }
    return out;
}

EstimatorRegistry EstimatorRegistry::builtin() {
    EstimatorRegistry reg;
    reg.add("majority", [](const VoteMatrix& m, const FitConfig&) { return majority_vote(m); });
    reg.add("flyingsquid", [](const VoteMatrix& m, const FitConfig&) {
        return posterior_naive_bayes(m, estimate_triplet_accuracies(m));
    });
    reg.add("dawid_skene", [](const VoteMatrix& m, const FitConfig& cfg) {
        return fit_dawid_skene(m, cfg).posteriors;
    });
    reg.add("generative", [](const VoteMatrix& m, const FitConfig& cfg) {
        return fit_generative_model(m, cfg).posteriors;
    });
    return reg;
}

void EstimatorRegistry::add(const std::string& name, EstimatorFn fn) {
    estimators_[name] = std::move(fn);
}

const EstimatorFn& EstimatorRegistry::get(const std::string& name) const {
    auto it = estimators_.find(name);
    if (it == estimators_.end()) throw UnknownModel("unknown estimator '" + name + "'");
    return it->second;
}

bool EstimatorRegistry::contains(const std::string& name) const {
    return estimators_.count(name) > 0;
}

std::vector<std::string> EstimatorRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(estimators_.size());
    for (const auto& [name, fn] : estimators_) out.push_back(name);
    return out;
}

}  // namespace verdict
