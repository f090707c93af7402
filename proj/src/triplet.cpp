// Method-of-moments accuracy recovery from pairwise agreement rates.
//
// Under conditional independence, E[v_j v_k] = a_j a_k, so for any triplet
// (i, j, k): a_i^2 = M_ij * M_ik / M_jk. Signs are recovered globally by
// assuming the ensemble beats random, i.e. agrees with majority vote.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "verdict/errors.hpp"
#include "verdict/label_models.hpp"

namespace verdict {

namespace {

// Mean of v_j * v_k over items where both voted; nullopt when none did.
std::optional<double> pair_moment(const VoteMatrix& m, std::size_t j, std::size_t k) {
    long long sum = 0;
    long long n = 0;
    for (std::size_t i = 0; i < m.item_count(); ++i) {
        const Vote vj = m.at(i, j);
        const Vote vk = m.at(i, k);
        if (is_abstain(vj) || is_abstain(vk)) continue;
        sum += vote_value(vj) * vote_value(vk);
        ++n;
    }
    if (n == 0) return std::nullopt;
    return static_cast<double>(sum) / static_cast<double>(n);
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    if (n % 2 == 1) return xs[n / 2];
    return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

std::vector<double> triplet_magnitudes(
    const std::vector<std::vector<std::optional<double>>>& moments, double min_moment) {
    const std::size_t m = moments.size();
    if (m < 3) {
        throw NotEnoughSources("triplet estimation needs >= 3 sources, got " + std::to_string(m));
    }
    std::vector<double> magnitudes(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> estimates;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            for (std::size_t k = j + 1; k < m; ++k) {
                if (k == i) continue;
                const auto& m_ij = moments[i][j];
                const auto& m_ik = moments[i][k];
                const auto& m_jk = moments[j][k];
                if (!m_ij || !m_ik || !m_jk) continue;
                if (std::abs(*m_jk) < min_moment) continue;
                estimates.push_back(std::sqrt(std::abs(*m_ij * *m_ik / *m_jk)));
            }
        }
        if (estimates.empty()) {
            throw DegenerateMoments("every triplet for source " + std::to_string(i) +
                                    " fell below the moment threshold");
        }
        magnitudes[i] = median(std::move(estimates));
    }
    return magnitudes;
}

SourceParams estimate_triplet_accuracies(const VoteMatrix& matrix, double min_moment) {
    const std::size_t m = matrix.source_count();
    if (m < 3) {
        throw NotEnoughSources("triplet estimation needs >= 3 sources, got " + std::to_string(m));
    }

    std::vector<std::vector<std::optional<double>>> moments(m, std::vector<std::optional<double>>(m));
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = j + 1; k < m; ++k) {
            moments[j][k] = moments[k][j] = pair_moment(matrix, j, k);
        }
    }

    SourceParams params;
    params.source_ids = matrix.source_ids();
    params.correlation = triplet_magnitudes(moments, min_moment);

    const PosteriorLabels mv = majority_vote(matrix);
    const auto mv_hard = harden_votes(mv);
    long long positives = 0;
    for (Vote v : mv_hard) {
        if (v == Vote::yes) ++positives;
    }
    params.class_balance = static_cast<double>(positives) / static_cast<double>(mv_hard.size());
    params.clip();

    // Global sign: flip if the hardened estimate disagrees with majority vote
    // on more than half the items.
    const auto nb_hard = harden_votes(posterior_naive_bayes(matrix, params));
    std::size_t disagreements = 0;
    for (std::size_t i = 0; i < nb_hard.size(); ++i) {
        if (nb_hard[i] != mv_hard[i]) ++disagreements;
    }
    if (2 * disagreements > nb_hard.size()) {
        for (double& a : params.correlation) a = -a;
    }
    return params;
}

}  // namespace verdict
