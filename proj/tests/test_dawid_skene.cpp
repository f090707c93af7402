// Dawid-Skene EM: extreme cases, parameter recovery on sampled data,
// likelihood monotonicity, and agreement with an independently written EM.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "support/helpers.hpp"
#include "support/reference_em.hpp"
#include "verdict/errors.hpp"
#include "verdict/label_models.hpp"
#include "verdict/votes.hpp"

using namespace verdict;
using namespace verdict::testing;

TEST_CASE("unanimous votes drive posteriors to the extremes") {
    std::vector<std::vector<int>> rows;
    for (int i = 0; i < 6; ++i) rows.push_back({1, 1, 1, 1});
    for (int i = 0; i < 6; ++i) rows.push_back({-1, -1, -1, -1});
    const auto result = fit_dawid_skene(make_matrix(rows));

    CHECK(result.converged);
    for (std::size_t i = 0; i < 6; ++i) CHECK(result.posteriors.p[i] >= 0.99);
    for (std::size_t i = 6; i < 12; ++i) CHECK(result.posteriors.p[i] <= 0.01);
    for (std::size_t s = 0; s < 4; ++s) {
        CHECK(result.params.sensitivity[s] >= 0.8);
        CHECK(result.params.specificity[s] >= 0.8);
        CHECK(result.params.sensitivity[s] <= 0.995);
    }
}

TEST_CASE("single source yields ordered, in-range posteriors") {
    const auto result = fit_dawid_skene(make_matrix({{1}, {1}, {1}, {-1}}));
    CHECK(result.posteriors.p[0] == doctest::Approx(result.posteriors.p[1]));
    CHECK(result.posteriors.p[0] > 0.5);
    CHECK(result.posteriors.p[3] < 0.5);
    for (double p : result.posteriors.p) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
    CHECK(result.params.prior >= 0.005);
    CHECK(result.params.prior <= 0.995);
}

TEST_CASE("abstain-only source leaves the fit unchanged") {
    const std::vector<std::vector<int>> base = {{1, 1}, {1, -1}, {-1, -1}, {1, 1}, {-1, 1}};
    std::vector<std::vector<int>> augmented = base;
    for (auto& row : augmented) row.push_back(0);

    const auto plain = fit_dawid_skene(make_matrix(base));
    const auto padded = fit_dawid_skene(make_matrix(augmented));
    REQUIRE(plain.posteriors.p.size() == padded.posteriors.p.size());
    for (std::size_t i = 0; i < plain.posteriors.p.size(); ++i) {
        CHECK(padded.posteriors.p[i] == doctest::Approx(plain.posteriors.p[i]).epsilon(1e-12));
    }
    // a source that never votes carries the uninformative smoothed estimate
    CHECK(padded.params.sensitivity[2] == doctest::Approx(0.5));
    CHECK(padded.params.specificity[2] == doctest::Approx(0.5));
}

TEST_CASE("recovers confusion parameters within 0.05 on sampled votes") {
    const std::vector<double> sensitivity = {0.9, 0.85, 0.8, 0.75, 0.7};
    const std::vector<double> specificity = {0.7, 0.75, 0.8, 0.85, 0.9};
    const auto inst = sample_confusion(2000, sensitivity, specificity, 0.6, 7);

    const auto result = fit_dawid_skene(inst.matrix);
    CHECK(result.converged);
    for (std::size_t s = 0; s < sensitivity.size(); ++s) {
        CHECK(std::abs(result.params.sensitivity[s] - sensitivity[s]) <= 0.05);
        CHECK(std::abs(result.params.specificity[s] - specificity[s]) <= 0.05);
    }
    CHECK(std::abs(result.params.prior - 0.6) <= 0.05);

    // consolidation cleanly beats the strongest single source (~0.82)
    const auto eval = accuracy(harden(result.posteriors), inst.gold);
    CHECK(static_cast<double>(eval.correct) / static_cast<double>(eval.total) >= 0.88);
}

TEST_CASE("log-likelihood trace is non-decreasing and drives convergence") {
    const auto inst =
        sample_confusion(300, {0.85, 0.7, 0.65, 0.8}, {0.8, 0.75, 0.9, 0.6}, 0.55, 13, 0.1);
    const auto result = fit_dawid_skene(inst.matrix);

    REQUIRE(result.iterations >= 2);
    CHECK(result.iterations == static_cast<int>(result.log_likelihood.size()));
    for (std::size_t t = 1; t < result.log_likelihood.size(); ++t) {
        CHECK(result.log_likelihood[t] >= result.log_likelihood[t - 1] - 1e-9);
    }
    CHECK(result.converged);
    const double last = result.log_likelihood.back();
    const double prev = result.log_likelihood[result.log_likelihood.size() - 2];
    CHECK(last - prev < FitConfig::dawid_skene_defaults().tolerance + 1e-12);
}

TEST_CASE("iteration cap halts the fit without a convergence claim") {
    const auto inst = sample_confusion(200, {0.8, 0.7, 0.75}, {0.75, 0.8, 0.7}, 0.5, 29);
    FitConfig config = FitConfig::dawid_skene_defaults();
    config.max_iterations = 1;
    const auto result = fit_dawid_skene(inst.matrix, config);
    CHECK(result.iterations == 1);
    CHECK_FALSE(result.converged);
    CHECK(result.log_likelihood.size() == 1);
}

TEST_CASE("rejects degenerate input and bad configuration") {
    CHECK_THROWS_AS(fit_dawid_skene(make_matrix({{0, 0}, {0, 0}})), EmptyInput);

    const auto m = make_matrix({{1, -1}, {1, 1}});
    FitConfig bad_iters = FitConfig::dawid_skene_defaults();
    bad_iters.max_iterations = 0;
    CHECK_THROWS_AS(fit_dawid_skene(m, bad_iters), InvalidArgument);

    FitConfig bad_tol = FitConfig::dawid_skene_defaults();
    bad_tol.tolerance = 0.0;
    CHECK_THROWS_AS(fit_dawid_skene(m, bad_tol), InvalidArgument);
}

TEST_CASE("fixed point agrees with an independently written EM") {
    const auto inst =
        sample_confusion(150, {0.85, 0.75, 0.65, 0.8}, {0.8, 0.7, 0.9, 0.6}, 0.55, 21);
    FitConfig config{2000, 1e-12, 0, 0.0};
    const auto result = fit_dawid_skene(inst.matrix, config);
    const auto ref = reference_em(inst.matrix, 2000, 1e-12);

    for (std::size_t s = 0; s < 4; ++s) {
        CHECK(result.params.sensitivity[s] == doctest::Approx(ref.alpha[s]).epsilon(1e-6));
        CHECK(result.params.specificity[s] == doctest::Approx(ref.beta[s]).epsilon(1e-6));
    }
    CHECK(result.params.prior == doctest::Approx(ref.prior).epsilon(1e-6));
    double max_gap = 0.0;
    for (std::size_t i = 0; i < result.posteriors.p.size(); ++i) {
        max_gap = std::max(max_gap, std::abs(result.posteriors.p[i] - ref.posterior[i]));
    }
    CHECK(max_gap < 1e-6);
}
