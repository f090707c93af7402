// Generative factor model: fixed-point behavior, symmetry properties,
// degenerate inputs, and consolidation quality on sampled votes.

#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "support/helpers.hpp"
#include "verdict/errors.hpp"
#include "verdict/label_models.hpp"
#include "verdict/votes.hpp"

using namespace verdict;
using namespace verdict::testing;

namespace {

const FitConfig kTight{50000, 1e-10, 0, 0.05};

// mean over all items of v_i * tanh(sum_j theta_j v_j), the coupling the
// fitted theta must reproduce at stationarity
std::vector<double> empirical_couplings(const VoteMatrix& m, const std::vector<double>& theta) {
    std::vector<double> coupling(m.source_count(), 0.0);
    for (std::size_t i = 0; i < m.item_count(); ++i) {
        double field = 0.0;
        for (std::size_t s = 0; s < m.source_count(); ++s)
            field += theta[s] * vote_value(m.at(i, s));
        const double soft = std::tanh(field);
        for (std::size_t s = 0; s < m.source_count(); ++s)
            coupling[s] += vote_value(m.at(i, s)) * soft;
    }
    for (double& c : coupling) c /= static_cast<double>(m.item_count());
    return coupling;
}

}  // namespace

TEST_CASE("unanimous votes consolidate to the unanimous labels") {
    std::vector<std::vector<int>> rows;
    for (int i = 0; i < 5; ++i) rows.push_back({1, 1, 1});
    for (int i = 0; i < 5; ++i) rows.push_back({-1, -1, -1});
    const auto m = make_matrix(rows);
    // perfect coupling drives theta to the clip boundary, a slow crawl the
    // default iteration cap cannot finish
    const auto result = fit_generative_model(m, FitConfig{40000, 1e-6, 0, 0.05});

    CHECK(result.converged);
    const auto hard = harden_votes(result.posteriors);
    for (std::size_t i = 0; i < 5; ++i) CHECK(hard[i] == Vote::yes);
    for (std::size_t i = 5; i < 10; ++i) CHECK(hard[i] == Vote::no);
    for (double t : result.theta) CHECK(t == doctest::Approx(4.0));
}

TEST_CASE("single vote sits at a fixed point of the initializer") {
    // with one item and one source the stationarity equation holds for any
    // theta, so the fit stops immediately at the 0.7 starting value
    const auto result = fit_generative_model(make_matrix({{1}}));
    CHECK(result.converged);
    CHECK(result.iterations == 1);
    CHECK(result.theta[0] == doctest::Approx(0.7).epsilon(1e-12));
    const double expected = 1.0 / (1.0 + std::exp(-1.4));  // logistic(2 * 0.7)
    CHECK(result.posteriors.p[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("uninformative full pattern grid drives theta toward zero") {
    // all 16 sign patterns over 4 sources: no consensus signal exists
    std::vector<std::vector<int>> rows;
    for (int mask = 0; mask < 16; ++mask) {
        rows.push_back({(mask & 1) ? 1 : -1, (mask & 2) ? 1 : -1, (mask & 4) ? 1 : -1,
                        (mask & 8) ? 1 : -1});
    }
    const FitConfig config{200000, 1e-7, 0, 0.05};
    const auto result = fit_generative_model(make_matrix(rows), config);

    CHECK(result.converged);
    for (double t : result.theta) CHECK(std::abs(t) < 0.01);
    for (double p : result.posteriors.p) CHECK(std::abs(p - 0.5) < 0.02);
}

TEST_CASE("negating every vote flips posteriors and preserves couplings") {
    const auto inst = sample_symmetric(200, {0.85, 0.7, 0.75, 0.8}, 0.5, 31, 0.1);
    const auto base = fit_generative_model(inst.matrix, kTight);
    const auto flipped = fit_generative_model(inst.matrix.negated(), kTight);

    REQUIRE(base.theta.size() == flipped.theta.size());
    for (std::size_t s = 0; s < base.theta.size(); ++s) {
        CHECK(flipped.theta[s] == doctest::Approx(base.theta[s]).epsilon(1e-9));
    }
    for (std::size_t i = 0; i < base.posteriors.p.size(); ++i) {
        CHECK(base.posteriors.p[i] + flipped.posteriors.p[i] == doctest::Approx(1.0));
    }
}

TEST_CASE("complementary class balances mirror the posterior") {
    const auto inst = sample_symmetric(150, {0.8, 0.75, 0.7}, 0.5, 41);
    const auto heavy = fit_generative_model(inst.matrix, kTight, 0.7);
    const auto light = fit_generative_model(inst.matrix.negated(), kTight, 0.3);
    for (std::size_t i = 0; i < heavy.posteriors.p.size(); ++i) {
        CHECK(heavy.posteriors.p[i] + light.posteriors.p[i] == doctest::Approx(1.0));
    }
}

TEST_CASE("converged theta satisfies the stationarity equation") {
    std::vector<double> accuracies;
    for (int s = 0; s < 10; ++s) accuracies.push_back(0.6 + 0.3 * s / 9.0);
    const auto inst = sample_symmetric(1000, accuracies, 0.5, 37);
    const auto result = fit_generative_model(inst.matrix, kTight);

    REQUIRE(result.converged);
    const auto coupling = empirical_couplings(inst.matrix, result.theta);
    for (std::size_t s = 0; s < 10; ++s) {
        CHECK(std::abs(std::tanh(result.theta[s]) - coupling[s]) < 1e-6);
        CHECK(result.params.correlation[s] == doctest::Approx(std::tanh(result.theta[s])));
    }

    // consolidation comfortably beats the strongest single source
    const auto eval = accuracy(harden(result.posteriors), inst.gold);
    CHECK(static_cast<double>(eval.correct) / static_cast<double>(eval.total) >= 0.92);
}

TEST_CASE("class balance only shifts the posterior read-out") {
    const auto inst = sample_symmetric(100, {0.8, 0.7, 0.75}, 0.5, 43, 0.15);
    const auto low = fit_generative_model(inst.matrix, kTight, 0.2);
    const auto mid = fit_generative_model(inst.matrix, kTight, 0.5);
    const auto high = fit_generative_model(inst.matrix, kTight, 0.8);

    for (std::size_t s = 0; s < low.theta.size(); ++s) {
        CHECK(low.theta[s] == doctest::Approx(mid.theta[s]).epsilon(1e-12));
        CHECK(high.theta[s] == doctest::Approx(mid.theta[s]).epsilon(1e-12));
    }
    double mean_low = 0.0, mean_mid = 0.0, mean_high = 0.0;
    for (std::size_t i = 0; i < mid.posteriors.p.size(); ++i) {
        CHECK(low.posteriors.p[i] <= mid.posteriors.p[i]);
        CHECK(mid.posteriors.p[i] <= high.posteriors.p[i]);
        mean_low += low.posteriors.p[i];
        mean_mid += mid.posteriors.p[i];
        mean_high += high.posteriors.p[i];
    }
    CHECK(mean_low < mean_mid);
    CHECK(mean_mid < mean_high);
}

TEST_CASE("a source that always abstains decouples completely") {
    const auto inst = sample_symmetric(120, {0.85, 0.8}, 0.5, 47);
    std::vector<std::vector<int>> rows(inst.matrix.item_count());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = {vote_value(inst.matrix.at(i, 0)), vote_value(inst.matrix.at(i, 1)), 0};
    }
    const FitConfig config{50000, 1e-7, 0, 0.05};
    const auto padded = fit_generative_model(make_matrix(rows), config);
    const auto plain = fit_generative_model(inst.matrix, config);

    CHECK(std::abs(padded.theta[2]) < 1e-4);
    for (std::size_t i = 0; i < plain.posteriors.p.size(); ++i) {
        CHECK(padded.posteriors.p[i] == doctest::Approx(plain.posteriors.p[i]).epsilon(1e-9));
    }
}

TEST_CASE("iteration cap leaves the convergence flag down") {
    const auto inst = sample_symmetric(100, {0.8, 0.7, 0.75}, 0.5, 53);
    FitConfig config = FitConfig::generative_defaults();
    config.max_iterations = 3;
    const auto result = fit_generative_model(inst.matrix, config);
    CHECK(result.iterations == 3);
    CHECK_FALSE(result.converged);
}

TEST_CASE("rejects degenerate input and bad configuration") {
    CHECK_THROWS_AS(fit_generative_model(make_matrix({{0, 0}, {0, 0}})), EmptyInput);

    const auto m = make_matrix({{1, -1}, {1, 1}});
    FitConfig bad = FitConfig::generative_defaults();
    bad.max_iterations = 0;
    CHECK_THROWS_AS(fit_generative_model(m, bad), InvalidArgument);

    bad = FitConfig::generative_defaults();
    bad.tolerance = -1.0;
    CHECK_THROWS_AS(fit_generative_model(m, bad), InvalidArgument);

    bad = FitConfig::generative_defaults();
    bad.step_size = 0.0;
    CHECK_THROWS_AS(fit_generative_model(m, bad), InvalidArgument);

    CHECK_THROWS_AS(fit_generative_model(m, FitConfig::generative_defaults(), 0.0),
                    InvalidArgument);
    CHECK_THROWS_AS(fit_generative_model(m, FitConfig::generative_defaults(), 1.0),
                    InvalidArgument);
}
