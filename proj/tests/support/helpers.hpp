#pragma once
// Shared test scaffolding: temp directories, deterministic samplers and
// hand-rolled matrix builders. Only mt19937_64's specified raw output is
// used so every sampled instance is identical across platforms.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "verdict/votes.hpp"

namespace verdict::testing {

class TempDir {
public:
    explicit TempDir(const std::string& tag = "verdict_test") {
        auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0; attempt < 100; ++attempt) {
            auto candidate = base / (tag + "_" + std::to_string(counter_++));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create temp directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double unit() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(engine() % n); }
};

inline std::string item_id(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "i%04zu", i + 1);
    return buf;
}

inline std::string source_id(std::size_t s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "s%02zu", s + 1);
    return buf;
}

// Matrix from integer rows (1, -1, 0), items x sources.
inline VoteMatrix make_matrix(const std::vector<std::vector<int>>& rows) {
    const std::size_t n_sources = rows.empty() ? 0 : rows[0].size();
    std::vector<std::string> items, sources;
    for (std::size_t i = 0; i < rows.size(); ++i) items.push_back(item_id(i));
    for (std::size_t s = 0; s < n_sources; ++s) sources.push_back(source_id(s));
    std::vector<Vote> cells;
    cells.reserve(rows.size() * n_sources);
    for (const auto& row : rows)
        for (int v : row) cells.push_back(vote_from_value(v));
    return VoteMatrix(std::move(items), std::move(sources), std::move(cells));
}

struct SampledInstance {
    VoteMatrix matrix;
    std::vector<Vote> truth;  // per item, in matrix item order
    LabelMap gold;
};

// Symmetric channel: P(v_s = y) = accuracies[s], abstains injected at
// abstain_rate, truth +1 with probability balance.
inline SampledInstance sample_symmetric(std::size_t n_items,
                                        const std::vector<double>& accuracies,
                                        double balance,
                                        std::uint64_t seed,
                                        double abstain_rate = 0.0) {
    Rng rng(seed);
    std::vector<std::string> items, sources;
    for (std::size_t i = 0; i < n_items; ++i) items.push_back(item_id(i));
    for (std::size_t s = 0; s < accuracies.size(); ++s) sources.push_back(source_id(s));

    std::vector<Vote> truth(n_items);
    std::vector<Vote> cells(n_items * accuracies.size());
    LabelMap gold;
    for (std::size_t i = 0; i < n_items; ++i) {
        const Vote y = rng.unit() < balance ? Vote::yes : Vote::no;
        truth[i] = y;
        gold[items[i]] = y;
        for (std::size_t s = 0; s < accuracies.size(); ++s) {
            Vote v;
            if (abstain_rate > 0.0 && rng.unit() < abstain_rate) {
                v = Vote::abstain;
            } else if (rng.unit() < accuracies[s]) {
                v = y;
            } else {
                v = (y == Vote::yes) ? Vote::no : Vote::yes;
            }
            cells[i * accuracies.size() + s] = v;
        }
    }
    return {VoteMatrix(std::move(items), std::move(sources), std::move(cells)), std::move(truth),
            std::move(gold)};
}

// Confusion-channel sampler: P(v=+1 | y=+1) = sensitivity[s],
// P(v=-1 | y=-1) = specificity[s].
inline SampledInstance sample_confusion(std::size_t n_items,
                                        const std::vector<double>& sensitivity,
                                        const std::vector<double>& specificity,
                                        double prior,
                                        std::uint64_t seed,
                                        double abstain_rate = 0.0) {
    Rng rng(seed);
    const std::size_t n_sources = sensitivity.size();
    std::vector<std::string> items, sources;
    for (std::size_t i = 0; i < n_items; ++i) items.push_back(item_id(i));
    for (std::size_t s = 0; s < n_sources; ++s) sources.push_back(source_id(s));

    std::vector<Vote> truth(n_items);
    std::vector<Vote> cells(n_items * n_sources);
    LabelMap gold;
    for (std::size_t i = 0; i < n_items; ++i) {
        const Vote y = rng.unit() < prior ? Vote::yes : Vote::no;
        truth[i] = y;
        gold[items[i]] = y;
        for (std::size_t s = 0; s < n_sources; ++s) {
            Vote v;
            if (abstain_rate > 0.0 && rng.unit() < abstain_rate) {
                v = Vote::abstain;
            } else if (y == Vote::yes) {
                v = rng.unit() < sensitivity[s] ? Vote::yes : Vote::no;
            } else {
                v = rng.unit() < specificity[s] ? Vote::no : Vote::yes;
            }
            cells[i * n_sources + s] = v;
        }
    }
    return {VoteMatrix(std::move(items), std::move(sources), std::move(cells)), std::move(truth),
            std::move(gold)};
}

}  // namespace verdict::testing
