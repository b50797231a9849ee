#pragma once

// Deterministic synthetic signals and feature streams with known transitions.
//
// Random numbers come from xoshiro256** (Blackman & Vigna) whose 256-bit
// state is filled by four successive SplitMix64 outputs of the seed:
//
//   splitmix64: s += 0x9E3779B97F4A7C15; z = s;
//               z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//               z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
//               return z ^ (z >> 31);
//
// Uniforms are (next() >> 11) * 2^-53 in [0, 1). Normals use the Box-Muller
// transform on a pair (u1, u2): r = sqrt(-2 log(1 - u1)), z0 = r cos(2 pi u2),
// z1 = r sin(2 pi u2); z0 is returned first and z1 on the following call.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seglens/error.hpp"
#include "seglens/evaluation.hpp"
#include "seglens/signal.hpp"

namespace seglens {

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            word = splitmix64(sm);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi] (inclusive); small modulo bias is accepted.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        return lo + (*this)() % (hi - lo + 1);
    }

    double normal() {
        if (spare_) {
            const double z = *spare_;
            spare_.reset();
            return z;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(angle);
        return r * std::cos(angle);
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& s) {
        s += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4]{};
    std::optional<double> spare_;
};

struct SegmentSpec {
    Index length = 1;
    double mean = 0.0;
    double std = 0.0;
};

struct SyntheticSignal {
    Embedding1D signal;
    TransitionTruth truth;
};

/// Concatenated Gaussian segments; truth is the start of every segment
/// after the first.
inline SyntheticSignal gen_piecewise_gaussian(std::uint64_t seed,
                                              const std::vector<SegmentSpec>& specs) {
    if (specs.empty()) {
        throw InfeasibleError("at least one segment spec is required");
    }
    Rng rng(seed);
    SyntheticSignal out;
    out.signal.source = "synthetic";
    Index pos = 0;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const auto& spec = specs[k];
        if (spec.length < 1 || !(spec.std >= 0.0)) {
            throw InfeasibleError("segment specs need length >= 1 and std >= 0");
        }
        if (k > 0) {
            out.truth.transitions.push_back(pos);
        }
        for (Index i = 0; i < spec.length; ++i) {
            const double z = rng.normal();
            out.signal.values.push_back(spec.std == 0.0 ? spec.mean : spec.mean + spec.std * z);
        }
        pos += spec.length;
    }
    out.truth.length = pos;
    return out;
}

/// Half-open [begin, end) frame range labelled abnormal.
struct Run {
    Index begin = 0;
    Index end = 0;
};

struct SyntheticFeatures {
    FeatureMatrix features;
    LabelSequence labels;
    TransitionTruth truth;
};

/// Standard Gaussian rows; rows inside a run are shifted by shift * u, with u
/// a unit vector drawn first from the seed. Runs must not overlap or touch.
inline SyntheticFeatures gen_feature_matrix(std::uint64_t seed, Index frames, Index dims,
                                            std::vector<Run> runs, double shift) {
    if (dims < 2) {
        throw InfeasibleError("synthetic features need p >= 2");
    }
    if (frames < 1) {
        throw InfeasibleError("synthetic features need T >= 1");
    }
    std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.begin < b.begin; });
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].begin >= runs[i].end || runs[i].end > frames) {
            throw InfeasibleError("run [" + std::to_string(runs[i].begin) + ", " +
                                  std::to_string(runs[i].end) + ") is empty or outside [0, T)");
        }
        if (i > 0 && runs[i].begin <= runs[i - 1].end) {
            throw InfeasibleError("runs overlap or touch at frame " +
                                  std::to_string(runs[i].begin));
        }
    }

    Rng rng(seed);
    Eigen::VectorXd direction(static_cast<Eigen::Index>(dims));
    do {
        for (Eigen::Index j = 0; j < direction.size(); ++j) {
            direction(j) = rng.normal();
        }
    } while (direction.norm() == 0.0);
    direction.normalize();

    Eigen::MatrixXd data(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(dims));
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        for (Eigen::Index c = 0; c < data.cols(); ++c) {
            data(r, c) = rng.normal();
        }
    }

    LabelSequence labels;
    labels.classes.assign(frames, 0);
    TransitionTruth truth;
    truth.length = frames;
    for (const auto& run : runs) {
        for (Index t = run.begin; t < run.end; ++t) {
            data.row(static_cast<Eigen::Index>(t)) += shift * direction.transpose();
            labels.classes[t] = 1;
        }
        if (run.begin > 0) {
            truth.transitions.push_back(run.begin);
        }
        if (run.end < frames) {
            truth.transitions.push_back(run.end);
        }
    }
    return {FeatureMatrix(std::move(data)), std::move(labels), std::move(truth)};
}

/// Places `count` runs with lengths in [min_len, max_len]: one per equal
/// slot of [0, T), at a random offset that keeps a gap of at least one frame
/// to the slot edges.
inline std::vector<Run> place_runs(std::uint64_t seed, Index frames, Index count, Index min_len,
                                   Index max_len) {
    if (count == 0) {
        return {};
    }
    const Index slot = frames / count;
    if (min_len < 1 || max_len < min_len || slot < max_len + 2) {
        throw InfeasibleError("cannot place " + std::to_string(count) + " runs of length up to " +
                              std::to_string(max_len) + " in " + std::to_string(frames) +
                              " frames");
    }
    Rng rng(seed);
    std::vector<Run> runs;
    for (Index k = 0; k < count; ++k) {
        const Index len = rng.uniform_int(min_len, max_len);
        const Index offset = rng.uniform_int(1, slot - len - 1);
        runs.push_back({k * slot + offset, k * slot + offset + len});
    }
    return runs;
}

} // namespace seglens
