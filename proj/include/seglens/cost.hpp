#pragma once

#include <cmath>
#include <utility>
#include <string>
#include <vector>

#include "seglens/error.hpp"
#include "seglens/signal.hpp"

namespace seglens {

inline constexpr double kDefaultVarFloor = 1e-8;

/// Twice the negative Gaussian log-likelihood of a segment at its maximum
/// likelihood mean and variance:
///
///     C[a, b) = L * (log(2 pi) + log(max(var, floor)) + 1),   L = b - a
///
/// where var is the biased sample variance of the segment. Evaluated in O(1)
/// from prefix sums of the signal shifted by its global mean (the cost only
/// depends on deviations, and the shift limits cancellation).
class GaussianCost {
public:
    explicit GaussianCost(const Embedding1D& signal, double var_floor = kDefaultVarFloor)
        : GaussianCost(signal.values, var_floor, signal.source) {}

    explicit GaussianCost(const std::vector<double>& values, double var_floor = kDefaultVarFloor,
                          std::string source = "raw")
        : var_floor_(var_floor), source_(std::move(source)) {
        if (values.empty()) {
            throw InputError("cost model needs a non-empty signal", InputError::Kind::empty);
        }
        if (!(var_floor > 0.0) || !std::isfinite(var_floor)) {
            throw InfeasibleError("variance floor must be positive and finite");
        }
        double total = 0.0;
        for (double v : values) {
            if (!std::isfinite(v)) {
                throw InputError("signal contains a non-finite value");
            }
            total += v;
        }
        shift_ = total / static_cast<double>(values.size());
        prefix_sum_.assign(values.size() + 1, 0.0);
        prefix_sq_.assign(values.size() + 1, 0.0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - shift_;
            prefix_sum_[i + 1] = prefix_sum_[i] + d;
            prefix_sq_[i + 1] = prefix_sq_[i] + d * d;
        }
    }

    [[nodiscard]] Index size() const { return prefix_sum_.size() - 1; }
    [[nodiscard]] double var_floor() const { return var_floor_; }
    [[nodiscard]] const std::string& source() const { return source_; }
    [[nodiscard]] double shift() const { return shift_; }
    [[nodiscard]] const std::vector<double>& prefix_sum() const { return prefix_sum_; }
    [[nodiscard]] const std::vector<double>& prefix_sq() const { return prefix_sq_; }

    /// Biased variance of [a, b), clamped at zero.
    [[nodiscard]] double variance(Index a, Index b) const {
        const double len = static_cast<double>(b - a);
        const double s = prefix_sum_[b] - prefix_sum_[a];
        const double q = prefix_sq_[b] - prefix_sq_[a];
        const double var = (q - s * s / len) / len;
        return var > 0.0 ? var : 0.0;
    }

    /// Cost of [a, b) without bounds checks; callers guarantee a < b <= T.
    [[nodiscard]] double cost(Index a, Index b) const {
        const double len = static_cast<double>(b - a);
        const double var = variance(a, b);
        return len * (kLog2Pi + std::log(var > var_floor_ ? var : var_floor_) + 1.0);
    }

    /// Cost of [a, b); throws when the interval is empty or out of range.
    [[nodiscard]] double segment_cost(Index a, Index b) const {
        if (a >= b || b > size()) {
            throw InfeasibleError("invalid segment [" + std::to_string(a) + ", " +
                                  std::to_string(b) + ") for signal of length " +
                                  std::to_string(size()));
        }
        return cost(a, b);
    }

    /// Sum of segment costs plus beta per change point.
    [[nodiscard]] double penalized_cost(const std::vector<Index>& changepoints,
                                        double beta) const {
        double total = 0.0;
        for (const auto& [a, b] : segment_bounds(changepoints, size())) {
            total += segment_cost(a, b);
        }
        return total + beta * static_cast<double>(changepoints.size());
    }

private:
    static constexpr double kLog2Pi = 1.8378770664093454835606594728112; // log(2 pi)

    double var_floor_;
    std::string source_;
    double shift_ = 0.0;
    std::vector<double> prefix_sum_;
    std::vector<double> prefix_sq_;
};

} // namespace seglens
