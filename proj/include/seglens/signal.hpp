#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seglens/error.hpp"

namespace seglens {

using Index = std::size_t;

/// Per-frame feature vectors, one row per time step.
///
/// Rows are ordered by time. All entries are finite and the matrix has at
/// least one row and one column. Optional frame ids, when present, are
/// strictly increasing and one per row.
class FeatureMatrix {
public:
    explicit FeatureMatrix(Eigen::MatrixXd data,
                           std::optional<std::vector<std::int64_t>> frame_ids = std::nullopt)
        : data_(std::move(data)), frame_ids_(std::move(frame_ids)) {
        if (data_.rows() < 1 || data_.cols() < 1) {
            throw InputError("feature matrix must have at least one row and one column");
        }
        for (Eigen::Index r = 0; r < data_.rows(); ++r) {
            for (Eigen::Index c = 0; c < data_.cols(); ++c) {
                if (!std::isfinite(data_(r, c))) {
                    throw InputError("non-finite feature value at row " + std::to_string(r) +
                                     ", column " + std::to_string(c));
                }
            }
        }
        if (frame_ids_) {
            if (frame_ids_->size() != static_cast<std::size_t>(data_.rows())) {
                throw InputError("frame id count does not match row count");
            }
            for (std::size_t i = 1; i < frame_ids_->size(); ++i) {
                if ((*frame_ids_)[i] <= (*frame_ids_)[i - 1]) {
                    throw InputError("frame ids must be strictly increasing (row " +
                                     std::to_string(i) + ")");
                }
            }
        }
    }

    [[nodiscard]] Index frames() const { return static_cast<Index>(data_.rows()); }
    [[nodiscard]] Index dims() const { return static_cast<Index>(data_.cols()); }
    [[nodiscard]] const Eigen::MatrixXd& data() const { return data_; }
    [[nodiscard]] const std::optional<std::vector<std::int64_t>>& frame_ids() const {
        return frame_ids_;
    }

private:
    Eigen::MatrixXd data_;
    std::optional<std::vector<std::int64_t>> frame_ids_;
};

/// One-dimensional signal the detectors run on.
struct Embedding1D {
    std::vector<double> values;
    std::string source = "raw";
    /// Set when the projection collapsed (e.g. a kernel Gram matrix that
    /// centres to zero); values are then all zero.
    bool degenerate = false;

    [[nodiscard]] Index size() const { return values.size(); }
};

/// Expert class per frame: 0 is normal, k > 0 an abnormality class.
struct LabelSequence {
    std::vector<int> classes;

    [[nodiscard]] Index size() const { return classes.size(); }
};

/// Interior change points of a signal of length T.
///
/// A change point c marks the first index of a new segment, so the
/// segments are [0, c_1), [c_1, c_2), ..., [c_m, T). Under 1-based
/// inclusive frame numbering the same segment is frames c_{i-1}+1 .. c_i,
/// so the change point values are identical in both conventions.
struct Segmentation {
    std::vector<Index> changepoints;
    double total_cost = 0.0;
    double beta = 0.0;
    std::string algorithm;
    std::string embedding;

    [[nodiscard]] Index num_segments() const { return changepoints.size() + 1; }
};

/// Half-open [begin, end) bounds of every segment.
inline std::vector<std::pair<Index, Index>> segment_bounds(const std::vector<Index>& changepoints,
                                                           Index length) {
    std::vector<std::pair<Index, Index>> out;
    out.reserve(changepoints.size() + 1);
    Index begin = 0;
    for (Index c : changepoints) {
        out.emplace_back(begin, c);
        begin = c;
    }
    out.emplace_back(begin, length);
    return out;
}

/// True when the change points are strictly increasing, interior, and every
/// segment has at least min_len samples.
inline bool is_valid_segmentation(const std::vector<Index>& changepoints, Index length,
                                  Index min_len = 1) {
    Index prev = 0;
    for (Index c : changepoints) {
        if (c <= prev || c >= length || c - prev < min_len) {
            return false;
        }
        prev = c;
    }
    return length >= prev + min_len;
}

} // namespace seglens
