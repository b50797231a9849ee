#pragma once

// CSV and JSON readers/writers for feature matrices, label sequences,
// embeddings and segmentations.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "seglens/error.hpp"
#include "seglens/signal.hpp"

namespace seglens {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'", InputError::Kind::io);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'", InputError::Kind::io);
    }
    out << content;
    if (!out) {
        throw InputError("write failed for '" + path.string() + "'", InputError::Kind::io);
    }
}

template <class T>
bool parse_number(std::string_view cell, T& out) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    if (cell.empty()) {
        return false;
    }
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

inline std::string location(std::size_t line, std::size_t column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

} // namespace detail

/// Formats with `digits` significant digits ("%.*g").
inline std::string format_number(double value, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

/// Rounds to 12 significant digits, so the shortest round-trip decimal form
/// of the result is at most 12 digits long.
inline double round_sig(double value, int digits = 12) {
    return std::strtod(format_number(value, digits).c_str(), nullptr);
}

/// Parses feature CSV text. With `has_frame_ids` the first cell of every row
/// is an integer frame id rather than a feature.
inline FeatureMatrix parse_feature_csv(std::string_view text, bool has_frame_ids = false) {
    std::vector<double> values;
    std::vector<std::int64_t> ids;
    std::size_t width = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    for (std::string_view line : detail::split(text, '\n')) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto cells = detail::split(line, ',');
        std::size_t first = 0;
        if (has_frame_ids) {
            std::int64_t id = 0;
            if (!detail::parse_number(cells[0], id)) {
                throw InputError(detail::location(line_no, 1) + ": cannot parse frame id '" +
                                     std::string(detail::trim(cells[0])) + "'",
                                 InputError::Kind::parse, line_no, 1);
            }
            ids.push_back(id);
            first = 1;
        }
        const std::size_t count = cells.size() - first;
        if (rows == 0) {
            width = count;
            if (width == 0) {
                throw InputError("line " + std::to_string(line_no) + ": no feature columns",
                                 InputError::Kind::schema, line_no);
            }
        } else if (count != width) {
            throw InputError("line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(width) + " columns, found " +
                                 std::to_string(count),
                             InputError::Kind::schema, line_no);
        }
        for (std::size_t c = first; c < cells.size(); ++c) {
            double v = 0.0;
            if (!detail::parse_number(cells[c], v)) {
                throw InputError(detail::location(line_no, c + 1) + ": cannot parse '" +
                                     std::string(detail::trim(cells[c])) + "' as a number",
                                 InputError::Kind::parse, line_no, c + 1);
            }
            if (!std::isfinite(v)) {
                throw InputError(detail::location(line_no, c + 1) + ": non-finite value",
                                 InputError::Kind::schema, line_no, c + 1);
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) {
        throw InputError("empty feature input", InputError::Kind::empty);
    }
    Eigen::MatrixXd data(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                values[r * width + c];
        }
    }
    if (has_frame_ids) {
        return FeatureMatrix(std::move(data), std::move(ids));
    }
    return FeatureMatrix(std::move(data));
}

inline FeatureMatrix load_feature_matrix(const std::filesystem::path& path,
                                         bool has_frame_ids = false) {
    return parse_feature_csv(detail::read_file(path), has_frame_ids);
}

/// Writes features losslessly (17 significant digits).
inline std::string feature_csv(const FeatureMatrix& x) {
    std::string out;
    const auto& d = x.data();
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
        if (x.frame_ids()) {
            out += std::to_string((*x.frame_ids())[static_cast<std::size_t>(r)]);
            out += ',';
        }
        for (Eigen::Index c = 0; c < d.cols(); ++c) {
            if (c > 0) {
                out += ',';
            }
            out += format_number(d(r, c), 17);
        }
        out += '\n';
    }
    return out;
}

inline void write_feature_matrix(const std::filesystem::path& path, const FeatureMatrix& x) {
    detail::write_file(path, feature_csv(x));
}

/// Parses labels from a single comma-separated line or one value per line.
inline LabelSequence parse_labels(std::string_view text) {
    LabelSequence out;
    std::size_t line_no = 0;
    for (std::string_view line : detail::split(text, '\n')) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        std::size_t col = 0;
        for (std::string_view cell : detail::split(line, ',')) {
            ++col;
            long long v = 0;
            if (!detail::parse_number(cell, v)) {
                throw InputError(detail::location(line_no, col) + ": cannot parse label '" +
                                     std::string(detail::trim(cell)) + "'",
                                 InputError::Kind::parse, line_no, col);
            }
            if (v < 0) {
                throw InputError(detail::location(line_no, col) + ": negative class " +
                                     std::to_string(v),
                                 InputError::Kind::schema, line_no, col);
            }
            out.classes.push_back(static_cast<int>(v));
        }
    }
    if (out.classes.empty()) {
        throw InputError("empty label input", InputError::Kind::empty);
    }
    return out;
}

inline LabelSequence load_labels(const std::filesystem::path& path) {
    return parse_labels(detail::read_file(path));
}

/// Loads labels and checks there is exactly one per frame.
inline LabelSequence load_labels(const std::filesystem::path& path, Index frames) {
    LabelSequence labels = load_labels(path);
    if (labels.size() != frames) {
        throw InputError("label count " + std::to_string(labels.size()) +
                             " does not match frame count " + std::to_string(frames),
                         InputError::Kind::length_mismatch);
    }
    return labels;
}

inline std::string labels_csv(const LabelSequence& labels) {
    std::string out;
    for (int c : labels.classes) {
        out += std::to_string(c);
        out += '\n';
    }
    return out;
}

/// Single-column CSV; values are written with 17 significant digits so that
/// re-reading reproduces them exactly.
inline std::string embedding_csv(const Embedding1D& e) {
    std::string out;
    for (double v : e.values) {
        out += format_number(v, 17);
        out += '\n';
    }
    return out;
}

inline Embedding1D load_embedding(const std::filesystem::path& path, std::string source) {
    const FeatureMatrix m = load_feature_matrix(path);
    if (m.dims() != 1) {
        throw InputError("embedding CSV must have exactly one column, found " +
                         std::to_string(m.dims()));
    }
    Embedding1D e;
    e.values.assign(m.data().data(), m.data().data() + m.frames());
    e.source = std::move(source);
    return e;
}

inline nlohmann::ordered_json to_json(const Segmentation& s) {
    nlohmann::ordered_json j;
    j["changepoints"] = s.changepoints;
    j["beta"] = round_sig(s.beta);
    j["num_segments"] = s.num_segments();
    j["total_cost"] = round_sig(s.total_cost);
    j["algorithm"] = s.algorithm;
    j["embedding"] = s.embedding;
    return j;
}

inline Segmentation segmentation_from_json(const nlohmann::json& j) {
    try {
        Segmentation s;
        s.changepoints = j.at("changepoints").get<std::vector<Index>>();
        s.beta = j.at("beta").get<double>();
        s.total_cost = j.at("total_cost").get<double>();
        s.algorithm = j.value("algorithm", std::string{});
        s.embedding = j.value("embedding", std::string{});
        if (j.contains("num_segments") && j["num_segments"].get<Index>() != s.num_segments()) {
            throw InputError("num_segments disagrees with changepoints");
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("segmentation JSON: ") + e.what());
    }
}

inline Segmentation load_segmentation(const std::filesystem::path& path) {
    const std::string text = detail::read_file(path);
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw InputError("'" + path.string() + "' is not valid JSON", InputError::Kind::parse);
    }
    return segmentation_from_json(j);
}

} // namespace seglens
