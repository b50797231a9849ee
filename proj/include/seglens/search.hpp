#pragma once

// Change-point search over a GaussianCost model.
//
// All dynamic programs break ties toward the smallest admissible last change
// point: candidates are scanned in increasing order and replaced only on a
// strictly smaller value.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "seglens/cost.hpp"
#include "seglens/error.hpp"
#include "seglens/signal.hpp"

namespace seglens {

struct SearchParams {
    double beta = 250.0;
    Index min_len = 1;
    /// Number of change points for the fixed-count search, optional cap for
    /// binary segmentation.
    std::optional<Index> max_changepoints;
    Index window_width = 5;
};

enum class Algorithm { pelt, op, binseg, window, dpk };

inline std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::pelt: return "pelt";
    case Algorithm::op: return "op";
    case Algorithm::binseg: return "binseg";
    case Algorithm::window: return "window";
    case Algorithm::dpk: return "dpk";
    }
    return "unknown";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& name) {
    for (auto a : {Algorithm::pelt, Algorithm::op, Algorithm::binseg, Algorithm::window,
                   Algorithm::dpk}) {
        if (to_string(a) == name) {
            return a;
        }
    }
    return std::nullopt;
}

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline void check_common(const GaussianCost& model, const SearchParams& params) {
    if (params.min_len < 1) {
        throw InfeasibleError("min_len must be at least 1");
    }
    if (!(params.beta >= 0.0) || !std::isfinite(params.beta)) {
        throw InfeasibleError("beta must be a finite non-negative number");
    }
    if (model.size() < params.min_len) {
        throw InfeasibleError("signal of length " + std::to_string(model.size()) +
                              " is shorter than min_len " + std::to_string(params.min_len));
    }
}

inline std::vector<Index> backtrack(const std::vector<Index>& last_change, Index length) {
    std::vector<Index> cps;
    for (Index s = last_change[length]; s > 0; s = last_change[s]) {
        cps.push_back(s);
    }
    std::reverse(cps.begin(), cps.end());
    return cps;
}

inline Segmentation finish(const GaussianCost& model, std::vector<Index> cps, double beta,
                           Algorithm algorithm) {
    Segmentation out;
    out.total_cost = model.penalized_cost(cps, beta);
    out.changepoints = std::move(cps);
    out.beta = beta;
    out.algorithm = to_string(algorithm);
    out.embedding = model.source();
    return out;
}

} // namespace detail

/// Exact penalized optimal partitioning, O(T^2) cost evaluations.
///
///     F(0) = -beta,   F(s) = min_t F(t) + C[t, s) + beta
///
/// over last change points t that leave both [t, s) and the prefix [0, t)
/// feasible under min_len.
inline Segmentation opt_partition(const GaussianCost& model, const SearchParams& params) {
    detail::check_common(model, params);
    const Index n = model.size();
    const Index min_len = params.min_len;
    const double beta = params.beta;

    std::vector<double> best(n + 1, detail::kInf);
    std::vector<Index> last_change(n + 1, 0);
    best[0] = -beta;
    for (Index s = min_len; s <= n; ++s) {
        double value = best[0] + model.cost(0, s) + beta;
        Index arg = 0;
        for (Index t = min_len; t + min_len <= s; ++t) {
            const double v = best[t] + model.cost(t, s) + beta;
            if (v < value) {
                value = v;
                arg = t;
            }
        }
        best[s] = value;
        last_change[s] = arg;
    }
    return detail::finish(model, detail::backtrack(last_change, n), beta, Algorithm::op);
}

/// Optimal partitioning with PELT pruning (constant K = 0).
///
/// Candidate t is dropped once F(t) + C[t, s) > F(s). Splitting a segment
/// never increases the unpenalized Gaussian cost, so for any s' >= s + min_len
///
///     F(t) + C[t, s') >= F(t) + C[t, s) + C[s, s') > F(s) + C[s, s')
///
/// and t can never beat s as last change point again. Because s only becomes
/// admissible min_len steps later, the drop takes effect at s + min_len. The
/// variance floor can break the splitting inequality for segments whose
/// sample variance straddles it; exactness holds whenever no such segment
/// decides the pruning.
inline Segmentation pelt(const GaussianCost& model, const SearchParams& params) {
    detail::check_common(model, params);
    const Index n = model.size();
    const Index min_len = params.min_len;
    const double beta = params.beta;
    constexpr Index kNever = std::numeric_limits<Index>::max();

    struct Candidate {
        Index t;
        Index expires;
        double partial;
    };

    std::vector<double> best(n + 1, detail::kInf);
    std::vector<Index> last_change(n + 1, 0);
    best[0] = -beta;
    std::vector<Candidate> candidates;
    candidates.reserve(64);

    for (Index s = min_len; s <= n; ++s) {
        const Index fresh = s - min_len;
        if (fresh == 0 || fresh >= min_len) {
            candidates.push_back({fresh, kNever, 0.0});
        }
        std::erase_if(candidates, [s](const Candidate& c) { return c.expires <= s; });

        double value = detail::kInf;
        Index arg = 0;
        for (auto& c : candidates) {
            c.partial = best[c.t] + model.cost(c.t, s);
            const double v = c.partial + beta;
            if (v < value) {
                value = v;
                arg = c.t;
            }
        }
        best[s] = value;
        last_change[s] = arg;

        for (auto& c : candidates) {
            if (c.expires == kNever && c.partial > value) {
                c.expires = s + min_len;
            }
        }
    }
    return detail::finish(model, detail::backtrack(last_change, n), beta, Algorithm::pelt);
}

/// Exact minimum of the unpenalized cost over segmentations with exactly
/// `count` change points, O(count * T^2). The result records beta = 0.
inline Segmentation dp_fixed_k(const GaussianCost& model, Index count, Index min_len = 1) {
    if (min_len < 1) {
        throw InfeasibleError("min_len must be at least 1");
    }
    const Index n = model.size();
    if (count < 1 || n / min_len < 1 || count > n / min_len - 1) {
        throw InfeasibleError("cannot place " + std::to_string(count) +
                              " change points in a signal of length " + std::to_string(n) +
                              " with min_len " + std::to_string(min_len));
    }

    // best[k][s]: cost of [0, s) split by exactly k change points.
    std::vector<std::vector<double>> best(count + 1, std::vector<double>(n + 1, detail::kInf));
    std::vector<std::vector<Index>> arg(count + 1, std::vector<Index>(n + 1, 0));
    for (Index s = min_len; s <= n; ++s) {
        best[0][s] = model.cost(0, s);
    }
    for (Index k = 1; k <= count; ++k) {
        const Index first_end = (k + 1) * min_len;
        // Prefixes that still leave room for the remaining count - k segments.
        const Index last_end = k == count ? n : n - (count - k) * min_len;
        for (Index s = first_end; s <= last_end; ++s) {
            double value = detail::kInf;
            Index where = 0;
            for (Index t = k * min_len; t + min_len <= s; ++t) {
                if (best[k - 1][t] == detail::kInf) {
                    continue;
                }
                const double v = best[k - 1][t] + model.cost(t, s);
                if (v < value) {
                    value = v;
                    where = t;
                }
            }
            best[k][s] = value;
            arg[k][s] = where;
        }
    }

    std::vector<Index> cps(count);
    Index end = n;
    for (Index k = count; k >= 1; --k) {
        end = arg[k][end];
        cps[k - 1] = end;
    }
    return detail::finish(model, std::move(cps), 0.0, Algorithm::dpk);
}

/// Greedy binary segmentation: repeatedly split the segment whose best single
/// split lowers the cost the most, while that decrease is at least beta.
inline Segmentation binseg(const GaussianCost& model, const SearchParams& params) {
    detail::check_common(model, params);
    const Index min_len = params.min_len;

    struct Piece {
        Index begin;
        Index end;
        Index split;
        double gain;
    };
    auto best_split = [&](Index a, Index b) {
        Piece p{a, b, 0, -detail::kInf};
        if (b - a < 2 * min_len) {
            return p;
        }
        double value = detail::kInf;
        for (Index t = a + min_len; t + min_len <= b; ++t) {
            const double v = model.cost(a, t) + model.cost(t, b);
            if (v < value) {
                value = v;
                p.split = t;
            }
        }
        p.gain = model.cost(a, b) - value;
        return p;
    };

    std::vector<Piece> pieces{best_split(0, model.size())};
    std::vector<Index> cps;
    while (!params.max_changepoints || cps.size() < *params.max_changepoints) {
        auto it = std::max_element(pieces.begin(), pieces.end(),
                                   [](const Piece& l, const Piece& r) { return l.gain < r.gain; });
        if (it == pieces.end() || it->gain == -detail::kInf || it->gain < params.beta) {
            break;
        }
        const Piece chosen = *it;
        pieces.erase(it);
        cps.push_back(chosen.split);
        pieces.push_back(best_split(chosen.begin, chosen.split));
        pieces.push_back(best_split(chosen.split, chosen.end));
        // Keep pieces in signal order so gain ties resolve to the leftmost one.
        std::sort(pieces.begin(), pieces.end(),
                  [](const Piece& l, const Piece& r) { return l.begin < r.begin; });
    }
    std::sort(cps.begin(), cps.end());
    return detail::finish(model, std::move(cps), params.beta, Algorithm::binseg);
}

/// Two-window discrepancy d(t) = C[t-w, t+w) - C[t-w, t) - C[t, t+w) for
/// t in [w, T-w]. Entry i corresponds to t = w + i.
inline std::vector<double> window_discrepancy(const GaussianCost& model, Index width) {
    const Index n = model.size();
    if (width < 2 || n < 2 * width) {
        throw InfeasibleError("window search needs width >= 2 and T >= 2 * width (T = " +
                              std::to_string(n) + ", width = " + std::to_string(width) + ")");
    }
    std::vector<double> d;
    d.reserve(n - 2 * width + 1);
    for (Index t = width; t + width <= n; ++t) {
        d.push_back(model.cost(t - width, t + width) - model.cost(t - width, t) -
                    model.cost(t, t + width));
    }
    return d;
}

/// Sliding-window search: local maxima of the discrepancy above beta, taken
/// greedily by decreasing discrepancy with no two detections within w of
/// each other (nor closer than min_len).
inline Segmentation window_detect(const GaussianCost& model, const SearchParams& params) {
    detail::check_common(model, params);
    const Index n = model.size();
    const Index w = params.window_width;
    const std::vector<double> d = window_discrepancy(model, w);

    std::vector<Index> peaks;
    for (Index i = 0; i < d.size(); ++i) {
        if (!(d[i] > params.beta)) {
            continue;
        }
        const bool left_ok = i == 0 || d[i] >= d[i - 1];
        const bool right_ok = i + 1 == d.size() || d[i] >= d[i + 1];
        if (left_ok && right_ok) {
            peaks.push_back(i);
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](Index l, Index r) { return d[l] > d[r]; });

    std::vector<Index> cps;
    for (Index i : peaks) {
        const Index t = w + i;
        if (t < params.min_len || n - t < params.min_len) {
            continue;
        }
        const bool clear = std::none_of(cps.begin(), cps.end(), [&](Index s) {
            const Index gap = s > t ? s - t : t - s;
            return gap <= w || gap < params.min_len;
        });
        if (clear) {
            cps.push_back(t);
        }
    }
    std::sort(cps.begin(), cps.end());
    return detail::finish(model, std::move(cps), params.beta, Algorithm::window);
}

/// Runs the named algorithm. For Algorithm::dpk, params.max_changepoints
/// supplies the change-point count.
inline Segmentation detect(const GaussianCost& model, Algorithm algorithm,
                           const SearchParams& params) {
    switch (algorithm) {
    case Algorithm::pelt: return pelt(model, params);
    case Algorithm::op: return opt_partition(model, params);
    case Algorithm::binseg: return binseg(model, params);
    case Algorithm::window: return window_detect(model, params);
    case Algorithm::dpk:
        if (!params.max_changepoints) {
            throw InfeasibleError("fixed-count search needs a change-point count");
        }
        return dp_fixed_k(model, *params.max_changepoints, params.min_len);
    }
    throw InfeasibleError("unknown algorithm");
}

} // namespace seglens
