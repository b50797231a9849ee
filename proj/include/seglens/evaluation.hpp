#pragma once

// Scoring detected boundaries against expert labels: transition extraction,
// tolerance matching, per-penalty TPR/FPR and the ROC/AUC of a penalty sweep.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "seglens/cost.hpp"
#include "seglens/error.hpp"
#include "seglens/io.hpp"
#include "seglens/search.hpp"
#include "seglens/signal.hpp"

namespace seglens {

/// Indices t in [1, T-1] where class(t-1) != class(t).
struct TransitionTruth {
    std::vector<Index> transitions;
    Index length = 0;

    /// Candidate slots that are not transitions: (T - 1) - |truth|.
    [[nodiscard]] Index negatives() const {
        return length > 0 ? length - 1 - transitions.size() : 0;
    }
};

inline TransitionTruth transitions_from_labels(const LabelSequence& labels) {
    TransitionTruth out;
    out.length = labels.size();
    for (Index t = 1; t < labels.size(); ++t) {
        if (labels.classes[t] != labels.classes[t - 1]) {
            out.transitions.push_back(t);
        }
    }
    return out;
}

struct MatchResult {
    Index tp = 0;
    Index fp = 0;
    Index fn = 0;
    /// (predicted, true) index pairs.
    std::vector<std::pair<Index, Index>> matches;
};

/// One-to-one greedy matching in increasing distance; a prediction p may
/// match a true transition t when |p - t| <= tolerance. Distance ties go to
/// the lower predicted index, then the lower true index.
inline MatchResult match_boundaries(const std::vector<Index>& predicted,
                                    const TransitionTruth& truth, Index tolerance) {
    const auto& tr = truth.transitions;
    std::vector<std::tuple<Index, Index, Index>> pairs; // distance, pred slot, truth slot
    for (Index i = 0; i < predicted.size(); ++i) {
        const Index p = predicted[i];
        const Index lo = p > tolerance ? p - tolerance : 0;
        auto it = std::lower_bound(tr.begin(), tr.end(), lo);
        for (; it != tr.end() && *it <= p + tolerance; ++it) {
            const Index dist = *it > p ? *it - p : p - *it;
            pairs.emplace_back(dist, i, static_cast<Index>(it - tr.begin()));
        }
    }
    std::sort(pairs.begin(), pairs.end());

    std::vector<bool> pred_used(predicted.size(), false);
    std::vector<bool> truth_used(tr.size(), false);
    MatchResult out;
    for (const auto& [dist, i, j] : pairs) {
        if (pred_used[i] || truth_used[j]) {
            continue;
        }
        pred_used[i] = truth_used[j] = true;
        out.matches.emplace_back(predicted[i], tr[j]);
    }
    std::sort(out.matches.begin(), out.matches.end());
    out.tp = out.matches.size();
    out.fp = predicted.size() - out.tp;
    out.fn = tr.size() - out.tp;
    return out;
}

inline MatchResult match_boundaries(const Segmentation& predicted, const TransitionTruth& truth,
                                    Index tolerance) {
    return match_boundaries(predicted.changepoints, truth, tolerance);
}

struct RateRow {
    double beta = 0.0;
    Index tp = 0;
    Index fp = 0;
    Index fn = 0;
    double tpr = 0.0;
    double fpr = 0.0;
};

struct EvalReport {
    std::vector<RateRow> rows;
    /// (FPR, TPR) sorted by FPR then TPR, including (0, 0) and (1, 1).
    std::vector<std::pair<double, double>> roc_points;
    double auc = 0.0;
    double best_beta = 0.0;
    Index tolerance = 0;
};

/// Pooled counts for one penalty across any number of videos.
struct PooledCounts {
    Index tp = 0;
    Index fp = 0;
    Index fn = 0;
    Index positives = 0;
    Index negatives = 0;

    void add(const MatchResult& m, const TransitionTruth& truth) {
        tp += m.tp;
        fp += m.fp;
        fn += m.fn;
        positives += truth.transitions.size();
        negatives += truth.negatives();
    }

    [[nodiscard]] RateRow row(double beta) const {
        RateRow r;
        r.beta = beta;
        r.tp = tp;
        r.fp = fp;
        r.fn = fn;
        r.tpr = positives > 0 ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0;
        // With a tolerance, unmatched predictions can outnumber the non-transition
        // slots; the rate is capped at 1.
        r.fpr = negatives > 0
                    ? std::min(1.0, static_cast<double>(fp) / static_cast<double>(negatives))
                    : 0.0;
        return r;
    }
};

/// Adds the (0,0) and (1,1) anchors, sorts, and integrates by trapezoid.
inline void finish_report(EvalReport& report) {
    report.roc_points.clear();
    report.roc_points.emplace_back(0.0, 0.0);
    for (const auto& r : report.rows) {
        report.roc_points.emplace_back(r.fpr, r.tpr);
    }
    report.roc_points.emplace_back(1.0, 1.0);
    std::sort(report.roc_points.begin(), report.roc_points.end());

    double area = 0.0;
    for (std::size_t i = 1; i < report.roc_points.size(); ++i) {
        const auto [x0, y0] = report.roc_points[i - 1];
        const auto [x1, y1] = report.roc_points[i];
        area += (x1 - x0) * (y0 + y1) * 0.5;
    }
    report.auc = std::clamp(area, 0.0, 1.0);

    double best = -2.0;
    for (const auto& r : report.rows) {
        if (r.tpr - r.fpr > best) {
            best = r.tpr - r.fpr;
            report.best_beta = r.beta;
        }
    }
}

/// `count` log-spaced values from lo to hi inclusive.
inline std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
    if (count == 0 || !(lo > 0.0) || !(hi >= lo)) {
        throw InfeasibleError("geometric grid needs 0 < lo <= hi and count >= 1");
    }
    std::vector<double> grid(count, lo);
    for (std::size_t i = 1; i < count; ++i) {
        grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return grid;
}

/// Default sweep: 20 log-spaced penalties from 25 to 2500. The lower end sits
/// above |log(1e-8)| ~ 18.4, below which isolating single frames at the
/// variance floor pays for itself and the detector fragments everything.
inline std::vector<double> default_beta_grid() { return geometric_grid(25.0, 2500.0, 20); }

/// Scores one finished segmentation.
inline EvalReport evaluate_segmentation(const Segmentation& seg, const TransitionTruth& truth,
                                        Index tolerance) {
    PooledCounts counts;
    counts.add(match_boundaries(seg, truth, tolerance), truth);
    EvalReport report;
    report.tolerance = tolerance;
    report.rows.push_back(counts.row(seg.beta));
    finish_report(report);
    return report;
}

/// One video in a pooled sweep.
struct SweepCase {
    const GaussianCost* model = nullptr;
    TransitionTruth truth;
};

/// Worker count from SEGLENS_THREADS, else the hardware concurrency.
inline unsigned sweep_threads_from_env() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SEGLENS_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) {
            n = std::min<unsigned>(n, static_cast<unsigned>(v));
        }
    }
    return n;
}

/// Runs PELT at every penalty on every case, pooling TP/FP/FN across cases
/// before computing rates. Penalties are de-duplicated and sorted, so the
/// report does not depend on grid order or repeats. The best penalty
/// maximises TPR - FPR (smallest penalty on ties).
inline EvalReport roc_sweep(const std::vector<SweepCase>& cases, std::vector<double> betas,
                            Index tolerance, SearchParams base = {}, unsigned threads = 1) {
    if (betas.empty()) {
        throw InfeasibleError("penalty grid is empty");
    }
    for (double b : betas) {
        if (!(b > 0.0) || !std::isfinite(b)) {
            throw InfeasibleError("penalties must be positive and finite");
        }
    }
    for (const auto& c : cases) {
        if (c.model == nullptr || c.model->size() != c.truth.length) {
            throw InputError("signal length does not match label length",
                             InputError::Kind::length_mismatch);
        }
    }
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end()), betas.end());

    std::vector<RateRow> rows(betas.size());
    auto run_one = [&](std::size_t i) {
        PooledCounts counts;
        SearchParams params = base;
        params.beta = betas[i];
        for (const auto& c : cases) {
            counts.add(match_boundaries(pelt(*c.model, params), c.truth, tolerance), c.truth);
        }
        rows[i] = counts.row(betas[i]);
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(betas.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < betas.size(); ++i) {
            run_one(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < betas.size(); i = next++) {
                    run_one(i);
                }
            });
        }
    }

    EvalReport report;
    report.tolerance = tolerance;
    report.rows = std::move(rows);
    finish_report(report);
    return report;
}

inline EvalReport roc_sweep(const GaussianCost& model, const TransitionTruth& truth,
                            std::vector<double> betas, Index tolerance, SearchParams base = {},
                            unsigned threads = 1) {
    return roc_sweep(std::vector<SweepCase>{{&model, truth}}, std::move(betas), tolerance, base,
                     threads);
}

inline std::string roc_csv(const EvalReport& report) {
    std::string out = "beta,tp,fp,fn,tpr,fpr\n";
    for (const auto& r : report.rows) {
        out += format_number(r.beta) + ',' + std::to_string(r.tp) + ',' + std::to_string(r.fp) +
               ',' + std::to_string(r.fn) + ',' + format_number(r.tpr) + ',' +
               format_number(r.fpr) + '\n';
    }
    return out;
}

inline nlohmann::ordered_json to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["auc"] = round_sig(report.auc);
    j["best_beta"] = round_sig(report.best_beta);
    j["tolerance"] = report.tolerance;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"beta", round_sig(r.beta)},
                        {"tp", r.tp},
                        {"fp", r.fp},
                        {"fn", r.fn},
                        {"tpr", round_sig(r.tpr)},
                        {"fpr", round_sig(r.fpr)}});
    }
    j["rows"] = std::move(rows);
    auto roc = nlohmann::ordered_json::array();
    for (const auto& [fpr, tpr] : report.roc_points) {
        roc.push_back({round_sig(fpr), round_sig(tpr)});
    }
    j["roc"] = std::move(roc);
    return j;
}

} // namespace seglens
