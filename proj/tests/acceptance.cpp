// Acceptance gate: every headline criterion at its stated tolerance, one
// PASS/FAIL line each. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <seglens/seglens.hpp>

#include "oracles.hpp"

using namespace seglens;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

SearchParams params_with(double beta, Index min_len = 1) {
    SearchParams p;
    p.beta = beta;
    p.min_len = min_len;
    return p;
}

double log_uniform(Rng& rng, double lo, double hi) {
    return lo * std::exp(rng.uniform() * std::log(hi / lo));
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

Outcome pelt_matches_op() {
    const auto start = Clock::now();
    int mismatches = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto x = oracle::random_signal(seed, 20, 200, 5);
        Rng rng(seed ^ 0xACCE55ULL);
        const double beta = log_uniform(rng, 0.1, 50.0);
        const GaussianCost model(x);
        const auto a = pelt(model, params_with(beta));
        const auto b = opt_partition(model, params_with(beta));
        const double rel = std::abs(a.total_cost - b.total_cost) /
                           std::max({1.0, std::abs(a.total_cost), std::abs(b.total_cost)});
        worst = std::max(worst, rel);
        if (a.changepoints != b.changepoints || rel > 1e-9) {
            ++mismatches;
        }
    }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < 30.0,
            fmt("mismatches %.0f, worst relative cost gap %.3g, %.2f s (limit 30 s)", mismatches,
                worst, elapsed)};
}

Outcome op_matches_brute_force() {
    int failures = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto x = oracle::random_signal(seed * 7919, 2, 14, 4);
        Rng rng(seed);
        const double beta = log_uniform(rng, 0.1, 50.0);
        const auto best = oracle::brute_force_penalized(x, beta);
        const auto got = opt_partition(GaussianCost(x), params_with(beta));
        const double rel = std::abs(got.total_cost - best.cost) /
                           std::max({1.0, std::abs(got.total_cost), std::abs(best.cost)});
        worst = std::max(worst, rel);
        if (rel > 1e-9) {
            ++failures;
        }
    }
    return {failures == 0, fmt("failures %.0f of 50, worst relative gap %.3g", failures, worst)};
}

Outcome dpk_matches_exhaustive() {
    int failures = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto x = oracle::random_signal(seed * 104729, 4, 15, 3);
        Rng rng(seed);
        const Index k = std::min<Index>(rng.uniform_int(1, 3), x.size() - 1);
        const auto best = oracle::brute_force_fixed_k(x, k);
        const auto got = dp_fixed_k(GaussianCost(x), k);
        const double cost = oracle::direct_total(x, got.changepoints, 0.0);
        const double rel =
            std::abs(cost - best.cost) / std::max({1.0, std::abs(cost), std::abs(best.cost)});
        worst = std::max(worst, rel);
        if (got.changepoints.size() != k || rel > 1e-9) {
            ++failures;
        }
    }
    return {failures == 0, fmt("failures %.0f of 50, worst relative gap %.3g", failures, worst)};
}

Outcome penalty_monotonicity() {
    const auto grid = geometric_grid(0.5, 500.0, 20);
    int violations = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const GaussianCost model(oracle::random_signal(seed * 31, 50, 300, 6));
        Index previous = std::numeric_limits<Index>::max();
        for (double beta : grid) {
            const Index count = pelt(model, params_with(beta)).changepoints.size();
            if (count > previous) {
                ++violations;
            }
            previous = count;
        }
    }
    return {violations == 0, fmt("violations %.0f over 50 signals x 20 penalties", violations)};
}

Outcome invariance_suite() {
    int sign_failures = 0;
    int scale_failures = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto x = oracle::random_signal(seed * 53, 30, 200, 5);
        Rng rng(seed);
        const double beta = log_uniform(rng, 1.0, 50.0);
        const auto base = pelt(GaussianCost(x), params_with(beta)).changepoints;

        std::vector<double> flipped = x;
        for (double& v : flipped) {
            v = -v;
        }
        if (pelt(GaussianCost(flipped), params_with(beta)).changepoints != base) {
            ++sign_failures;
        }
        for (double c : {0.1, 3.0, 100.0}) {
            std::vector<double> scaled = x;
            for (double& v : scaled) {
                v *= c;
            }
            const GaussianCost model(scaled, kDefaultVarFloor * c * c);
            if (pelt(model, params_with(beta)).changepoints != base) {
                ++scale_failures;
            }
        }
    }

    double worst_translation = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed * 977);
        const Eigen::Index rows = 40 + static_cast<Eigen::Index>(rng.uniform_int(0, 60));
        const Eigen::Index cols = 2 + static_cast<Eigen::Index>(rng.uniform_int(0, 20));
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                m(r, c) = rng.normal() * static_cast<double>(c + 1);
            }
        }
        Eigen::RowVectorXd offset(cols);
        for (Eigen::Index c = 0; c < cols; ++c) {
            offset(c) = 100.0 * rng.normal();
        }
        const auto a = pca_embed(FeatureMatrix(m)).embedding.values;
        const auto b = pca_embed(FeatureMatrix(Eigen::MatrixXd(m.rowwise() + offset))).embedding.values;
        for (std::size_t i = 0; i < a.size(); ++i) {
            worst_translation = std::max(worst_translation, std::abs(a[i] - b[i]));
        }
    }
    return {sign_failures == 0 && scale_failures == 0 && worst_translation <= 1e-8,
            fmt("sign-flip failures %.0f, scale failures %.0f, PCA translation max diff %.3g "
                "(limit 1e-8)",
                sign_failures, scale_failures, worst_translation)};
}

double synthetic_auc(std::uint64_t seed, double shift) {
    const auto runs = place_runs(seed ^ 0x5EED0F2A1B3C4D5EULL, 2000, 8, 40, 150);
    const auto s = gen_feature_matrix(seed, 2000, 64, runs, shift);
    const GaussianCost model(pca_embed(s.features).embedding);
    return roc_sweep(model, s.truth, default_beta_grid(), 2, {}, sweep_threads_from_env()).auc;
}

Outcome synthetic_end_to_end() {
    const auto start = Clock::now();
    double shifted = 0.0;
    double null = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        shifted += synthetic_auc(seed, 3.0) / 10.0;
        null += synthetic_auc(seed, 0.0) / 10.0;
    }
    const double elapsed = seconds_since(start);
    return {shifted >= 0.90 && null >= 0.4 && null <= 0.6 && elapsed < 60.0,
            fmt("mean AUC shift 3: %.4f (>= 0.90), shift 0: %.4f (in [0.4, 0.6]), %.2f s", shifted,
                null, elapsed)};
}

double time_pelt(Index frames) {
    std::vector<SegmentSpec> specs;
    for (int k = 0; k < 8; ++k) {
        specs.push_back({frames / 8, (k % 2 == 0) ? 0.0 : 2.0, 1.0 + 0.25 * (k % 3)});
    }
    const auto sig = gen_piecewise_gaussian(frames, specs);
    const GaussianCost model(sig.signal);
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 3; ++rep) {
        const auto start = Clock::now();
        const auto seg = pelt(model, params_with(50.0));
        best = std::min(best, seconds_since(start));
        if (seg.changepoints.empty()) {
            return -1.0;
        }
    }
    return best;
}

Outcome pelt_scaling() {
    const double t1 = time_pelt(12500);
    const double t2 = time_pelt(25000);
    const double t3 = time_pelt(50000);
    const double r1 = t2 / t1;
    const double r2 = t3 / t2;
    std::ostringstream detail;
    detail << "times " << t1 << " / " << t2 << " / " << t3 << " s, doubling ratios " << r1
           << " and " << r2 << " (limit 3), T=50000 limit 5 s";
    return {t1 > 0 && r1 <= 3.0 && r2 <= 3.0 && t3 < 5.0, detail.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome cli_determinism() {
    const fs::path dir = fs::path(SEGLENS_TEST_TMP) / "acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = SEGLENS_CLI;
    auto sh = [](const std::string& cmd) { return std::system(cmd.c_str()); };
    int status = sh("\"" + cli + "\" synth --output \"" + (dir / "fx").string() +
                    "\" --seed 7 --no-timestamp");
    std::string outputs[2];
    for (int i = 0; i < 2 && status == 0; ++i) {
        const fs::path out = dir / ("run" + std::to_string(i) + ".json");
        status = sh("\"" + cli + "\" pipeline --input \"" + (dir / "fx" / "features.csv").string() +
                    "\" --labels \"" + (dir / "fx" / "labels.csv").string() + "\" --output \"" +
                    out.string() + "\" --tolerance 2 --no-timestamp");
        outputs[i] = slurp(out) + slurp(dir / ("run" + std::to_string(i) + ".eval.json"));
    }
    const bool same = status == 0 && !outputs[0].empty() && outputs[0] == outputs[1];
    return {same, same ? "segmentation and report JSON byte-identical across two runs"
                       : "runs differ or failed (status " + std::to_string(status) + ")"};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle exactness: pelt == opt_partition on 200 random signals", pelt_matches_op},
        {"exhaustive ground truth: opt_partition == brute force (T <= 14)", op_matches_brute_force},
        {"dp_fixed_k exactness vs K-subset enumeration (T <= 15, K <= 3)", dpk_matches_exhaustive},
        {"penalty monotonicity on a 20-point grid", penalty_monotonicity},
        {"invariance suite: sign flip, positive scale, PCA translation", invariance_suite},
        {"synthetic end-to-end AUC (T=2000, p=64, 8 runs)", synthetic_end_to_end},
        {"near-linear PELT scaling (T = 12500, 25000, 50000)", pelt_scaling},
        {"CLI pipeline determinism with --no-timestamp", cli_determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << o.detail << "]"
                  << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " failed")
              << std::endl;
    return failed == 0 ? 0 : 1;
}
