// Library walk-through: synthesise a feature stream with abnormal runs,
// project it with PCA, segment it with PELT and sweep the penalty.
//
//   seglens_roc_demo [seed] [shift]

#include <cstdlib>
#include <iostream>

#include <seglens/seglens.hpp>

int main(int argc, char** argv) {
    using namespace seglens;
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
    const double shift = argc > 2 ? std::strtod(argv[2], nullptr) : 3.0;

    const auto runs = place_runs(seed ^ 0x5EED0F2A1B3C4D5EULL, 2000, 8, 40, 150);
    const SyntheticFeatures data = gen_feature_matrix(seed, 2000, 64, runs, shift);

    const PcaResult pca = pca_embed(data.features);
    std::cout << "explained variance of PC1: " << format_number(pca.explained_variance_ratio, 4)
              << "\n";

    const GaussianCost model(pca.embedding);
    SearchParams params;
    params.beta = 250.0;
    const Segmentation seg = pelt(model, params);
    const MatchResult m = match_boundaries(seg, data.truth, 2);
    std::cout << "beta 250: " << seg.changepoints.size() << " change points, " << m.tp << " of "
              << data.truth.transitions.size() << " transitions within 2 frames\n";

    const EvalReport report = roc_sweep(model, data.truth, default_beta_grid(), 2);
    std::cout << roc_csv(report);
    std::cout << "auc " << format_number(report.auc, 4) << ", best beta "
              << format_number(report.best_beta, 4) << "\n";
    return 0;
}
