#pragma once

// Projection of per-frame feature matrices to a one-dimensional signal:
// centred PCA and kernel PCA with cosine, Gaussian (RBF) or linear kernels.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seglens/error.hpp"
#include "seglens/io.hpp"
#include "seglens/signal.hpp"

namespace seglens {

enum class EmbeddingMethod { pca, kpca_cosine, kpca_rbf, kpca_linear };

inline std::string to_string(EmbeddingMethod m) {
    switch (m) {
    case EmbeddingMethod::pca: return "pca";
    case EmbeddingMethod::kpca_cosine: return "kpca-cosine";
    case EmbeddingMethod::kpca_rbf: return "kpca-rbf";
    case EmbeddingMethod::kpca_linear: return "kpca-linear";
    }
    return "unknown";
}

inline std::optional<EmbeddingMethod> parse_embedding_method(const std::string& name) {
    for (auto m : {EmbeddingMethod::pca, EmbeddingMethod::kpca_cosine, EmbeddingMethod::kpca_rbf,
                   EmbeddingMethod::kpca_linear}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

struct EmbeddingConfig {
    EmbeddingMethod method = EmbeddingMethod::pca;
    /// RBF bandwidth; when unset the median heuristic is used.
    std::optional<double> gamma;
};

/// Symmetric T x T kernel matrix.
struct GramMatrix {
    Eigen::MatrixXd K;
};

struct PcaResult {
    Embedding1D embedding;
    double explained_variance_ratio = 0.0;
    /// Unit loading vector of the first principal axis (length p).
    Eigen::VectorXd component;
};

/// Dense symmetric eigen-decomposition is used up to this many frames for
/// kernel PCA; larger Gram matrices use power iteration.
inline constexpr Index kDenseEigenLimit = 2000;
inline constexpr double kPowerTolerance = 1e-10;
inline constexpr int kPowerMaxIterations = 10000;
inline constexpr double kDegenerateEigenvalue = 1e-12;

namespace detail {

/// Flips v so that its entry of largest magnitude (first one on ties) is
/// positive. Returns the applied sign.
inline double fix_sign(Eigen::VectorXd& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (std::abs(v(i)) > std::abs(v(best))) {
            best = i;
        }
    }
    if (v(best) < 0.0) {
        v = -v;
        return -1.0;
    }
    return 1.0;
}

inline Eigen::MatrixXd centered(const Eigen::MatrixXd& x) {
    const Eigen::RowVectorXd mean = x.colwise().mean();
    return x.rowwise() - mean;
}

/// A * A^T with bitwise-exact symmetry.
inline Eigen::MatrixXd outer_gram(const Eigen::MatrixXd& a) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(a.rows(), a.rows());
    g.selfadjointView<Eigen::Lower>().rankUpdate(a);
    g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
    return g;
}

struct TopEigen {
    double value = 0.0;
    Eigen::VectorXd vector;
};

inline TopEigen top_eigen_dense(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw DegenerateError("eigen-decomposition did not converge");
    }
    const Eigen::Index last = sym.rows() - 1;
    return {solver.eigenvalues()(last), solver.eigenvectors().col(last)};
}

/// Power iteration for a positive semi-definite matrix.
inline TopEigen top_eigen_power(const Eigen::MatrixXd& psd) {
    const Eigen::Index n = psd.rows();
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // Deterministic start with no component forced to zero by centring.
        v(i) = 1.0 + 0.5 * std::sin(0.7548776662 * static_cast<double>(i + 1));
    }
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < kPowerMaxIterations; ++it) {
        Eigen::VectorXd w = psd * v;
        const double norm = w.norm();
        if (norm <= 0.0) {
            return {0.0, v};
        }
        lambda = v.dot(w);
        w /= norm;
        const double delta = (w - v).norm();
        v = std::move(w);
        if (delta < kPowerTolerance) {
            break;
        }
    }
    return {lambda, v};
}

inline TopEigen top_eigen(const Eigen::MatrixXd& sym) {
    return sym.rows() <= static_cast<Eigen::Index>(kDenseEigenLimit) ? top_eigen_dense(sym)
                                                                     : top_eigen_power(sym);
}

} // namespace detail

/// Subtracts each column's mean; frame ids are kept.
inline FeatureMatrix center_columns(const FeatureMatrix& x) {
    return FeatureMatrix(detail::centered(x.data()), x.frame_ids());
}

/// Projects the centred features onto their first principal axis.
///
/// The eigenproblem is solved on the p x p covariance when p <= T and on the
/// T x T inner-product matrix otherwise. The loading vector's entry of
/// largest magnitude is made positive.
inline PcaResult pca_embed(const FeatureMatrix& x) {
    const Index frames = x.frames();
    if (frames < 2) {
        throw DegenerateError("PCA needs at least two frames");
    }
    const Eigen::MatrixXd& raw = x.data();
    bool any_varying = false;
    for (Eigen::Index c = 0; c < raw.cols() && !any_varying; ++c) {
        any_varying = (raw.col(c).array() != raw(0, c)).any();
    }
    if (!any_varying) {
        throw DegenerateError("zero variance: every feature column is constant");
    }

    const Eigen::MatrixXd xc = detail::centered(raw);
    const double denom = static_cast<double>(frames - 1);
    PcaResult out;
    double top = 0.0;
    double total = 0.0;
    if (x.dims() <= frames) {
        const Eigen::MatrixXd cov = detail::outer_gram(xc.transpose()) / denom;
        auto eig = detail::top_eigen_dense(cov);
        top = eig.value;
        total = cov.trace();
        out.component = std::move(eig.vector);
    } else {
        const Eigen::MatrixXd inner = detail::outer_gram(xc) / denom;
        auto eig = detail::top_eigen_dense(inner);
        top = eig.value;
        total = inner.trace();
        if (top <= 0.0) {
            throw DegenerateError("zero variance after centring");
        }
        out.component = (xc.transpose() * eig.vector).normalized();
    }
    if (!(total > 0.0)) {
        throw DegenerateError("zero variance after centring");
    }
    detail::fix_sign(out.component);
    const Eigen::VectorXd projected = xc * out.component;
    out.embedding.values.assign(projected.data(), projected.data() + projected.size());
    out.embedding.source = "pca";
    out.explained_variance_ratio = std::clamp(top / total, 0.0, 1.0);
    return out;
}

/// Median-heuristic RBF bandwidth: 1 / (p * median squared pairwise
/// distance) over at most 1000 evenly spaced rows.
inline double default_rbf_gamma(const FeatureMatrix& x) {
    const Index frames = x.frames();
    const Index take = std::min<Index>(frames, 1000);
    std::vector<Eigen::Index> rows(take);
    for (Index i = 0; i < take; ++i) {
        rows[i] = static_cast<Eigen::Index>(i * frames / take);
    }
    std::vector<double> d2;
    d2.reserve(take * (take - 1) / 2);
    for (Index i = 0; i < take; ++i) {
        for (Index j = i + 1; j < take; ++j) {
            d2.push_back((x.data().row(rows[i]) - x.data().row(rows[j])).squaredNorm());
        }
    }
    const double p = static_cast<double>(x.dims());
    if (d2.empty()) {
        return 1.0 / p;
    }
    const std::size_t mid = d2.size() / 2;
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
    double median = d2[mid];
    if (d2.size() % 2 == 0) {
        const double lower =
            *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (median + lower);
    }
    return median > 0.0 ? 1.0 / (p * median) : 1.0 / p;
}

/// Kernel matrix over all frame pairs.
inline GramMatrix kernel_matrix(const FeatureMatrix& x, const EmbeddingConfig& cfg) {
    const Eigen::MatrixXd& d = x.data();
    switch (cfg.method) {
    case EmbeddingMethod::kpca_cosine: {
        const Eigen::VectorXd norms = d.rowwise().norm();
        std::vector<Index> zero_rows;
        for (Eigen::Index i = 0; i < norms.size(); ++i) {
            if (norms(i) == 0.0) {
                zero_rows.push_back(static_cast<Index>(i));
            }
        }
        if (!zero_rows.empty()) {
            std::string list;
            for (std::size_t i = 0; i < zero_rows.size() && i < 20; ++i) {
                list += (i ? "," : "") + std::to_string(zero_rows[i]);
            }
            if (zero_rows.size() > 20) {
                list += ",...";
            }
            throw DegenerateError("cosine kernel undefined for zero-norm rows: " + list);
        }
        const Eigen::MatrixXd unit = norms.cwiseInverse().asDiagonal() * d;
        Eigen::MatrixXd k = detail::outer_gram(unit);
        k = k.cwiseMax(-1.0).cwiseMin(1.0);
        return {std::move(k)};
    }
    case EmbeddingMethod::kpca_rbf: {
        const double gamma = cfg.gamma ? *cfg.gamma : default_rbf_gamma(x);
        if (!(gamma > 0.0)) {
            throw InfeasibleError("RBF gamma must be positive");
        }
        const Eigen::MatrixXd inner = detail::outer_gram(d);
        const Eigen::VectorXd sq = inner.diagonal();
        Eigen::MatrixXd k(inner.rows(), inner.cols());
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            for (Eigen::Index i = 0; i < k.rows(); ++i) {
                if (i == j) {
                    k(i, j) = 1.0;
                    continue;
                }
                const double dist2 = std::max(0.0, sq(i) + sq(j) - 2.0 * inner(i, j));
                k(i, j) = std::exp(-gamma * dist2);
            }
        }
        return {std::move(k)};
    }
    case EmbeddingMethod::kpca_linear:
        return {detail::outer_gram(d)};
    case EmbeddingMethod::pca:
        break;
    }
    throw InfeasibleError("kernel_matrix called without a kernel method");
}

/// K - 1K/T - K1/T + 1K1/T^2
inline Eigen::MatrixXd double_center(const Eigen::MatrixXd& k) {
    const Eigen::VectorXd row_mean = k.rowwise().mean();
    const Eigen::RowVectorXd col_mean = k.colwise().mean();
    const double grand = k.mean();
    Eigen::MatrixXd out = k;
    out.colwise() -= row_mean;
    out.rowwise() -= col_mean;
    out.array() += grand;
    return out;
}

/// Kernel PCA: top eigenvector v of the double-centred Gram matrix scaled
/// by sqrt(lambda). Returns an all-zero embedding flagged degenerate when
/// lambda <= 1e-12.
inline Embedding1D kpca_embed(const FeatureMatrix& x, const EmbeddingConfig& cfg) {
    if (x.frames() < 2) {
        throw DegenerateError("kernel PCA needs at least two frames");
    }
    const Eigen::MatrixXd centred = double_center(kernel_matrix(x, cfg).K);
    auto eig = detail::top_eigen(centred);

    Embedding1D out;
    out.source = to_string(cfg.method);
    if (!(eig.value > kDegenerateEigenvalue)) {
        out.values.assign(x.frames(), 0.0);
        out.degenerate = true;
        return out;
    }
    detail::fix_sign(eig.vector);
    const Eigen::VectorXd scaled = std::sqrt(eig.value) * eig.vector;
    out.values.assign(scaled.data(), scaled.data() + scaled.size());
    return out;
}

/// Dispatches on cfg.method.
inline Embedding1D embed(const FeatureMatrix& x, const EmbeddingConfig& cfg) {
    if (cfg.method == EmbeddingMethod::pca) {
        return pca_embed(x).embedding;
    }
    return kpca_embed(x, cfg);
}

} // namespace seglens
