#pragma once

#include <string>

#include "pct/matrix.hpp"

namespace pct {

enum class MetricKind { euclidean, cosine };

/// Dissimilarity metric. Cosine guards zero-norm vectors with an eps clamp so
/// the value stays finite for degenerate features.
struct Metric {
    MetricKind kind = MetricKind::euclidean;
    double eps = 1e-12;

    static Metric euclidean() { return Metric{MetricKind::euclidean, 1e-12}; }
    static Metric cosine(double eps = 1e-12) { return Metric{MetricKind::cosine, eps}; }

    double operator()(const double* u, const double* v, std::size_t dim) const;
};

const char* metric_name(MetricKind k);

double euclidean_dist(const double* u, const double* v, std::size_t dim);
double cosine_dissim(const double* u, const double* v, std::size_t dim, double eps = 1e-12);

inline double euclidean_dist(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("euclidean: dimension mismatch");
    return euclidean_dist(u.data(), v.data(), u.size());
}

inline double cosine_dissim(const std::vector<double>& u, const std::vector<double>& v,
                            double eps = 1e-12) {
    if (u.size() != v.size()) throw std::invalid_argument("cosine: dimension mismatch");
    return cosine_dissim(u.data(), v.data(), u.size(), eps);
}

/// Pairwise dissimilarities of a batch. Symmetric by construction (each
/// unordered pair evaluated once and mirrored), zero diagonal.
struct DissimMatrix {
    Matrix values;  // B x B
    MetricKind metric = MetricKind::euclidean;
    std::string source;

    std::size_t size() const { return values.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
    const double* row(std::size_t i) const { return values.row(i); }

    /// Wraps precomputed values after checking the invariants (symmetry,
    /// zero diagonal, nonnegative, finite).
    static DissimMatrix from_values(Matrix values, MetricKind kind = MetricKind::euclidean,
                                    std::string source = {});
};

DissimMatrix pairwise(const Matrix& points, const Metric& metric, std::string source = {});

}  // namespace pct
