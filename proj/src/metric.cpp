#include "pct/metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pct/kernels.hpp"

namespace pct {

const char* metric_name(MetricKind k) {
    return k == MetricKind::euclidean ? "euclidean" : "cosine";
}

double euclidean_dist(const double* u, const double* v, std::size_t dim) {
    return std::sqrt(kernels::active().sq_dist(u, v, dim));
}

double cosine_dissim(const double* u, const double* v, std::size_t dim, double eps) {
    const auto& k = kernels::active();
    const double nu = std::max(std::sqrt(k.dot(u, u, dim)), eps);
    const double nv = std::max(std::sqrt(k.dot(v, v, dim)), eps);
    const double c = 0.5 * (1.0 - k.dot(u, v, dim) / (nu * nv));
    return std::clamp(c, 0.0, 1.0);
}

double Metric::operator()(const double* u, const double* v, std::size_t dim) const {
    return kind == MetricKind::euclidean ? euclidean_dist(u, v, dim)
                                         : cosine_dissim(u, v, dim, eps);
}

DissimMatrix DissimMatrix::from_values(Matrix values, MetricKind kind, std::string source) {
    const std::size_t b = values.rows();
    if (b < 2 || values.cols() != b)
        throw std::invalid_argument("DissimMatrix: need a square matrix with B >= 2");
    for (std::size_t i = 0; i < b; ++i) {
        if (values(i, i) != 0.0) throw std::invalid_argument("DissimMatrix: nonzero diagonal");
        for (std::size_t j = i + 1; j < b; ++j) {
            const double v = values(i, j);
            if (!std::isfinite(v) || v < 0.0)
                throw std::invalid_argument("DissimMatrix: entries must be finite and >= 0");
            if (v != values(j, i)) throw std::invalid_argument("DissimMatrix: not symmetric");
        }
    }
    return DissimMatrix{std::move(values), kind, std::move(source)};
}

DissimMatrix pairwise(const Matrix& points, const Metric& metric, std::string source) {
    const std::size_t b = points.rows();
    if (b < 2) throw std::invalid_argument("pairwise: need at least 2 points");
    if (!points.all_finite()) throw std::invalid_argument("pairwise: non-finite input");

    Matrix d(b, b, 0.0);
    const std::size_t dim = points.cols();
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = i + 1; j < b; ++j) {
            const double v = metric(points.row(i), points.row(j), dim);
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return DissimMatrix{std::move(d), metric.kind, std::move(source)};
}

}  // namespace pct
