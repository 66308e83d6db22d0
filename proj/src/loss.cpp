#include "pct/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pct/kernels.hpp"

namespace pct {

LossResult coherence_loss(const DissimMatrix& dm_teacher, const DissimMatrix& dm_student,
                          const LossConfig& cfg) {
    const std::size_t b = dm_teacher.size();
    if (dm_student.size() != b) throw std::invalid_argument("coherence_loss: shape mismatch");
    if (b < 2) throw std::invalid_argument("coherence_loss: B >= 2 required");
    if (!(cfg.tau_teacher > 0.0) || !(cfg.tau_student > 0.0))
        throw std::invalid_argument("coherence_loss: temperatures must be positive");

    const auto& k = kernels::active();
    const double inv_tau = 1.0 / cfg.tau_student;
    const double b3 = static_cast<double>(b) * static_cast<double>(b) * static_cast<double>(b);

    LossResult res;
    res.teacher_ranks = soft_ranks(dm_teacher, RankConfig{cfg.tau_teacher, true});
    res.grad_student_dissim = Matrix(b, b, 0.0);
    res.student_dissim = dm_student.values;
    res.student_metric = dm_student.metric;
    res.tau_student = cfg.tau_student;

    // Per reference row i: S(j,k) = sigmoid((d_ij - d_ik)/tau) so that the
    // student soft rank of entry j is the j-th row sum of S, and the gradient
    // reuses S through sigmoid'(z) = s (1 - s) without new exp evaluations.
    std::vector<double> scaled(b);
    std::vector<double> z(b);
    Matrix S(b, b);
    Matrix P(b, b);
    std::vector<double> g(b);
    std::vector<double> row_p(b);
    std::vector<double> col_gp(b);

    double value_acc = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const double* drow = dm_student.row(i);
        for (std::size_t t = 0; t < b; ++t) scaled[t] = drow[t] * inv_tau;

        for (std::size_t j = 0; j < b; ++j) {
            const double zj = scaled[j];
            for (std::size_t t = 0; t < b; ++t) z[t] = zj - scaled[t];
            k.sigmoid(z.data(), S.row(j), b);
            const double rank_sj = k.sum(S.row(j), b);
            const double diff = rank_sj - res.teacher_ranks(i, j);
            value_acc += diff * diff;
            g[j] = 2.0 * diff / b3;
        }

        k.sigmoid_grad(S.data(), P.data(), b * b);
        for (std::size_t m = 0; m < b; ++m) row_p[m] = k.sum(P.row(m), b);
        std::fill(col_gp.begin(), col_gp.end(), 0.0);
        for (std::size_t j = 0; j < b; ++j) k.axpy(g[j], P.row(j), col_gp.data(), b);

        double* grow = res.grad_student_dissim.row(i);
        for (std::size_t m = 0; m < b; ++m) {
            const double pmm = P(m, m);
            grow[m] = inv_tau * (g[m] * (row_p[m] - pmm) - (col_gp[m] - g[m] * pmm));
        }
    }
    res.value = value_acc / b3;
    return res;
}

CoordGrad grad_wrt_coords(const LossResult& lr, const Matrix& points) {
    const std::size_t b = lr.student_dissim.rows();
    if (points.rows() != b) throw std::invalid_argument("grad_wrt_coords: batch size mismatch");
    if (lr.student_metric != MetricKind::euclidean)
        throw std::invalid_argument("grad_wrt_coords: loss was not built on euclidean dissims");

    const std::size_t dim = points.cols();
    CoordGrad out;
    out.grad = Matrix(b, dim, 0.0);
    constexpr double kGuard = 1e-12;

    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t m = 0; m < b; ++m) {
            if (m == i) continue;
            const double w =
                lr.grad_student_dissim(i, m) + lr.grad_student_dissim(m, i);
            const double d = lr.student_dissim(i, m);
            double denom = d;
            if (denom < kGuard) {
                denom = kGuard;
                if (m > i) ++out.clamp_events;
            }
            const double scale = w / denom;
            for (std::size_t t = 0; t < dim; ++t)
                out.grad(i, t) += scale * (points(i, t) - points(m, t));
        }
    }
    return out;
}

FeatureGrad grad_wrt_features(const LossResult& lr, const Matrix& feats, double eps) {
    const std::size_t b = lr.student_dissim.rows();
    if (feats.rows() != b) throw std::invalid_argument("grad_wrt_features: batch size mismatch");
    if (lr.student_metric != MetricKind::cosine)
        throw std::invalid_argument("grad_wrt_features: loss was not built on cosine dissims");

    const auto& k = kernels::active();
    const std::size_t dim = feats.cols();
    FeatureGrad out;
    out.grad = Matrix(b, dim, 0.0);

    std::vector<double> norm(b);
    std::vector<bool> clamped(b);
    for (std::size_t i = 0; i < b; ++i) {
        const double n = std::sqrt(k.dot(feats.row(i), feats.row(i), dim));
        clamped[i] = n < eps;
        norm[i] = std::max(n, eps);
        if (clamped[i]) ++out.clamp_events;
    }

    // d(u,v) = (1 - <u,v>/(nu nv)) / 2 with clamped norms; the norm-direction
    // term drops out for a clamped row (its norm no longer depends on u).
    for (std::size_t i = 0; i < b; ++i) {
        const double* u = feats.row(i);
        for (std::size_t m = i + 1; m < b; ++m) {
            const double w =
                lr.grad_student_dissim(i, m) + lr.grad_student_dissim(m, i);
            if (w == 0.0) continue;
            const double* v = feats.row(m);
            const double uv = k.dot(u, v, dim);
            const double inv_nm = 1.0 / (norm[i] * norm[m]);
            const double cu = clamped[i] ? 0.0 : uv / (norm[i] * norm[i]);
            const double cv = clamped[m] ? 0.0 : uv / (norm[m] * norm[m]);
            for (std::size_t t = 0; t < dim; ++t) {
                out.grad(i, t) += w * (-0.5) * inv_nm * (v[t] - cu * u[t]);
                out.grad(m, t) += w * (-0.5) * inv_nm * (u[t] - cv * v[t]);
            }
        }
    }
    return out;
}

}  // namespace pct
