#pragma once

#include "pct/matrix.hpp"
#include "pct/metric.hpp"
#include "pct/ranking.hpp"

namespace pct {

struct LossConfig {
    double tau_teacher = 0.1;
    double tau_student = 0.1;
    double weight = 1.0;  // scaling used when combined with a task loss
};

/// Value and gradient of the rank-matching loss
///   L = (1/B^3) sum_i || softrank_i(teacher) - softrank_i(student) ||^2 .
/// The teacher side is a constant. grad_student_dissim(i, m) is the partial
/// derivative with respect to student dissimilarity entry (i, m), each matrix
/// entry treated as an independent variable; chaining to coordinates or
/// features accounts for the symmetric pairs.
struct LossResult {
    double value = 0.0;
    Matrix grad_student_dissim;  // B x B
    RankMatrix teacher_ranks;
    Matrix student_dissim;  // copy of the student matrix the loss was built on
    MetricKind student_metric = MetricKind::euclidean;
    double tau_student = 0.0;
};

LossResult coherence_loss(const DissimMatrix& dm_teacher, const DissimMatrix& dm_student,
                          const LossConfig& cfg);

struct CoordGrad {
    Matrix grad;  // B x D
    std::size_t clamp_events = 0;  // off-diagonal distances below the guard
};

/// Chain rule into raw coordinates under the Euclidean metric.
CoordGrad grad_wrt_coords(const LossResult& lr, const Matrix& points);

struct FeatureGrad {
    Matrix grad;  // B x D
    std::size_t clamp_events = 0;  // rows whose norm hit the eps guard
};

/// Chain rule into feature vectors under the cosine dissimilarity.
FeatureGrad grad_wrt_features(const LossResult& lr, const Matrix& feats, double eps = 1e-12);

}  // namespace pct
