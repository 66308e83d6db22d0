#pragma once

#include <cstdint>
#include <vector>

#include "pct/matrix.hpp"
#include "pct/metric.hpp"

namespace pct {

/// Content-based retrieval scores. AP is the 11-point interpolated average
/// precision; map is the mean of the per-query APs.
struct RetrievalResult {
    double map = 0.0;
    std::size_t top_k = 0;
    double topk_precision = 0.0;
    std::vector<double> per_query_ap;
    std::size_t queries_without_match = 0;  // queries whose class is absent (AP = 0)
};

RetrievalResult retrieve_eval(const Matrix& db_features, const std::vector<std::int64_t>& db_labels,
                              const Matrix& query_features,
                              const std::vector<std::int64_t>& query_labels, const Metric& metric,
                              std::size_t top_k);

struct CorrelationResult {
    double pearson = 0.0;
    double spearman = 0.0;
    std::size_t n = 0;
};

double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

/// Pearson correlation of midranks.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

CorrelationResult correlations(const std::vector<double>& xs, const std::vector<double>& ys);

/// Midranks (ties get the average of their positions), 1-based.
std::vector<double> midranks(const std::vector<double>& xs);

struct AblationRow {
    std::size_t batch_size = 0;  // 0 marks the exact full-dataset row
    double phi = 0.0;
    double stderr_ = 0.0;
};

/// Coherence estimates per mini-batch size, final row exact on the full set.
std::vector<AblationRow> batch_ablation(const Matrix& features1, const Matrix& features2,
                                        const Metric& metric1, const Metric& metric2,
                                        const std::vector<std::size_t>& batch_sizes,
                                        std::size_t replications, std::uint64_t seed);

}  // namespace pct
