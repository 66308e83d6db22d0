#include "pct/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pct/coherence.hpp"
#include "pct/rng.hpp"

namespace pct {

RetrievalResult retrieve_eval(const Matrix& db_features, const std::vector<std::int64_t>& db_labels,
                              const Matrix& query_features,
                              const std::vector<std::int64_t>& query_labels, const Metric& metric,
                              std::size_t top_k) {
    const std::size_t n_db = db_features.rows();
    const std::size_t n_q = query_features.rows();
    if (db_labels.size() != n_db || query_labels.size() != n_q)
        throw std::invalid_argument("retrieve_eval: label count mismatch");
    if (db_features.cols() != query_features.cols())
        throw std::invalid_argument("retrieve_eval: feature dimension mismatch");
    if (top_k < 1 || top_k > n_db)
        throw std::invalid_argument("retrieve_eval: k must be in [1, database size]");

    RetrievalResult res;
    res.top_k = top_k;
    res.per_query_ap.resize(n_q);

    std::vector<std::pair<double, std::size_t>> order(n_db);
    double topk_acc = 0.0;
    for (std::size_t q = 0; q < n_q; ++q) {
        for (std::size_t i = 0; i < n_db; ++i)
            order[i] = {metric(query_features.row(q), db_features.row(i), db_features.cols()), i};
        // ties broken by database index for a reproducible ranking
        std::stable_sort(order.begin(), order.end());

        std::size_t total_rel = 0;
        for (std::size_t i = 0; i < n_db; ++i)
            if (db_labels[i] == query_labels[q]) ++total_rel;

        std::size_t rel_in_topk = 0;
        for (std::size_t i = 0; i < top_k; ++i)
            if (db_labels[order[i].second] == query_labels[q]) ++rel_in_topk;
        topk_acc += static_cast<double>(rel_in_topk) / static_cast<double>(top_k);

        if (total_rel == 0) {
            res.per_query_ap[q] = 0.0;
            ++res.queries_without_match;
            continue;
        }

        // precision/recall after each rank position, then the classic
        // max-over-suffix interpolation at recalls {0, 0.1, ..., 1.0}
        std::vector<double> precision(n_db);
        std::vector<double> recall(n_db);
        std::size_t rel_seen = 0;
        for (std::size_t i = 0; i < n_db; ++i) {
            if (db_labels[order[i].second] == query_labels[q]) ++rel_seen;
            precision[i] = static_cast<double>(rel_seen) / static_cast<double>(i + 1);
            recall[i] = static_cast<double>(rel_seen) / static_cast<double>(total_rel);
        }
        std::vector<double> best_from(n_db + 1, 0.0);
        for (std::size_t i = n_db; i-- > 0;)
            best_from[i] = std::max(best_from[i + 1], precision[i]);

        double ap = 0.0;
        for (int level = 0; level <= 10; ++level) {
            const double r = static_cast<double>(level) / 10.0;
            std::size_t first = n_db;
            for (std::size_t i = 0; i < n_db; ++i) {
                if (recall[i] >= r) {
                    first = i;
                    break;
                }
            }
            ap += first < n_db ? best_from[first] : 0.0;
        }
        res.per_query_ap[q] = ap / 11.0;
    }

    res.map = std::accumulate(res.per_query_ap.begin(), res.per_query_ap.end(), 0.0) /
              static_cast<double>(n_q);
    res.topk_precision = topk_acc / static_cast<double>(n_q);
    return res;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("pearson: need two same-length series of length >= 2");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::domain_error("pearson: undefined correlation (zero variance)");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> midranks(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return xs[a] < xs[b];
    });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = mid;
        i = j + 1;
    }
    return ranks;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    return pearson(midranks(xs), midranks(ys));
}

CorrelationResult correlations(const std::vector<double>& xs, const std::vector<double>& ys) {
    return CorrelationResult{pearson(xs, ys), spearman(xs, ys), xs.size()};
}

std::vector<AblationRow> batch_ablation(const Matrix& features1, const Matrix& features2,
                                        const Metric& metric1, const Metric& metric2,
                                        const std::vector<std::size_t>& batch_sizes,
                                        std::size_t replications, std::uint64_t seed) {
    if (!std::is_sorted(batch_sizes.begin(), batch_sizes.end()))
        throw std::invalid_argument("batch_ablation: batch sizes must be ascending");
    std::vector<AblationRow> rows;
    for (std::size_t b : batch_sizes) {
        const CoherenceReport rep = dc_minibatch(features1, features2, metric1, metric2, b,
                                                 replications, rng::derive_seed(seed, b));
        rows.push_back({b, rep.global_phi, rep.stderr_.value_or(0.0)});
    }
    const CoherenceReport exact =
        dc_exact(empirical_cdf(pairwise(features1, metric1)),
                 empirical_cdf(pairwise(features2, metric2)));
    rows.push_back({0, exact.global_phi, 0.0});
    return rows;
}

}  // namespace pct
