#pragma once

#include "pct/matrix.hpp"
#include "pct/metric.hpp"

namespace pct {

struct RankConfig {
    double tau = 0.1;  // temperature; < 1 is the useful regime
    bool include_diagonal = true;  // fixed: self terms kept in every sum
};

enum class RankMode { hard, soft };

/// Per-row ranks of a dissimilarity matrix. Row i ranks the dissimilarities
/// of every point (including i itself) to reference point i. Hard ranks use
/// the <=-count convention, so ties share the largest rank of their group.
struct RankMatrix {
    Matrix values;  // B x B
    RankMode mode = RankMode::hard;
    double tau = 0.0;  // soft mode only

    std::size_t size() const { return values.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

/// Entry (i,j) = hard rank / B, an empirical estimate of the probability that
/// a random point is at most as dissimilar to i as j is.
struct EmpiricalCdfMatrix {
    Matrix values;  // B x B, entries in (0, 1]

    std::size_t size() const { return values.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

// Row-level primitives, usable on any matrix rows (the shift-invariance
// property tests need rows that are not valid dissimilarity matrices).
Matrix hard_ranks_rows(const Matrix& rows);
Matrix soft_ranks_rows(const Matrix& rows, double tau);

RankMatrix hard_ranks(const DissimMatrix& dm);
RankMatrix soft_ranks(const DissimMatrix& dm, const RankConfig& cfg);
EmpiricalCdfMatrix empirical_cdf(const DissimMatrix& dm);

/// Smallest gap between two entries of the same row; 0 indicates a tie.
double min_row_gap(const Matrix& rows);

/// True when some row holds two exactly equal entries.
bool has_row_ties(const Matrix& rows);

/// Max over entries of |soft_rank - (hard_rank - 0.5)| at temperature
/// tau_small; the 0.5 offset is the self-term limit. Refuses tied inputs.
double soft_rank_limit_check(const DissimMatrix& dm, double tau_small);

}  // namespace pct
