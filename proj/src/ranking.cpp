#include "pct/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pct/kernels.hpp"

namespace pct {

Matrix hard_ranks_rows(const Matrix& rows) {
    const std::size_t b = rows.cols();
    Matrix out(rows.rows(), b);
    std::vector<double> sorted(b);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const double* r = rows.row(i);
        sorted.assign(r, r + b);
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t j = 0; j < b; ++j) {
            // rank = #{k : d_ik <= d_ij}
            const auto it = std::upper_bound(sorted.begin(), sorted.end(), r[j]);
            out(i, j) = static_cast<double>(it - sorted.begin());
        }
    }
    return out;
}

Matrix soft_ranks_rows(const Matrix& rows, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("soft ranks: tau must be positive");
    const auto& k = kernels::active();
    const std::size_t b = rows.cols();
    const double inv_tau = 1.0 / tau;
    Matrix out(rows.rows(), b);
    std::vector<double> scaled(b);
    std::vector<double> z(b);
    std::vector<double> s(b);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const double* r = rows.row(i);
        for (std::size_t t = 0; t < b; ++t) scaled[t] = r[t] * inv_tau;
        for (std::size_t j = 0; j < b; ++j) {
            const double zj = scaled[j];
            for (std::size_t t = 0; t < b; ++t) z[t] = zj - scaled[t];
            k.sigmoid(z.data(), s.data(), b);
            out(i, j) = k.sum(s.data(), b);
        }
    }
    return out;
}

RankMatrix hard_ranks(const DissimMatrix& dm) {
    if (dm.size() < 2) throw std::invalid_argument("hard_ranks: B >= 2 required");
    return RankMatrix{hard_ranks_rows(dm.values), RankMode::hard, 0.0};
}

RankMatrix soft_ranks(const DissimMatrix& dm, const RankConfig& cfg) {
    if (dm.size() < 2) throw std::invalid_argument("soft_ranks: B >= 2 required");
    return RankMatrix{soft_ranks_rows(dm.values, cfg.tau), RankMode::soft, cfg.tau};
}

EmpiricalCdfMatrix empirical_cdf(const DissimMatrix& dm) {
    Matrix r = hard_ranks_rows(dm.values);
    const double inv = 1.0 / static_cast<double>(dm.size());
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) *= inv;
    return EmpiricalCdfMatrix{std::move(r)};
}

double min_row_gap(const Matrix& rows) {
    const std::size_t b = rows.cols();
    std::vector<double> sorted(b);
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const double* r = rows.row(i);
        sorted.assign(r, r + b);
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t t = 0; t + 1 < b; ++t) gap = std::min(gap, sorted[t + 1] - sorted[t]);
    }
    return gap;
}

bool has_row_ties(const Matrix& rows) { return min_row_gap(rows) == 0.0; }

double soft_rank_limit_check(const DissimMatrix& dm, double tau_small) {
    if (has_row_ties(dm.values))
        throw std::invalid_argument("soft_rank_limit_check: tied row entries");
    const Matrix hard = hard_ranks_rows(dm.values);
    const Matrix soft = soft_ranks_rows(dm.values, tau_small);
    double dev = 0.0;
    for (std::size_t i = 0; i < hard.rows(); ++i)
        for (std::size_t j = 0; j < hard.cols(); ++j)
            dev = std::max(dev, std::fabs(soft(i, j) - (hard(i, j) - 0.5)));
    return dev;
}

}  // namespace pct
