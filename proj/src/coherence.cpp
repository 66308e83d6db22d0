#include "pct/coherence.hpp"

#include <cmath>
#include <stdexcept>

#include "pct/parallel.hpp"
#include "pct/rng.hpp"

namespace pct {

namespace {

void check_same_shape(const EmpiricalCdfMatrix& f1, const EmpiricalCdfMatrix& f2) {
    if (f1.size() != f2.size() || f1.values.cols() != f2.values.cols())
        throw std::invalid_argument("coherence: cdf matrices must share shape");
}

double row_mean_abs_diff(const EmpiricalCdfMatrix& f1, const EmpiricalCdfMatrix& f2,
                         std::size_t i) {
    const std::size_t b = f1.values.cols();
    double acc = 0.0;
    const double* r1 = f1.values.row(i);
    const double* r2 = f2.values.row(i);
    for (std::size_t j = 0; j < b; ++j) acc += std::fabs(r1[j] - r2[j]);
    return acc / static_cast<double>(b);
}

Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), src.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t d = 0; d < src.cols(); ++d) out(i, d) = src(idx[i], d);
    return out;
}

}  // namespace

double phi_at(std::size_t i, const EmpiricalCdfMatrix& f1, const EmpiricalCdfMatrix& f2) {
    check_same_shape(f1, f2);
    if (i >= f1.size()) throw std::invalid_argument("phi_at: index out of range");
    return 1.0 - row_mean_abs_diff(f1, f2, i);
}

CoherenceReport dc_exact(const EmpiricalCdfMatrix& f1, const EmpiricalCdfMatrix& f2) {
    check_same_shape(f1, f2);
    const std::size_t n = f1.size();
    CoherenceReport rep;
    rep.method = CoherenceMethod::exact_full;
    rep.per_point_phi.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = row_mean_abs_diff(f1, f2, i);
        rep.per_point_phi[i] = 1.0 - m;
        acc += m;
    }
    rep.dc = acc / static_cast<double>(n);
    rep.global_phi = 1.0 - rep.dc;
    return rep;
}

CoherenceReport dc_minibatch(const Matrix& features1, const Matrix& features2,
                             const Metric& metric1, const Metric& metric2, std::size_t batch_size,
                             std::size_t replications, std::uint64_t seed) {
    const std::size_t n = features1.rows();
    if (features2.rows() != n)
        throw std::invalid_argument("dc_minibatch: feature sets must share point count");
    if (batch_size < 2) throw std::invalid_argument("dc_minibatch: batch size >= 2 required");
    if (batch_size > n) throw std::invalid_argument("dc_minibatch: batch size exceeds N");
    if (replications < 1) throw std::invalid_argument("dc_minibatch: need replications >= 1");

    std::vector<double> estimates(replications);
    parallel_for(replications, [&](std::size_t r) {
        rng::Stream stream(seed, r);
        std::vector<std::size_t> idx(batch_size);
        for (auto& v : idx) v = static_cast<std::size_t>(stream.uniform_int(n));
        const DissimMatrix d1 = pairwise(gather_rows(features1, idx), metric1);
        const DissimMatrix d2 = pairwise(gather_rows(features2, idx), metric2);
        estimates[r] = dc_exact(empirical_cdf(d1), empirical_cdf(d2)).dc;
    });

    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(replications);

    CoherenceReport rep;
    rep.method = CoherenceMethod::minibatch;
    rep.batch_size = batch_size;
    rep.replications = replications;
    rep.dc = mean;
    rep.global_phi = 1.0 - mean;
    if (replications > 1) {
        double ss = 0.0;
        for (double e : estimates) ss += (e - mean) * (e - mean);
        rep.stderr_ = std::sqrt(ss / static_cast<double>(replications - 1) /
                                static_cast<double>(replications));
    }
    return rep;
}

double rate_fit(const std::vector<std::pair<double, double>>& batch_vs_error) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& [b, err] : batch_vs_error) {
        if (!(err > 0.0)) throw std::invalid_argument("rate_fit: errors must be positive");
        xs.push_back(std::log(b));
        ys.push_back(std::log(err));
    }
    std::vector<double> distinct = xs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 4)
        throw std::invalid_argument("rate_fit: need at least 4 distinct batch sizes");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

bool is_absolutely_coherent(const DissimMatrix& dm1, const DissimMatrix& dm2) {
    if (dm1.size() != dm2.size())
        throw std::invalid_argument("is_absolutely_coherent: shape mismatch");
    if (has_row_ties(dm1.values) || has_row_ties(dm2.values))
        throw std::invalid_argument("is_absolutely_coherent: tied row entries");
    const Matrix r1 = hard_ranks_rows(dm1.values);
    const Matrix r2 = hard_ranks_rows(dm2.values);
    return r1 == r2;
}

namespace {

template <typename Condition, typename Event>
ThetaProbeResult probe_exhaustive(const EmpiricalCdfMatrix& f1, const EmpiricalCdfMatrix& f2,
                                  Condition cond, Event event) {
    check_same_shape(f1, f2);
    const std::size_t n = f1.size();
    ThetaProbeResult res;
    res.exhaustive = true;
    res.samples = static_cast<std::uint64_t>(n) * n * n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                if (!cond(f1(i, j), f1(i, k))) continue;
                ++res.condition_hits;
                if (event(f2(i, j), f2(i, k))) ++res.event_hits;
            }
    if (res.condition_hits > 0)
        res.frequency =
            static_cast<double>(res.event_hits) / static_cast<double>(res.condition_hits);
    return res;
}

template <typename Condition, typename Event>
ThetaProbeResult probe_sampled(const EmpiricalCdfMatrix& f1, const EmpiricalCdfMatrix& f2,
                               std::uint64_t samples, std::uint64_t seed, Condition cond,
                               Event event) {
    check_same_shape(f1, f2);
    if (samples == 0) throw std::invalid_argument("probe: samples >= 1 required");
    const std::size_t n = f1.size();
    ThetaProbeResult res;
    res.samples = samples;
    rng::Stream stream(seed, 0);
    for (std::uint64_t s = 0; s < samples; ++s) {
        const auto i = static_cast<std::size_t>(stream.uniform_int(n));
        const auto j = static_cast<std::size_t>(stream.uniform_int(n));
        const auto k = static_cast<std::size_t>(stream.uniform_int(n));
        if (!cond(f1(i, j), f1(i, k))) continue;
        ++res.condition_hits;
        if (event(f2(i, j), f2(i, k))) ++res.event_hits;
    }
    if (res.condition_hits > 0)
        res.frequency =
            static_cast<double>(res.event_hits) / static_cast<double>(res.condition_hits);
    return res;
}

constexpr std::uint64_t kExhaustiveTripleLimit = 1'000'000;

}  // namespace

ThetaProbeResult probe_rank_preservation_exhaustive(const EmpiricalCdfMatrix& f1,
                                                    const EmpiricalCdfMatrix& f2, double eps1,
                                                    double eps2) {
    if (!(eps2 > eps1 && eps1 > 0.0))
        throw std::invalid_argument("probe_rank_preservation: need eps2 > eps1 > 0");
    auto res = probe_exhaustive(
        f1, f2, [&](double a, double b) { return std::fabs(a - b) <= eps1; },
        [&](double a, double b) { return std::fabs(a - b) >= eps2; });
    res.eps1 = eps1;
    res.eps2 = eps2;
    return res;
}

ThetaProbeResult probe_rank_preservation_sampled(const EmpiricalCdfMatrix& f1,
                                                 const EmpiricalCdfMatrix& f2, double eps1,
                                                 double eps2, std::uint64_t samples,
                                                 std::uint64_t seed) {
    if (!(eps2 > eps1 && eps1 > 0.0))
        throw std::invalid_argument("probe_rank_preservation: need eps2 > eps1 > 0");
    auto res = probe_sampled(
        f1, f2, samples, seed, [&](double a, double b) { return std::fabs(a - b) <= eps1; },
        [&](double a, double b) { return std::fabs(a - b) >= eps2; });
    res.eps1 = eps1;
    res.eps2 = eps2;
    return res;
}

ThetaProbeResult probe_rank_preservation(const EmpiricalCdfMatrix& f1,
                                         const EmpiricalCdfMatrix& f2, double eps1, double eps2,
                                         std::uint64_t samples, std::uint64_t seed) {
    const auto n = static_cast<std::uint64_t>(f1.size());
    if (n * n * n <= kExhaustiveTripleLimit)
        return probe_rank_preservation_exhaustive(f1, f2, eps1, eps2);
    return probe_rank_preservation_sampled(f1, f2, eps1, eps2, samples, seed);
}

ThetaProbeResult probe_order_preservation_exhaustive(const EmpiricalCdfMatrix& f1,
                                                     const EmpiricalCdfMatrix& f2, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("probe_order_preservation: eps > 0 required");
    auto res = probe_exhaustive(
        f1, f2, [&](double a, double b) { return a <= b; },
        [&](double a, double b) { return a - b >= eps; });
    res.eps1 = eps;
    return res;
}

ThetaProbeResult probe_order_preservation_sampled(const EmpiricalCdfMatrix& f1,
                                                  const EmpiricalCdfMatrix& f2, double eps,
                                                  std::uint64_t samples, std::uint64_t seed) {
    if (!(eps > 0.0)) throw std::invalid_argument("probe_order_preservation: eps > 0 required");
    auto res = probe_sampled(
        f1, f2, samples, seed, [&](double a, double b) { return a <= b; },
        [&](double a, double b) { return a - b >= eps; });
    res.eps1 = eps;
    return res;
}

ThetaProbeResult probe_order_preservation(const EmpiricalCdfMatrix& f1,
                                          const EmpiricalCdfMatrix& f2, double eps,
                                          std::uint64_t samples, std::uint64_t seed) {
    const auto n = static_cast<std::uint64_t>(f1.size());
    if (n * n * n <= kExhaustiveTripleLimit)
        return probe_order_preservation_exhaustive(f1, f2, eps);
    return probe_order_preservation_sampled(f1, f2, eps, samples, seed);
}

}  // namespace pct
