#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pct/matrix.hpp"
#include "pct/metric.hpp"
#include "pct/ranking.hpp"

namespace pct {

enum class CoherenceMethod { exact_full, minibatch };

/// Coherence of two representations of the same point set. phi values live in
/// [0, 1]; dc = 1 - global_phi is the mean absolute gap between the two
/// empirical cumulative-dissimilarity functions over ordered pairs.
struct CoherenceReport {
    std::vector<double> per_point_phi;  // filled for exact_full
    double global_phi = 1.0;
    double dc = 0.0;
    CoherenceMethod method = CoherenceMethod::exact_full;
    std::size_t batch_size = 0;    // minibatch only
    std::size_t replications = 0;  // minibatch only
    std::optional<double> stderr_;
};

/// Conditional-frequency probe over point triples (i, j, k).
struct ThetaProbeResult {
    std::optional<double> frequency;  // absent when the condition never fired
    double eps1 = 0.0;
    std::optional<double> eps2;
    std::uint64_t samples = 0;
    std::uint64_t condition_hits = 0;
    std::uint64_t event_hits = 0;
    bool exhaustive = false;
};

double phi_at(std::size_t i, const EmpiricalCdfMatrix& f1, const EmpiricalCdfMatrix& f2);

CoherenceReport dc_exact(const EmpiricalCdfMatrix& f1, const EmpiricalCdfMatrix& f2);

/// Mini-batch estimator: each replication draws B indices i.i.d. uniformly
/// with replacement (replication r uses stream r of `seed`), builds both
/// batch dissimilarity matrices and evaluates the empirical difference
/// coefficient; reports mean and standard error across replications.
CoherenceReport dc_minibatch(const Matrix& features1, const Matrix& features2,
                             const Metric& metric1, const Metric& metric2, std::size_t batch_size,
                             std::size_t replications, std::uint64_t seed);

/// Least-squares slope of log(error) against log(B).
double rate_fit(const std::vector<std::pair<double, double>>& batch_vs_error);

/// True iff every row of the two matrices induces the same dissimilarity
/// ordering. Requires tie-free rows on both sides.
bool is_absolutely_coherent(const DissimMatrix& dm1, const DissimMatrix& dm2);

// Condition: |F1(i,j) - F1(i,k)| <= eps1. Event: |F2(i,j) - F2(i,k)| >= eps2.
ThetaProbeResult probe_rank_preservation(const EmpiricalCdfMatrix& f1,
                                         const EmpiricalCdfMatrix& f2, double eps1, double eps2,
                                         std::uint64_t samples, std::uint64_t seed);

// Condition: F1(i,j) <= F1(i,k). Event: F2(i,j) - F2(i,k) >= eps.
ThetaProbeResult probe_order_preservation(const EmpiricalCdfMatrix& f1,
                                          const EmpiricalCdfMatrix& f2, double eps,
                                          std::uint64_t samples, std::uint64_t seed);

// Explicit probe paths; the public probes enumerate all N^3 triples when
// N^3 <= 1e6 and sample otherwise. Both paths must agree on small N.
ThetaProbeResult probe_rank_preservation_exhaustive(const EmpiricalCdfMatrix& f1,
                                                    const EmpiricalCdfMatrix& f2, double eps1,
                                                    double eps2);
ThetaProbeResult probe_rank_preservation_sampled(const EmpiricalCdfMatrix& f1,
                                                 const EmpiricalCdfMatrix& f2, double eps1,
                                                 double eps2, std::uint64_t samples,
                                                 std::uint64_t seed);
ThetaProbeResult probe_order_preservation_exhaustive(const EmpiricalCdfMatrix& f1,
                                                     const EmpiricalCdfMatrix& f2, double eps);
ThetaProbeResult probe_order_preservation_sampled(const EmpiricalCdfMatrix& f1,
                                                  const EmpiricalCdfMatrix& f2, double eps,
                                                  std::uint64_t samples, std::uint64_t seed);

}  // namespace pct
