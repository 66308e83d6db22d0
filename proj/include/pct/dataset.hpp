#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pct/matrix.hpp"

namespace pct {

/// A finite collection of coordinate/feature vectors with optional class
/// labels. Every generator below is a pure function of its arguments
/// including the seed.
struct PointSet {
    Matrix points;                    // N x D
    std::vector<std::int64_t> labels;  // empty, or one nonnegative id per point
    std::uint64_t seed = 0;
    std::string name;

    std::size_t n() const { return points.rows(); }
    std::size_t dim() const { return points.cols(); }
    bool labeled() const { return !labels.empty(); }

    void validate() const;
};

struct SplitPointSet {
    PointSet train;
    PointSet test;
    std::uint64_t split_seed = 0;
};

/// Two interleaved half-circles of radius 1 plus isotropic Gaussian noise.
/// The first moon is the upper arc (cos t, sin t), t in [0, pi]; the second
/// is the reflected arc whose apex sits at (1, -0.5). Labels 0/1 per moon,
/// counts differing by at most one.
PointSet gen_two_moons(std::size_t n, double noise, std::uint64_t seed);

/// k Gaussian blobs with shared std `spread`, centers uniform in
/// [-centers_scale, centers_scale]^dims, points assigned round-robin
/// (point i belongs to cluster i mod k). Only 2D and 3D are supported.
PointSet gen_gaussian_clusters(std::size_t k, std::size_t n, std::size_t dims, double spread,
                               double centers_scale, std::uint64_t seed);

/// Uniformly random permutation split; train gets floor(train_fraction * N)
/// points and both sides must end up non-empty.
SplitPointSet split(const PointSet& ps, double train_fraction, std::uint64_t seed);

void save_pointset(const PointSet& ps, const std::string& path);
PointSet load_pointset(const std::string& path);

/// Errors raised while reading a PointSet file; line is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

}  // namespace pct
