#include "pct/dataset.hpp"

#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pct/rng.hpp"

namespace pct {

void PointSet::validate() const {
    if (n() < 1 || dim() < 1)
        throw std::invalid_argument("PointSet: needs at least one point and one dimension");
    if (!points.all_finite()) throw std::invalid_argument("PointSet: non-finite coordinate");
    if (!labels.empty()) {
        if (labels.size() != n())
            throw std::invalid_argument("PointSet: label count must match point count");
        for (auto l : labels)
            if (l < 0) throw std::invalid_argument("PointSet: negative label");
    }
}

PointSet gen_two_moons(std::size_t n, double noise, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_two_moons: n >= 2 required");
    if (noise < 0.0) throw std::invalid_argument("gen_two_moons: noise must be >= 0");

    const std::size_t n0 = n / 2;       // first moon
    const std::size_t n1 = n - n0;      // second moon (one extra when n is odd)

    PointSet ps;
    ps.points = Matrix(n, 2);
    ps.labels.resize(n);
    ps.seed = seed;
    ps.name = "two_moons";

    auto arc_t = [](std::size_t idx, std::size_t count) {
        return count > 1 ? std::numbers::pi * static_cast<double>(idx) /
                               static_cast<double>(count - 1)
                         : 0.0;
    };
    for (std::size_t i = 0; i < n0; ++i) {
        const double t = arc_t(i, n0);
        ps.points(i, 0) = std::cos(t);
        ps.points(i, 1) = std::sin(t);
        ps.labels[i] = 0;
    }
    for (std::size_t i = 0; i < n1; ++i) {
        const double t = arc_t(i, n1);
        ps.points(n0 + i, 0) = 1.0 - std::cos(t);
        ps.points(n0 + i, 1) = 0.5 - std::sin(t);
        ps.labels[n0 + i] = 1;
    }

    if (noise > 0.0) {
        rng::Stream noise_stream(seed, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < 2; ++d) ps.points(i, d) += noise * noise_stream.normal();
    }
    return ps;
}

PointSet gen_gaussian_clusters(std::size_t k, std::size_t n, std::size_t dims, double spread,
                               double centers_scale, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("gen_gaussian_clusters: k >= 1 required");
    if (n < k) throw std::invalid_argument("gen_gaussian_clusters: n >= k required");
    if (dims != 2 && dims != 3)
        throw std::invalid_argument("gen_gaussian_clusters: dims must be 2 or 3");
    if (!(spread >= 0.0) || !(centers_scale > 0.0))
        throw std::invalid_argument("gen_gaussian_clusters: bad spread or centers_scale");

    rng::Stream center_stream(seed, 0);
    Matrix centers(k, dims);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t d = 0; d < dims; ++d)
            centers(c, d) = center_stream.uniform(-centers_scale, centers_scale);

    PointSet ps;
    ps.points = Matrix(n, dims);
    ps.labels.resize(n);
    ps.seed = seed;
    ps.name = "gaussian_clusters";

    rng::Stream point_stream(seed, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % k;
        for (std::size_t d = 0; d < dims; ++d)
            ps.points(i, d) = centers(c, d) + spread * point_stream.normal();
        ps.labels[i] = static_cast<std::int64_t>(c);
    }
    return ps;
}

SplitPointSet split(const PointSet& ps, double train_fraction, std::uint64_t seed) {
    const std::size_t n = ps.n();
    const auto n_train =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    if (!(train_fraction > 0.0 && train_fraction < 1.0) || n_train < 1 || n_train >= n)
        throw std::invalid_argument("split: train_fraction leaves an empty side");

    rng::Stream stream(seed, 0);
    const std::vector<std::size_t> perm = stream.permutation(n);

    auto take = [&](std::size_t begin, std::size_t count, const std::string& suffix) {
        PointSet out;
        out.points = Matrix(count, ps.dim());
        if (ps.labeled()) out.labels.resize(count);
        out.seed = ps.seed;
        out.name = ps.name + suffix;
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t src = perm[begin + i];
            for (std::size_t d = 0; d < ps.dim(); ++d) out.points(i, d) = ps.points(src, d);
            if (ps.labeled()) out.labels[i] = ps.labels[src];
        }
        return out;
    };

    SplitPointSet s;
    s.train = take(0, n_train, "_train");
    s.test = take(n_train, n - n_train, "_test");
    s.split_seed = seed;
    return s;
}

void save_pointset(const PointSet& ps, const std::string& path) {
    ps.validate();
    for (char c : ps.name)
        if (std::isspace(static_cast<unsigned char>(c)))
            throw std::invalid_argument("save_pointset: name must not contain whitespace");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_pointset: cannot open " + path);

    out << "# pointset name=" << ps.name << " n=" << ps.n() << " d=" << ps.dim()
        << " labeled=" << (ps.labeled() ? 1 : 0) << " seed=" << ps.seed << "\n";
    char buf[64];
    for (std::size_t i = 0; i < ps.n(); ++i) {
        for (std::size_t d = 0; d < ps.dim(); ++d) {
            std::snprintf(buf, sizeof(buf), "%.17g", ps.points(i, d));
            if (d > 0) out << ' ';
            out << buf;
        }
        if (ps.labeled()) out << '\t' << ps.labels[i];
        out << '\n';
    }
    if (!out) throw std::runtime_error("save_pointset: write failed for " + path);
}

namespace {

std::uint64_t parse_header_u64(const std::string& header, const std::string& key,
                               std::size_t line) {
    const std::string needle = key + "=";
    const auto pos = header.find(needle);
    if (pos == std::string::npos) throw ParseError("missing header field " + key, line);
    const char* begin = header.data() + pos + needle.size();
    const char* end = header.data() + header.size();
    std::uint64_t value = 0;
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc()) throw ParseError("bad header field " + key, line);
    return value;
}

}  // namespace

PointSet load_pointset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_pointset: cannot open " + path);

    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("load_pointset: empty file");
    if (header.rfind("# pointset ", 0) != 0)
        throw ParseError("expected '# pointset' header", 1);

    PointSet ps;
    {
        const std::string needle = "name=";
        const auto pos = header.find(needle);
        if (pos == std::string::npos) throw ParseError("missing header field name", 1);
        const auto begin = pos + needle.size();
        const auto end = header.find(' ', begin);
        ps.name = header.substr(begin, end == std::string::npos ? end : end - begin);
    }
    const std::uint64_t n = parse_header_u64(header, "n", 1);
    const std::uint64_t d = parse_header_u64(header, "d", 1);
    const std::uint64_t labeled = parse_header_u64(header, "labeled", 1);
    ps.seed = parse_header_u64(header, "seed", 1);
    if (n < 1 || d < 1) throw std::invalid_argument("load_pointset: n and d must be >= 1");
    if (labeled > 1) throw ParseError("labeled must be 0 or 1", 1);

    ps.points = Matrix(n, d);
    if (labeled != 0u) ps.labels.resize(n);

    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lineno = i + 2;
        if (!std::getline(in, line)) throw ParseError("unexpected end of file", lineno);
        std::string coords = line;
        std::string label_part;
        const auto tab = line.find('\t');
        if (tab != std::string::npos) {
            coords = line.substr(0, tab);
            label_part = line.substr(tab + 1);
        }
        if ((tab != std::string::npos) != (labeled != 0u))
            throw ParseError("row labelling does not match header", lineno);

        std::istringstream cs(coords);
        for (std::size_t j = 0; j < d; ++j) {
            if (!(cs >> ps.points(i, j)))
                throw ParseError("row has fewer than " + std::to_string(d) + " coordinates",
                                 lineno);
        }
        double extra;
        if (cs >> extra)
            throw ParseError("row has more than " + std::to_string(d) + " coordinates", lineno);

        if (labeled != 0u) {
            std::int64_t lab = 0;
            const auto res =
                std::from_chars(label_part.data(), label_part.data() + label_part.size(), lab);
            if (res.ec != std::errc() || res.ptr != label_part.data() + label_part.size())
                throw ParseError("bad label", lineno);
            ps.labels[i] = lab;
        }
    }
    if (std::getline(in, line) && !line.empty())
        throw ParseError("trailing content after " + std::to_string(n) + " rows", n + 2);

    ps.validate();
    return ps;
}

}  // namespace pct
