#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "weightlab/error.hpp"
#include "weightlab/parallel.hpp"

namespace weightlab {

using PointId = std::uint32_t;

enum class MetricKind { Euclidean, L1, Linf, Graph, Explicit };

inline std::string_view to_string(MetricKind kind)
{
    switch (kind) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::L1: return "l1";
    case MetricKind::Linf: return "linf";
    case MetricKind::Graph: return "graph-shortest-path";
    case MetricKind::Explicit: return "explicit-matrix";
    }
    return "explicit-matrix";
}

inline MetricKind parse_metric_kind(std::string_view name)
{
    if (name == "euclidean") return MetricKind::Euclidean;
    if (name == "l1") return MetricKind::L1;
    if (name == "linf") return MetricKind::Linf;
    if (name == "graph-shortest-path" || name == "graph") return MetricKind::Graph;
    if (name == "explicit-matrix" || name == "explicit") return MetricKind::Explicit;
    throw Error(ErrorKind::InvalidParams, "unknown metric kind '" + std::string(name) + "'");
}

inline bool is_coordinate_metric(MetricKind kind)
{
    return kind == MetricKind::Euclidean || kind == MetricKind::L1 || kind == MetricKind::Linf;
}

struct ValidationOptions {
    // Triangle slack relative to the largest distance.
    double triangle_tolerance = 1e-9;
};

/// A finite metric space with strictly positive point masses.
///
/// Distances are stored as a dense row-major matrix. Instances are immutable
/// once built and every factory validates the metric axioms.
class FiniteMetricMeasureSpace {
public:
    FiniteMetricMeasureSpace() = default;

    static FiniteMetricMeasureSpace from_matrix(std::vector<double> matrix,
                                                std::vector<double> measure,
                                                MetricKind label = MetricKind::Explicit,
                                                ValidationOptions options = {});

    static FiniteMetricMeasureSpace from_matrix(const std::vector<std::vector<double>>& rows,
                                                std::vector<double> measure,
                                                MetricKind label = MetricKind::Explicit,
                                                ValidationOptions options = {});

    static FiniteMetricMeasureSpace from_coordinates(std::vector<std::vector<double>> coords,
                                                     MetricKind kind,
                                                     std::vector<double> measure);

    /// Shortest-path metric of a weighted graph. adjacency[i][j] is the edge
    /// length; 0 (off the diagonal) or +inf means no edge.
    static FiniteMetricMeasureSpace from_graph(const std::vector<std::vector<double>>& adjacency,
                                               std::vector<double> measure);

    /// Skips the O(n^3) triangle scan; for metrics that are metrics by construction.
    static FiniteMetricMeasureSpace trusted(std::vector<double> matrix, std::vector<double> measure,
                                            MetricKind label,
                                            std::vector<std::vector<double>> coords = {});

    std::size_t size() const noexcept { return n_; }
    double dist(PointId i, PointId j) const { return dist_[std::size_t(i) * n_ + j]; }
    std::span<const double> row(PointId i) const
    {
        return {dist_.data() + std::size_t(i) * n_, n_};
    }
    std::span<const double> distances() const noexcept { return dist_; }
    std::span<const double> measure() const noexcept { return measure_; }
    double measure(PointId i) const { return measure_[i]; }
    MetricKind metric() const noexcept { return metric_; }
    const std::vector<std::vector<double>>& coordinates() const noexcept { return coords_; }
    bool has_coordinates() const noexcept { return !coords_.empty(); }

    double diameter() const
    {
        double d = 0.0;
        for (double v : dist_)
            d = std::max(d, v);
        return d;
    }

    double total_mass() const
    {
        double m = 0.0;
        for (double v : measure_)
            m += v;
        return m;
    }

    bool operator==(const FiniteMetricMeasureSpace&) const = default;

private:
    static void check_measure(const std::vector<double>& measure);
    static void check_basic(const std::vector<double>& matrix, std::size_t n);
    static void check_triangle(const std::vector<double>& matrix, std::size_t n, double tolerance);

    std::size_t n_ = 0;
    std::vector<double> dist_;
    std::vector<double> measure_;
    std::vector<std::vector<double>> coords_;
    MetricKind metric_ = MetricKind::Explicit;
};

inline void FiniteMetricMeasureSpace::check_measure(const std::vector<double>& measure)
{
    if (measure.empty())
        throw Error(ErrorKind::InvalidParams, "space needs at least one point");
    for (std::size_t i = 0; i < measure.size(); ++i) {
        if (!(measure[i] > 0.0) || !std::isfinite(measure[i])) {
            std::ostringstream os;
            os << "measure(" << i << ") = " << measure[i] << " is not a positive finite number";
            throw Error(ErrorKind::NonpositiveMeasure, os.str());
        }
    }
}

inline void FiniteMetricMeasureSpace::check_basic(const std::vector<double>& m, std::size_t n)
{
    if (m.size() != n * n)
        throw Error(ErrorKind::InvalidParams, "distance matrix is not n x n for n = " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i * n + i] != 0.0)
            throw Error(ErrorKind::InvalidParams, "dist(" + std::to_string(i) + "," + std::to_string(i) + ") != 0");
        for (std::size_t j = 0; j < n; ++j) {
            const double d = m[i * n + j];
            if (!std::isfinite(d) || d < 0.0) {
                std::ostringstream os;
                os << "dist(" << i << "," << j << ") = " << d << " is not a finite nonnegative number";
                throw Error(ErrorKind::InvalidParams, os.str());
            }
            if (d != m[j * n + i]) {
                std::ostringstream os;
                os.precision(17);
                os << "dist(" << i << "," << j << ") = " << d << " but dist(" << j << "," << i
                   << ") = " << m[j * n + i];
                throw Error(ErrorKind::AsymmetricDistance, os.str());
            }
            if (i != j && d == 0.0)
                throw Error(ErrorKind::ZeroDistanceDistinctPoints,
                            "points " + std::to_string(i) + " and " + std::to_string(j) + " are at distance 0");
        }
    }
}

inline void FiniteMetricMeasureSpace::check_triangle(const std::vector<double>& m, std::size_t n,
                                                     double tolerance)
{
    double maxd = 0.0;
    for (double v : m)
        maxd = std::max(maxd, v);
    const double slack = tolerance * maxd;
    double worst = 0.0;
    std::size_t wi = 0, wj = 0, wk = 0;
    // dist(i,k) <= dist(i,j) + dist(j,k) for every j: scan rows i, j against k.
    for (std::size_t i = 0; i < n; ++i) {
        const double* ri = m.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double dij = ri[j];
            const double* rj = m.data() + j * n;
            for (std::size_t k = 0; k < n; ++k) {
                const double excess = ri[k] - (dij + rj[k]);
                if (excess > worst) {
                    worst = excess;
                    wi = i;
                    wj = j;
                    wk = k;
                }
            }
        }
    }
    if (worst > slack) {
        std::ostringstream os;
        os.precision(17);
        os << "worst triple (" << wi << "," << wj << "," << wk << "): dist(" << wi << "," << wk
           << ") = " << m[wi * n + wk] << " exceeds dist(" << wi << "," << wj << ") + dist(" << wj << ","
           << wk << ") = " << m[wi * n + wj] + m[wj * n + wk] << " by " << worst;
        throw Error(ErrorKind::TriangleViolation, os.str());
    }
}

inline FiniteMetricMeasureSpace FiniteMetricMeasureSpace::from_matrix(std::vector<double> matrix,
                                                                      std::vector<double> measure,
                                                                      MetricKind label,
                                                                      ValidationOptions options)
{
    check_measure(measure);
    const std::size_t n = measure.size();
    check_basic(matrix, n);
    check_triangle(matrix, n, options.triangle_tolerance);
    FiniteMetricMeasureSpace s;
    s.n_ = n;
    s.dist_ = std::move(matrix);
    s.measure_ = std::move(measure);
    s.metric_ = label;
    return s;
}

inline FiniteMetricMeasureSpace FiniteMetricMeasureSpace::from_matrix(
    const std::vector<std::vector<double>>& rows, std::vector<double> measure, MetricKind label,
    ValidationOptions options)
{
    const std::size_t n = rows.size();
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const auto& r : rows) {
        if (r.size() != n)
            throw Error(ErrorKind::InvalidParams, "distance matrix is not square");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    if (measure.size() != n)
        throw Error(ErrorKind::InvalidParams, "measure length differs from matrix size");
    return from_matrix(std::move(flat), std::move(measure), label, options);
}

inline FiniteMetricMeasureSpace FiniteMetricMeasureSpace::from_coordinates(
    std::vector<std::vector<double>> coords, MetricKind kind, std::vector<double> measure)
{
    if (!is_coordinate_metric(kind))
        throw Error(ErrorKind::InvalidParams, "metric '" + std::string(to_string(kind)) + "' needs a matrix");
    check_measure(measure);
    const std::size_t n = measure.size();
    if (coords.size() != n)
        throw Error(ErrorKind::InvalidParams, "coordinate count differs from measure length");
    const std::size_t dim = coords.front().size();
    for (const auto& c : coords) {
        if (c.size() != dim || dim == 0)
            throw Error(ErrorKind::InvalidParams, "coordinates must share a positive dimension");
        for (double v : c)
            if (!std::isfinite(v))
                throw Error(ErrorKind::InvalidParams, "non-finite coordinate");
    }
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double t = std::abs(coords[i][k] - coords[j][k]);
                switch (kind) {
                case MetricKind::Euclidean: d += t * t; break;
                case MetricKind::L1: d += t; break;
                default: d = std::max(d, t); break;
                }
            }
            if (kind == MetricKind::Euclidean)
                d = std::sqrt(d);
            m[i * n + j] = d;
            m[j * n + i] = d;
        }
    }
    check_basic(m, n);
    FiniteMetricMeasureSpace s;
    s.n_ = n;
    s.dist_ = std::move(m);
    s.measure_ = std::move(measure);
    s.coords_ = std::move(coords);
    s.metric_ = kind;
    return s;
}

inline FiniteMetricMeasureSpace FiniteMetricMeasureSpace::from_graph(
    const std::vector<std::vector<double>>& adjacency, std::vector<double> measure)
{
    check_measure(measure);
    const std::size_t n = measure.size();
    if (adjacency.size() != n)
        throw Error(ErrorKind::InvalidParams, "adjacency size differs from measure length");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<std::pair<std::size_t, double>>> edges(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency[i].size() != n)
            throw Error(ErrorKind::InvalidParams, "adjacency matrix is not square");
        for (std::size_t j = 0; j < n; ++j) {
            const double len = adjacency[i][j];
            if (i == j || len == 0.0 || len == inf)
                continue;
            if (!(len > 0.0) || !std::isfinite(len) || len != adjacency[j][i])
                throw Error(ErrorKind::InvalidParams,
                            "edge (" + std::to_string(i) + "," + std::to_string(j) + ") must be positive and symmetric");
            edges[i].emplace_back(j, len);
        }
    }
    std::vector<double> m(n * n, inf);
    using Item = std::pair<double, std::size_t>;
    for (std::size_t src = 0; src < n; ++src) {
        double* row = m.data() + src * n;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        row[src] = 0.0;
        heap.emplace(0.0, src);
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > row[u])
                continue;
            for (auto [v, len] : edges[u]) {
                if (d + len < row[v]) {
                    row[v] = d + len;
                    heap.emplace(row[v], v);
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j)
            if (row[j] == inf)
                throw Error(ErrorKind::InvalidParams, "graph is disconnected");
    }
    // Dijkstra sums edges in different orders from each end; take the smaller.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::min(m[i * n + j], m[j * n + i]);
            m[i * n + j] = m[j * n + i] = d;
        }
    check_basic(m, n);
    FiniteMetricMeasureSpace s;
    s.n_ = n;
    s.dist_ = std::move(m);
    s.measure_ = std::move(measure);
    s.metric_ = MetricKind::Graph;
    return s;
}

inline FiniteMetricMeasureSpace FiniteMetricMeasureSpace::trusted(std::vector<double> matrix,
                                                                  std::vector<double> measure,
                                                                  MetricKind label,
                                                                  std::vector<std::vector<double>> coords)
{
    check_measure(measure);
    const std::size_t n = measure.size();
    check_basic(matrix, n);
    FiniteMetricMeasureSpace s;
    s.n_ = n;
    s.dist_ = std::move(matrix);
    s.measure_ = std::move(measure);
    s.coords_ = std::move(coords);
    s.metric_ = label;
    return s;
}

/// Input for build_space: either a coordinate list or a matrix, plus a metric kind.
struct SpaceInput {
    MetricKind metric = MetricKind::Explicit;
    std::vector<std::vector<double>> coordinates; // for euclidean / l1 / linf
    std::vector<std::vector<double>> matrix;      // distances, or edge lengths for graph
    std::vector<double> measure;
    ValidationOptions validation{};
};

inline FiniteMetricMeasureSpace build_space(const SpaceInput& input)
{
    switch (input.metric) {
    case MetricKind::Euclidean:
    case MetricKind::L1:
    case MetricKind::Linf:
        return FiniteMetricMeasureSpace::from_coordinates(input.coordinates, input.metric, input.measure);
    case MetricKind::Graph:
        return FiniteMetricMeasureSpace::from_graph(input.matrix, input.measure);
    case MetricKind::Explicit:
        break;
    }
    return FiniteMetricMeasureSpace::from_matrix(input.matrix, input.measure, MetricKind::Explicit,
                                                 input.validation);
}

// ---------------------------------------------------------------------------
// Balls

/// Handle for the ball centred at `center` whose radius is the rank-th
/// smallest distinct distance from the centre (rank is 1-based).
struct BallRef {
    PointId center = 0;
    std::uint32_t rank = 1;

    auto operator<=>(const BallRef&) const = default;
};

struct Ball {
    PointId center = 0;
    std::uint32_t rank = 1;
    double radius = 0.0;
    std::vector<PointId> members; // sorted ascending

    bool operator==(const Ball&) const = default;
};

/// Per-centre distance index. For every centre c the points are sorted by
/// (dist(c, .), id); each distinct distance closes one ball, so the ball of
/// rank k is a prefix of that order and a point y belongs to exactly the
/// balls of rank >= rank_of(c, y).
class BallFamily {
public:
    BallFamily() = default;

    explicit BallFamily(const FiniteMetricMeasureSpace& space, unsigned jobs = 1)
        : n_(space.size()), measure_(space.measure().begin(), space.measure().end())
    {
        order_.resize(n_ * n_);
        rank_of_.resize(n_ * n_);
        prefix_mass_.resize(n_ * n_);
        std::vector<std::vector<std::uint32_t>> ends(n_);
        std::vector<std::vector<double>> radii(n_);
        parallel_for(n_, jobs, [&](std::size_t begin, std::size_t end) {
            for (std::size_t c = begin; c < end; ++c) {
                const auto row = space.row(PointId(c));
                PointId* ord = order_.data() + c * n_;
                // (distance, index) pairs sort contiguously; ties fall to the smaller index
                std::vector<std::pair<double, PointId>> keyed(n_);
                for (std::size_t i = 0; i < n_; ++i)
                    keyed[i] = {row[i], PointId(i)};
                std::sort(keyed.begin(), keyed.end());
                for (std::size_t i = 0; i < n_; ++i)
                    ord[i] = keyed[i].second;
                double mass = 0.0;
                std::uint32_t rank = 0;
                for (std::size_t i = 0; i < n_; ++i) {
                    const double d = row[ord[i]];
                    if (i == 0 || d != row[ord[i - 1]]) {
                        if (i > 0)
                            ends[c].push_back(std::uint32_t(i));
                        radii[c].push_back(d);
                        ++rank;
                    }
                    rank_of_[c * n_ + ord[i]] = rank;
                    mass += measure_[ord[i]];
                    prefix_mass_[c * n_ + i] = mass;
                }
                ends[c].push_back(std::uint32_t(n_));
            }
        });
        offset_.assign(n_ + 1, 0);
        for (std::size_t c = 0; c < n_; ++c)
            offset_[c + 1] = offset_[c] + ends[c].size();
        ends_.reserve(offset_[n_]);
        radii_.reserve(offset_[n_]);
        for (std::size_t c = 0; c < n_; ++c) {
            ends_.insert(ends_.end(), ends[c].begin(), ends[c].end());
            radii_.insert(radii_.end(), radii[c].begin(), radii[c].end());
        }
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t ball_count() const noexcept { return ends_.size(); }
    double measure(PointId i) const { return measure_[i]; }
    std::span<const double> measure() const noexcept { return measure_; }

    std::span<const PointId> order(PointId c) const { return {order_.data() + std::size_t(c) * n_, n_}; }
    std::span<const double> prefix_mass(PointId c) const
    {
        return {prefix_mass_.data() + std::size_t(c) * n_, n_};
    }
    /// Member counts indexed by rank - 1.
    std::span<const std::uint32_t> ends(PointId c) const
    {
        return {ends_.data() + offset_[c], offset_[c + 1] - offset_[c]};
    }
    /// Distinct distances from c, ascending; radii(c)[0] == 0.
    std::span<const double> radii(PointId c) const
    {
        return {radii_.data() + offset_[c], offset_[c + 1] - offset_[c]};
    }
    std::uint32_t rank_count(PointId c) const { return std::uint32_t(offset_[c + 1] - offset_[c]); }
    /// Flat index of a ball in [0, ball_count()).
    std::size_t index(BallRef b) const { return offset_[b.center] + b.rank - 1; }
    std::size_t center_offset(PointId c) const { return offset_[c]; }

    std::uint32_t rank_of(PointId c, PointId y) const { return rank_of_[std::size_t(c) * n_ + y]; }
    std::span<const std::uint32_t> rank_row(PointId c) const { return {rank_of_.data() + std::size_t(c) * n_, n_}; }
    std::uint32_t member_count(BallRef b) const { return ends(b.center)[b.rank - 1]; }
    double radius(BallRef b) const { return radii(b.center)[b.rank - 1]; }
    double mass(BallRef b) const { return prefix_mass(b.center)[member_count(b) - 1]; }
    bool contains(BallRef b, PointId y) const { return rank_of(b.center, y) <= b.rank; }

    std::span<const PointId> members(BallRef b) const { return order(b.center).first(member_count(b)); }

    Ball ball(BallRef b) const
    {
        auto m = members(b);
        Ball out{b.center, b.rank, radius(b), {m.begin(), m.end()}};
        std::sort(out.members.begin(), out.members.end());
        return out;
    }

    /// The open ball B(x, r) = {y : dist(x, y) < r}, r > 0.
    BallRef open_ball(PointId x, double r) const
    {
        auto rad = radii(x);
        const auto k = std::lower_bound(rad.begin(), rad.end(), r) - rad.begin();
        return {x, std::uint32_t(std::max<std::ptrdiff_t>(k, 1))};
    }

    /// Mass of the open ball B(x, r).
    double open_ball_mass(PointId x, double r) const { return mass(open_ball(x, r)); }

private:
    std::size_t n_ = 0;
    std::vector<double> measure_;
    std::vector<PointId> order_;
    std::vector<std::uint32_t> rank_of_;
    std::vector<double> prefix_mass_;
    std::vector<std::size_t> offset_;
    std::vector<std::uint32_t> ends_;
    std::vector<double> radii_;
};

/// All balls of the space. Without dedupe there is one Ball per
/// (centre, distinct-distance rank); with dedupe, one per distinct member set
/// (the first in (centre, rank) order is kept).
inline std::vector<Ball> enumerate_balls(const BallFamily& family, bool dedupe)
{
    std::vector<Ball> balls;
    balls.reserve(family.ball_count());
    for (PointId c = 0; c < family.size(); ++c)
        for (std::uint32_t k = 1; k <= family.rank_count(c); ++k)
            balls.push_back(family.ball({c, k}));
    if (dedupe) {
        std::vector<std::size_t> idx(balls.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return balls[a].members < balls[b].members; });
        std::vector<bool> keep(balls.size(), false);
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (i == 0 || balls[idx[i]].members != balls[idx[i - 1]].members)
                keep[idx[i]] = true;
        std::vector<Ball> unique;
        for (std::size_t i = 0; i < balls.size(); ++i)
            if (keep[i])
                unique.push_back(std::move(balls[i]));
        balls = std::move(unique);
    }
    return balls;
}

inline std::vector<Ball> enumerate_balls(const FiniteMetricMeasureSpace& space, bool dedupe)
{
    return enumerate_balls(BallFamily(space), dedupe);
}

// ---------------------------------------------------------------------------
// Geometric constants

struct DoublingResult {
    double value = 1.0;
    PointId center = 0;
    double radius = 0.0; // representative radius of the extremal interval
};

/// sup over x and r > 0 of mu(B(x,2r)) / mu(B(x,r)). Both masses are
/// piecewise constant in r with jumps only at D_x and D_x / 2, so one
/// representative per breakpoint interval gives the exact supremum.
inline DoublingResult doubling_constant(const BallFamily& family)
{
    DoublingResult best;
    std::vector<double> breaks;
    for (PointId x = 0; x < family.size(); ++x) {
        auto rad = family.radii(x);
        breaks.assign(rad.begin(), rad.end());
        for (double d : rad)
            breaks.push_back(d / 2.0);
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
            const double r = 0.5 * (breaks[i] + breaks[i + 1]);
            const double ratio = family.open_ball_mass(x, 2.0 * r) / family.open_ball_mass(x, r);
            if (ratio > best.value) {
                best.value = ratio;
                best.center = x;
                best.radius = r;
            }
        }
    }
    return best;
}

inline DoublingResult doubling_constant(const FiniteMetricMeasureSpace& space)
{
    return doubling_constant(BallFamily(space));
}

struct AnnularDecayQuery {
    double alpha = 1.0;
    double r_min = 0.0;
    double constant = 0.0;
    PointId center = 0;
    double radius = 0.0;
    double delta = 0.0;
};

/// Radii sampled for the annular check around x: the midpoint of each
/// interval between consecutive distinct distances, plus twice the
/// eccentricity for the unbounded interval.
inline std::vector<double> annular_sample_radii(const BallFamily& family, PointId x)
{
    auto rad = family.radii(x);
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < rad.size(); ++i)
        out.push_back(0.5 * (rad[i] + rad[i + 1]));
    if (rad.back() > 0.0)
        out.push_back(2.0 * rad.back());
    return out;
}

/// sup of mu(B(x,r) \ B(x,(1-delta) r)) / (delta^alpha mu(B(x,r))) over
/// centres x, sampled radii r >= r_min, and the critical deltas
/// 1 - d'/r (d' a positive distinct distance from x below r), which are the
/// left ends of the intervals on which the annulus is constant.
inline AnnularDecayQuery annular_decay_constant(const BallFamily& family, double alpha, double r_min)
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw Error(ErrorKind::InvalidParams, "alpha must lie in [0, 1]");
    if (!(r_min > 0.0))
        throw Error(ErrorKind::InvalidParams, "r_min must be positive");
    AnnularDecayQuery q;
    q.alpha = alpha;
    q.r_min = r_min;
    if (family.size() == 1)
        return q;
    bool any_radius = false;
    for (PointId x = 0; x < family.size(); ++x) {
        auto rad = family.radii(x);
        auto pm = family.prefix_mass(x);
        auto ends = family.ends(x);
        for (double r : annular_sample_radii(family, x)) {
            if (r < r_min)
                continue;
            any_radius = true;
            const BallRef ball = family.open_ball(x, r);
            const double ball_mass = family.mass(ball);
            // inner is the mass of B(x, d') with d' = rad[j], i.e. of ranks 1..j.
            for (std::uint32_t j = 1; j < ball.rank; ++j) {
                const double inner = pm[ends[j - 1] - 1];
                const double delta = 1.0 - rad[j] / r;
                const double ratio = (ball_mass - inner) / (std::pow(delta, alpha) * ball_mass);
                if (ratio > q.constant) {
                    q.constant = ratio;
                    q.center = x;
                    q.radius = r;
                    q.delta = delta;
                }
            }
        }
    }
    if (!any_radius)
        throw Error(ErrorKind::EmptyRadiusRange, "no sampled radius reaches r_min");
    return q;
}

inline AnnularDecayQuery annular_decay_constant(const FiniteMetricMeasureSpace& space, double alpha,
                                                double r_min)
{
    return annular_decay_constant(BallFamily(space), alpha, r_min);
}

} // namespace weightlab
