#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "weightlab/error.hpp"
#include "weightlab/parallel.hpp"
#include "weightlab/space.hpp"

namespace weightlab {

/// Values of an extremal operator together with the ball realizing each value.
struct OperatorOutput {
    std::vector<double> values;
    std::vector<BallRef> witness;
};

namespace detail {

inline void check_length(const BallFamily& family, std::span<const double> f)
{
    if (f.size() != family.size())
        throw Error(ErrorKind::InvalidParams, "function length " + std::to_string(f.size()) +
                                                  " differs from point count " + std::to_string(family.size()));
    for (double v : f)
        if (!std::isfinite(v))
            throw Error(ErrorKind::InvalidParams, "function has a non-finite entry");
}

// Average over each ball of centre c, accumulated in ascending distance rank
// relative to f(c). Shifting by the centre value keeps constants exact and
// makes the table of -f the exact negation of the table of f.
inline void center_averages(const BallFamily& family, std::span<const double> f, PointId c, double* out)
{
    const auto ord = family.order(c);
    const auto pm = family.prefix_mass(c);
    const auto ends = family.ends(c);
    const double shift = f[c];
    double sum = 0.0;
    std::size_t i = 0;
    for (std::size_t k = 0; k < ends.size(); ++k) {
        for (; i < ends[k]; ++i)
            sum += family.measure(ord[i]) * (f[ord[i]] - shift);
        out[k] = shift + sum / pm[i - 1];
    }
}

} // namespace detail

/// Averages of f over every (centre, rank) ball, indexed by BallFamily::index.
inline std::vector<double> ball_averages(const BallFamily& family, std::span<const double> f, unsigned jobs = 1)
{
    detail::check_length(family, f);
    std::vector<double> avg(family.ball_count());
    parallel_for(family.size(), jobs, [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c)
            detail::center_averages(family, f, PointId(c), avg.data() + family.center_offset(PointId(c)));
    });
    return avg;
}

namespace detail {

// Extremal ball average over the balls containing each point. A ball of
// centre c contains y iff its rank is at least rank_of(c, y), so per centre a
// suffix extremum over ranks answers every y. Ties go to the smaller rank,
// then to the smaller centre.
template <typename Better>
OperatorOutput natural_extremal(const BallFamily& family, std::span<const double> f, Better better,
                                unsigned jobs)
{
    const auto avg = ball_averages(family, f, jobs);
    const std::size_t n = family.size();
    std::vector<std::uint32_t> best(avg.size());
    parallel_for(n, jobs, [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) {
            const std::size_t off = family.center_offset(PointId(c));
            const std::uint32_t ranks = family.rank_count(PointId(c));
            best[off + ranks - 1] = ranks;
            for (std::uint32_t k = ranks - 1; k >= 1; --k) {
                const std::uint32_t prev = best[off + k];
                best[off + k - 1] = better(avg[off + prev - 1], avg[off + k - 1]) ? prev : k;
            }
        }
    });
    OperatorOutput out;
    out.values.resize(n);
    out.witness.resize(n);
    // Centres outer, points inner: rank_of and best are then read row by row.
    parallel_for(n, jobs, [&](std::size_t b, std::size_t e) {
        for (PointId c = 0; c < n; ++c) {
            const std::size_t off = family.center_offset(c);
            const auto rank = family.rank_row(c);
            for (std::size_t y = b; y < e; ++y) {
                const std::uint32_t k = best[off + rank[y] - 1];
                const double v = avg[off + k - 1];
                auto& value = out.values[y];
                auto& wit = out.witness[y];
                if (c == 0 || better(v, value) || (v == value && k < wit.rank)) {
                    value = v;
                    wit = {c, k};
                }
            }
        }
    });
    return out;
}

} // namespace detail

/// M-natural: sup of signed ball averages over balls containing each point.
inline OperatorOutput natural_maximal(const BallFamily& family, std::span<const double> f, unsigned jobs = 1)
{
    return detail::natural_extremal(family, f, std::greater<double>{}, jobs);
}

/// m-natural: inf of signed ball averages over balls containing each point.
inline OperatorOutput natural_minimal(const BallFamily& family, std::span<const double> f, unsigned jobs = 1)
{
    return detail::natural_extremal(family, f, std::less<double>{}, jobs);
}

inline std::vector<double> abs_values(std::span<const double> f)
{
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        a[i] = std::abs(f[i]);
    return a;
}

/// Hardy-Littlewood maximal function: natural_maximal of |f|.
inline OperatorOutput maximal(const BallFamily& family, std::span<const double> f, unsigned jobs = 1)
{
    return natural_maximal(family, abs_values(f), jobs);
}

/// Minimal function: natural_minimal of |f|.
inline OperatorOutput minimal(const BallFamily& family, std::span<const double> f, unsigned jobs = 1)
{
    return natural_minimal(family, abs_values(f), jobs);
}

/// Direct O(n^3) evaluation used to cross-check the sweep (bench, CLI).
/// Ball averages are summed in point-index order; every (point, centre, rank)
/// triple is visited.
inline std::vector<double> naive_natural_extremal(const FiniteMetricMeasureSpace& space, std::span<const double> f,
                                                  bool maximum)
{
    const std::size_t n = space.size();
    std::vector<std::vector<double>> radii(n);
    std::vector<std::vector<double>> avgs(n);
    for (PointId c = 0; c < n; ++c) {
        auto row = space.row(c);
        radii[c].assign(row.begin(), row.end());
        std::sort(radii[c].begin(), radii[c].end());
        radii[c].erase(std::unique(radii[c].begin(), radii[c].end()), radii[c].end());
        for (double r : radii[c]) {
            double s = 0.0, m = 0.0;
            for (PointId i = 0; i < n; ++i)
                if (row[i] <= r) {
                    s += space.measure(i) * f[i];
                    m += space.measure(i);
                }
            avgs[c].push_back(s / m);
        }
    }
    std::vector<double> out(n);
    for (PointId y = 0; y < n; ++y) {
        bool first = true;
        for (PointId c = 0; c < n; ++c)
            for (std::size_t k = 0; k < radii[c].size(); ++k)
                if (space.dist(c, y) <= radii[c][k]) {
                    const double v = avgs[c][k];
                    if (first || (maximum ? v > out[y] : v < out[y]))
                        out[y] = v;
                    first = false;
                }
    }
    return out;
}

} // namespace weightlab
