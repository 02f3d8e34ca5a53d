#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "weightlab/error.hpp"
#include "weightlab/space.hpp"

namespace weightlab {

enum class MeasureLaw { Uniform, Random };

inline MeasureLaw parse_measure_law(const std::string& name)
{
    if (name == "uniform") return MeasureLaw::Uniform;
    if (name == "random") return MeasureLaw::Random;
    throw Error(ErrorKind::InvalidParams, "unknown measure law '" + name + "'");
}

enum class SpaceKind { Grid, Path, Tree, RandomPoints, Snowflake };

inline SpaceKind parse_space_kind(const std::string& name)
{
    if (name == "grid") return SpaceKind::Grid;
    if (name == "path") return SpaceKind::Path;
    if (name == "tree") return SpaceKind::Tree;
    if (name == "random-points") return SpaceKind::RandomPoints;
    if (name == "snowflake") return SpaceKind::Snowflake;
    throw Error(ErrorKind::InvalidParams, "unknown space kind '" + name + "'");
}

struct GeneratorParams {
    SpaceKind kind = SpaceKind::Grid;
    std::vector<std::size_t> shape;      // grid
    std::size_t n = 0;                   // path, tree, random-points
    std::size_t dim = 2;                 // random-points
    MetricKind metric = MetricKind::Euclidean;
    MeasureLaw measure = MeasureLaw::Uniform;
    double epsilon = 1.0;                // snowflake exponent
    const FiniteMetricMeasureSpace* base = nullptr; // snowflake input
};

namespace detail {

inline std::vector<double> make_measure(std::size_t n, MeasureLaw law, std::mt19937_64& rng)
{
    std::vector<double> m(n, 1.0);
    if (law == MeasureLaw::Random) {
        std::uniform_real_distribution<double> u(0.5, 2.0);
        for (auto& v : m)
            v = u(rng);
    }
    return m;
}

} // namespace detail

/// Unit-step lattice with the given side lengths.
inline FiniteMetricMeasureSpace make_grid(const std::vector<std::size_t>& shape, MetricKind metric,
                                          MeasureLaw law, std::uint64_t seed)
{
    if (shape.empty())
        throw Error(ErrorKind::InvalidParams, "grid needs a shape");
    std::size_t n = 1;
    for (auto s : shape) {
        if (s == 0)
            throw Error(ErrorKind::InvalidParams, "grid side must be positive");
        n *= s;
    }
    std::vector<std::vector<double>> coords(n, std::vector<double>(shape.size()));
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = i;
        for (std::size_t d = shape.size(); d-- > 0;) {
            coords[i][d] = double(r % shape[d]);
            r /= shape[d];
        }
    }
    std::mt19937_64 rng(seed);
    return FiniteMetricMeasureSpace::from_coordinates(std::move(coords), metric,
                                                      detail::make_measure(n, law, rng));
}

/// Points on a line with i.i.d. gaps in [0.5, 1.5].
inline FiniteMetricMeasureSpace make_path(std::size_t n, MeasureLaw law, std::uint64_t seed)
{
    if (n == 0)
        throw Error(ErrorKind::InvalidParams, "path needs n >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> gap(0.5, 1.5);
    std::vector<std::vector<double>> coords(n, std::vector<double>(1, 0.0));
    for (std::size_t i = 1; i < n; ++i)
        coords[i][0] = coords[i - 1][0] + gap(rng);
    return FiniteMetricMeasureSpace::from_coordinates(std::move(coords), MetricKind::Euclidean,
                                                      detail::make_measure(n, law, rng));
}

/// Random recursive tree (node i hangs off a uniform earlier node) with edge
/// lengths in [0.5, 1.5]; shortest-path metric.
inline FiniteMetricMeasureSpace make_tree(std::size_t n, MeasureLaw law, std::uint64_t seed)
{
    if (n == 0)
        throw Error(ErrorKind::InvalidParams, "tree needs n >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> len(0.5, 1.5);
    std::vector<std::size_t> parent(n, 0);
    std::vector<double> depth(n, 0.0);
    std::vector<double> edge(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        parent[i] = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
        edge[i] = len(rng);
        depth[i] = depth[parent[i]] + edge[i];
    }
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (std::size_t i = 1; i < n; ++i) {
        adj[i].emplace_back(parent[i], edge[i]);
        adj[parent[i]].emplace_back(i, edge[i]);
    }
    std::vector<double> m(n * n, 0.0);
    std::vector<std::size_t> stack;
    std::vector<bool> seen(n);
    for (std::size_t src = 0; src < n; ++src) {
        std::fill(seen.begin(), seen.end(), false);
        double* row = m.data() + src * n;
        stack.assign(1, src);
        seen[src] = true;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (auto [v, l] : adj[u]) {
                if (!seen[v]) {
                    seen[v] = true;
                    row[v] = row[u] + l;
                    stack.push_back(v);
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            m[i * n + j] = m[j * n + i] = std::min(m[i * n + j], m[j * n + i]);
    return FiniteMetricMeasureSpace::trusted(std::move(m), detail::make_measure(n, law, rng), MetricKind::Graph);
}

/// Uniform points in the unit cube.
inline FiniteMetricMeasureSpace make_random_points(std::size_t n, std::size_t dim, MetricKind metric,
                                                   MeasureLaw law, std::uint64_t seed)
{
    if (n == 0 || dim == 0)
        throw Error(ErrorKind::InvalidParams, "random-points needs n >= 1 and dim >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> coords(n, std::vector<double>(dim));
    for (auto& c : coords)
        for (auto& v : c)
            v = u(rng);
    return FiniteMetricMeasureSpace::from_coordinates(std::move(coords), metric,
                                                      detail::make_measure(n, law, rng));
}

/// d -> d^epsilon; a metric again for 0 < epsilon <= 1. Measures are kept.
inline FiniteMetricMeasureSpace make_snowflake(const FiniteMetricMeasureSpace& base, double epsilon)
{
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw Error(ErrorKind::InvalidParams, "snowflake exponent must lie in (0, 1]");
    std::vector<double> m(base.distances().begin(), base.distances().end());
    for (auto& d : m)
        d = std::pow(d, epsilon);
    return FiniteMetricMeasureSpace::trusted(std::move(m), {base.measure().begin(), base.measure().end()},
                                             MetricKind::Explicit);
}

inline FiniteMetricMeasureSpace generate(const GeneratorParams& p, std::uint64_t seed)
{
    switch (p.kind) {
    case SpaceKind::Grid: return make_grid(p.shape, p.metric, p.measure, seed);
    case SpaceKind::Path: return make_path(p.n, p.measure, seed);
    case SpaceKind::Tree: return make_tree(p.n, p.measure, seed);
    case SpaceKind::RandomPoints: return make_random_points(p.n, p.dim, p.metric, p.measure, seed);
    case SpaceKind::Snowflake:
        if (p.base == nullptr)
            throw Error(ErrorKind::InvalidParams, "snowflake needs a base space");
        return make_snowflake(*p.base, p.epsilon);
    }
    throw Error(ErrorKind::InvalidParams, "unknown generator");
}

} // namespace weightlab
