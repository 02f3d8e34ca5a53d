#pragma once

// Seeded random (space, weight) instances for the verification suite.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "weightlab/generate.hpp"
#include "weightlab/space.hpp"

namespace weightlab {

enum class WeightLaw { PowerLaw, ExpBmo, UniformLog };

inline const char* to_string(WeightLaw law)
{
    switch (law) {
    case WeightLaw::PowerLaw: return "power-law";
    case WeightLaw::ExpBmo: return "exp-bmo";
    case WeightLaw::UniformLog: return "uniform-log";
    }
    return "?";
}

namespace detail {

inline double min_positive_distance(const FiniteMetricMeasureSpace& s, PointId x)
{
    double m = INFINITY;
    for (double d : s.row(x))
        if (d > 0.0)
            m = std::min(m, d);
    return std::isfinite(m) ? m : 1.0;
}

} // namespace detail

/// w(x) = (d(x, x0) + h)^gamma, h the nearest-neighbour distance of x0,
/// gamma uniform in [-1.5, 2].
inline std::vector<double> power_law_weight(const FiniteMetricMeasureSpace& s, std::mt19937_64& rng)
{
    std::uniform_int_distribution<PointId> pick(0, PointId(s.size() - 1));
    const PointId x0 = pick(rng);
    const double gamma = std::uniform_real_distribution<double>(-1.5, 2.0)(rng);
    const double h = detail::min_positive_distance(s, x0);
    std::vector<double> w(s.size());
    for (PointId x = 0; x < s.size(); ++x)
        w[x] = std::pow(s.dist(x, x0) + h, gamma);
    return w;
}

/// w = exp(f) with f a sum of three logarithmic bumps c_k log(d(x, x_k) + h_k),
/// c_k uniform in [-1, 1]: the prototype unbounded BMO function.
inline std::vector<double> exp_bmo_weight(const FiniteMetricMeasureSpace& s, std::mt19937_64& rng)
{
    std::uniform_int_distribution<PointId> pick(0, PointId(s.size() - 1));
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> f(s.size(), 0.0);
    for (int k = 0; k < 3; ++k) {
        const PointId xk = pick(rng);
        const double c = coef(rng);
        const double h = detail::min_positive_distance(s, xk);
        for (PointId x = 0; x < s.size(); ++x)
            f[x] += c * std::log(s.dist(x, xk) + h);
    }
    for (auto& v : f)
        v = std::exp(v);
    return f;
}

/// log w uniform in [-L, L], L uniform in [0.5, 3].
inline std::vector<double> uniform_log_weight(std::size_t n, std::mt19937_64& rng)
{
    const double spread = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<double> w(n);
    for (auto& v : w)
        v = std::exp(u(rng));
    return w;
}

inline std::vector<double> random_weight(const FiniteMetricMeasureSpace& s, WeightLaw law, std::mt19937_64& rng)
{
    switch (law) {
    case WeightLaw::PowerLaw: return power_law_weight(s, rng);
    case WeightLaw::ExpBmo: return exp_bmo_weight(s, rng);
    case WeightLaw::UniformLog: return uniform_log_weight(s.size(), rng);
    }
    return {};
}

struct RandomInstance {
    std::string label;
    FiniteMetricMeasureSpace space;
    std::vector<double> weight;
    std::vector<double> multiplier;
    double p = 2.0;
    double s = 2.0;
};

/// A space with 2..max_n points from one of the generator families.
inline FiniteMetricMeasureSpace random_space(std::mt19937_64& rng, std::size_t max_n, std::string& label)
{
    max_n = std::max<std::size_t>(max_n, 2);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, max_n)(rng);
    const auto law = (rng() & 1) ? MeasureLaw::Random : MeasureLaw::Uniform;
    const std::uint64_t seed = rng();
    const MetricKind metrics[] = {MetricKind::Euclidean, MetricKind::L1, MetricKind::Linf};
    const MetricKind metric = metrics[rng() % 3];
    switch (rng() % 5) {
    case 0: {
        std::size_t a = std::max<std::size_t>(1, std::size_t(std::sqrt(double(n))));
        if (rng() & 1)
            a = 1;
        const std::size_t b = std::max<std::size_t>(2 / a, n / a);
        label = "grid(" + std::to_string(a) + "x" + std::to_string(b) + "," + std::string(to_string(metric)) + ")";
        return make_grid(a == 1 ? std::vector<std::size_t>{b} : std::vector<std::size_t>{a, b}, metric, law, seed);
    }
    case 1:
        label = "path(" + std::to_string(n) + ")";
        return make_path(n, law, seed);
    case 2:
        label = "tree(" + std::to_string(n) + ")";
        return make_tree(n, law, seed);
    case 3: {
        const std::size_t dim = 1 + rng() % 3;
        label = "random-points(" + std::to_string(n) + ",d" + std::to_string(dim) + "," +
                std::string(to_string(metric)) + ")";
        return make_random_points(n, dim, metric, law, seed);
    }
    default: {
        const double eps = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
        label = "snowflake(random-points(" + std::to_string(n) + "),eps=" + std::to_string(eps) + ")";
        return make_snowflake(make_random_points(n, 2, metric, law, seed), eps);
    }
    }
}

/// `count` instances drawn sequentially from one generator seeded by `seed`.
inline std::vector<RandomInstance> random_batch(std::uint64_t seed, std::size_t count, std::size_t max_n)
{
    std::mt19937_64 rng(seed);
    const double exponents[] = {1.5, 2.0, 3.0};
    std::vector<RandomInstance> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        RandomInstance inst;
        std::string space_label;
        inst.space = random_space(rng, max_n, space_label);
        const auto law = static_cast<WeightLaw>(k % 3);
        inst.weight = random_weight(inst.space, law, rng);
        inst.multiplier = random_weight(inst.space, static_cast<WeightLaw>(rng() % 3), rng);
        inst.p = exponents[rng() % 3];
        inst.s = exponents[rng() % 3];
        inst.label = "#" + std::to_string(k) + " " + space_label + " " + to_string(law);
        out.push_back(std::move(inst));
    }
    return out;
}

} // namespace weightlab
