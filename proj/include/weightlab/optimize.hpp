#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "weightlab/parallel.hpp"

namespace weightlab {

struct LineMinimum {
    double x;
    double value;
};

/// Golden-section minimization of a unimodal g on [lo, hi].
template <typename G>
LineMinimum golden_section(G&& g, double lo, double hi, double tol = 1e-9, int max_iter = 200)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double gc = g(c), gd = g(d);
    for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (gc <= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    return gc <= gd ? LineMinimum{c, gc} : LineMinimum{d, gd};
}

struct DescentOptions {
    int starts = 8;
    int max_sweeps = 100;
    double rel_tol = 1e-6;  // stop when a sweep improves by less than this, relatively
    double bracket = 1.0;   // initial half-width of each line search
    double line_tol = 1e-9;
    double start_spread = 1.0;
    bool random_directions = true; // coordinate moves alone stall at kinks of a max
    std::size_t random_per_sweep = 6;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

struct DescentResult {
    std::vector<double> x;
    double value = 0.0;
    double initial_value = 0.0;
    int sweeps = 0;
    int start = 0;
    bool stalled = false; // sweep budget ran out before the stopping rule fired
};

namespace detail {

// Minimizes g on a bracket around 0, widening it while the minimum sits at
// its edge. Returns the step only if it strictly improves on g0.
template <typename G>
std::optional<double> line_search(G&& g, double g0, double bracket, double tol)
{
    double h = bracket;
    LineMinimum best{0.0, g0};
    for (int widen = 0; widen < 6; ++widen) {
        auto m = golden_section(g, -h, h, tol);
        if (m.value < best.value)
            best = m;
        if (std::abs(m.x) < 0.9 * h)
            break;
        h *= 4.0;
    }
    if (!(best.value < g0))
        return std::nullopt;
    return best.x;
}

// Objectives may offer coordinate(x, i): a cheaper restriction of f to the
// line x + tau e_i.
template <typename F>
concept HasCoordinateRestriction = requires(F& f, const std::vector<double>& x, std::size_t i) {
    { f.coordinate(x, i)(0.0) } -> std::convertible_to<double>;
};

template <typename F>
void move_along(F& f, std::vector<double>& x, double& fx, const std::vector<double>& d, std::size_t axis,
                const DescentOptions& opt, std::vector<double>& scratch)
{
    std::optional<double> tau;
    if (axis < x.size()) {
        if constexpr (HasCoordinateRestriction<F>) {
            tau = line_search(f.coordinate(x, axis), fx, opt.bracket, opt.line_tol);
        } else {
            tau = line_search(
                [&](double t) {
                    scratch = x;
                    scratch[axis] += t;
                    return f(scratch);
                },
                fx, opt.bracket, opt.line_tol);
        }
    } else {
        tau = line_search(
            [&](double t) {
                for (std::size_t i = 0; i < x.size(); ++i)
                    scratch[i] = x[i] + t * d[i];
                return f(scratch);
            },
            fx, opt.bracket, opt.line_tol);
    }
    if (!tau)
        return;
    for (std::size_t i = 0; i < x.size(); ++i)
        scratch[i] = axis < x.size() ? x[i] + (i == axis ? *tau : 0.0) : x[i] + *tau * d[i];
    // the restriction and the full objective may differ in the last bits;
    // the full one decides
    const double fn = f(scratch);
    if (fn < fx) {
        x = scratch;
        fx = fn;
    }
}

template <typename F>
DescentResult descend(F& f, std::vector<double> x, const DescentOptions& opt, std::mt19937_64& rng)
{
    DescentResult r;
    const std::size_t n = x.size();
    double fx = f(x);
    r.initial_value = fx;
    std::vector<double> d(n), scratch(n), before;
    std::normal_distribution<double> normal(0.0, 1.0);
    r.stalled = true;
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        const double f0 = fx;
        before = x;
        for (std::size_t i = 0; i < n; ++i)
            move_along(f, x, fx, d, i, opt, scratch);
        if (opt.random_directions && n > 1) {
            const std::size_t extra = std::min<std::size_t>(n, opt.random_per_sweep);
            for (std::size_t k = 0; k < extra; ++k) {
                double norm = 0.0;
                for (auto& v : d) {
                    v = normal(rng);
                    norm += v * v;
                }
                for (auto& v : d)
                    v /= std::sqrt(norm);
                move_along(f, x, fx, d, n, opt, scratch);
            }
            for (std::size_t i = 0; i < n; ++i)
                d[i] = x[i] - before[i];
            if (std::any_of(d.begin(), d.end(), [](double v) { return v != 0.0; }))
                move_along(f, x, fx, d, n, opt, scratch);
        }
        r.sweeps = sweep + 1;
        if (f0 - fx <= opt.rel_tol * std::abs(f0)) {
            r.stalled = false;
            break;
        }
    }
    r.x = std::move(x);
    r.value = fx;
    return r;
}

} // namespace detail

/// Multistart descent. Start 0 is the origin, the others are uniform in
/// [-spread, spread]^dim drawn from (seed, start). The winner is the smallest
/// value, ties to the lower start index, so the result does not depend on jobs.
template <typename MakeObjective>
DescentResult multistart_descent(MakeObjective&& make_objective, std::size_t dim, const DescentOptions& opt)
{
    const int starts = std::max(1, opt.starts);
    std::vector<DescentResult> results(starts);
    parallel_for(std::size_t(starts), opt.jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            std::seed_seq seq{std::uint64_t(opt.seed & 0xffffffffu), std::uint64_t(opt.seed >> 32), std::uint64_t(k)};
            std::mt19937_64 rng(seq);
            std::vector<double> x0(dim, 0.0);
            if (k > 0) {
                std::uniform_real_distribution<double> u(-opt.start_spread, opt.start_spread);
                for (auto& v : x0)
                    v = u(rng);
            }
            auto f = make_objective();
            results[k] = detail::descend(f, std::move(x0), opt, rng);
            results[k].start = int(k);
        }
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < results.size(); ++k)
        if (results[k].value < results[best].value)
            best = k;
    const double origin_value = results[0].initial_value;
    auto out = std::move(results[best]);
    out.initial_value = origin_value;
    return out;
}

} // namespace weightlab
