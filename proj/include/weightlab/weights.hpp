#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weightlab/error.hpp"
#include "weightlab/operators.hpp"
#include "weightlab/space.hpp"

namespace weightlab {

enum class Functional { Ap, A1, Ainf, RHs, RHinf, BMO, BLO, BUO };

inline const char* to_string(Functional f)
{
    switch (f) {
    case Functional::Ap: return "Ap";
    case Functional::A1: return "A1";
    case Functional::Ainf: return "Ainf";
    case Functional::RHs: return "RHs";
    case Functional::RHinf: return "RHinf";
    case Functional::BMO: return "BMO";
    case Functional::BLO: return "BLO";
    case Functional::BUO: return "BUO";
    }
    return "?";
}

/// A characteristic constant or oscillation norm with the ball attaining it.
/// `point` is the extremal point inside the ball where one is involved
/// (argmin for A1 / BLO, argmax for RHinf / BUO).
struct FunctionalResult {
    Functional kind = Functional::Ap;
    double parameter = std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    BallRef ball{};
    std::optional<PointId> point;
};

namespace detail {

inline void check_positive(std::span<const double> w, const char* what = "weight")
{
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!(w[i] > 0.0) || !std::isfinite(w[i]))
            throw Error(ErrorKind::NonpositiveWeight, std::string(what) + "(" + std::to_string(i) +
                                                          ") = " + std::to_string(w[i]) + " is not positive");
}

inline void check_exponent(double p, const char* name)
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw Error(ErrorKind::InvalidParams, std::string(name) + " must lie in (1, inf)");
}

struct BallExtrema {
    std::vector<double> min, max;
    std::vector<PointId> argmin, argmax;
};

// Running min / max along each centre's distance order; ties keep the point
// reached first.
inline BallExtrema ball_extrema(const BallFamily& family, std::span<const double> f)
{
    BallExtrema e;
    const std::size_t m = family.ball_count();
    e.min.resize(m);
    e.max.resize(m);
    e.argmin.resize(m);
    e.argmax.resize(m);
    for (PointId c = 0; c < family.size(); ++c) {
        const auto ord = family.order(c);
        const auto ends = family.ends(c);
        const std::size_t off = family.center_offset(c);
        double lo = f[ord[0]], hi = f[ord[0]];
        PointId alo = ord[0], ahi = ord[0];
        std::size_t i = 0;
        for (std::size_t k = 0; k < ends.size(); ++k) {
            for (; i < ends[k]; ++i) {
                const double v = f[ord[i]];
                if (v < lo) {
                    lo = v;
                    alo = ord[i];
                }
                if (v > hi) {
                    hi = v;
                    ahi = ord[i];
                }
            }
            e.min[off + k] = lo;
            e.max[off + k] = hi;
            e.argmin[off + k] = alo;
            e.argmax[off + k] = ahi;
        }
    }
    return e;
}

// Supremum of value(ball index) over all balls. Ties go to the smaller rank,
// then the smaller centre.
template <typename Value>
FunctionalResult sup_over_balls(const BallFamily& family, Functional kind, double parameter, Value value)
{
    FunctionalResult r;
    r.kind = kind;
    r.parameter = parameter;
    bool first = true;
    for (PointId c = 0; c < family.size(); ++c) {
        const std::size_t off = family.center_offset(c);
        for (std::uint32_t k = 1; k <= family.rank_count(c); ++k) {
            const double v = value(off + k - 1);
            if (first || v > r.value || (v == r.value && k < r.ball.rank)) {
                r.value = v;
                r.ball = {c, k};
                first = false;
            }
        }
    }
    return r;
}

inline std::vector<double> pow_values(std::span<const double> w, double e)
{
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        out[i] = std::pow(w[i], e);
    return out;
}

inline std::vector<double> log_values(std::span<const double> w)
{
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        out[i] = std::log(w[i]);
    return out;
}

} // namespace detail

/// [w]_{A_p} = sup_B (avg_B w)(avg_B w^{-1/(p-1)})^{p-1}, 1 < p < inf.
inline FunctionalResult ap_constant(const BallFamily& family, std::span<const double> w, double p)
{
    detail::check_length(family, w);
    detail::check_positive(w);
    detail::check_exponent(p, "p");
    const auto a = ball_averages(family, w);
    const auto b = ball_averages(family, detail::pow_values(w, -1.0 / (p - 1.0)));
    return detail::sup_over_balls(family, Functional::Ap, p,
                                  [&](std::size_t i) { return a[i] * std::pow(b[i], p - 1.0); });
}

/// [w]_{A_1} = sup_B (avg_B w) / (min_B w).
inline FunctionalResult a1_constant(const BallFamily& family, std::span<const double> w)
{
    detail::check_length(family, w);
    detail::check_positive(w);
    const auto a = ball_averages(family, w);
    const auto e = detail::ball_extrema(family, w);
    auto r = detail::sup_over_balls(family, Functional::A1, std::numeric_limits<double>::quiet_NaN(),
                                    [&](std::size_t i) { return a[i] / e.min[i]; });
    r.point = e.argmin[family.index(r.ball)];
    return r;
}

/// The maximal-function form max_x Mw(x) / w(x); equals a1_constant on finite spaces.
inline FunctionalResult a1_constant_maximal_form(const BallFamily& family, std::span<const double> w)
{
    detail::check_length(family, w);
    detail::check_positive(w);
    const auto mw = maximal(family, w);
    FunctionalResult r;
    r.kind = Functional::A1;
    for (PointId x = 0; x < family.size(); ++x) {
        const double v = mw.values[x] / w[x];
        if (x == 0 || v > r.value) {
            r.value = v;
            r.ball = mw.witness[x];
            r.point = x;
        }
    }
    return r;
}

/// [w]_{A_inf} = sup_B (avg_B w) exp(-avg_B log w).
inline FunctionalResult ainf_constant(const BallFamily& family, std::span<const double> w)
{
    detail::check_length(family, w);
    detail::check_positive(w);
    const auto a = ball_averages(family, w);
    const auto l = ball_averages(family, detail::log_values(w));
    return detail::sup_over_balls(family, Functional::Ainf, std::numeric_limits<double>::quiet_NaN(),
                                  [&](std::size_t i) { return a[i] * std::exp(-l[i]); });
}

/// Reverse Hoelder constant sup_B (avg_B w^s)^{1/s} / avg_B w, 1 < s < inf.
inline FunctionalResult rhs_constant(const BallFamily& family, std::span<const double> w, double s)
{
    detail::check_length(family, w);
    detail::check_positive(w);
    detail::check_exponent(s, "s");
    const auto a = ball_averages(family, w);
    const auto b = ball_averages(family, detail::pow_values(w, s));
    return detail::sup_over_balls(family, Functional::RHs, s,
                                  [&](std::size_t i) { return std::pow(b[i], 1.0 / s) / a[i]; });
}

/// RH_inf constant sup_B (max_B w) / avg_B w.
inline FunctionalResult rhinf_constant(const BallFamily& family, std::span<const double> w)
{
    detail::check_length(family, w);
    detail::check_positive(w);
    const auto a = ball_averages(family, w);
    const auto e = detail::ball_extrema(family, w);
    auto r = detail::sup_over_balls(family, Functional::RHinf, std::numeric_limits<double>::quiet_NaN(),
                                    [&](std::size_t i) { return e.max[i] / a[i]; });
    r.point = e.argmax[family.index(r.ball)];
    return r;
}

/// The minimal-function form max_x w(x) / mw(x).
inline FunctionalResult rhinf_constant_minimal_form(const BallFamily& family, std::span<const double> w)
{
    detail::check_length(family, w);
    detail::check_positive(w);
    const auto mw = minimal(family, w);
    FunctionalResult r;
    r.kind = Functional::RHinf;
    for (PointId x = 0; x < family.size(); ++x) {
        const double v = w[x] / mw.values[x];
        if (x == 0 || v > r.value) {
            r.value = v;
            r.ball = mw.witness[x];
            r.point = x;
        }
    }
    return r;
}

/// sup_B avg_B |f - f_B|. Each ball is summed directly, O(n^3) overall.
inline FunctionalResult bmo_norm(const BallFamily& family, std::span<const double> f)
{
    detail::check_length(family, f);
    const auto a = ball_averages(family, f);
    std::vector<double> osc(family.ball_count());
    for (PointId c = 0; c < family.size(); ++c) {
        const auto ord = family.order(c);
        const auto pm = family.prefix_mass(c);
        const auto ends = family.ends(c);
        const std::size_t off = family.center_offset(c);
        for (std::size_t k = 0; k < ends.size(); ++k) {
            const double mean = a[off + k];
            double s = 0.0;
            for (std::size_t i = 0; i < ends[k]; ++i)
                s += family.measure(ord[i]) * std::abs(f[ord[i]] - mean);
            osc[off + k] = s / pm[ends[k] - 1];
        }
    }
    return detail::sup_over_balls(family, Functional::BMO, std::numeric_limits<double>::quiet_NaN(),
                                  [&](std::size_t i) { return osc[i]; });
}

/// sup_B (avg_B f - min_B f).
inline FunctionalResult blo_norm(const BallFamily& family, std::span<const double> f)
{
    detail::check_length(family, f);
    const auto a = ball_averages(family, f);
    const auto e = detail::ball_extrema(family, f);
    auto r = detail::sup_over_balls(family, Functional::BLO, std::numeric_limits<double>::quiet_NaN(),
                                    [&](std::size_t i) { return a[i] - e.min[i]; });
    r.point = e.argmin[family.index(r.ball)];
    return r;
}

/// sup_B (max_B f - avg_B f).
inline FunctionalResult buo_norm(const BallFamily& family, std::span<const double> f)
{
    detail::check_length(family, f);
    const auto a = ball_averages(family, f);
    const auto e = detail::ball_extrema(family, f);
    auto r = detail::sup_over_balls(family, Functional::BUO, std::numeric_limits<double>::quiet_NaN(),
                                    [&](std::size_t i) { return e.max[i] - a[i]; });
    r.point = e.argmax[family.index(r.ball)];
    return r;
}

// ---------------------------------------------------------------------------
// Pointwise transforms

enum class TransformKind { Power, Inverse, Product, Log, Exp };

struct Transform {
    TransformKind kind = TransformKind::Power;
    double exponent = 1.0;           // Power
    std::vector<double> factor;      // Product

    static Transform power(double s) { return {TransformKind::Power, s, {}}; }
    static Transform inverse() { return {TransformKind::Inverse, -1.0, {}}; }
    static Transform product(std::vector<double> phi) { return {TransformKind::Product, 1.0, std::move(phi)}; }
    static Transform log() { return {TransformKind::Log, 1.0, {}}; }
    static Transform exp() { return {TransformKind::Exp, 1.0, {}}; }
};

inline std::vector<double> transform(std::span<const double> w, const Transform& t)
{
    std::vector<double> out(w.begin(), w.end());
    switch (t.kind) {
    case TransformKind::Power:
        detail::check_positive(w);
        if (t.exponent != 1.0)
            for (auto& v : out)
                v = std::pow(v, t.exponent);
        break;
    case TransformKind::Inverse:
        detail::check_positive(w);
        for (auto& v : out)
            v = 1.0 / v;
        break;
    case TransformKind::Product:
        if (t.factor.size() != w.size())
            throw Error(ErrorKind::InvalidParams, "product factor length mismatch");
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] *= t.factor[i];
        break;
    case TransformKind::Log:
        detail::check_positive(w);
        for (auto& v : out)
            v = std::log(v);
        break;
    case TransformKind::Exp:
        for (auto& v : out)
            v = std::exp(v);
        break;
    }
    return out;
}

/// max w / min w for a positive weight.
inline double dynamic_range(std::span<const double> w)
{
    double lo = w[0], hi = w[0];
    for (double v : w) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi / lo;
}

} // namespace weightlab
