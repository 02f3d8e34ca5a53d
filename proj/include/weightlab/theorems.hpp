#pragma once

// Machine checks of the constant-explicit inequalities between weight
// constants, oscillation norms and the maximal operators. Every term in a hard
// check comes from operators.hpp / weights.hpp; claims whose constants are not
// pinned are only tabulated (report_unquantified).

#include <cmath>
#include <exception>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "weightlab/operators.hpp"
#include "weightlab/report.hpp"
#include "weightlab/weights.hpp"

namespace weightlab {

struct CheckOptions {
    Tolerances tolerances;
    std::string label;
    std::string digest;
    unsigned jobs = 1;
};

namespace detail {

inline CheckReport new_report(const std::string& id, const CheckOptions& opt)
{
    CheckReport r;
    r.id = id;
    r.label = opt.label;
    r.digest = opt.digest;
    return r;
}

inline CheckReport finish(const std::string& id, const Comparison& cmp, const CheckOptions& opt,
                          std::span<const double> w = {})
{
    auto r = new_report(id, opt);
    cmp.fill(r);
    if (!w.empty()) {
        const double range = dynamic_range(w);
        if (range > opt.tolerances.warn_range)
            r.note = "ill-conditioned: weight dynamic range " + csv_number(range);
    }
    return r;
}

inline double equality_tol(const CheckOptions& opt, std::span<const double> w)
{
    return opt.tolerances.equality_for(dynamic_range(w));
}

inline std::vector<double> negated(std::span<const double> f)
{
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = -f[i];
    return out;
}

inline Witness at_point(PointId x, const char* bound = "") { return {x, std::nullopt, bound}; }
inline Witness at_ball(BallRef b, const char* bound = "") { return {std::nullopt, b, bound}; }

} // namespace detail

/// 0 <= log M♮w - M♮(log w) <= log [w]_inf and the same for m♮, pointwise.
inline std::vector<CheckReport> check_commutation(const BallFamily& family, std::span<const double> w,
                                                  const CheckOptions& opt = {})
{
    detail::check_positive(w);
    const auto lw = detail::log_values(w);
    const double log_ainf = std::log(ainf_constant(family, w).value);
    std::vector<CheckReport> out;
    for (bool upper : {true, false}) {
        const auto mw = upper ? natural_maximal(family, w, opt.jobs) : natural_minimal(family, w, opt.jobs);
        const auto ml = upper ? natural_maximal(family, lw, opt.jobs) : natural_minimal(family, lw, opt.jobs);
        Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
        double widest = 0.0;
        for (PointId x = 0; x < family.size(); ++x) {
            const double gap = std::log(mw.values[x]) - ml.values[x];
            widest = std::max(widest, gap);
            cmp.at_most(0.0, gap, detail::at_point(x, "lower"));
            cmp.at_most(gap, log_ainf, detail::at_point(x, "upper"));
        }
        auto r = detail::finish(upper ? "commutation.max" : "commutation.min", cmp, opt, w);
        r.terms = {{"log_ainf", log_ainf}, {"max_gap", widest}};
        out.push_back(std::move(r));
    }
    return out;
}

/// ||f||_BLO = max (M♮f - f) and ||f||_BUO = max (f - m♮f).
inline std::vector<CheckReport> check_oscillation_characterization(const BallFamily& family,
                                                                   std::span<const double> f,
                                                                   const CheckOptions& opt = {})
{
    detail::check_length(family, f);
    std::vector<CheckReport> out;
    {
        const auto blo = blo_norm(family, f);
        const auto mf = natural_maximal(family, f, opt.jobs);
        double best = -INFINITY;
        PointId at = 0;
        for (PointId x = 0; x < family.size(); ++x)
            if (mf.values[x] - f[x] > best) {
                best = mf.values[x] - f[x];
                at = x;
            }
        Comparison cmp(Relation::Equal, opt.tolerances.equality);
        cmp.equal(blo.value, best, {at, blo.ball, ""});
        out.push_back(detail::finish("oscillation.blo", cmp, opt));
    }
    {
        const auto buo = buo_norm(family, f);
        const auto mf = natural_minimal(family, f, opt.jobs);
        double best = -INFINITY;
        PointId at = 0;
        for (PointId x = 0; x < family.size(); ++x)
            if (f[x] - mf.values[x] > best) {
                best = f[x] - mf.values[x];
                at = x;
            }
        Comparison cmp(Relation::Equal, opt.tolerances.equality);
        cmp.equal(buo.value, best, {at, buo.ball, ""});
        out.push_back(detail::finish("oscillation.buo", cmp, opt));
    }
    return out;
}

/// On every ball max w / min w is bounded by (i) [w]_1 [1/w]_1 and
/// (ii) C_w [w]_p C_{1/w} [1/w]_p, C the RH_inf constants.
inline std::vector<CheckReport> check_harnack(const BallFamily& family, std::span<const double> w, double p,
                                              const CheckOptions& opt = {})
{
    detail::check_positive(w);
    detail::check_exponent(p, "p");
    const auto inv = transform(w, Transform::inverse());
    const auto ext = detail::ball_extrema(family, w);

    const double a1 = a1_constant(family, w).value, a1_inv = a1_constant(family, inv).value;
    const double c = rhinf_constant(family, w).value, c_inv = rhinf_constant(family, inv).value;
    const double ap = ap_constant(family, w, p).value, ap_inv = ap_constant(family, inv, p).value;
    const double k1 = a1 * a1_inv;
    const double k2 = c * ap * c_inv * ap_inv;

    std::vector<CheckReport> out;
    for (int which = 0; which < 2; ++which) {
        const double k = which == 0 ? k1 : k2;
        Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
        for (PointId ctr = 0; ctr < family.size(); ++ctr)
            for (std::uint32_t rank = 1; rank <= family.rank_count(ctr); ++rank) {
                const std::size_t i = family.index({ctr, rank});
                cmp.at_most(ext.max[i] / ext.min[i], k, detail::at_ball({ctr, rank}));
            }
        auto r = detail::finish(which == 0 ? "harnack.i" : "harnack.ii", cmp, opt, w);
        if (which == 0)
            r.terms = {{"a1", a1}, {"a1_inverse", a1_inv}};
        else
            r.terms = {{"rhinf", c}, {"ap", ap}, {"rhinf_inverse", c_inv}, {"ap_inverse", ap_inv}};
        out.push_back(std::move(r));
    }
    return out;
}

/// exp(||log w||_BLO) <= [w]_1 <= [w]_inf exp(||log w||_BLO).
inline CheckReport check_a1_characterization(const BallFamily& family, std::span<const double> w,
                                             const CheckOptions& opt = {})
{
    detail::check_positive(w);
    const auto a1 = a1_constant(family, w);
    const double ainf = ainf_constant(family, w).value;
    const double eblo = std::exp(blo_norm(family, detail::log_values(w)).value);
    Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
    cmp.at_most(eblo, a1.value, {a1.point, a1.ball, "lower"});
    cmp.at_most(a1.value, ainf * eblo, {a1.point, a1.ball, "upper"});
    auto r = detail::finish("a1_characterization", cmp, opt, w);
    r.terms = {{"exp_blo", eblo}, {"a1", a1.value}, {"ainf", ainf}, {"ainf_exp_blo", ainf * eblo}};
    return r;
}

/// C <= exp(||log w||_BUO) <= C [w]_inf with C the RH_inf constant.
inline CheckReport check_rhinf_characterization(const BallFamily& family, std::span<const double> w,
                                                const CheckOptions& opt = {})
{
    detail::check_positive(w);
    const auto c = rhinf_constant(family, w);
    const double ainf = ainf_constant(family, w).value;
    const double ebuo = std::exp(buo_norm(family, detail::log_values(w)).value);
    Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
    cmp.at_most(c.value, ebuo, {c.point, c.ball, "lower"});
    cmp.at_most(ebuo, c.value * ainf, {c.point, c.ball, "upper"});
    auto r = detail::finish("rhinf_characterization", cmp, opt, w);
    r.terms = {{"rhinf", c.value}, {"exp_buo", ebuo}, {"ainf", ainf}, {"rhinf_ainf", c.value * ainf}};
    return r;
}

/// (a) M♮(log w) <= log Mw <= log [w]_inf + M♮(log w) pointwise;
/// (b) the same with Mw in place of w;
/// (c) M(Mw) <= [Mw]_inf [w]_inf exp(||M♮ log w||_BLO) Mw.
inline std::vector<CheckReport> check_converse_chain(const BallFamily& family, std::span<const double> w,
                                                     const CheckOptions& opt = {})
{
    detail::check_positive(w);
    auto sandwich = [&](std::span<const double> v, const char* id) {
        const auto mv = maximal(family, v, opt.jobs).values;
        const auto ml = natural_maximal(family, detail::log_values(v), opt.jobs).values;
        const double log_ainf = std::log(ainf_constant(family, v).value);
        Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
        for (PointId x = 0; x < family.size(); ++x) {
            cmp.at_most(ml[x], std::log(mv[x]), detail::at_point(x, "lower"));
            cmp.at_most(std::log(mv[x]), log_ainf + ml[x], detail::at_point(x, "upper"));
        }
        auto r = detail::finish(id, cmp, opt, w);
        r.terms = {{"log_ainf", log_ainf}};
        return r;
    };

    std::vector<CheckReport> out;
    const auto mw = maximal(family, w, opt.jobs).values;
    out.push_back(sandwich(w, "converse_chain.a"));
    out.push_back(sandwich(mw, "converse_chain.b"));

    const auto mmw = maximal(family, mw, opt.jobs).values;
    const auto mlog = natural_maximal(family, detail::log_values(w), opt.jobs).values;
    const double ainf_mw = ainf_constant(family, mw).value;
    const double ainf_w = ainf_constant(family, w).value;
    const double blo = blo_norm(family, mlog).value;
    const double k = ainf_mw * ainf_w * std::exp(blo);
    Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
    for (PointId x = 0; x < family.size(); ++x)
        cmp.at_most(mmw[x] / mw[x], k, detail::at_point(x));
    auto r = detail::finish("converse_chain.c", cmp, opt, w);
    r.terms = {{"ainf_Mw", ainf_mw}, {"ainf_w", ainf_w}, {"blo_natural_max_log_w", blo}};
    out.push_back(std::move(r));
    return out;
}

/// Power rules, q = s(p - 1) + 1:
/// (a) ||log w^s||_BLO = s ||log w||_BLO, same for BUO;
/// (b) [w]_1 <= [w]_inf [w^s]_1^{1/s};
/// (c) [w^s]_{A_q} <= ([w]_{A_p} [w]_{RH_s})^s;
/// (d) [w]_{A_p} <= [w^s]_{A_q}^{1/s} and [w]_{RH_s} <= [w^s]_{A_q}^{1/s}.
inline std::vector<CheckReport> check_power_props(const BallFamily& family, std::span<const double> w, double s,
                                                  double p, const CheckOptions& opt = {})
{
    detail::check_positive(w);
    detail::check_exponent(s, "s");
    detail::check_exponent(p, "p");
    const double q = s * (p - 1.0) + 1.0;
    const auto ws = transform(w, Transform::power(s));
    const auto lw = detail::log_values(w);
    const auto lws = detail::log_values(ws);
    std::vector<CheckReport> out;

    {
        const auto blo = blo_norm(family, lw), blo_s = blo_norm(family, lws);
        const auto buo = buo_norm(family, lw), buo_s = buo_norm(family, lws);
        Comparison cmp(Relation::Equal, detail::equality_tol(opt, ws));
        cmp.equal(blo_s.value, s * blo.value, {std::nullopt, blo_s.ball, "blo"});
        cmp.equal(buo_s.value, s * buo.value, {std::nullopt, buo_s.ball, "buo"});
        auto r = detail::finish("power.a", cmp, opt, ws);
        r.terms = {{"blo", blo.value}, {"blo_power", blo_s.value}, {"buo", buo.value}, {"buo_power", buo_s.value}};
        out.push_back(std::move(r));
    }

    const double a1 = a1_constant(family, w).value;
    const double ainf = ainf_constant(family, w).value;
    const double a1_s = a1_constant(family, ws).value;
    {
        Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
        cmp.at_most(a1, ainf * std::pow(a1_s, 1.0 / s));
        auto r = detail::finish("power.b", cmp, opt, w);
        r.terms = {{"a1", a1}, {"ainf", ainf}, {"a1_power", a1_s}};
        out.push_back(std::move(r));
    }

    const double ap = ap_constant(family, w, p).value;
    const double rh = rhs_constant(family, w, s).value;
    const auto aq_s = ap_constant(family, ws, q);
    {
        Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
        cmp.at_most(aq_s.value, std::pow(ap * rh, s), detail::at_ball(aq_s.ball));
        auto r = detail::finish("power.c", cmp, opt, ws);
        r.terms = {{"q", q}, {"aq_power", aq_s.value}, {"ap", ap}, {"rhs", rh}};
        out.push_back(std::move(r));
    }
    {
        const double root = std::pow(aq_s.value, 1.0 / s);
        Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
        cmp.at_most(ap, root, {std::nullopt, std::nullopt, "ap"});
        cmp.at_most(rh, root, {std::nullopt, std::nullopt, "rhs"});
        auto r = detail::finish("power.d", cmp, opt, ws);
        r.terms = {{"q", q}, {"aq_power_root", root}, {"ap", ap}, {"rhs", rh}};
        out.push_back(std::move(r));
    }
    return out;
}

/// ||log(phi w)||_BUO <= ||log phi||_BUO + ||log w||_BUO, and C_{phi w} <= exp(||log(phi w)||_BUO).
inline CheckReport check_multiplier(const BallFamily& family, std::span<const double> phi, std::span<const double> w,
                                    const CheckOptions& opt = {})
{
    detail::check_positive(phi, "multiplier");
    detail::check_positive(w);
    const auto pw = transform(w, Transform::product({phi.begin(), phi.end()}));
    const auto b_pw = buo_norm(family, detail::log_values(pw));
    const double b_phi = buo_norm(family, detail::log_values(phi)).value;
    const double b_w = buo_norm(family, detail::log_values(w)).value;
    const auto c = rhinf_constant(family, pw);
    Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
    cmp.at_most(b_pw.value, b_phi + b_w, {std::nullopt, b_pw.ball, "subadditive"});
    cmp.at_most(c.value, std::exp(b_pw.value), {c.point, c.ball, "rhinf"});
    auto r = detail::finish("multiplier", cmp, opt, pw);
    r.terms = {{"buo_product", b_pw.value}, {"buo_multiplier", b_phi}, {"buo_weight", b_w}, {"rhinf_product", c.value}};
    return r;
}

/// [w^{1-p}]_{A_p} = [w]_{A_p'}^{p-1} and ||log w^{1-p}||_BUO = (p - 1) ||log w||_BLO.
inline std::vector<CheckReport> check_duality(const BallFamily& family, std::span<const double> w, double p,
                                              const CheckOptions& opt = {})
{
    detail::check_positive(w);
    detail::check_exponent(p, "p");
    const double pp = p / (p - 1.0);
    const auto dual = transform(w, Transform::power(1.0 - p));
    const double tol = opt.tolerances.equality_for(std::max(dynamic_range(w), dynamic_range(dual)));
    std::vector<CheckReport> out;
    {
        const auto lhs = ap_constant(family, dual, p);
        const double rhs = std::pow(ap_constant(family, w, pp).value, p - 1.0);
        Comparison cmp(Relation::Equal, tol);
        cmp.equal(lhs.value, rhs, detail::at_ball(lhs.ball));
        auto r = detail::finish("duality.ap", cmp, opt, dual);
        r.terms = {{"p", p}, {"p_dual", pp}};
        out.push_back(std::move(r));
    }
    {
        const auto lhs = buo_norm(family, detail::log_values(dual));
        const double rhs = (p - 1.0) * blo_norm(family, detail::log_values(w)).value;
        Comparison cmp(Relation::Equal, tol);
        cmp.equal(lhs.value, rhs, detail::at_ball(lhs.ball));
        out.push_back(detail::finish("duality.buo", cmp, opt, dual));
    }
    return out;
}

/// Tabulates constants the theory only bounds by unspecified functions of the
/// doubling constant, with f = log w. Hard-asserts only the two algebraic
/// identities ||m♮f||_BUO = ||M♮(-f)||_BLO and ||Mf||_BLO = ||M♮|f| ||_BLO.
inline std::vector<CheckReport> report_unquantified(const BallFamily& family, std::span<const double> w, double s,
                                                    const CheckOptions& opt = {})
{
    detail::check_positive(w);
    detail::check_exponent(s, "s");
    const auto f = detail::log_values(w);
    const auto mw = maximal(family, w, opt.jobs).values;
    const auto mws = maximal(family, transform(w, Transform::power(s)), opt.jobs).values;
    const auto mws_root = transform(mws, Transform::power(1.0 / s));

    const auto nat_max = natural_maximal(family, f, opt.jobs).values;
    const auto nat_min = natural_minimal(family, f, opt.jobs).values;
    const auto max_f = maximal(family, f, opt.jobs).values;
    const auto min_f = minimal(family, f, opt.jobs).values;
    const double bmo = bmo_norm(family, f).value;
    auto ratio = [&](double v) { return bmo > 0.0 ? v / bmo : std::nan(""); };

    const double buo_nat_min = buo_norm(family, nat_min).value;
    const double blo_max = blo_norm(family, max_f).value;

    std::vector<CheckReport> out;
    {
        auto r = detail::new_report("unquantified", opt);
        r.relation = Relation::Soft;
        r.lhs = r.rhs = r.margin = r.tolerance = std::nan("");
        r.verdict = Verdict::Soft;
        r.terms = {
            {"s", s},
            {"rhs_Mw", rhs_constant(family, mw, s).value},
            {"a1_Mw", a1_constant(family, mw).value},
            {"a1_Mws_root", a1_constant(family, mws_root).value},
            {"bmo_log_w", bmo},
            {"ratio_natural_max", ratio(blo_norm(family, nat_max).value)},
            {"ratio_max", ratio(blo_max)},
            {"ratio_natural_min", ratio(buo_nat_min)},
            {"ratio_min", ratio(buo_norm(family, min_f).value)},
        };
        out.push_back(std::move(r));
    }
    {
        const auto nat_max_neg = natural_maximal(family, detail::negated(f), opt.jobs).values;
        Comparison cmp(Relation::Equal, opt.tolerances.equality);
        cmp.equal(buo_nat_min, blo_norm(family, nat_max_neg).value);
        out.push_back(detail::finish("unquantified.minimal_identity", cmp, opt));
    }
    {
        const auto nat_abs = natural_maximal(family, abs_values(f), opt.jobs).values;
        Comparison cmp(Relation::Equal, opt.tolerances.equality);
        cmp.equal(blo_max, blo_norm(family, nat_abs).value);
        out.push_back(detail::finish("unquantified.maximal_identity", cmp, opt));
    }
    return out;
}

/// Runs `body`, appending its reports; an exception becomes one failed entry.
template <typename Body>
void run_guarded(std::vector<CheckReport>& out, const std::string& id, const CheckOptions& opt, Body body)
{
    try {
        auto produced = body();
        if constexpr (std::is_same_v<decltype(produced), CheckReport>)
            out.push_back(std::move(produced));
        else
            out.insert(out.end(), produced.begin(), produced.end());
    } catch (const std::exception& e) {
        auto r = detail::new_report(id, opt);
        r.lhs = r.rhs = r.margin = std::nan("");
        r.verdict = Verdict::Fail;
        r.note = e.what();
        out.push_back(std::move(r));
    }
}

struct TheoremInput {
    std::vector<double> weight;
    std::vector<double> multiplier;
    double p = 2.0;
    double s = 2.0;
};

/// All theorem checks on one (space, weight) pair, in a fixed order.
inline std::vector<CheckReport> theorem_checks(const BallFamily& family, const TheoremInput& in,
                                               const CheckOptions& opt = {})
{
    std::vector<CheckReport> out;
    const auto& w = in.weight;
    run_guarded(out, "commutation", opt, [&] { return check_commutation(family, w, opt); });
    run_guarded(out, "oscillation", opt, [&] {
        detail::check_positive(w);
        return check_oscillation_characterization(family, detail::log_values(w), opt);
    });
    run_guarded(out, "harnack", opt, [&] { return check_harnack(family, w, in.p, opt); });
    run_guarded(out, "a1_characterization", opt, [&] { return check_a1_characterization(family, w, opt); });
    run_guarded(out, "rhinf_characterization", opt, [&] { return check_rhinf_characterization(family, w, opt); });
    run_guarded(out, "converse_chain", opt, [&] { return check_converse_chain(family, w, opt); });
    run_guarded(out, "power", opt, [&] { return check_power_props(family, w, in.s, in.p, opt); });
    run_guarded(out, "multiplier", opt, [&] {
        const auto& phi = in.multiplier.empty() ? w : in.multiplier;
        return check_multiplier(family, phi, w, opt);
    });
    run_guarded(out, "duality", opt, [&] { return check_duality(family, w, in.p, opt); });
    run_guarded(out, "unquantified", opt, [&] { return report_unquantified(family, w, in.s, opt); });
    return out;
}

} // namespace weightlab
