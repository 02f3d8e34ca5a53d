#pragma once

// Jones-type factorization u = v1 v2^{1-q} with v1, v2 in A_1, found by
// certified search over log v2, and its refinement w = w1 w2 with
// w1 = v1^{1/s} in A_1 ∩ RH_s and w2 = v2^{1-p} in A_p ∩ RH_inf.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "weightlab/optimize.hpp"
#include "weightlab/report.hpp"
#include "weightlab/theorems.hpp"
#include "weightlab/weights.hpp"

namespace weightlab {

struct FactorCertificates {
    double a1_v1 = std::numeric_limits<double>::quiet_NaN();
    double a1_v2 = std::numeric_limits<double>::quiet_NaN();
    double a1_w1 = std::numeric_limits<double>::quiet_NaN();
    double rhs_w1 = std::numeric_limits<double>::quiet_NaN();
    double ap_w2 = std::numeric_limits<double>::quiet_NaN();
    double rhinf_w2 = std::numeric_limits<double>::quiet_NaN();
};

struct FactorPair {
    std::vector<double> v1, v2; // A_1 factors of u = w^s
    std::vector<double> w1, w2; // refined factors of w
    double p = 2.0, s = 2.0, q = 3.0;
    FactorCertificates certificates;
    double objective = std::numeric_limits<double>::quiet_NaN();         // max([v1]_1, [v2]_1)
    double initial_objective = std::numeric_limits<double>::quiet_NaN(); // same at v2 = 1
    bool stalled = false;
};

struct JonesOptions {
    DescentOptions descent;
};

struct JonesFactor {
    std::vector<double> v1, v2;
    double a1_v1 = 0.0, a1_v2 = 0.0;
    double objective = 0.0, initial_objective = 0.0;
    bool stalled = false;
    int sweeps = 0;
    int start = 0;
};

namespace detail {

// sup_B avg_B w / min_B w without witnesses or allocation; the objective's
// inner loop.
inline double a1_value(const BallFamily& family, const double* w)
{
    double best = 1.0;
    for (PointId c = 0; c < family.size(); ++c) {
        const auto ord = family.order(c);
        const auto pm = family.prefix_mass(c);
        const auto ends = family.ends(c);
        double sum = 0.0, lo = INFINITY;
        std::size_t i = 0;
        for (std::size_t k = 0; k < ends.size(); ++k) {
            for (; i < ends[k]; ++i) {
                const double v = w[ord[i]];
                sum += family.measure(ord[i]) * v;
                lo = std::min(lo, v);
            }
            best = std::max(best, sum / pm[i - 1] / lo);
        }
    }
    return best;
}

class JonesObjective {
public:
    JonesObjective(const BallFamily& family, std::span<const double> u, double q)
        : family_(&family), u_(u.begin(), u.end()), q_(q), v1_(u.size()), v2_(u.size())
    {
    }

    double operator()(const std::vector<double>& t)
    {
        for (std::size_t i = 0; i < t.size(); ++i) {
            v2_[i] = std::exp(t[i]);
            v1_[i] = u_[i] * std::pow(v2_[i], q_ - 1.0);
        }
        return std::max(a1_value(*family_, v1_.data()), a1_value(*family_, v2_.data()));
    }

    // Restriction to t + tau e_i. Balls avoiding i contribute a constant; for
    // the others the sum and the minimum over the remaining points are frozen,
    // so each evaluation costs one exp and a pass over the balls holding i.
    auto coordinate(const std::vector<double>& t, std::size_t i)
    {
        for (std::size_t j = 0; j < t.size(); ++j) {
            v2_[j] = std::exp(t[j]);
            v1_[j] = u_[j] * std::pow(v2_[j], q_ - 1.0);
        }
        profile(v1_, PointId(i), p1_);
        profile(v2_, PointId(i), p2_);
        return [this, ti = t[i], ui = u_[i]](double tau) {
            const double y2 = std::exp(ti + tau);
            const double y1 = ui * std::pow(y2, q_ - 1.0);
            return std::max(p1_.at(y1), p2_.at(y2));
        };
    }

private:
    struct Profile {
        double rest = 1.0; // best ratio over balls without the moving point
        double mu = 1.0;
        std::vector<double> other_sum, mass, other_min;

        double at(double y) const
        {
            double best = rest;
            for (std::size_t k = 0; k < mass.size(); ++k)
                best = std::max(best, (other_sum[k] + mu * y) / mass[k] / std::min(other_min[k], y));
            return best;
        }
    };

    void profile(const std::vector<double>& v, PointId i, Profile& pr) const
    {
        pr.rest = 1.0;
        pr.mu = family_->measure(i);
        pr.other_sum.clear();
        pr.mass.clear();
        pr.other_min.clear();
        for (PointId c = 0; c < family_->size(); ++c) {
            const auto ord = family_->order(c);
            const auto pm = family_->prefix_mass(c);
            const auto ends = family_->ends(c);
            double sum = 0.0, lo = INFINITY;
            bool seen = false;
            std::size_t j = 0;
            for (std::size_t k = 0; k < ends.size(); ++k) {
                for (; j < ends[k]; ++j) {
                    const PointId y = ord[j];
                    if (y == i) {
                        seen = true;
                        continue;
                    }
                    sum += family_->measure(y) * v[y];
                    lo = std::min(lo, v[y]);
                }
                if (!seen) {
                    pr.rest = std::max(pr.rest, sum / pm[j - 1] / lo);
                } else {
                    pr.other_sum.push_back(sum);
                    pr.mass.push_back(pm[j - 1]);
                    pr.other_min.push_back(lo);
                }
            }
        }
    }

    const BallFamily* family_;
    std::vector<double> u_;
    double q_;
    std::vector<double> v1_, v2_;
    Profile p1_, p2_;
};

inline void factor_from_log(std::span<const double> u, double q, std::span<const double> t, std::vector<double>& v1,
                            std::vector<double>& v2)
{
    v1.resize(u.size());
    v2.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        v2[i] = std::exp(t[i]);
        v1[i] = u[i] * std::pow(v2[i], q - 1.0);
    }
}

} // namespace detail

/// w1 = v1^{1/s}, w2 = v2^{1-p}; certificates are left unset.
inline FactorPair refined_transform(std::span<const double> v1, std::span<const double> v2, double p, double s)
{
    detail::check_positive(v1, "v1");
    detail::check_positive(v2, "v2");
    detail::check_exponent(p, "p");
    detail::check_exponent(s, "s");
    if (v1.size() != v2.size())
        throw Error(ErrorKind::InconsistentPair, "v1 and v2 differ in length");
    FactorPair fp;
    fp.p = p;
    fp.s = s;
    fp.q = s * (p - 1.0) + 1.0;
    fp.v1.assign(v1.begin(), v1.end());
    fp.v2.assign(v2.begin(), v2.end());
    fp.w1 = transform(v1, Transform::power(1.0 / s));
    fp.w2 = transform(v2, Transform::power(1.0 - p));
    return fp;
}

inline void certify(const BallFamily& family, FactorPair& fp)
{
    auto& c = fp.certificates;
    c.a1_v1 = a1_constant(family, fp.v1).value;
    c.a1_v2 = a1_constant(family, fp.v2).value;
    c.a1_w1 = a1_constant(family, fp.w1).value;
    c.rhs_w1 = rhs_constant(family, fp.w1, fp.s).value;
    c.ap_w2 = ap_constant(family, fp.w2, fp.p).value;
    c.rhinf_w2 = rhinf_constant(family, fp.w2).value;
}

/// u = v1 v2^{1-q} with v1 := u v2^{q-1}; v2 = exp(t) minimizes
/// max([v1]_1, [v2]_1) by multistart descent from t = 0 and seeded restarts.
/// The returned objective never exceeds the one at v2 = 1.
inline JonesFactor jones_factor(const BallFamily& family, std::span<const double> u, double q,
                                const JonesOptions& options = {})
{
    detail::check_length(family, u);
    detail::check_positive(u);
    detail::check_exponent(q, "q");

    auto opt = options.descent;
    {
        // restarts and brackets on the scale of log u / (q - 1)
        double lo = INFINITY, hi = -INFINITY;
        for (double v : u) {
            lo = std::min(lo, std::log(v));
            hi = std::max(hi, std::log(v));
        }
        const double scale = std::max(0.5, (hi - lo) / (q - 1.0));
        opt.start_spread *= scale;
        opt.bracket *= scale;
    }
    auto result = multistart_descent([&] { return detail::JonesObjective(family, u, q); }, u.size(), opt);

    JonesFactor jf;
    detail::factor_from_log(u, q, result.x, jf.v1, jf.v2);
    jf.a1_v1 = a1_constant(family, jf.v1).value;
    jf.a1_v2 = a1_constant(family, jf.v2).value;
    jf.objective = std::max(jf.a1_v1, jf.a1_v2);
    jf.stalled = result.stalled;
    jf.sweeps = result.sweeps;
    jf.start = result.start;

    std::vector<double> base_v1, base_v2;
    const std::vector<double> zero(u.size(), 0.0);
    detail::factor_from_log(u, q, zero, base_v1, base_v2);
    const double a1_base_v1 = a1_constant(family, base_v1).value;
    const double a1_base_v2 = a1_constant(family, base_v2).value;
    jf.initial_objective = std::max(a1_base_v1, a1_base_v2);
    if (!(jf.objective <= jf.initial_objective)) {
        // the search objective and the certified constants can disagree in the
        // last bits; the certificate must not get worse than the start
        jf.v1 = std::move(base_v1);
        jf.v2 = std::move(base_v2);
        jf.a1_v1 = a1_base_v1;
        jf.a1_v2 = a1_base_v2;
        jf.objective = jf.initial_objective;
    }
    return jf;
}

/// u = w^s, q = s(p - 1) + 1, jones_factor, refined_transform, certificates.
inline FactorPair refined_jones(const BallFamily& family, std::span<const double> w, double p, double s,
                                const JonesOptions& options = {})
{
    detail::check_length(family, w);
    detail::check_positive(w);
    detail::check_exponent(p, "p");
    detail::check_exponent(s, "s");
    const double q = s * (p - 1.0) + 1.0;
    const auto jf = jones_factor(family, transform(w, Transform::power(s)), q, options);
    auto fp = refined_transform(jf.v1, jf.v2, p, s);
    certify(family, fp);
    fp.objective = jf.objective;
    fp.initial_objective = jf.initial_objective;
    fp.stalled = jf.stalled;
    return fp;
}

/// Hard checks on a factor pair of w:
/// (a) w1 w2 = w pointwise (relative tolerance 1e-12);
/// (b) [w1]_1 <= [v1]_1^{1/s} and [w1]_{RH_s} <= [v1]_1^{1/s};
/// (c) [w2]_{A_p} <= [v2]_1^{p-1};
/// (d) C_{w2} <= exp((p-1) ||log v2||_BLO) <= [v2]_1^{p-1}.
/// A soft entry carries the optimizer certificates.
inline std::vector<CheckReport> verify_factorization(const BallFamily& family, std::span<const double> w,
                                                     const FactorPair& fp, const CheckOptions& opt = {})
{
    const std::size_t n = family.size();
    if (w.size() != n || fp.v1.size() != n || fp.v2.size() != n || fp.w1.size() != n || fp.w2.size() != n)
        throw Error(ErrorKind::InconsistentPair, "factor lengths do not match the space");
    if (!(fp.p > 1.0) || !(fp.s > 1.0) || std::abs(fp.q - (fp.s * (fp.p - 1.0) + 1.0)) > 1e-12 * fp.q)
        throw Error(ErrorKind::InconsistentPair, "exponents p, s, q are inconsistent");
    detail::check_positive(w);
    detail::check_positive(fp.v1, "v1");
    detail::check_positive(fp.v2, "v2");
    detail::check_positive(fp.w1, "w1");
    detail::check_positive(fp.w2, "w2");

    const double p = fp.p, s = fp.s;
    std::vector<CheckReport> out;
    {
        Comparison cmp(Relation::Equal, 1e-12, true);
        for (PointId x = 0; x < n; ++x)
            cmp.equal(fp.w1[x] * fp.w2[x], w[x], detail::at_point(x));
        out.push_back(detail::finish("factorization.reconstruction", cmp, opt));
    }
    const double a1_v1 = a1_constant(family, fp.v1).value;
    const double a1_v2 = a1_constant(family, fp.v2).value;
    {
        const double bound = std::pow(a1_v1, 1.0 / s);
        const auto a1_w1 = a1_constant(family, fp.w1);
        const auto rhs_w1 = rhs_constant(family, fp.w1, s);
        Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
        cmp.at_most(a1_w1.value, bound, {a1_w1.point, a1_w1.ball, "a1"});
        cmp.at_most(rhs_w1.value, bound, {std::nullopt, rhs_w1.ball, "rhs"});
        auto r = detail::finish("factorization.w1", cmp, opt, fp.w1);
        r.terms = {{"a1_w1", a1_w1.value}, {"rhs_w1", rhs_w1.value}, {"a1_v1_root", bound}};
        out.push_back(std::move(r));
    }
    {
        const auto ap_w2 = ap_constant(family, fp.w2, p);
        Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
        cmp.at_most(ap_w2.value, std::pow(a1_v2, p - 1.0), detail::at_ball(ap_w2.ball));
        auto r = detail::finish("factorization.w2_ap", cmp, opt, fp.w2);
        r.terms = {{"ap_w2", ap_w2.value}, {"a1_v2_power", std::pow(a1_v2, p - 1.0)}};
        out.push_back(std::move(r));
    }
    {
        const auto c = rhinf_constant(family, fp.w2);
        const double mid = std::exp((p - 1.0) * blo_norm(family, detail::log_values(fp.v2)).value);
        const double top = std::pow(a1_v2, p - 1.0);
        Comparison cmp(Relation::AtMost, opt.tolerances.inequality);
        cmp.at_most(c.value, mid, {c.point, c.ball, "lower"});
        cmp.at_most(mid, top, {std::nullopt, std::nullopt, "upper"});
        auto r = detail::finish("factorization.w2_rhinf", cmp, opt, fp.w2);
        r.terms = {{"rhinf_w2", c.value}, {"exp_blo_log_v2", mid}, {"a1_v2_power", top}};
        out.push_back(std::move(r));
    }
    {
        auto r = detail::new_report("factorization.certificates", opt);
        r.relation = Relation::Soft;
        r.lhs = fp.objective;
        r.rhs = fp.initial_objective;
        r.margin = r.rhs - r.lhs;
        r.tolerance = std::nan("");
        r.verdict = Verdict::Soft;
        r.terms = {{"a1_v1", a1_v1}, {"a1_v2", a1_v2}, {"p", p}, {"s", s}, {"q", fp.q}};
        if (fp.stalled)
            r.note = "optimizer stalled: sweep budget exhausted before convergence";
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace weightlab
