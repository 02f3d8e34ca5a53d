#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "weightlab/space.hpp"

namespace weightlab {

enum class Relation { AtMost, Equal, Soft };
enum class Verdict { Pass, Fail, Soft };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Soft: return "soft";
    }
    return "?";
}

struct Witness {
    std::optional<PointId> point;
    std::optional<BallRef> ball;
    std::string bound; // which side of a sandwich was binding

    bool operator==(const Witness&) const = default;
};

/// Relative tolerances. A comparison of lhs against rhs is scaled by
/// max(1, |lhs|, |rhs|) unless the check asks for a purely relative scale.
struct Tolerances {
    double inequality = 1e-9;
    double equality = 1e-12;
    double relaxed_equality = 1e-9; // used when the weight spans more than relax_range
    double relax_range = 1e6;
    double warn_range = 1e12;

    double equality_for(double range) const { return range > relax_range ? std::max(equality, relaxed_equality) : equality; }
};

struct CheckReport {
    std::string id;
    std::string label;
    std::string digest;
    Relation relation = Relation::AtMost;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;    // rhs - lhs, or |lhs - rhs| for equalities
    double tolerance = 0.0; // absolute threshold the verdict was decided with
    Verdict verdict = Verdict::Pass;
    Witness witness;
    std::vector<std::pair<std::string, double>> terms;
    std::string note;

    bool hard() const { return relation != Relation::Soft; }
    bool failed() const { return verdict == Verdict::Fail; }

    double term(const std::string& name) const
    {
        for (const auto& [k, v] : terms)
            if (k == name)
                return v;
        return std::nan("");
    }

    bool operator==(const CheckReport&) const = default;
};

/// Keeps the worst of many lhs/rhs comparisons made for one check.
class Comparison {
public:
    Comparison(Relation relation, double tolerance, bool relative_only = false)
        : relation_(relation), tol_(tolerance), relative_only_(relative_only)
    {
    }

    void at_most(double lhs, double rhs, Witness w = {}) { add(lhs, rhs, std::move(w), rhs - lhs); }
    void equal(double lhs, double rhs, Witness w = {}) { add(lhs, rhs, std::move(w), -std::abs(lhs - rhs)); }

    bool empty() const { return !have_; }

    void fill(CheckReport& r) const
    {
        r.relation = relation_;
        if (!have_) {
            r.lhs = r.rhs = r.margin = 0.0;
            r.tolerance = tol_;
            r.verdict = Verdict::Pass;
            return;
        }
        r.lhs = lhs_;
        r.rhs = rhs_;
        r.witness = witness_;
        settle(r, tol_, relative_only_);
    }

    /// Verdict from lhs, rhs and the relation already stored in `r`.
    static void settle(CheckReport& r, double tol, bool relative_only = false)
    {
        const double scale = scale_of(r.lhs, r.rhs, relative_only);
        r.tolerance = tol * scale;
        if (r.relation == Relation::Equal) {
            r.margin = std::abs(r.lhs - r.rhs);
            r.verdict = r.margin <= r.tolerance ? Verdict::Pass : Verdict::Fail;
        } else {
            r.margin = r.rhs - r.lhs;
            r.verdict = r.margin >= -r.tolerance ? Verdict::Pass : Verdict::Fail;
        }
        if (std::isnan(r.margin))
            r.verdict = Verdict::Fail;
        if (r.relation == Relation::Soft)
            r.verdict = Verdict::Soft;
    }

private:
    static double scale_of(double lhs, double rhs, bool relative_only)
    {
        const double m = std::max(std::abs(lhs), std::abs(rhs));
        return relative_only ? std::max(m, 1e-300) : std::max(1.0, m);
    }

    void add(double lhs, double rhs, Witness w, double raw)
    {
        double score = raw / scale_of(lhs, rhs, relative_only_);
        if (std::isnan(score))
            score = -INFINITY;
        if (!have_ || score < score_) {
            have_ = true;
            score_ = score;
            lhs_ = lhs;
            rhs_ = rhs;
            witness_ = std::move(w);
        }
    }

    Relation relation_;
    double tol_;
    bool relative_only_;
    bool have_ = false;
    double score_ = 0.0, lhs_ = 0.0, rhs_ = 0.0;
    Witness witness_;
};

// FNV-1a over the raw bytes of the inputs.
class Digest {
public:
    Digest& add(double v)
    {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i, bits >>= 8)
            byte(static_cast<unsigned char>(bits & 0xff));
        return *this;
    }
    Digest& add(std::span<const double> v)
    {
        add(static_cast<double>(v.size()));
        for (double x : v)
            add(x);
        return *this;
    }
    Digest& add(const FiniteMetricMeasureSpace& s) { return add(s.distances()).add(s.measure()); }

    std::string hex() const
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    void byte(unsigned char b)
    {
        h_ ^= b;
        h_ *= 0x100000001b3ULL;
    }
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

namespace detail {

inline nlohmann::json number_or_na(double v)
{
    if (std::isfinite(v))
        return v;
    if (std::isnan(v))
        return "n/a";
    return v > 0 ? "inf" : "-inf";
}

inline std::string csv_number(double v)
{
    if (std::isnan(v))
        return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

inline nlohmann::json to_json(const CheckReport& r)
{
    nlohmann::json j;
    j["id"] = r.id;
    j["inputs"] = {{"label", r.label}, {"digest", r.digest}};
    j["lhs"] = detail::number_or_na(r.lhs);
    j["rhs"] = detail::number_or_na(r.rhs);
    j["margin"] = detail::number_or_na(r.margin);
    j["verdict"] = to_string(r.verdict);
    nlohmann::json w = nlohmann::json::object();
    if (r.witness.point)
        w["point"] = *r.witness.point;
    if (r.witness.ball)
        w["ball"] = {{"center", r.witness.ball->center}, {"rank", r.witness.ball->rank}};
    if (!r.witness.bound.empty())
        w["bound"] = r.witness.bound;
    j["witness"] = std::move(w);
    j["tolerance"] = detail::number_or_na(r.tolerance);
    if (!r.terms.empty()) {
        nlohmann::json t = nlohmann::json::object();
        for (const auto& [k, v] : r.terms)
            t[k] = detail::number_or_na(v);
        j["terms"] = std::move(t);
    }
    if (!r.note.empty())
        j["note"] = r.note;
    return j;
}

inline void write_json_lines(std::ostream& out, std::span<const CheckReport> reports)
{
    for (const auto& r : reports)
        out << to_json(r).dump() << '\n';
}

inline void write_csv_summary(std::ostream& out, std::span<const CheckReport> reports)
{
    out << "id,label,digest,lhs,rhs,margin,tolerance,verdict\n";
    for (const auto& r : reports)
        out << detail::csv_field(r.id) << ',' << detail::csv_field(r.label) << ',' << r.digest << ','
            << detail::csv_number(r.lhs) << ',' << detail::csv_number(r.rhs) << ',' << detail::csv_number(r.margin)
            << ',' << detail::csv_number(r.tolerance) << ',' << to_string(r.verdict) << '\n';
}

inline bool all_hard_pass(std::span<const CheckReport> reports)
{
    return std::none_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.failed(); });
}

} // namespace weightlab
