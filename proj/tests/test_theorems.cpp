#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracle.hpp"
#include "weightlab/suite.hpp"

using namespace weightlab;

namespace {

const double e = std::exp(1.0);
const std::vector<double> w_e{1.0, e};

const CheckReport& find(const std::vector<CheckReport>& rs, const std::string& id)
{
    for (const auto& r : rs)
        if (r.id == id)
            return r;
    throw std::runtime_error("no report " + id);
}

} // namespace

TEST(Comparison, VerdictFollowsMargin)
{
    Comparison le(Relation::AtMost, 1e-9);
    le.at_most(1.0, 2.0);
    le.at_most(3.0, 3.0 - 1e-10);
    CheckReport r;
    le.fill(r);
    EXPECT_EQ(r.lhs, 3.0);
    EXPECT_EQ(r.verdict, Verdict::Pass);
    EXPECT_GE(r.margin, -r.tolerance);

    Comparison bad(Relation::AtMost, 1e-9);
    bad.at_most(3.0, 3.0 - 1e-8);
    bad.fill(r);
    EXPECT_EQ(r.verdict, Verdict::Fail);
    EXPECT_LT(r.margin, -r.tolerance);

    Comparison eq(Relation::Equal, 1e-12);
    eq.equal(5.0, 5.0 + 1e-10);
    eq.fill(r);
    EXPECT_EQ(r.verdict, Verdict::Fail);
    EXPECT_GT(r.margin, r.tolerance);

    Comparison nan(Relation::AtMost, 1e-9);
    nan.at_most(std::nan(""), 1.0);
    nan.fill(r);
    EXPECT_EQ(r.verdict, Verdict::Fail);
}

TEST(Comparison, RelativeScaleForSmallValues)
{
    CheckReport r;
    Comparison rel(Relation::Equal, 1e-12, true);
    rel.equal(1e-6, 1e-6 * (1 + 1e-11));
    rel.fill(r);
    EXPECT_EQ(r.verdict, Verdict::Fail);
    Comparison abs(Relation::Equal, 1e-12);
    abs.equal(1e-6, 1e-6 * (1 + 1e-11));
    abs.fill(r);
    EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(Theorems, ConstantWeightAllTight)
{
    std::mt19937_64 rng(1);
    auto s = oracle::random_space(rng, 20);
    BallFamily fam(s);
    TheoremInput in{std::vector<double>(s.size(), 2.5), {}, 2.0, 2.0};
    for (const auto& r : theorem_checks(fam, in)) {
        EXPECT_NE(r.verdict, Verdict::Fail) << r.id;
        if (r.hard())
            EXPECT_NEAR(r.lhs, r.rhs, 1e-12) << r.id;
    }
}

TEST(Theorems, CommutationTwoPoint)
{
    BallFamily fam(oracle::two_point());
    auto rs = check_commutation(fam, w_e);
    ASSERT_EQ(rs.size(), 2u);
    const auto& mx = find(rs, "commutation.max");
    EXPECT_EQ(mx.verdict, Verdict::Pass);
    EXPECT_NEAR(mx.term("log_ainf"), 0.12011450695827745, 1e-15);
    // the gap at a equals log [w]_inf: tight
    EXPECT_NEAR(mx.term("max_gap"), mx.term("log_ainf"), 1e-15);
    EXPECT_NEAR(mx.margin, 0.0, 1e-15);
    EXPECT_EQ(find(rs, "commutation.min").verdict, Verdict::Pass);
}

TEST(Theorems, OscillationTwoPoint)
{
    BallFamily fam(oracle::two_point());
    for (const auto& r : check_oscillation_characterization(fam, std::vector<double>{0.0, 1.0})) {
        EXPECT_EQ(r.verdict, Verdict::Pass);
        EXPECT_EQ(r.lhs, 0.5);
        EXPECT_EQ(r.rhs, 0.5);
    }
}

TEST(Theorems, HarnackTwoPoint)
{
    BallFamily fam(oracle::two_point());
    auto rs = check_harnack(fam, w_e, 2.0);
    const auto& h1 = find(rs, "harnack.i");
    EXPECT_EQ(h1.verdict, Verdict::Pass);
    EXPECT_NEAR(h1.lhs, e, 1e-15);
    EXPECT_NEAR(h1.term("a1_inverse"), ((1 + 1 / e) / 2) / (1 / e), 1e-15);
    EXPECT_NEAR(h1.rhs, 3.456404938962185, 1e-14);
    EXPECT_EQ(find(rs, "harnack.ii").verdict, Verdict::Pass);
}

TEST(Theorems, CharacterizationsTwoPointAreTight)
{
    BallFamily fam(oracle::two_point());
    auto a1 = check_a1_characterization(fam, w_e);
    EXPECT_EQ(a1.verdict, Verdict::Pass);
    EXPECT_NEAR(a1.term("exp_blo"), 1.64872, 1e-5);
    EXPECT_NEAR(a1.term("a1"), 1.85914, 1e-5);
    EXPECT_NEAR(a1.term("a1"), a1.term("ainf_exp_blo"), 1e-9);

    auto rh = check_rhinf_characterization(fam, w_e);
    EXPECT_EQ(rh.verdict, Verdict::Pass);
    EXPECT_NEAR(rh.term("rhinf"), 1.46212, 1e-5);
    EXPECT_NEAR(rh.term("exp_buo"), 1.64872, 1e-5);
    EXPECT_NEAR(rh.term("exp_buo"), rh.term("rhinf_ainf"), 1e-9);
    // the lower side is strict here
    EXPECT_GT(rh.term("exp_buo") - rh.term("rhinf"), 0.18);
}

TEST(Theorems, MultiplierTwoPoint)
{
    BallFamily fam(oracle::two_point());
    auto r = check_multiplier(fam, w_e, w_e);
    EXPECT_EQ(r.verdict, Verdict::Pass);
    EXPECT_NEAR(r.term("buo_product"), 1.0, 1e-15);
    EXPECT_NEAR(r.term("buo_multiplier") + r.term("buo_weight"), 1.0, 1e-15);
}

TEST(Theorems, DualityTwoPoint)
{
    BallFamily fam(oracle::two_point());
    auto rs = check_duality(fam, w_e, 2.0);
    const auto& ap = find(rs, "duality.ap");
    EXPECT_EQ(ap.verdict, Verdict::Pass);
    EXPECT_NEAR(ap.lhs, 1.27154, 1e-5);
    EXPECT_NEAR(ap.rhs, 1.27154, 1e-5);
    EXPECT_EQ(find(rs, "duality.buo").verdict, Verdict::Pass);
}

TEST(Theorems, PowerAndChainTwoPoint)
{
    BallFamily fam(oracle::two_point());
    for (const auto& r : check_power_props(fam, w_e, 2.0, 2.0))
        EXPECT_EQ(r.verdict, Verdict::Pass) << r.id;
    for (const auto& r : check_converse_chain(fam, w_e))
        EXPECT_EQ(r.verdict, Verdict::Pass) << r.id;
}

// Each power-rule bound evaluated from oracle constants on two-point spaces
// with random masses and weights, independently of the check code.
TEST(Theorems, PowerBoundsHoldOnTwoPointOracle)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> m(0.1, 3.0), lw(-4.0, 4.0);
    for (int t = 0; t < 500; ++t) {
        auto s = FiniteMetricMeasureSpace::from_matrix(std::vector<std::vector<double>>{{0, 1}, {1, 0}},
                                                       {m(rng), m(rng)});
        std::vector<double> w{std::exp(lw(rng)), std::exp(lw(rng))};
        const double sp = 1.1 + 3 * m(rng) / 3, p = 1.1 + 3 * m(rng) / 3, q = sp * (p - 1) + 1;
        const auto ws = oracle::pow_of(w, sp);
        const double slack = 1 + 1e-12;
        EXPECT_LE(oracle::a1(s, w), oracle::ainf(s, w) * std::pow(oracle::a1(s, ws), 1 / sp) * slack);
        EXPECT_LE(oracle::ap(s, ws, q), std::pow(oracle::ap(s, w, p) * oracle::rhs(s, w, sp), sp) * slack);
        EXPECT_LE(oracle::ap(s, w, p), std::pow(oracle::ap(s, ws, q), 1 / sp) * slack);
        EXPECT_LE(oracle::rhs(s, w, sp), std::pow(oracle::ap(s, ws, q), 1 / sp) * slack);

        BallFamily fam(s);
        for (const auto& r : check_power_props(fam, w, sp, p))
            EXPECT_EQ(r.verdict, Verdict::Pass) << r.id;
    }
}

TEST(Theorems, UnquantifiedReport)
{
    BallFamily fam(oracle::two_point());
    auto rs = report_unquantified(fam, w_e, 2.0);
    const auto& soft = find(rs, "unquantified");
    EXPECT_EQ(soft.verdict, Verdict::Soft);
    EXPECT_FALSE(soft.hard());
    EXPECT_TRUE(std::isfinite(soft.term("a1_Mw")));
    EXPECT_TRUE(std::isfinite(soft.term("ratio_natural_max")));
    EXPECT_EQ(find(rs, "unquantified.minimal_identity").margin, 0.0);
    EXPECT_EQ(find(rs, "unquantified.maximal_identity").margin, 0.0);

    // constant weight: constants 1, ratios 0/0 not applicable
    auto cs = report_unquantified(fam, std::vector<double>{3.0, 3.0}, 2.0);
    const auto& c = find(cs, "unquantified");
    EXPECT_EQ(c.term("a1_Mw"), 1.0);
    EXPECT_EQ(c.term("rhs_Mw"), 1.0);
    EXPECT_TRUE(std::isnan(c.term("ratio_max")));
    std::ostringstream os;
    write_json_lines(os, cs);
    EXPECT_NE(os.str().find("\"ratio_max\":\"n/a\""), std::string::npos) << os.str();
}

TEST(Theorems, Errors)
{
    BallFamily fam(oracle::two_point());
    EXPECT_THROW(check_commutation(fam, std::vector<double>{1.0, 0.0}), Error);
    EXPECT_THROW(check_harnack(fam, w_e, 1.0), Error);
    EXPECT_THROW(check_power_props(fam, w_e, 1.0, 2.0), Error);
    // a failing check inside the suite becomes a failed entry, the rest still runs
    auto rs = theorem_checks(fam, {std::vector<double>{1.0, -1.0}, {}, 2.0, 2.0});
    EXPECT_GE(rs.size(), 8u);
    for (const auto& r : rs)
        EXPECT_EQ(r.verdict, Verdict::Fail) << r.id;
    EXPECT_NE(rs[0].note.find("NonpositiveWeight"), std::string::npos);
}

TEST(Suite, RandomInstancesPass)
{
    const auto batch = random_batch(7, 30, 24);
    for (const auto& inst : batch) {
        SuiteOptions o;
        o.factorization = batch_factor_options(7);
        auto rs = run_suite(inst, o);
        for (const auto& r : rs)
            EXPECT_NE(r.verdict, Verdict::Fail) << inst.label << " " << to_json(r).dump();
    }
}

TEST(Suite, Deterministic)
{
    const auto a = random_batch(11, 5, 20);
    const auto b = random_batch(11, 5, 20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].label, b[i].label);
        EXPECT_EQ(a[i].space, b[i].space);
        EXPECT_EQ(a[i].weight, b[i].weight);
        SuiteOptions o;
        o.factorization = batch_factor_options(11);
        std::ostringstream x, y;
        write_json_lines(x, run_suite(a[i], o));
        write_json_lines(y, run_suite(b[i], o));
        EXPECT_EQ(x.str(), y.str());
    }
}

TEST(Suite, CorruptedCheckFails)
{
    const auto batch = random_batch(3, 3, 16);
    SuiteOptions o;
    o.factor = false;
    o.corrupt = "harnack.i";
    for (const auto& inst : batch) {
        auto rs = run_suite(inst, o);
        EXPECT_FALSE(all_hard_pass(rs)) << inst.label;
        EXPECT_EQ(find(rs, "harnack.i").verdict, Verdict::Fail);
    }
}

TEST(Suite, ReportSerialization)
{
    const auto batch = random_batch(5, 1, 8);
    SuiteOptions o;
    o.factor = false;
    auto rs = run_suite(batch[0], o);
    std::ostringstream js, csv;
    write_json_lines(js, rs);
    write_csv_summary(csv, rs);
    std::istringstream lines(js.str());
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        auto j = nlohmann::json::parse(line);
        for (const char* key : {"id", "inputs", "lhs", "rhs", "margin", "verdict", "witness"})
            EXPECT_TRUE(j.contains(key)) << key;
        EXPECT_EQ(j["inputs"]["digest"].get<std::string>().size(), 16u);
        ++count;
    }
    EXPECT_EQ(count, rs.size());
    const auto table = csv.str();
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), long(rs.size() + 1));
}
