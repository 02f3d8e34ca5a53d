#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "weightlab/operators.hpp"

using namespace weightlab;

namespace {

const double e = std::exp(1.0);

void expect_values(const std::vector<double>& got, const std::vector<double>& want, double tol)
{
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        EXPECT_NEAR(got[i], want[i], tol) << "at " << i;
}

} // namespace

TEST(BallAverages, ConstantFunction)
{
    std::mt19937_64 rng(1);
    auto s = oracle::random_space(rng, 30);
    BallFamily fam(s);
    std::vector<double> f(s.size(), -3.25);
    for (double a : ball_averages(fam, f))
        EXPECT_EQ(a, -3.25);
}

TEST(BallAverages, WorkedExamples)
{
    BallFamily two(oracle::two_point());
    auto a = ball_averages(two, std::vector<double>{1.0, e});
    EXPECT_NEAR(a[two.index({0, 2})], 1.85914, 1e-5);
    EXPECT_NEAR(a[two.index({1, 2})], 1.85914, 1e-5);

    BallFamily path(oracle::path3());
    auto b = ball_averages(path, std::vector<double>{0.0, 3.0, 0.0});
    EXPECT_EQ(b[path.index({0, 3})], 1.0);
    EXPECT_EQ(b[path.index({1, 2})], 1.0);
}

TEST(BallAverages, RejectsBadInput)
{
    BallFamily two(oracle::two_point());
    EXPECT_THROW(ball_averages(two, std::vector<double>{1.0}), Error);
    EXPECT_THROW(ball_averages(two, std::vector<double>{1.0, NAN}), Error);
}

TEST(Maximal, WorkedExamples)
{
    BallFamily two(oracle::two_point());
    expect_values(maximal(two, std::vector<double>{1.0, e}).values, {1.85914, 2.71828}, 1e-5);
    expect_values(minimal(two, std::vector<double>{1.0, e}).values, {1.0, 1.85914}, 1e-5);

    BallFamily path(oracle::path3());
    expect_values(maximal(path, std::vector<double>{0.0, 3.0, 0.0}).values, {1.5, 3.0, 1.5}, 1e-15);
    EXPECT_EQ(minimal(path, std::vector<double>{0.0, 3.0, 0.0}).values[0], 0.0);
}

TEST(Maximal, ConstantFunction)
{
    BallFamily path(oracle::path3());
    expect_values(maximal(path, std::vector<double>(3, -2.0)).values, {2.0, 2.0, 2.0}, 0.0);
    expect_values(minimal(path, std::vector<double>(3, -2.0)).values, {2.0, 2.0, 2.0}, 0.0);
    expect_values(natural_maximal(path, std::vector<double>(3, -2.0)).values, {-2.0, -2.0, -2.0}, 0.0);
    expect_values(natural_minimal(path, std::vector<double>(3, -2.0)).values, {-2.0, -2.0, -2.0}, 0.0);
}

TEST(NaturalMaximal, WorkedExamples)
{
    BallFamily two(oracle::two_point());
    expect_values(natural_maximal(two, std::vector<double>{0.0, 1.0}).values, {0.5, 1.0}, 0.0);
    expect_values(natural_minimal(two, std::vector<double>{0.0, 1.0}).values, {0.0, 0.5}, 0.0);

    BallFamily path(oracle::path3());
    EXPECT_EQ(natural_maximal(path, std::vector<double>{-3.0, 0.0, 0.0}).values[0], -1.0);
}

TEST(NaturalMaximal, WitnessesOnPath)
{
    BallFamily path(oracle::path3());
    auto out = maximal(path, std::vector<double>{0.0, 3.0, 0.0});
    // Mf(a) = 1.5 is attained by {a, b}: the rank-2 ball centred at a.
    EXPECT_EQ(out.witness[0], (BallRef{0, 2}));
    EXPECT_EQ(out.witness[1], (BallRef{1, 1}));
}

TEST(NaturalMaximal, NegationIdentityIsBitExact)
{
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        auto s = oracle::random_space(rng, 40);
        BallFamily fam(s);
        auto f = oracle::random_function(rng, s.size());
        std::vector<double> neg(f.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            neg[i] = -f[i];
        auto mx = natural_maximal(fam, f);
        auto mn = natural_minimal(fam, neg);
        for (std::size_t i = 0; i < f.size(); ++i) {
            EXPECT_EQ(mx.values[i], -mn.values[i]);
            EXPECT_EQ(mx.witness[i], mn.witness[i]);
        }
    }
}

TEST(NaturalMaximal, AbsoluteValueIdentities)
{
    std::mt19937_64 rng(3);
    auto s = oracle::random_space(rng, 40);
    BallFamily fam(s);
    auto f = oracle::random_function(rng, s.size());
    auto absf = oracle::abs_of(f);
    EXPECT_EQ(maximal(fam, f).values, natural_maximal(fam, absf).values);
    EXPECT_EQ(minimal(fam, f).values, natural_minimal(fam, absf).values);
}

TEST(NaturalMaximal, MatchesBruteForce)
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 25; ++t) {
        auto s = oracle::random_space(rng, 60);
        BallFamily fam(s);
        auto f = oracle::random_function(rng, s.size());
        auto mx = natural_maximal(fam, f).values;
        auto mn = natural_minimal(fam, f).values;
        auto ox = oracle::natural_extremal(s, f, true);
        auto on = oracle::natural_extremal(s, f, false);
        for (std::size_t i = 0; i < f.size(); ++i) {
            EXPECT_TRUE(oracle::rel_close(mx[i], ox[i], 1e-12)) << mx[i] << " vs " << ox[i];
            EXPECT_TRUE(oracle::rel_close(mn[i], on[i], 1e-12)) << mn[i] << " vs " << on[i];
        }
    }
}

TEST(NaturalMaximal, LibraryNaivePathAgrees)
{
    std::mt19937_64 rng(5);
    auto s = make_grid({100}, MetricKind::Euclidean, MeasureLaw::Random, 5);
    BallFamily fam(s);
    auto f = oracle::random_function(rng, s.size());
    auto fast = natural_maximal(fam, f).values;
    auto slow = naive_natural_extremal(s, f, true);
    for (std::size_t i = 0; i < f.size(); ++i)
        EXPECT_TRUE(oracle::rel_close(fast[i], slow[i], 1e-12));
}

TEST(NaturalMaximal, WitnessReproducesValue)
{
    std::mt19937_64 rng(6);
    for (int t = 0; t < 20; ++t) {
        auto s = oracle::random_space(rng, 40);
        BallFamily fam(s);
        auto f = oracle::random_function(rng, s.size());
        auto out = natural_maximal(fam, f);
        for (PointId x = 0; x < s.size(); ++x) {
            const auto b = out.witness[x];
            ASSERT_TRUE(fam.contains(b, x));
            double num = 0.0, den = 0.0;
            for (auto y : fam.members(b)) {
                num += s.measure(y) * f[y];
                den += s.measure(y);
            }
            EXPECT_TRUE(oracle::rel_close(out.values[x], num / den, 1e-12));
            EXPECT_GE(out.values[x], f[x]);
        }
    }
}

TEST(NaturalMaximal, Monotone)
{
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        auto s = oracle::random_space(rng, 30);
        BallFamily fam(s);
        auto f = oracle::random_function(rng, s.size());
        auto g = f;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& v : g)
            v += u(rng);
        auto mf = natural_maximal(fam, f).values;
        auto mg = natural_maximal(fam, g).values;
        auto nf = natural_minimal(fam, f).values;
        for (std::size_t i = 0; i < f.size(); ++i) {
            EXPECT_LE(mf[i], mg[i]);
            EXPECT_LE(nf[i], f[i]);
        }
    }
}

TEST(NaturalMaximal, ParallelMatchesSerialBitForBit)
{
    std::mt19937_64 rng(8);
    auto s = make_random_points(120, 2, MetricKind::Euclidean, MeasureLaw::Random, 8);
    BallFamily fam(s);
    auto f = oracle::random_function(rng, s.size());
    auto a = natural_maximal(fam, f, 1);
    auto b = natural_maximal(fam, f, 3);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.witness, b.witness);
}
