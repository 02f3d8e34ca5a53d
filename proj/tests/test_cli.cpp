#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = WEIGHTLAB_CLI;

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / (std::string("weightlab_cli_") + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    // Exit status of `weightlab args`, stdout to out.txt and stderr to err.txt.
    int run(const std::string& args) const
    {
        const std::string cmd = "'" + cli + "' " + args + " >'" + path("out.txt") + "' 2>'" + path("err.txt") + "'";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string slurp(const std::string& name) const
    {
        std::ifstream in(path(name), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

    void write_two_point() const
    {
        write("two.json", R"({"points":[{"id":0,"coords":[0]},{"id":1,"coords":[1]}],
            "metric":"euclidean","distances":[[0,1],[1,0]],"measure":[1,1],
            "weights":{"w":[1,2.718281828459045],"flat":[3,3],"zero":[0,1]}})");
    }
};

double constant(const json& report, const std::string& name)
{
    for (const auto& c : report["constants"])
        if (c["name"] == name)
            return c["value"].get<double>();
    ADD_FAILURE() << "missing constant " << name;
    return std::nan("");
}

} // namespace

TEST_F(Cli, GenIsDeterministicPerSeed)
{
    ASSERT_EQ(run("gen --kind grid --n 16 --seed 1 --output " + path("a.json")), 0);
    EXPECT_NE(slurp("err.txt").find("C_d="), std::string::npos);
    ASSERT_EQ(run("gen --kind grid --n 16 --seed 1 --output " + path("b.json")), 0);
    EXPECT_EQ(slurp("a.json"), slurp("b.json"));
    ASSERT_EQ(run("gen --kind grid --n 16 --seed 2 --output " + path("c.json")), 0);
    EXPECT_NE(slurp("a.json"), slurp("c.json"));

    const auto doc = json::parse(slurp("a.json"));
    EXPECT_EQ(doc["points"].size(), 16u);

    ASSERT_EQ(run("gen --kind tree --n 12 --measure random --seed 7 --output " + path("t1.json")), 0);
    ASSERT_EQ(run("gen --kind tree --n 12 --measure random --seed 7 --output " + path("t2.json")), 0);
    EXPECT_EQ(slurp("t1.json"), slurp("t2.json"));
}

TEST_F(Cli, GenSnowflakeKeepsWeights)
{
    ASSERT_EQ(run("gen --kind random-points --n 9 --seed 3 --output " + path("base.json")), 0);
    ASSERT_EQ(run("gen --kind snowflake --eps 0.5 --base " + path("base.json") + " --output " + path("s.json")), 0);
    const auto base = json::parse(slurp("base.json"));
    const auto snow = json::parse(slurp("s.json"));
    EXPECT_EQ(base["weights"], snow["weights"]);
    const double d = base["distances"][0][1].get<double>();
    EXPECT_NEAR(snow["distances"][0][1].get<double>(), std::sqrt(d), 1e-12);
}

TEST_F(Cli, GenRejectsBadParams)
{
    EXPECT_EQ(run("gen --kind path --n 5"), 2);                       // seed missing
    EXPECT_EQ(run("gen --kind hexagon --n 5 --seed 1"), 2);
    EXPECT_EQ(run("gen --kind snowflake --eps 0.5"), 2);              // no base
    EXPECT_EQ(run("gen --kind grid --n 4 --weight-law bogus"), 2);
    EXPECT_EQ(run("gen --kind grid --n 0"), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, AnalyzeTwoPointTable)
{
    write_two_point();
    ASSERT_EQ(run("analyze --input " + path("two.json") + " --weight w --output " + path("a.json")), 0)
        << slurp("err.txt");
    const auto r = json::parse(slurp("a.json"));
    EXPECT_NEAR(constant(r, "ap"), 1.27154, 1e-5);
    EXPECT_NEAR(constant(r, "a1"), 1.85914, 1e-5);
    EXPECT_NEAR(constant(r, "ainf"), 1.12763, 1e-5);
    EXPECT_NEAR(constant(r, "rhs"), 1.10162, 1e-5);
    EXPECT_NEAR(constant(r, "rhinf"), 1.46212, 1e-5);
    EXPECT_NEAR(constant(r, "bmo_log_w"), 0.5, 1e-12);
    EXPECT_NEAR(constant(r, "blo_log_w"), 0.5, 1e-12);
    EXPECT_NEAR(constant(r, "buo_log_w"), 0.5, 1e-12);
    EXPECT_EQ(r["doubling"]["value"].get<double>(), 2.0);
    EXPECT_TRUE(r["annular"].contains("delta"));

    const auto csv = slurp("a.json.csv");
    EXPECT_EQ(csv.rfind("name,parameter,value,center,rank,point\n", 0), 0u);
    EXPECT_NE(csv.find("rhinf,"), std::string::npos);
}

TEST_F(Cli, AnalyzeConstantWeight)
{
    write_two_point();
    ASSERT_EQ(run("analyze --input " + path("two.json") + " --weight flat"), 0);
    const auto r = json::parse(slurp("out.txt"));
    for (const char* c : {"ap", "a1", "ainf", "rhs", "rhinf"})
        EXPECT_NEAR(constant(r, c), 1.0, 1e-12) << c;
    for (const char* c : {"bmo_log_w", "blo_log_w", "buo_log_w"})
        EXPECT_NEAR(constant(r, c), 0.0, 1e-12) << c;
}

TEST_F(Cli, AnalyzeInputErrors)
{
    write_two_point();
    EXPECT_EQ(run("analyze --input " + path("two.json") + " --weight missing"), 2);
    EXPECT_NE(slurp("err.txt").find("missing"), std::string::npos);
    EXPECT_EQ(run("analyze --input " + path("two.json") + " --weight zero"), 2);
    EXPECT_EQ(run("analyze --input " + path("nope.json")), 2);
    write("broken.json", "{\"points\": [");
    EXPECT_EQ(run("analyze --input " + path("broken.json")), 2);
    EXPECT_EQ(run("analyze --input " + path("two.json") + " --p 0.5"), 2);
}

TEST_F(Cli, VerifyConstantFixturePasses)
{
    write_two_point();
    ASSERT_EQ(run("verify --input " + path("two.json") + " --weight flat --output " + path("v.jsonl") + " --csv " +
                  path("v.csv")),
              0)
        << slurp("err.txt");
    std::istringstream lines(slurp("v.jsonl"));
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        const auto j = json::parse(line);
        EXPECT_NE(j["verdict"], "fail") << line;
        for (const char* key : {"id", "inputs", "lhs", "rhs", "margin", "verdict", "witness"})
            EXPECT_TRUE(j.contains(key)) << key;
        ++count;
    }
    EXPECT_GT(count, 20u);
    EXPECT_EQ(slurp("v.csv").rfind("id,label,digest,lhs,rhs,margin,tolerance,verdict\n", 0), 0u);
    EXPECT_NE(slurp("err.txt").find("0 failed"), std::string::npos);
}

TEST_F(Cli, VerifySelfTestFails)
{
    write_two_point();
    EXPECT_EQ(run("verify --input " + path("two.json") + " --self-test"), 1);
    EXPECT_NE(slurp("err.txt").find("FAIL harnack.i"), std::string::npos);
}

TEST_F(Cli, VerifyInputErrors)
{
    write_two_point();
    EXPECT_EQ(run("verify --input " + path("two.json") + " --weight zero"), 2);
    EXPECT_EQ(run("verify --input " + path("two.json") + " --tolerance -1"), 2);
    EXPECT_EQ(run("verify --input " + path("two.json") + " --tolerance abc"), 2);
    EXPECT_EQ(run("verify --random --count 3"), 2);   // seed missing
    EXPECT_EQ(run("verify --input " + path("two.json") + " --s 1"), 2);
}

TEST_F(Cli, VerifyToleranceFromEnvironment)
{
    write_two_point();
    const std::string env = "WEIGHTLAB_TOLERANCE=1e-6:1e-8 ";
    const std::string cmd = env + "'" + cli + "' verify --input " + path("two.json") + " --output " + path("v.jsonl") +
                            " 2>/dev/null";
    ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
    std::istringstream lines(slurp("v.jsonl"));
    std::string line;
    std::getline(lines, line);
    const auto j = json::parse(line);
    EXPECT_GE(j["tolerance"].get<double>(), 1e-8 * 0.999);
}

TEST_F(Cli, VerifyRandomBatchIsReproducible)
{
    ASSERT_EQ(run("verify --random --seed 5 --count 6 --max-n 12 --output " + path("a.jsonl")), 0)
        << slurp("err.txt");
    ASSERT_EQ(run("verify --random --seed 5 --count 6 --max-n 12 --output " + path("b.jsonl")), 0);
    EXPECT_EQ(slurp("a.jsonl"), slurp("b.jsonl"));
    ASSERT_EQ(run("verify --random --seed 5 --count 6 --max-n 12 --jobs 3 --output " + path("c.jsonl")), 0);
    EXPECT_EQ(slurp("a.jsonl"), slurp("c.jsonl"));
}

TEST_F(Cli, VerifyRandomAcceptanceBatch)
{
    EXPECT_EQ(run("verify --random --seed 42 --count 200 --max-n 64 --output " + path("r.jsonl")), 0)
        << slurp("err.txt");
}

TEST_F(Cli, FactorTwoPoint)
{
    write_two_point();
    ASSERT_EQ(run("factor --input " + path("two.json") + " --output " + path("f.json") + " --save-document " +
                  path("d.json")),
              0)
        << slurp("err.txt");
    const auto f = json::parse(slurp("f.json"));
    const auto w1 = f["w1"].get<std::vector<double>>();
    const auto w2 = f["w2"].get<std::vector<double>>();
    const double w[] = {1.0, 2.718281828459045};
    for (int i = 0; i < 2; ++i)
        EXPECT_NEAR(w1[i] * w2[i], w[i], 1e-12 * w[i]);
    EXPECT_LE(f["reconstruction_max_relative_error"].get<double>(), 1e-12);
    for (const auto& r : f["verification"])
        EXPECT_NE(r["verdict"], "fail") << r.dump();
    const auto doc = json::parse(slurp("d.json"));
    EXPECT_TRUE(doc["weights"].contains("w.w1"));
    EXPECT_TRUE(doc["weights"].contains("w.w2"));
}

TEST_F(Cli, FactorConstantWeight)
{
    write_two_point();
    ASSERT_EQ(run("factor --input " + path("two.json") + " --weight flat"), 0) << slurp("err.txt");
    const auto f = json::parse(slurp("out.txt"));
    for (const auto* k : {"v1", "v2", "w1", "w2"}) {
        const auto v = f[k].get<std::vector<double>>();
        EXPECT_NEAR(v[0], v[1], 1e-12 * std::abs(v[0])) << k;
    }
    for (const auto& [k, v] : f["certificates"].items())
        EXPECT_NEAR(v.get<double>(), 1.0, 1e-12) << k;
}

TEST_F(Cli, FactorInputErrors)
{
    write_two_point();
    EXPECT_EQ(run("factor --input " + path("two.json") + " --p 1"), 2);
    EXPECT_EQ(run("factor --input " + path("two.json") + " --weight zero"), 2);
    EXPECT_EQ(run("factor --input " + path("two.json") + " --weight missing"), 2);
}

TEST_F(Cli, BenchEmptyListIsHeaderOnly)
{
    ASSERT_EQ(run("bench --sizes \"\""), 0);
    EXPECT_EQ(slurp("out.txt"), "n,balls,build_s,maximal_s,suite_s\n");
    EXPECT_EQ(run("bench --sizes 4,x"), 2);
}

TEST_F(Cli, BenchChecksOracleAndTimes)
{
    ASSERT_EQ(run("bench --sizes 10,100 --output " + path("b.csv")), 0) << slurp("err.txt");
    std::istringstream in(slurp("b.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "n,balls,build_s,maximal_s,suite_s");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("10,", 0), 0u);
    std::getline(in, line);
    EXPECT_EQ(line.rfind("100,", 0), 0u);
}
