#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "seglens");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return seglens::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::path(SEGLENS_TEST_TMP) /
               ::testing::UnitTest::GetInstance()->current_test_info()->name();
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& content) const {
        std::ofstream(dir_ / name) << content;
    }

    void synth(const std::string& sub, const std::string& seed = "3") const {
        ASSERT_EQ(run_cli({"synth", "--output", path(sub), "--seed", seed, "--frames", "600",
                           "--dims", "16", "--runs", "2", "--no-timestamp"}),
                  0);
    }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, PipelineFindsSyntheticBoundaries) {
    synth("fx");
    ASSERT_EQ(run_cli({"pipeline", "--input", path("fx/features.csv"), "--labels",
                       path("fx/labels.csv"), "--output", path("seg.json"), "--beta", "50",
                       "--tolerance", "2", "--no-timestamp"}),
              0);
    const auto truth = nlohmann::json::parse(slurp(path("fx/truth.json")));
    const auto seg = nlohmann::json::parse(slurp(path("seg.json")));
    EXPECT_EQ(seg["changepoints"].size(), truth["transitions"].size());
    const auto report = nlohmann::json::parse(slurp(path("seg.eval.json")));
    EXPECT_EQ(report["rows"][0]["fn"], 0);
    EXPECT_EQ(report["rows"][0]["fp"], 0);
    EXPECT_FALSE(report.contains("generated_at"));
}

TEST_F(Cli, EmbedThenDetectEqualsPipeline) {
    synth("fx");
    ASSERT_EQ(run_cli({"embed", "--input", path("fx/features.csv"), "--output", path("e.csv")}),
              0);
    ASSERT_EQ(run_cli({"detect", "--input", path("e.csv"), "--output", path("a.json"), "--beta",
                       "40", "--no-timestamp"}),
              0);
    ASSERT_EQ(run_cli({"pipeline", "--input", path("fx/features.csv"), "--output",
                       path("b.json"), "--beta", "40", "--no-timestamp"}),
              0);
    EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(Cli, DeterministicWithoutTimestamp) {
    synth("one");
    synth("two");
    EXPECT_EQ(slurp(path("one/features.csv")), slurp(path("two/features.csv")));
    EXPECT_EQ(slurp(path("one/truth.json")), slurp(path("two/truth.json")));
    for (const char* out : {"x.json", "y.json"}) {
        ASSERT_EQ(run_cli({"pipeline", "--input", path("one/features.csv"), "--output", path(out),
                           "--embedding", "kpca-rbf", "--beta", "40", "--no-timestamp"}),
                  0);
    }
    EXPECT_EQ(slurp(path("x.json")), slurp(path("y.json")));
}

TEST_F(Cli, TimestampPresentByDefault) {
    write("f.csv", "0,1\n0,2\n5,1\n5,2\n");
    ASSERT_EQ(run_cli({"pipeline", "--input", path("f.csv"), "--output", path("s.json")}), 0);
    EXPECT_TRUE(nlohmann::json::parse(slurp(path("s.json"))).contains("generated_at"));
}

TEST_F(Cli, HugePenaltyGivesNoChangepoints) {
    synth("fx");
    ASSERT_EQ(run_cli({"pipeline", "--input", path("fx/features.csv"), "--output", path("s.json"),
                       "--beta", "1e12", "--no-timestamp"}),
              0);
    const auto seg = nlohmann::json::parse(slurp(path("s.json")));
    EXPECT_TRUE(seg["changepoints"].empty());
    EXPECT_EQ(seg["num_segments"], 1);
}

TEST_F(Cli, ConstantFeaturesAreDegenerate) {
    write("c.csv", "1,2\n1,2\n1,2\n1,2\n");
    EXPECT_EQ(run_cli({"pipeline", "--input", path("c.csv"), "--output", path("s.json")}), 3);
    EXPECT_EQ(run_cli({"embed", "--input", path("c.csv"), "--output", path("e.csv"),
                       "--embedding", "kpca-rbf"}),
              3);
}

TEST_F(Cli, MalformedInputIsExitTwo) {
    write("bad.csv", "1,2\n3\n");
    EXPECT_EQ(run_cli({"embed", "--input", path("bad.csv"), "--output", path("e.csv")}), 2);
    EXPECT_EQ(run_cli({"embed", "--input", path("missing.csv"), "--output", path("e.csv")}), 2);
    EXPECT_EQ(run_cli({"embed", "--output", path("e.csv")}), 2);
    write("f.csv", "0,1\n0,2\n5,1\n5,2\n");
    write("l.csv", "0,0,1\n");
    EXPECT_EQ(run_cli({"pipeline", "--input", path("f.csv"), "--labels", path("l.csv"),
                       "--output", path("s.json")}),
              2);
}

TEST_F(Cli, InfeasibleParametersAreExitFour) {
    write("e.csv", "0\n0\n1\n1\n");
    EXPECT_EQ(run_cli({"detect", "--input", path("e.csv"), "--output", path("s.json"),
                       "--algorithm", "dpk", "--k", "5"}),
              4);
    EXPECT_EQ(run_cli({"detect", "--input", path("e.csv"), "--output", path("s.json"),
                       "--algorithm", "dpk"}),
              4);
    EXPECT_EQ(run_cli({"detect", "--input", path("e.csv"), "--output", path("s.json"),
                       "--min-len", "5"}),
              4);
}

TEST_F(Cli, DetectAlgorithms) {
    write("e.csv", "0\n0.1\n-0.1\n0\n10\n10.1\n9.9\n10\n");
    for (const char* alg : {"pelt", "op", "binseg", "dpk", "window"}) {
        const std::string out = path(std::string(alg) + ".json");
        ASSERT_EQ(run_cli({"detect", "--input", path("e.csv"), "--output", out, "--algorithm",
                           alg, "--k", "1", "--window", "2", "--beta", "30", "--no-timestamp"}),
                  0)
            << alg;
        const auto seg = nlohmann::json::parse(slurp(out));
        EXPECT_EQ(seg["changepoints"], nlohmann::json::array({4})) << alg;
        EXPECT_EQ(seg["algorithm"], alg);
    }
}

TEST_F(Cli, EvaluateSegmentation) {
    write("seg.json", R"({"changepoints": [3, 5], "beta": 2.0, "algorithm": "pelt",
                          "embedding": "pca", "num_segments": 3, "total_cost": 0})");
    write("l.csv", "0,0,0,0,1,1,1,1,1,1\n");
    ASSERT_EQ(run_cli({"evaluate", "--input", path("seg.json"), "--labels", path("l.csv"),
                       "--output", path("r.json"), "--tolerance", "1", "--no-timestamp"}),
              0);
    const auto r = nlohmann::json::parse(slurp(path("r.json")));
    EXPECT_EQ(r["rows"][0]["tp"], 1);
    EXPECT_EQ(r["rows"][0]["fp"], 1);
    EXPECT_EQ(r["tolerance"], 1);
}

TEST_F(Cli, SweepWritesRocCsv) {
    synth("a");
    synth("b", "4");
    ASSERT_EQ(run_cli({"sweep", "--input", path("a/features.csv"), "--labels",
                       path("a/labels.csv"), "--input", path("b/features.csv"), "--labels",
                       path("b/labels.csv"), "--output", path("roc.csv"), "--report",
                       path("roc.json"), "--betas", "30,300,3000", "--tolerance", "2",
                       "--no-timestamp"}),
              0);
    const std::string csv = slurp(path("roc.csv"));
    EXPECT_EQ(csv.rfind("beta,tp,fp,fn,tpr,fpr\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
    const auto r = nlohmann::json::parse(slurp(path("roc.json")));
    EXPECT_GT(r["auc"].get<double>(), 0.8);
    EXPECT_EQ(run_cli({"sweep", "--input", path("a/features.csv"), "--output", path("x.csv"),
                       "--labels", path("a/labels.csv"), "--labels", path("b/labels.csv")}),
              2);
}
