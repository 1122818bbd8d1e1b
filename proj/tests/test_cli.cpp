#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stancedyn/cli.hpp"

namespace fs = std::filesystem;
using namespace stancedyn;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args, const std::string& stdin_text = "") {
    args.insert(args.begin(), "stancedyn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), cli::Context{in, out, err});
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("stancedyn_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const char* fixture = R"({"tweet_id":"1","user_id":"a","ts":"2021-01-01T10:00:00Z","stance":"anti","kind":"original"}
{"tweet_id":"2","user_id":"a","ts":"2021-01-02T10:00:00Z","stance":"pro","kind":"original"}
{"tweet_id":"3","user_id":"b","ts":"2021-01-01T11:00:00Z","stance":"anti","kind":"original"}
{"tweet_id":"4","user_id":"b","ts":"2021-01-01T12:00:00Z","stance":"anti","kind":"original"}
{"tweet_id":"5","user_id":"b","ts":"2021-01-03T12:00:00Z","stance":"pro","kind":"reply","parent_id":"1"}
{"tweet_id":"6","user_id":"c","ts":"2021-01-01T13:00:00Z","stance":"pro","kind":"retweet","parent_id":"2"}
)";

} // namespace

TEST(Cli, CohortMatchesHandValues) {
    const auto dir = scratch("cohort");
    const auto r = run({"cohort", "--alpha-anti", "0.52", "--alpha-pro", "0.68", "--out", dir.string()}, fixture);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto text = slurp(dir / "cohort.csv");
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "user_id,n_a,n_p,p_dual");
    std::getline(in, line);
    auto f = csv::split(line);
    EXPECT_EQ(f[0], "a");
    EXPECT_NEAR(std::stod(f[3]), 0.52 * 0.68, 1e-12);
    std::getline(in, line);
    f = csv::split(line);
    EXPECT_EQ(f[0], "b");
    EXPECT_NEAR(std::stod(f[3]), (1 - 0.48 * 0.48) * 0.68, 1e-12);
    EXPECT_FALSE(std::getline(in, line)); // c is not dual-detected
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Cli, ClassifyModesRecorded) {
    for (std::string mode : {"exact", "as-written"}) {
        const auto dir = scratch("classify_" + mode);
        const auto r = run({"classify", "--epsilon", "0.05", "--mode", mode, "--alpha-anti", "0.9", "--alpha-pro", "0.9",
                            "--out", dir.string()},
                           fixture);
        ASSERT_EQ(r.code, 0) << r.err;
        const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
        EXPECT_EQ(manifest["parameters"]["mode"], mode);
        EXPECT_EQ(manifest["command"], "classify");
        EXPECT_EQ(manifest["outputs"]["classify.csv"], cli::checksum(slurp(dir / "classify.csv")));
        EXPECT_EQ(slurp(dir / "classify.csv").substr(0, 51), "user_id,n_a,n_p,p_dual,pr_pro,pr_anti,pr_bal,class\n");
    }
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"classify", "--mode", "bogus", "--alpha-anti", "0.9", "--alpha-pro", "0.9"}, fixture).code, 2);
    EXPECT_EQ(run({"classify"}, fixture).code, 2); // no precision
    EXPECT_EQ(run({"nonsense"}).code, 2);
    EXPECT_EQ(run({"classify", "--epsilon", "0.7", "--alpha-anti", "0.9", "--alpha-pro", "0.9"}, fixture).code, 2);
    EXPECT_EQ(run({"cohort", "--input", "/nonexistent/file", "--alpha-anti", "0.9", "--alpha-pro", "0.9"}).code, 1);
    EXPECT_EQ(run({"cohort", "--strict", "--alpha-anti", "0.9", "--alpha-pro", "0.9"}, "garbage\n").code, 1);
    EXPECT_EQ(run({"mi", "--max-lag", "5"}, fixture).code, 1); // series too short
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SimulatePipelineDeterministic) {
    const auto a = run({"simulate", "--seed", "7", "--users", "300"});
    const auto b = run({"simulate", "--seed", "7", "--users", "300", "--threads", "3"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto c1 = run({"classify", "--alpha-anti", "0.85", "--alpha-pro", "0.9"}, a.out);
    const auto c2 = run({"classify", "--alpha-anti", "0.85", "--alpha-pro", "0.9", "--threads", "4"}, b.out);
    ASSERT_EQ(c1.code, 0) << c1.err;
    EXPECT_EQ(c1.out, c2.out);
    EXPECT_GT(c1.out.size(), 60u);
}

TEST(Cli, DynamicsSplitAndSeries) {
    const auto dir = scratch("dyn");
    const auto sim = run({"simulate", "--seed", "3", "--users", "400", "--days", "120"});
    ASSERT_EQ(sim.code, 0);
    ASSERT_EQ(run({"dynamics", "--split-day", "60", "--out", dir.string()}, sim.out).code, 0);
    const auto series = slurp(dir / "series.csv");
    EXPECT_EQ(series.substr(0, 40), "day,delta_plus,delta_minus,diff,cumulati");
    EXPECT_TRUE(fs::exists(dir / "series_post.csv"));
    const auto st = run({"stationarity", "--series", (dir / "series.csv").string()});
    ASSERT_EQ(st.code, 0) << st.err;
    EXPECT_NE(st.out.find("kpss"), std::string::npos);
    const auto ccm = run({"ccm", "--series", (dir / "series.csv").string(), "--e", "3", "--tau", "1", "--samples", "3",
                          "--split-day", "60", "--out", (dir / "ccm").string()});
    ASSERT_EQ(ccm.code, 0) << ccm.err;
    EXPECT_TRUE(fs::exists(dir / "ccm" / "ccm_pre.csv"));
    EXPECT_TRUE(fs::exists(dir / "ccm" / "ccm_post.csv"));
    // default E = 32, tau = 3 needs more than 94 points per window
    EXPECT_EQ(run({"ccm", "--series", (dir / "series.csv").string(), "--split-day", "60"}).code, 1);
}

TEST(Cli, InputsNotMutated) {
    const auto dir = scratch("immut");
    {
        std::ofstream(dir / "in.jsonl") << fixture;
    }
    const auto before = slurp(dir / "in.jsonl");
    ASSERT_EQ(run({"threads", "--input", (dir / "in.jsonl").string(), "--out", (dir / "o").string()}).code, 0);
    EXPECT_EQ(slurp(dir / "in.jsonl"), before);
    const auto threads = slurp(dir / "o" / "threads.csv");
    EXPECT_EQ(threads.substr(0, 58), "thread_id,kind,size,pro,anti,first_day,last_day,originator");
    EXPECT_EQ(slurp(dir / "o" / "graph.csv").substr(0, 28), "src_user,dst_user,weight,day");
}
