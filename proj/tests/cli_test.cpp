#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gpass_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunResult run(const std::string& args) {
    const auto err_path = dir_ / "stderr.txt";
    const std::string cmd = std::string("'") + GPASS_CLI_PATH + "' " + args + " 2>'" + err_path.string() + "'";
    RunResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.err = slurp(err_path);
    return r;
  }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  static std::string question(const std::string& id, const std::string& dataset) {
    return R"({"question_id":")" + id + R"(","dataset":")" + dataset +
           R"(","language":"en","question_type":"problem-solving","prompt":"p","reference_answer":"r"})" "\n";
  }

  static std::string generations(const std::string& id, int n, int c, bool greedy_ok) {
    std::string s;
    for (int i = 0; i < n; ++i) {
      s += R"({"question_id":")" + id + R"(","run_index":)" + std::to_string(i) +
           R"(,"run_kind":"sampled","completion":"x","judged_correct":)" + (i < c ? "true" : "false") + "}\n";
    }
    s += R"({"question_id":")" + id + R"(","run_index":0,"run_kind":"greedy","completion":"x","judged_correct":)" +
         (greedy_ok ? "true" : "false") + "}\n";
    return s;
  }

  fs::path dir_;
};

TEST_F(Cli, VersionAndHelp) {
  auto r = run("--version");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, std::string("gpass ") + GPASS_VERSION + "\n");
  r = run("--help");
  EXPECT_EQ(r.status, 0);
  for (const char* sub : {"judge", "compute", "simulate", "agreement"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
  r = run("compute --help");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("--group-by"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("compute").status, 2);
  EXPECT_EQ(run("simulate curves --n notanumber").status, 2);
  const auto q = write("q.jsonl", question("q1", "D"));
  const auto g = write("g.jsonl", generations("q1", 16, 8, true));
  EXPECT_EQ(run("compute --questions " + q.string() + " --generations " + g.string() + " --k 4 --tau 1.5").status, 2);
  EXPECT_EQ(run("compute --questions " + q.string() + " --generations " + g.string() + " --format xml").status, 2);
}

TEST_F(Cli, ComputeMarkdown) {
  const auto q = write("q.jsonl", question("q1", "A") + question("q2", "B"));
  const auto g = write("g.jsonl", generations("q1", 48, 48, true) + generations("q2", 48, 0, false));
  const auto r = run("compute --questions " + q.string() + " --generations " + g.string() +
                     " --k 16 --group-by dataset --drops --slope --difficulty --model-name m");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.starts_with("k = 16\n\n| Group | Greedy |")) << r.out;
  EXPECT_NE(r.out.find("| A | 100.0 | 100.0 | 100.0 | 100.0 | 100.0 | 100.0 | 100.0 | 0.0 |"), std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find("| B | 0.0 | 0.0 | 0.0 | 0.0 | 0.0 | 0.0 | 0.0 | — |"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("| ALL | 50.0 | 50.0 | 50.0 | 50.0 | 50.0 | 50.0 | 50.0 | 0.0 |"), std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find("| m | 100.0 |"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("| ALL | 0.0000 |"), std::string::npos) << r.out;
}

TEST_F(Cli, ComputeWritesFileAndIsThreadIndependent) {
  std::string qs, gs;
  for (int i = 0; i < 12; ++i) {
    const auto id = "q" + std::to_string(i);
    qs += question(id, i % 2 ? "odd" : "even");
    gs += generations(id, 48, (i * 7) % 49, i % 3 == 0);
  }
  const auto q = write("q.jsonl", qs);
  const auto g = write("g.jsonl", gs);
  const std::string base = "compute --questions " + q.string() + " --generations " + g.string() +
                           " --group-by dataset --format dsv --drops ";
  ASSERT_EQ(run(base + "--threads 1 --out " + (dir_ / "a.csv").string()).status, 0);
  ASSERT_EQ(run(base + "--threads 5 --out " + (dir_ / "b.csv").string()).status, 0);
  const auto a = slurp(dir_ / "a.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b.csv"));
  EXPECT_TRUE(a.starts_with("k,Group,Greedy,"));
}

TEST_F(Cli, InsufficientGenerationsIsDataError) {
  const auto q = write("q.jsonl", question("q1", "D") + question("short-one", "D"));
  const auto g = write("g.jsonl", generations("q1", 48, 10, true) + generations("short-one", 8, 3, true));
  const auto r = run("compute --questions " + q.string() + " --generations " + g.string() + " --k 16");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("short-one"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, MalformedInputIsDataError) {
  const auto q = write("q.jsonl", question("q1", "D") + "{not json\n");
  const auto g = write("g.jsonl", generations("q1", 48, 10, true));
  const auto r = run("compute --questions " + q.string() + " --generations " + g.string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;

  const auto unjudged = write("u.jsonl", R"({"question_id":"q1","run_index":0,"run_kind":"sampled","completion":"x"})"
                                         "\n");
  EXPECT_EQ(run("compute --questions " + write("q2.jsonl", question("q1", "D")).string() + " --generations " +
                unjudged.string() + " --k 1")
                .status,
            1);
}

TEST_F(Cli, SimulateIsDeterministic) {
  const std::string args = "simulate unbiasedness --n 16,32 --k 8 --tau 0.5,1 --trials 300 --seed 9 ";
  const auto a = run(args + "--threads 1");
  const auto b = run(args + "--threads 4");
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(a.out.starts_with("k,tau,c_or_n,metric,value\n"));
  EXPECT_NE(run("simulate unbiasedness --n 16,32 --k 8 --tau 0.5,1 --trials 300 --seed 10").out, a.out);

  const auto v = run("simulate variance --n 16,48 --k 8 --tau 0.5 --trials 200 --seed 1");
  ASSERT_EQ(v.status, 0) << v.err;
  EXPECT_NE(v.out.find("8,0.5,16,estimator_std,"), std::string::npos) << v.out;
}

TEST_F(Cli, Curves) {
  const auto r = run("simulate curves --n 4 --c 2 --k-max 2 --tau 1");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.starts_with("k,tau,c_or_n,metric,value\n"
                                "1,1,2,pass_at_k,0.5\n"
                                "1,1,2,g_pass_at_k_tau,0.5\n"
                                "2,1,2,pass_at_k,0.83333333333333"))
      << r.out;
  EXPECT_NE(r.out.find("\n2,1,2,g_pass_at_k_tau,0.1666666666666666"), std::string::npos) << r.out;
  EXPECT_EQ(run("simulate curves").status, 0);
}

TEST_F(Cli, Agreement) {
  std::string a, b;
  for (int i = 0; i < 10; ++i) {
    const auto id = "q" + std::to_string(i);
    a += R"({"question_id":")" + id + R"(","run_kind":"sampled","run_index":0,"verdict":"yes"})" "\n";
    b += R"({"question_id":")" + id + R"(","run_kind":"sampled","run_index":0,"verdict":")" +
         (i == 3 ? "no" : "yes") + "\"}\n";
  }
  const auto r = run("agreement " + write("a.jsonl", a).string() + " " + write("b.jsonl", b).string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "| Agreement | Disagreement | Accuracy (%) |\n|---:|---:|---:|\n| 9 | 1 | 90.0 |\n");
  EXPECT_EQ(run("agreement " + write("c.jsonl", a.substr(0, a.find('\n') + 1)).string() + " " +
                (dir_ / "b.jsonl").string())
                .status,
            1);
}

}  // namespace
