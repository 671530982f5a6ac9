// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int run(const std::string& args, std::string* out = nullptr) {
  const auto tmp = std::filesystem::temp_directory_path() / ("lriga_cli_" + std::to_string(::getpid()) + ".txt");
  const std::string cmd = std::string(LRIGA_CLI) + " " + args + " > " + tmp.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  std::filesystem::remove(tmp);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, SolveOnCubeSucceeds) {
  std::string out;
  EXPECT_EQ(run("solve --geometry cube --p 2 --n-el 6", &out), 0);
  EXPECT_EQ(out.rfind("iter,res_norm,", 0), 0u) << out;
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  EXPECT_EQ(run("solve --geometry torus --p 2 --n-el 4"), 2);
  EXPECT_EQ(run("solve --p 0 --n-el 4"), 2);
  EXPECT_EQ(run("solve --config /nonexistent/config.json"), 2);
  EXPECT_EQ(run("elasticity --mu -1"), 2);
}

TEST(Cli, IterationCapExitsWithOne) {
  EXPECT_EQ(run("solve --geometry quarter_annulus --p 2 --n-el 8 --tol 1e-10 --max-iterations 2"), 1);
}

TEST(Cli, ElasticityZeroLoad) { EXPECT_EQ(run("elasticity --p 2 --n-el 4 --lambda 0.5 --mu 0.4 --zero-load"), 0); }
