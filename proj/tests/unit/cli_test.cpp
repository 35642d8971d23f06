// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "specdiff/pipeline.hpp"
#include "test_paths.hpp"

namespace fs = std::filesystem;
using specdiff::json;

namespace {

struct Invocation {
    int exit_code = -1;
    std::string output;
};

Invocation run_cli(const std::string& arguments) {
    const std::string command = testpaths::cli() + " " + arguments + " 2>&1";
    Invocation result;
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) return result;
    std::array<char, 4096> buffer{};
    while (std::fgets(buffer.data(), buffer.size(), pipe) != nullptr) result.output += buffer.data();
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("specdiff-cli-" + std::string(info->name()) + "-" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

    fs::path dir_;
};

const std::string kSmall = "--spec " + testpaths::source("specs/eth_getBalance.json") + " --mix 2,2,2";

}  // namespace

TEST_F(CliTest, CleanScenarioExitsZero) {
    const auto run = run_cli("run " + kSmall + " --scenario " + testpaths::source("scenarios/clean.json") +
                             " --report-dir " + path("report"));
    EXPECT_EQ(run.exit_code, 0) << run.output;
    EXPECT_NE(run.output.find("requests: 6"), std::string::npos) << run.output;
    const auto report = specdiff::read_json_file(path("report/run_report.json"));
    EXPECT_TRUE(report["findings"].empty());
    EXPECT_TRUE(fs::exists(path("report/run_report.md")));
    EXPECT_TRUE(fs::exists(path("report/roundlog.jsonl")));
}

TEST_F(CliTest, DroppedFieldIsOneFinding) {
    const auto run = run_cli("run --spec " + testpaths::source("specs/execution_api.json") +
                             " --mix 1,1,2 --scenario " + testpaths::source("scenarios/drop_field.json") +
                             " --report-dir " + path("report"));
    EXPECT_EQ(run.exit_code, 2) << run.output;
    const auto report = specdiff::read_json_file(path("report/run_report.json"));
    ASSERT_EQ(report["findings"].size(), 1u) << report["findings"].dump(2);
    EXPECT_EQ(report["findings"][0]["method"], "eth_getBlockByNumber");
    EXPECT_EQ(report["findings"][0]["field_path"], "/result/miner");
}

TEST_F(CliTest, AnnotateIsIdempotent) {
    const auto first = run_cli("annotate --spec " + testpaths::source("specs/eth_getBalance.json") + " --out " + path("a.json"));
    ASSERT_EQ(first.exit_code, 0) << first.output;
    const auto second = run_cli("annotate --spec " + path("a.json") + " --out " + path("b.json"));
    ASSERT_EQ(second.exit_code, 0) << second.output;
    EXPECT_EQ(specdiff::read_text_file(path("a.json")), specdiff::read_text_file(path("b.json")));
}

TEST_F(CliTest, ExternalClassifierDownWritesNothing) {
    const auto run = run_cli("annotate --spec " + testpaths::source("specs/eth_getBalance.json") +
                             " --classifier external --oracle-url http://127.0.0.1:1/v1 --out " + path("c.json"));
    EXPECT_NE(run.exit_code, 0);
    EXPECT_FALSE(fs::exists(path("c.json")));
}

TEST_F(CliTest, ReplayChecksTheFleet) {
    const auto run = run_cli("run " + kSmall + " --scenario " + testpaths::source("scenarios/clean.json") +
                             " --report-dir " + path("report"));
    ASSERT_EQ(run.exit_code, 0) << run.output;
    const auto same = run_cli("replay " + kSmall + " --scenario " + testpaths::source("scenarios/clean.json") +
                              " --roundlog " + path("report/roundlog.jsonl") + " --report-dir " + path("replay"));
    EXPECT_EQ(same.exit_code, 0) << same.output;
    const auto replayed = specdiff::read_json_file(path("replay/run_report.json"));
    EXPECT_EQ(replayed["replay"]["requests"], 6);
    EXPECT_TRUE(replayed["replay"]["changed_records"].empty());

    write("four.json", R"({"chain_seed": 7, "node_count": 4, "injections": []})");
    const auto mismatch = run_cli("replay " + kSmall + " --scenario " + path("four.json") + " --roundlog " +
                                  path("report/roundlog.jsonl") + " --report-dir " + path("replay2"));
    EXPECT_EQ(mismatch.exit_code, 1) << mismatch.output;
    EXPECT_NE(mismatch.output.find("fleet mismatch"), std::string::npos) << mismatch.output;
}

TEST_F(CliTest, EmptyRoundLogReplaysToEmptyReport) {
    write("empty.jsonl", "");
    const auto run = run_cli("replay " + kSmall + " --scenario " + testpaths::source("scenarios/clean.json") +
                             " --roundlog " + path("empty.jsonl") + " --report-dir " + path("replay"));
    EXPECT_EQ(run.exit_code, 0) << run.output;
    const auto report = specdiff::read_json_file(path("replay/run_report.json"));
    EXPECT_TRUE(report["findings"].empty());
    EXPECT_EQ(report["replay"]["requests"], 0);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_NE(run_cli("run " + kSmall).exit_code, 0);
    EXPECT_NE(run_cli("run " + kSmall + " --scenario " + testpaths::source("scenarios/clean.json") + " --mix 1,2").exit_code, 0);
    const auto both = run_cli("run " + kSmall + " --scenario a.json --fleet b.json");
    EXPECT_EQ(both.exit_code, 1);
}
