// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests of the command-line binary: subcommand output, exit
// codes, flag handling, and determinism. The binary path comes in through
// SLOTCNN_BIN_PATH at compile time.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

namespace {

using slotcnn::testutil::TempDir;

struct CliRun {
  int code = -1;
  std::string out;  // stdout and stderr, interleaved
};

CliRun run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = (env.empty() ? "" : env + " ") +
                          std::string(SLOTCNN_BIN_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    throw std::runtime_error("popen failed for: " + cmd);
  }
  CliRun r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
    r.out.append(buf, n);
  }
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

/// A conv -> pool -> fc model (no activations) with weights and one input,
/// written to disk the way a user would lay it out.
struct CliModel {
  TempDir dir{"cli"};
  std::string spec_path, input_path;
  slotcnn::HostTensor input;
  slotcnn::KernelTensor conv_w;
  slotcnn::FcWeights fc_w;

  CliModel() : input(1, 6, 6), conv_w(2, 1, 3), fc_w(3, 8) {
    namespace tu = slotcnn::testutil;
    std::mt19937& gen = tu::rng(801);
    input = tu::random_tensor(gen, 1, 6, 6);
    conv_w = tu::random_kernel(gen, 2, 1, 3);
    fc_w = tu::random_fc(gen, 3, 8);
    tu::write_csv(dir.path() / "conv_w.csv", conv_w.weights, 9);
    tu::write_csv(dir.path() / "conv_b.csv", conv_w.bias, 2);
    tu::write_csv(dir.path() / "fc_w.csv", fc_w.weights, 8);
    tu::write_csv(dir.path() / "fc_b.csv", fc_w.bias, 3);
    tu::write_csv(dir.path() / "input.csv", input.values, 6);
    std::ofstream spec(dir.path() / "model.json");
    spec << R"({
      "name": "cli_fixture",
      "context": { "ring_dimension": 2048, "slot_count": 1024,
                   "depth_budget": 25 },
      "input": { "channels": 1, "width": 6 },
      "layers": [
        { "type": "conv", "name": "conv1", "out_channels": 2, "kernel": 3,
          "weights": "conv_w.csv", "bias": "conv_b.csv" },
        { "type": "avg_pool", "name": "pool1", "kernel": 2, "stride": 2 },
        { "type": "fc", "name": "fc1", "outputs": 3,
          "weights": "fc_w.csv", "bias": "fc_b.csv" }
      ]
    })";
    spec.close();
    spec_path = (dir.path() / "model.json").string();
    input_path = (dir.path() / "input.csv").string();
  }
};

}  // namespace

TEST_CASE("masks --build dumps one raw pattern row") {
  const CliRun r = run_cli("masks --build 0 0 4 4 1");
  CHECK(r.code == 0);
  CHECK(r.out == "1,1,1,1\n");
}

TEST_CASE("masks --width dumps the nine boundary masks") {
  const CliRun r = run_cli("masks --width 3 --channels 2");
  CHECK(r.code == 0);
  const std::vector<std::string> rows = lines_of(r.out);
  REQUIRE(rows.size() == 9);
  for (const std::string& row : rows) {
    CHECK(std::count(row.begin(), row.end(), ',') == 17);  // 2 * 3 * 3 values
  }
  // The center tap sees every sample: all ones.
  CHECK(rows[4] == "1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1");
}

TEST_CASE("masks without arguments is a usage error") {
  const CliRun r = run_cli("masks");
  CHECK(r.code == 1);
  CHECK(r.out.find("--width") != std::string::npos);
}

TEST_CASE("relu-profile emits one CSV row per degree") {
  const CliRun r = run_cli("relu-profile --degrees 3 59 --grid 1001");
  CHECK(r.code == 0);
  const std::vector<std::string> rows = lines_of(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] ==
        "degree,max_abs_error,mean_abs_error,max_abs_error_outside_deadzone");
  double d = 0, max_err = 0, mean_err = 0, outside = 0;
  char comma = 0;
  std::istringstream row59(rows[2]);
  row59 >> d >> comma >> max_err >> comma >> mean_err >> comma >> outside;
  CHECK(d == 59);
  CHECK(outside < 1e-2);       // high degree: accurate away from the kink
  CHECK(outside <= max_err);   // the kink itself dominates
  CHECK(mean_err <= max_err);
}

TEST_CASE("infer reports matching logits against the reference") {
  const CliModel m;
  const CliRun r = run_cli("infer " + m.spec_path + " " + m.input_path);
  REQUIRE(r.code == 0);

  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j.at("model").get<std::string>() == "cli_fixture");
  CHECK(j.at("argmax_match").get<bool>());
  CHECK(j.at("max_abs_delta").get<double>() < 1e-9);
  CHECK(j.at("deltas").size() == 3);
  CHECK(j.at("trace_check").at("ok").get<bool>());
  REQUIRE(j.at("logits").size() == 3);

  // The reference logits in the report match an oracle recomputation.
  const slotcnn::HostTensor c =
      slotcnn::oracle::conv2d_ref(m.input, m.conv_w, 1, 0);
  const slotcnn::HostTensor p = slotcnn::oracle::avg_pool_ref(c, 2, 2);
  const std::vector<double> want = slotcnn::oracle::fc_ref(p.values, m.fc_w);
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(j.at("reference_logits").at(i).get<double>() ==
          doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("key and weight strategies do not change the logits") {
  const CliModel m;
  const CliRun base = run_cli("infer " + m.spec_path + " " + m.input_path);
  const CliRun block =
      run_cli("infer " + m.spec_path + " " + m.input_path + " --keys block");
  const CliRun lazy =
      run_cli("infer " + m.spec_path + " " + m.input_path + " --weights lazy");
  REQUIRE(base.code == 0);
  REQUIRE(block.code == 0);
  REQUIRE(lazy.code == 0);
  const nlohmann::json jb = nlohmann::json::parse(base.out);
  const nlohmann::json jk = nlohmann::json::parse(block.out);
  const nlohmann::json jw = nlohmann::json::parse(lazy.out);
  CHECK(jb.at("logits") == jk.at("logits"));
  CHECK(jb.at("logits") == jw.at("logits"));
  CHECK(jk.at("trace_check").at("ok").get<bool>());
  CHECK(jk.at("plan").at("blocks").size() >
        jb.at("plan").at("blocks").size());
}

TEST_CASE("the forced masked downsampling flavor stays correct") {
  const CliModel m;
  const CliRun r = run_cli("infer " + m.spec_path + " " + m.input_path +
                           " --stride-variant masked");
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j.at("argmax_match").get<bool>());
  CHECK(j.at("max_abs_delta").get<double>() < 1e-9);
}

TEST_CASE("infer output is deterministic apart from wall time") {
  const CliModel m;
  const CliRun a = run_cli("infer " + m.spec_path + " " + m.input_path);
  const CliRun b = run_cli("infer " + m.spec_path + " " + m.input_path);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  nlohmann::json ja = nlohmann::json::parse(a.out);
  nlohmann::json jb = nlohmann::json::parse(b.out);
  ja.erase("wall_ms");
  jb.erase("wall_ms");
  CHECK(ja == jb);
}

TEST_CASE("keyplan needs no weight files and reports both plans") {
  const CliModel m;
  std::filesystem::remove(std::filesystem::path(m.spec_path).parent_path() /
                          "conv_w.csv");  // planning must not read weights
  const CliRun r = run_cli("keyplan " + m.spec_path);
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j.at("layers").size() == 3);
  CHECK(j.at("union").at("distinct").get<std::size_t>() > 0);
  CHECK(j.at("preload").at("bytes").get<std::size_t>() > 0);
  CHECK(j.at("blocks").at("count").get<std::size_t>() == 2);
  CHECK(j.at("blocks").at("peak_resident_keys").get<std::size_t>() <=
        j.at("union").at("distinct").get<std::size_t>());

  const CliRun again = run_cli("keyplan " + m.spec_path);
  CHECK(again.out == r.out);  // byte-identical across runs
}

TEST_CASE("--out writes the report to a file instead of stdout") {
  TempDir dir("cliout");
  const std::string out = (dir.path() / "masks.csv").string();
  const CliRun r = run_cli("masks --build 1 1 2 8 2 --out " + out);
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(out);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "0,1,1,0,1,1,0,0,0,1,1,0,1,1,0,0");
}

TEST_CASE("failures map to the documented exit codes") {
  const CliModel m;

  // Usage: unknown flag, missing subcommand, bad enum value.
  CHECK(run_cli("infer " + m.spec_path + " " + m.input_path + " --frobnicate")
            .code == 1);
  CHECK(run_cli("").code == 1);
  CHECK(run_cli("infer " + m.spec_path + " " + m.input_path +
                " --keys sometimes")
            .code == 1);
  CHECK(run_cli("infer missing_model.json " + m.input_path).code == 1);

  // Data: the spec file exists but a weight file is gone.
  std::filesystem::remove(std::filesystem::path(m.spec_path).parent_path() /
                          "fc_w.csv");
  const CliRun gone = run_cli("infer " + m.spec_path + " " + m.input_path);
  CHECK(gone.code == 2);
  CHECK(gone.out.find("fc_w.csv") != std::string::npos);

  // Data: a spec file that is not valid JSON.
  TempDir dir("clibad");
  const std::string bad = (dir.path() / "bad.json").string();
  std::ofstream(bad) << "{ this is not json";
  const CliRun parse = run_cli("keyplan " + bad);
  CHECK(parse.code == 2);
  CHECK(parse.out.find("not valid JSON") != std::string::npos);
}

TEST_CASE("the kernel override is honored end to end") {
  const CliModel m;
  const CliRun r = run_cli("infer " + m.spec_path + " " + m.input_path,
                           "SLOTCNN_KERNELS=scalar");
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j.at("kernels").get<std::string>() == "scalar");
  CHECK(j.at("argmax_match").get<bool>());
}
