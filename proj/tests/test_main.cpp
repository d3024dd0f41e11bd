#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "cocoa/providers.hpp"
#include "doctest.h"
#include "json.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

/// Runs the project binary named by COCOA_CLI with `args`.
CliResult run_cli(const std::string& args) {
  const char* cli = std::getenv("COCOA_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "COCOA_CLI must point at the built binary");
  std::string command = std::string(cli) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buffer[4096];
  while (size_t got = fread(buffer, 1, sizeof(buffer), pipe)) result.output.append(buffer, got);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string header_digest(const std::string& trace) {
  auto line_end = trace.find('\n');
  auto header = nlohmann::json::parse(trace.substr(0, line_end));
  return header.at("config_digest").get<std::string>();
}

}  // namespace

TEST_CASE("cli decode writes a deterministic trace") {
  auto out = temp_path("cocoa_cli_decode.jsonl");
  std::string args = "decode --provider toy --strategy cocoa --seed 42 --out " + out;
  auto first = run_cli(args);
  CHECK(first.exit_code == 0);
  CHECK(first.output.find("strategy=cocoa") != std::string::npos);
  auto first_bytes = read_file(out);
  CHECK_FALSE(first_bytes.empty());

  auto second = run_cli(args);
  CHECK(second.exit_code == 0);
  CHECK(read_file(out) == first_bytes);
  std::remove(out.c_str());
}

TEST_CASE("cli rejects unknown strategies with a usage error") {
  auto result = run_cli("decode --provider toy --strategy beam");
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("cocoa") != std::string::npos);
  CHECK(result.output.find("greedy") != std::string::npos);
}

TEST_CASE("cli validates provider-specific flags") {
  CHECK(run_cli("decode --provider replay").exit_code == 2);
  CHECK(run_cli("decode --provider remote").exit_code == 2);
  CHECK(run_cli("decode --provider replay --trace /nonexistent/trace.jsonl").exit_code == 1);
}

TEST_CASE("cli help lists flags with their defaults") {
  auto top = run_cli("--help");
  CHECK(top.exit_code == 0);
  CHECK(top.output.find("decode") != std::string::npos);
  CHECK(top.output.find("analyze") != std::string::npos);

  auto decode_help = run_cli("decode --help");
  CHECK(decode_help.exit_code == 0);
  for (const char* flag : {"--provider", "--strategy", "--seed", "--max-len", "--out",
                           "--renyi-order", "--gamma", "--delta", "--z", "--cad-alpha",
                           "--coiecd-threshold", "--gate-orientation", "--fixed-lambda"}) {
    CHECK_MESSAGE(decode_help.output.find(flag) != std::string::npos, "missing ", flag);
  }
  CHECK(decode_help.output.find("0.5") != std::string::npos);
  CHECK(decode_help.output.find("prose") != std::string::npos);
}

TEST_CASE("cli literal orientation flips the gate on a pinned-margin step") {
  auto trace = temp_path("cocoa_cli_onehot_trace.jsonl");
  {
    std::vector<cocoa::TraceRecord> records;
    records.push_back({0, {0.0, 4.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 40.0}, std::nullopt});
    cocoa::save_trace(trace, 4, "pinned margin", records);
  }
  auto out = temp_path("cocoa_cli_literal.jsonl");
  auto result = run_cli("decode --provider replay --trace " + trace +
                        " --gate-orientation literal --out " + out);
  CHECK(result.exit_code == 0);

  std::istringstream lines(read_file(out));
  std::string header_line, row_line;
  REQUIRE(std::getline(lines, header_line));
  REQUIRE(std::getline(lines, row_line));
  auto row = nlohmann::json::parse(row_line);
  double lambda = row.at("lambda").get<double>();
  double score = row.at("conflict_score").get<double>();
  CHECK(std::abs(lambda - (1.0 - score)) <= 1e-6);
  std::remove(trace.c_str());
  std::remove(out.c_str());
}

TEST_CASE("cli analyze em is deterministic across reruns and thread counts") {
  auto out = temp_path("cocoa_cli_em.jsonl");
  std::string base = "analyze em --n-conflict 10 --n-agree 10 --vocab 32 --seed 7 --out " + out;
  auto first = run_cli(base + " --threads 1");
  CHECK(first.exit_code == 0);
  CHECK(first.output.find("cocoa") != std::string::npos);
  auto bytes = read_file(out);

  auto threaded = run_cli(base + " --threads 4");
  CHECK(threaded.exit_code == 0);
  CHECK(read_file(out) == bytes);
  CHECK(bytes.find("\"seed\":7") != std::string::npos);
  std::remove(out.c_str());
}

TEST_CASE("cli analyze bench emits one row per requested strategy") {
  auto out = temp_path("cocoa_cli_bench.jsonl");
  auto result = run_cli("analyze bench --vocab 64 --steps 10 --strategies cad --out " + out);
  CHECK(result.exit_code == 0);
  auto bytes = read_file(out);
  CHECK(std::count(bytes.begin(), bytes.end(), '\n') == 2);
  CHECK(bytes.find("\"strategy\":\"cad\"") != std::string::npos);
  CHECK(run_cli("analyze bench --strategies warp --out " + out).exit_code == 2);
  std::remove(out.c_str());
}

TEST_CASE("cli flags override the config file which overrides defaults") {
  auto config = temp_path("cocoa_cli_config.ini");
  {
    std::ofstream out(config);
    out << "[decode]\n";
    out << "renyi-order=0.7\n";
  }
  auto out_a = temp_path("cocoa_cli_cfg_a.jsonl");
  auto out_b = temp_path("cocoa_cli_cfg_b.jsonl");
  auto out_c = temp_path("cocoa_cli_cfg_c.jsonl");

  CHECK(run_cli("--config " + config + " decode --provider toy --seed 3 --out " + out_a)
            .exit_code == 0);
  CHECK(run_cli("decode --provider toy --seed 3 --renyi-order 0.7 --out " + out_b).exit_code == 0);
  CHECK(run_cli("--config " + config + " decode --provider toy --seed 3 --renyi-order 0.9 --out " +
                out_c)
            .exit_code == 0);

  auto digest_a = header_digest(read_file(out_a));
  auto digest_b = header_digest(read_file(out_b));
  auto digest_c = header_digest(read_file(out_c));
  CHECK(digest_a == digest_b);
  CHECK(digest_a != digest_c);

  for (const auto& path : {config, out_a, out_b, out_c}) std::remove(path.c_str());
}
