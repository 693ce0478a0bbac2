// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//
// End-to-end checks of the adsub command line: golden outputs for demo2,
// exit-code contract, and determinism of seeded runs.
// Usage: cli_tests <path-to-adsub-binary> <golden-dir>
//

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

int g_failures = 0;

void expect(bool ok, const std::string& what) {
  if (ok) {
    std::cout << "[ok] " << what << "\n";
  } else {
    ++g_failures;
    std::cout << "[FAILED] " << what << "\n";
  }
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (!pipe) {
    result.output = "popen failed";
    return result;
  }
  char buffer[4096];
  while (std::size_t got = fread(buffer, 1, sizeof(buffer), pipe))
    result.output.append(buffer, got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

void expect_matches_golden(const fs::path& produced, const fs::path& golden,
                           const std::string& what) {
  const std::string got = read_file(produced);
  const std::string want = read_file(golden);
  if (got == want) {
    expect(true, what);
    return;
  }
  expect(false, what);
  std::cout << "--- want (" << golden << ")\n" << want;
  std::cout << "--- got (" << produced << ")\n" << got;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: cli_tests <adsub-binary> <golden-dir>\n";
    return 2;
  }
  const std::string bin = argv[1];
  const fs::path golden = argv[2];
  const fs::path work =
      fs::temp_directory_path() / ("adsub_cli_" + std::to_string(getpid()));
  fs::create_directories(work);

  const fs::path demo_path = work / "demo2.json";

  {
    const auto r = run_command(bin + " generate --kind demo2 -o " +
                               demo_path.string());
    expect(r.exit_code == 0, "generate demo2 exits 0");
    expect(contains(r.output, "adaptive-submodular: PASS"),
           "generate reports the submodularity check");
    expect(contains(r.output, "adaptive-monotone: PASS"),
           "generate reports the monotonicity check");
    expect_matches_golden(demo_path, golden / "demo2_instance.json",
                          "demo2 instance bytes are stable");
  }

  {
    const fs::path out = work / "run_dg.json";
    const auto r = run_command(bin + " run --instance " + demo_path.string() +
                               " --policy dg --k 2 --mode exact --out " +
                               out.string());
    expect(r.exit_code == 0, "exact run exits 0");
    expect_matches_golden(out, golden / "demo2_run_dg_exact.json",
                          "exact run JSON matches golden");
    expect(contains(read_file(out), "\"objective\": 0.75"),
           "exact distorted greedy objective is 0.75");
  }

  {
    const fs::path out = work / "run_dg.csv";
    const auto r = run_command(bin + " run --instance " + demo_path.string() +
                               " --policy dg --k 2 --mode exact --format csv" +
                               " --out " + out.string());
    expect(r.exit_code == 0, "exact csv run exits 0");
    expect_matches_golden(out, golden / "demo2_run_dg_exact.csv",
                          "exact run CSV matches golden");
  }

  {
    const fs::path out1 = work / "mc1.json";
    const fs::path out2 = work / "mc2.json";
    const std::string base = bin + " run --instance " + demo_path.string() +
                             " --policy rdg --k 2 --mode mc --trials 5000" +
                             " --seed 11 --out ";
    expect(run_command(base + out1.string()).exit_code == 0,
           "mc run exits 0");
    run_command(base + out2.string());
    expect(read_file(out1) == read_file(out2),
           "seeded mc runs are byte-identical");
  }

  {
    const auto r = run_command(bin + " run --instance " + demo_path.string() +
                               " --policy ltdg --k 2 --mode exact");
    expect(r.exit_code == 2, "exact mode rejects the linear-time policy");
    expect(contains(r.output, "Monte Carlo"),
           "the rejection names the Monte Carlo alternative");
  }

  {
    const auto r = run_command(bin + " run --instance " + demo_path.string() +
                               " --policy ltdg --k 2 --mode mc --epsilon 1.5");
    expect(r.exit_code == 2, "epsilon outside (0,1) is a usage error");
  }

  {
    const fs::path out = work / "verify_dg.json";
    const auto r = run_command(bin + " verify --instance " +
                               demo_path.string() +
                               " --policy dg --k 2 --out " + out.string());
    expect(r.exit_code == 0, "verify exits 0 when the bound holds");
    expect_matches_golden(out, golden / "demo2_verify_dg.json",
                          "verify JSON matches golden");
    expect(contains(read_file(out), "\"satisfied\": true"),
           "verify reports satisfaction");
  }

  {
    const auto r = run_command(bin + " verify --instance " +
                               demo_path.string() +
                               " --policy dg --k 2 --corrupt-h");
    expect(r.exit_code == 1, "a corrupted policy violates the bound (exit 1)");
  }

  {
    const auto r = run_command(bin + " verify --instance " +
                               demo_path.string() + " --policy dg --k 9");
    expect(r.exit_code == 3, "over-budget oracle requests exit 3");
  }

  {
    const fs::path out1 = work / "sweep1.csv";
    const fs::path out2 = work / "sweep2.csv";
    const std::string base = bin + " sweep --instance " + demo_path.string() +
                             " --policies dg,rdg --seeds 1,2,3 --k 2" +
                             " --trials 2000 --out ";
    expect(run_command(base + out1.string()).exit_code == 0, "sweep exits 0");
    run_command(base + out2.string());
    const std::string sweep_text = read_file(out1);
    int lines = 0;
    for (char c : sweep_text)
      if (c == '\n') ++lines;
    expect(lines == 7, "2 policies x 3 seeds gives a header plus 6 rows");
    expect(read_file(out1) == read_file(out2),
           "sweeping twice produces identical bytes");

    const fs::path out3 = work / "sweep3.csv";
    run_command("ADSUB_THREADS=2 " + base + out3.string());
    expect(read_file(out1) == read_file(out3),
           "parallel sweeps keep row order and bytes");
  }

  {
    const fs::path out = work / "sweep_eps.csv";
    run_command(bin + " sweep --instance " + demo_path.string() +
                " --policies ltdg --seeds 1 --epsilons 0.05,0.1,0.2 --k 2" +
                " --trials 2000 --out " + out.string());
    std::istringstream lines(read_file(out));
    std::string line;
    std::getline(lines, line);  // header
    std::vector<long> queries;
    while (std::getline(lines, line)) {
      const auto last_comma = line.rfind(',');
      queries.push_back(std::stol(line.substr(last_comma + 1)));
    }
    expect(queries.size() == 3, "epsilon grid produces one row per cell");
    expect(queries.size() == 3 && queries[0] >= queries[1] &&
               queries[1] >= queries[2],
           "query counts decrease as epsilon grows");
  }

  {
    const fs::path table_path = work / "table.json";
    const auto r = run_command(bin +
                               " generate --kind table-nonmonotone --n 2 "
                               "--seed 7 -o " +
                               table_path.string());
    expect(r.exit_code == 0, "table generation exits 0");
    expect(contains(r.output, "adaptive-submodular: PASS"),
           "generated table is adaptive submodular");
    expect(contains(r.output, "adaptive-monotone: FAIL"),
           "generated table is non-monotone");
  }

  {
    const auto r = run_command(bin + " generate --kind nonsense -o " +
                               (work / "x.json").string());
    expect(r.exit_code == 2, "unknown generator kind is a usage error");
    expect(run_command(bin).exit_code == 2, "a bare invocation is a usage error");
    expect(run_command(bin + " run --policy dg").exit_code == 2,
           "missing required flags is a usage error");
    expect(run_command(bin + " --help").exit_code == 0, "--help exits 0");
  }

  fs::remove_all(work);
  if (g_failures == 0) {
    std::cout << "all cli checks passed\n";
    return 0;
  }
  std::cout << g_failures << " cli check(s) failed\n";
  return 1;
}
