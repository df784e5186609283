// Integration tests that drive the built command-line binary and check the
// documented exit-code contract: 0 success, 1 check/runtime failure, 2 usage.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(CONFSETS_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int failures = 0;

void check(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::cerr << "FAILED: " << what << "\n";
  }
}

double first_number(const std::string& text) {
  return std::stod(text);
}

}  // namespace

int main() {
  // --- simulate: CSV output, schema, determinism -------------------------
  const std::string sim_args =
      "simulate --model 2 --estimator oracle --N 200 --K 200 --reps 5 "
      "--epsilons 0.1,0.5,1.0 --seed 7 --out /tmp/confsets_t1.csv";
  check(run_cli(sim_args).exit_code == 0, "simulate exits 0");
  const std::string csv1 = slurp("/tmp/confsets_t1.csv");
  check(csv1.rfind("#schema=1\n", 0) == 0, "CSV starts with the schema line");
  int lines = 0;
  for (char c : csv1) lines += c == '\n';
  check(lines == 5, "CSV has schema + header + 3 rows");

  check(run_cli(sim_args).exit_code == 0, "simulate rerun exits 0");
  check(slurp("/tmp/confsets_t1.csv") == csv1, "rerun with the same seed is byte-identical");

  // The full-level row classifies everything exactly.
  check(csv1.find(",1,") != std::string::npos, "CSV contains the epsilon=1 row");
  {
    std::stringstream ss(csv1);
    std::string line;
    bool prop_one = false;
    while (std::getline(ss, line)) {
      if (line.find("oracle") == std::string::npos) continue;
      // columns: model,estimator,n,N,K,B,epsilon,mean_risk,sd_risk,mean_prop,...
      std::stringstream ls(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      if (cells.size() >= 11 && cells[6] == "1" && cells[9] == "1") prop_one = true;
    }
    check(prop_one, "epsilon=1 row reports mean_prop exactly 1");
  }

  // --- simulate: JSON output round-trips ----------------------------------
  check(run_cli("simulate --model 2 --estimator oracle --N 100 --K 100 --reps 3 "
                "--epsilons 0.5,1.0 --seed 3 --format json --out /tmp/confsets_t1.json")
                .exit_code == 0,
        "simulate JSON exits 0");
  {
    const nlohmann::json j = nlohmann::json::parse(slurp("/tmp/confsets_t1.json"));
    check(j["schema"] == 1, "JSON schema field");
    check(j["rows"].size() == 2, "JSON one row per epsilon");
    const nlohmann::json round = nlohmann::json::parse(j.dump());
    check(round == j, "JSON round-trip is semantically identical");
  }

  // --- gauss ---------------------------------------------------------------
  {
    const RunResult r = run_cli("gauss --delta 0 --epsilon 0.3");
    check(r.exit_code == 0, "gauss exits 0");
    check(std::abs(first_number(r.output) - 0.5) < 1e-12, "balanced mixture risk is 1/2");
  }
  {
    const RunResult r = run_cli("gauss --delta 2 --epsilon 1");
    check(std::abs(first_number(r.output) - 0.158655253931) < 1e-9,
          "full-level risk matches 1 - Phi(1) to 12 digits");
  }
  {
    const RunResult r = run_cli("gauss --delta 2 --epsilon 1 --cdf-at 0.5");
    std::stringstream ss(r.output);
    std::string line1, line2;
    std::getline(ss, line1);
    std::getline(ss, line2);
    check(r.exit_code == 0 && std::abs(std::stod(line2)) < 1e-15,
          "score CDF at the minimum score is 0");
  }
  check(run_cli("gauss --delta 2 --epsilon 1.5").exit_code == 2,
        "out-of-range epsilon exits 2");
  check(run_cli("gauss --delta 2 --epsilon 0.5 --cdf-at 0.4").exit_code == 2,
        "out-of-range cdf-at exits 2");

  // --- usage errors ----------------------------------------------------------
  check(run_cli("simulate --bogus-flag 1").exit_code == 2, "unknown flag exits 2");
  check(run_cli("").exit_code == 2, "missing subcommand exits 2");
  check(run_cli("simulate --model 9").exit_code == 2, "unknown model exits 2");
  check(run_cli("simulate --estimator svm").exit_code == 2, "unknown estimator exits 2");
  check(run_cli("simulate --epsilons 0.5,2.0").exit_code == 2,
        "epsilon above 1 exits 2");

  // --- verify ---------------------------------------------------------------
  check(run_cli("verify --suite prop3").exit_code == 0, "prop3 suite passes");
  check(run_cli("verify --suite prop2 --budget 60000 --seed 1").exit_code == 0,
        "prop2 suite passes");
  check(run_cli("verify --suite prop5 --budget 60000 --seed 1").exit_code == 0,
        "prop5 suite passes");
  check(run_cli("verify --suite nosuch").exit_code == 2, "unknown suite exits 2");

  // Continuous-score control holds; the piecewise-constant tree loses it.
  check(run_cli("verify --suite control --estimator logistic --reps 30 --seed 5")
                .exit_code == 0,
        "control suite passes for logistic scores");
  {
    const RunResult r = run_cli("verify --suite control --estimator cart --reps 30 --seed 5");
    check(r.exit_code == 1, "control suite fails for tree scores");
    check(r.output.find("VIOLATED") != std::string::npos,
          "control failure reports the violation");
  }

  if (failures == 0) {
    std::cout << "cli integration: all checks passed\n";
    return 0;
  }
  std::cerr << "cli integration: " << failures << " checks failed\n";
  return 1;
}
