/*
 * Copyright 2026 The fuseval authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// End-to-end checks of the fuseval command line binary. Run as:
//   cli_tests <path-to-fuseval>
// Each check prints one line; the exit code is nonzero if anything failed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_dir;
int g_passed = 0;
int g_failed = 0;

void expect(bool ok, const std::string& what) {
  if (ok) {
    ++g_passed;
  } else {
    ++g_failed;
    std::cout << "FAIL: " << what << '\n';
  }
}

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
  RunResult result;
  std::string cmd = g_cli + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    std::cout << "FAIL: cannot launch: " << cmd << '\n';
    ++g_failed;
    return result;
  }
  char buffer[4096];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) {
    result.output.append(buffer, n);
  }
  int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

void expect_exit(const RunResult& result, int code, const std::string& what) {
  if (result.exit_code != code) {
    ++g_failed;
    std::cout << "FAIL: " << what << ": expected exit " << code << ", got "
              << result.exit_code << "\n--- output ---\n"
              << result.output << "--------------\n";
  } else {
    ++g_passed;
  }
}

void expect_contains(const RunResult& result, const std::string& needle,
                     const std::string& what) {
  if (result.output.find(needle) == std::string::npos) {
    ++g_failed;
    std::cout << "FAIL: " << what << ": output lacks '" << needle
              << "'\n--- output ---\n"
              << result.output << "--------------\n";
  } else {
    ++g_passed;
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// An 8-patient two-modality dataset with both classes in both splits.
void write_good_dataset(const fs::path& dir) {
  std::ostringstream scores;
  scores << "patient_id,modality,chunk_index,score\n";
  const char* ids[] = {"p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8"};
  const double base[] = {0.8, 0.2, 0.75, 0.3, 0.7, 0.25, 0.85, 0.35};
  for (int i = 0; i < 8; ++i) {
    for (const char* modality : {"audio", "text"}) {
      for (int c = 0; c < 2; ++c) {
        double jitter = 0.02 * c + (modality[0] == 't' ? 0.05 : 0.0);
        scores << ids[i] << ',' << modality << ',' << c << ','
               << base[i] + jitter << '\n';
      }
    }
  }
  write_file(dir / "scores.csv", scores.str());
  write_file(dir / "labels.csv",
             "patient_id,phq8\n"
             "p1,15\np2,3\np3,20\np4,5\np5,18\np6,2\np7,12\np8,9\n");
  write_file(dir / "splits.csv",
             "patient_id,split\n"
             "p1,fit\np2,fit\np3,test\np4,test\n"
             "p5,fit\np6,fit\np7,test\np8,test\n");
}

std::string dataset_flags(const fs::path& dir) {
  return "--scores " + (dir / "scores.csv").string() + " --labels " +
         (dir / "labels.csv").string() + " --splits " +
         (dir / "splits.csv").string();
}

void test_help_and_version() {
  RunResult help = run_cli("--help");
  expect_exit(help, 0, "--help exits 0");
  expect_contains(help, "validate", "--help lists validate");
  expect_contains(help, "evaluate", "--help lists evaluate");
  expect_contains(help, "synth", "--help lists synth");

  RunResult version = run_cli("--version");
  expect_exit(version, 0, "--version exits 0");
  expect_contains(version, "0.1.0", "--version prints the artifact version");

  RunResult bare = run_cli("");
  expect_exit(bare, 2, "missing subcommand is a usage error");

  RunResult unknown = run_cli("frobnicate");
  expect_exit(unknown, 2, "unknown subcommand is a usage error");
}

void test_validate_happy() {
  fs::path dir = g_dir / "good";
  fs::create_directories(dir);
  write_good_dataset(dir);
  RunResult result = run_cli("validate " + dataset_flags(dir));
  expect_exit(result, 0, "validate on a clean dataset");
  expect_contains(result, "patients: 8 (4 depressed, 4 control)",
                  "validate prints the patient tally");
  expect_contains(result, "prevalence: 0.50", "validate prints prevalence");
  expect_contains(result, "splits: fit 4, test 4", "validate prints splits");
  expect_contains(result, "chunks[audio]: 16", "validate prints chunk counts");
  expect_contains(result, "ok", "validate prints ok");
}

void test_validate_failures() {
  fs::path dir = g_dir / "good";

  RunResult missing = run_cli("validate --scores " +
                              (dir / "scores.csv").string() + " --labels " +
                              (dir / "nope.csv").string() + " --splits " +
                              (dir / "splits.csv").string());
  expect_exit(missing, 2, "missing labels file");
  expect_contains(missing, "labels: file not found", "missing file is named");

  // A score of 1.3 sits on physical line 7 of this file (header is line 1).
  fs::path bad = g_dir / "bad_score";
  fs::create_directories(bad);
  write_file(bad / "scores.csv",
             "patient_id,modality,chunk_index,score\n"
             "p1,audio,0,0.5\n"
             "p1,audio,1,0.4\n"
             "p2,audio,0,0.3\n"
             "p2,audio,1,0.2\n"
             "p3,audio,0,0.6\n"
             "p3,audio,1,1.3\n"
             "p4,audio,0,0.5\n");
  write_file(bad / "labels.csv", "patient_id,phq8\np1,15\np2,3\np3,20\np4,5\n");
  write_file(bad / "splits.csv",
             "patient_id,split\np1,fit\np2,fit\np3,test\np4,test\n");
  RunResult out_of_range = run_cli("validate " + dataset_flags(bad));
  expect_exit(out_of_range, 2, "score outside [0,1]");
  expect_contains(out_of_range, "line 7", "bad score cites its line");
  expect_contains(out_of_range, "1.3", "bad score cites the value");
  expect_contains(out_of_range, "out_of_range", "bad score names kind");

  // Fit split with a single class fails cross-validation, not fitting.
  fs::path lopsided = g_dir / "lopsided";
  fs::create_directories(lopsided);
  write_good_dataset(lopsided);
  write_file(lopsided / "splits.csv",
             "patient_id,split\n"
             "p1,test\np2,fit\np3,test\np4,fit\n"
             "p5,test\np6,fit\np7,test\np8,fit\n");
  RunResult degenerate = run_cli("validate " + dataset_flags(lopsided));
  expect_exit(degenerate, 2, "single-class fit split");
  expect_contains(degenerate, "fit split", "single-class fit split is named");

  RunResult bad_flag = run_cli("validate " + dataset_flags(dir) + " --bogus");
  expect_exit(bad_flag, 2, "unknown flag is a usage error");
}

void test_synth() {
  fs::path out1 = g_dir / "synth1";
  fs::path out2 = g_dir / "synth2";
  std::string flags = "synth --n 60 --seed 5 --out ";
  RunResult first = run_cli(flags + out1.string());
  expect_exit(first, 0, "synth runs");
  expect_contains(first, "patients: 60 (18 depressed)",
                  "synth reports the class split");
  expect_contains(first, "seed: 5", "synth reports the seed");

  RunResult second = run_cli(flags + out2.string());
  expect_exit(second, 0, "synth rerun");
  for (const char* name : {"scores.csv", "labels.csv", "splits.csv"}) {
    expect(fs::exists(out1 / name), std::string("synth wrote ") + name);
    expect(slurp(out1 / name) == slurp(out2 / name),
           std::string("synth rerun is byte-identical: ") + name);
  }

  RunResult shifted = run_cli("synth --n 60 --seed 6 --out " +
                              (g_dir / "synth3").string());
  expect_exit(shifted, 0, "synth with another seed");
  expect(slurp(out1 / "scores.csv") != slurp(g_dir / "synth3" / "scores.csv"),
         "different seeds give different cohorts");

  RunResult degenerate = run_cli("synth --n 60 --prevalence 0.001 --out " +
                                 (g_dir / "synth_bad").string());
  expect_exit(degenerate, 2, "prevalence rounding to an empty class");
  expect_contains(degenerate, "bad_synth_config", "synth error names kind");

  RunResult zero = run_cli("synth --n 60 --prevalence 0 --out " +
                           (g_dir / "synth_bad").string());
  expect_exit(zero, 2, "zero prevalence");
}

void test_evaluate() {
  fs::path data = g_dir / "synth1";  // written by test_synth
  fs::path out1 = g_dir / "eval1";
  fs::path out2 = g_dir / "eval2";
  std::string flags = dataset_flags(data) + " --n-resamples 200 --seed 9";

  RunResult first = run_cli("evaluate " + flags + " --out " + out1.string());
  expect_exit(first, 0, "evaluate runs");
  expect_contains(first, "configurations: 7", "evaluate covers all subsets");
  expect_contains(first, "audio+text+tabular: AUROC",
                  "evaluate prints the full configuration");
  for (const char* name :
       {"metrics.csv", "metrics.json", "aggregated_scores.csv",
        "effective_config.json", "audio/fusion_spec.json", "audio/roc.svg",
        "audio+text+tabular/dca.csv"}) {
    expect(fs::exists(out1 / name), std::string("evaluate wrote ") + name);
  }

  RunResult second =
      run_cli("evaluate " + flags + " --threads 3 --out " + out2.string());
  expect_exit(second, 0, "evaluate rerun with threads");
  expect(slurp(out1 / "metrics.json") == slurp(out2 / "metrics.json"),
         "metrics.json is byte-identical across reruns and thread counts");
  expect(slurp(out1 / "metrics.csv") == slurp(out2 / "metrics.csv"),
         "metrics.csv is byte-identical across reruns and thread counts");

  RunResult subset = run_cli("evaluate " + flags +
                             " --configurations audio+text --out " +
                             (g_dir / "eval_subset").string());
  expect_exit(subset, 0, "evaluate with an explicit configuration");
  expect_contains(subset, "configurations: 1", "subset runs one configuration");

  RunResult conflicting = run_cli("evaluate " + flags +
                                  " --configurations all,audio --out " +
                                  (g_dir / "eval_bad").string());
  expect_exit(conflicting, 2, "'all' cannot be combined with subsets");

  RunResult unknown = run_cli("evaluate " + flags +
                              " --configurations video --out " +
                              (g_dir / "eval_bad").string());
  expect_exit(unknown, 2, "unknown modality in --configurations");
}

void test_config_file() {
  fs::path data = g_dir / "synth1";
  fs::path cfg = g_dir / "run.toml";
  write_file(cfg, "evaluate.seed=123\nevaluate.n-resamples=50\n");
  RunResult result = run_cli("--config " + cfg.string() + " evaluate " +
                             dataset_flags(data) + " --out " +
                             (g_dir / "eval_cfg").string());
  expect_exit(result, 0, "evaluate with a config file");
  std::string effective = slurp(g_dir / "eval_cfg" / "effective_config.json");
  expect(effective.find("\"seed\": 123") != std::string::npos,
         "config file sets the seed");
  expect(effective.find("\"n_resamples\": 50") != std::string::npos,
         "config file sets the resample count");
}

void test_dca_command() {
  fs::path preds = g_dir / "preds.csv";
  write_file(preds,
             "patient_id,score,label\n"
             "p1,0.9,1\np2,0.8,1\np3,0.3,1\np4,0.25,0\np5,0.21,0\n"
             "p6,0.1,0\np7,0.05,0\np8,0.15,0\np9,0.19,0\np10,0.12,0\n");
  RunResult result = run_cli("dca --predictions " + preds.string() + " --out " +
                             (g_dir / "dca_out").string());
  expect_exit(result, 0, "dca runs");
  expect_contains(result, "prevalence: 0.3", "dca prints prevalence");
  expect_contains(result, "NB = TP/N", "dca prints the formula");
  expect(fs::exists(g_dir / "dca_out" / "dca.csv"), "dca wrote dca.csv");
  expect(fs::exists(g_dir / "dca_out" / "dca.svg"), "dca wrote dca.svg");

  RunResult bad_grid = run_cli("dca --predictions " + preds.string() +
                               " --t-min 0.5 --t-max 0.2");
  expect_exit(bad_grid, 2, "inverted dca grid");

  RunResult missing = run_cli("dca --predictions " +
                              (g_dir / "nope.csv").string());
  expect_exit(missing, 2, "missing predictions file");
  expect_contains(missing, "file not found", "missing predictions is named");
}

void test_calibration_command() {
  fs::path preds = g_dir / "preds.csv";  // written by test_dca_command
  RunResult result = run_cli("calibration --predictions " + preds.string() +
                             " --bins 5 --fit --out " +
                             (g_dir / "cal_out").string());
  expect_exit(result, 0, "calibration runs");
  expect_contains(result, "ece:", "calibration prints the ece");
  expect_contains(result, "calibrator: a =", "calibration prints the fit");
  expect(fs::exists(g_dir / "cal_out" / "reliability.csv"),
         "calibration wrote reliability.csv");
  expect(fs::exists(g_dir / "cal_out" / "reliability.svg"),
         "calibration wrote reliability.svg");
  expect(fs::exists(g_dir / "cal_out" / "calibrator.json"),
         "calibration wrote calibrator.json");

  // Single-class labels survive parsing but the calibrator cannot fit them;
  // this is the fit error path, distinct from validation failures.
  fs::path ones = g_dir / "all_ones.csv";
  write_file(ones, "patient_id,score,label\np1,0.9,1\np2,0.8,1\np3,0.7,1\n");
  RunResult degenerate =
      run_cli("calibration --predictions " + ones.string() + " --fit");
  expect_exit(degenerate, 3, "single-class calibrator fit");
  expect_contains(degenerate, "degenerate_labels", "fit error names kind");

  RunResult bad_bins = run_cli("calibration --predictions " + preds.string() +
                               " --bins 1");
  expect_exit(bad_bins, 2, "n_bins below 2");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_tests <path-to-fuseval>\n";
    return 2;
  }
  g_cli = argv[1];
  g_dir = fs::temp_directory_path() /
          ("fuseval_cli_tests_" + std::to_string(::getpid()));
  fs::remove_all(g_dir);
  fs::create_directories(g_dir);

  test_help_and_version();
  test_validate_happy();
  test_validate_failures();
  test_synth();
  test_evaluate();
  test_config_file();
  test_dca_command();
  test_calibration_command();

  fs::remove_all(g_dir);
  std::cout << "cli_tests: " << g_passed << " passed, " << g_failed
            << " failed\n";
  return g_failed == 0 ? 0 : 1;
}
