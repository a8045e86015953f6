// scsr1: generate and solve L-SR1 trust-region subproblems with
// shape-changing norms, or re-check a saved problem.
//
//   scsr1 run --experiment e1 --n 1000,10000 --seed 7 --trials 3 --format csv
//   scsr1 run --experiment e6 --n 1000 --snapshot-dir out/
//   scsr1 verify --input out/e6_n1000_s1_t0
//
// Exit status is 0 iff every row passes its checks.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "scsr1/harness.hpp"
#include "scsr1/snapshot.hpp"

namespace {

bool all_pass(const std::vector<scsr1::TableRow>& rows) {
  for (const auto& r : rows) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-region subproblems for limited-memory SR1 matrices"};
  app.require_subcommand(1);

  std::string experiment;
  std::vector<long long> sizes{1000};
  int pairs = 5;
  int r = 2;
  std::uint64_t seed = 1;
  int trials = 1;
  std::string norm = "p2";
  std::string format = "pretty";
  double gscale = 1.0;
  std::vector<double> sweep;
  std::string snapshot_dir;

  CLI::App* run = app.add_subcommand("run", "generate and solve experiment instances");
  run->add_option("--experiment", experiment, "problem class e1..e6")
      ->required()
      ->check(CLI::IsMember({"e1", "e2", "e3", "e4", "e5", "e6", "E1", "E2", "E3",
                             "E4", "E5", "E6"}));
  run->add_option("--n", sizes, "dimension (comma-separated list allowed)")
      ->delimiter(',');
  run->add_option("--pairs", pairs, "number of stored pairs")->capture_default_str();
  run->add_option("--r", r, "multiplicity of the smallest eigenvalue")
      ->capture_default_str();
  run->add_option("--seed", seed, "base seed")->capture_default_str();
  run->add_option("--trials", trials, "trials per dimension")->capture_default_str();
  run->add_option("--norm", norm, "trust-region norm")
      ->check(CLI::IsMember({"p2", "pinf"}))
      ->capture_default_str();
  run->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"pretty", "csv"}))
      ->capture_default_str();
  run->add_option("--gscale", gscale, "gradient scale factor")->capture_default_str();
  run->add_option("--sweep", sweep, "extra gradient scales, run one after another")
      ->delimiter(',');
  run->add_option("--snapshot-dir", snapshot_dir,
                  "write each generated problem below this directory");

  std::string input;
  CLI::App* verify = app.add_subcommand("verify", "re-check a saved problem snapshot");
  verify->add_option("--input", input, "snapshot directory")->required();
  verify->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"pretty", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    const scsr1::Format fmt = scsr1::parse_format(format);
    std::vector<scsr1::TableRow> rows;

    if (run->parsed()) {
      for (long long n : sizes) {
        scsr1::ExperimentSpec spec;
        spec.tag = scsr1::parse_experiment(experiment);
        spec.n = n;
        spec.m = pairs;
        spec.r = r;
        spec.seed = seed;
        spec.trials = trials;
        spec.norm = scsr1::parse_norm(norm);
        spec.gscale = gscale;
        spec.validate();

        auto part = sweep.empty() ? scsr1::run(spec)
                                  : scsr1::scaled_gradient_sweep(spec, sweep);
        rows.insert(rows.end(), part.begin(), part.end());

        if (!snapshot_dir.empty()) {
          for (int t = 0; t < trials; ++t) {
            const scsr1::Problem prob = scsr1::generate(spec, t);
            const std::string name = std::string(scsr1::to_string(spec.tag)) +
                                     "_n" + std::to_string(n) + "_s" +
                                     std::to_string(seed) + "_t" +
                                     std::to_string(t);
            scsr1::save_snapshot(std::filesystem::path(snapshot_dir) / name,
                                 scsr1::make_snapshot(prob, spec));
          }
        }
      }
    } else {
      const scsr1::Snapshot snap = scsr1::load_snapshot(input);
      scsr1::TableRow row;
      try {
        row = scsr1::evaluate(snap.rep(), snap.g, snap.delta, snap.norm);
      } catch (const std::exception& e) {
        row.n = snap.g.size();
        row.norm = std::string(scsr1::to_string(snap.norm));
        row.pass = false;
        row.error = e.what();
      }
      row.experiment = snap.experiment;
      row.seed = snap.seed;
      rows.push_back(std::move(row));
    }

    std::cout << scsr1::emit(rows, fmt);
    return all_pass(rows) ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "scsr1: %s\n", e.what());
    return 2;
  }
}
