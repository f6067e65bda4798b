#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freqneuro/genome_io.hpp"
#include "freqneuro/harness.hpp"
#include "freqneuro/ordering.hpp"
#include "freqneuro/records.hpp"
#include "selftest.hpp"

namespace fs = std::filesystem;
using namespace freqneuro;

namespace {

// Flags shared by evolve and incremental. Only flags given on the command
// line touch the config; a config file then overrides them, and
// FREQNEURO_SEED overrides the seed from either.
struct ExperimentFlags {
  std::optional<std::string> arch;
  std::optional<std::string> scheme;
  std::optional<std::size_t> coeffs;
  std::optional<std::size_t> compartments;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string config_file;
  std::string out = "results";
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--arch", f.arch, "theta1 or theta2");
  cmd->add_option("--scheme", f.scheme, "psi1, psi2, psi3 or direct");
  cmd->add_option("--coeffs", f.coeffs, "coefficient count C");
  cmd->add_option("--p", f.compartments, "arm compartments");
  cmd->add_option("--budget", f.budget, "fitness evaluations per run");
  cmd->add_option("--runs", f.runs, "independent runs");
  cmd->add_option("--seed", f.seed, "base seed; run k uses seed + k");
  cmd->add_option("--workers", f.workers, "evaluation threads");
  cmd->add_option("--config", f.config_file, "JSON config file (overrides flags)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory");
}

ExperimentConfig resolve(const ExperimentFlags& f) {
  ExperimentConfig c;
  if (f.arch) c.arch = parse_architecture(*f.arch);
  if (f.scheme) c.encoding = parse_encoding(*f.scheme);
  if (f.coeffs) c.coefficients = *f.coeffs;
  if (f.compartments) c.compartments = *f.compartments;
  if (f.budget) c.eval_budget = *f.budget;
  if (f.runs) c.runs = *f.runs;
  if (f.seed) c.base_seed = *f.seed;
  if (f.workers) c.workers = *f.workers;
  if (!f.config_file.empty()) c = load_config(f.config_file, c);
  if (const char* env = std::getenv("FREQNEURO_SEED")) {
    try {
      c.base_seed = std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("FREQNEURO_SEED is not an integer: ") + env);
    }
  }
  validate_config(c);
  return c;
}

void write_config(const fs::path& dir, const ExperimentConfig& c) {
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << to_json(c).dump(2) << '\n';
}

int run_experiment(const ExperimentFlags& flags, bool incremental) {
  const auto config = resolve(flags);
  const fs::path dir = flags.out;
  write_config(dir, config);
  std::vector<RunRecord> records;
  std::vector<double> best;
  for (std::size_t k = 0; k < config.runs; ++k) {
    RunRecord record;
    try {
      record = incremental ? run_incremental(config, k) : run_evolution(config, k);
    } catch (const RunError& e) {
      save_run(dir, e.partial());
      std::cerr << "run " << k << " failed: " << e.what() << " (partial record saved)\n";
      return 1;
    }
    save_run(dir, record);
    std::cout << "run " << k << " seed " << record.seed << " best " << record.best_fitness
              << " evaluations " << record.evaluations << " coefficients "
              << record.best_coefficients << '\n';
    best.push_back(record.best_fitness);
    records.push_back(std::move(record));
  }
  std::ofstream summary(dir / "summary.tsv");
  write_summary(summary, records);
  const auto s = summarize(best);
  std::cout << "median " << s.median << " quartiles " << s.lower_quartile << ' '
            << s.upper_quartile << " min " << s.min << " max " << s.max << '\n';
  return 0;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const auto value = std::stoull(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad extent '" + item + "'");
    dims.push_back(value);
  }
  return dims;
}

ExperimentConfig config_of_runs(const std::vector<StoredRun>& runs, const fs::path& dir) {
  if (runs.empty()) throw std::runtime_error("no runs found in " + dir.string());
  return runs.front().config;
}

std::vector<Genome> genomes_of(const std::vector<StoredRun>& runs) {
  std::vector<Genome> out;
  for (const auto& r : runs) out.push_back(r.best_genome);
  return out;
}

// The experiment config of a genome file, enough to rebuild its network.
ExperimentConfig config_of_header(const GenomeHeader& h, std::size_t coefficients) {
  ExperimentConfig c;
  c.arch = h.arch;
  c.encoding = parse_encoding(h.scheme);
  c.compartments = h.compartments;
  c.coefficients = coefficients;
  return c;
}

void dump_trajectory(const fs::path& file, const NetworkWeights& w, const ExperimentConfig& c,
                     const TrialSpec& trial) {
  std::vector<TrajectoryPoint> path;
  run_trial(w, make_architecture(c.arch, c.compartments).mode, c.compartments, trial, c.physics,
            DistanceMode::kFinal, &path);
  std::ofstream out(file);
  out << "# step tip_x tip_y t d\n" << std::setprecision(10);
  for (const auto& p : path) out << p.step << ' ' << p.tip.x << ' ' << p.tip.y << ' ' << p.t << ' ' << p.d << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-domain neuroevolution of recurrent arm controllers"};
  app.require_subcommand(1);

  ExperimentFlags evolve_flags;
  auto* evolve = app.add_subcommand("evolve", "fixed-size SNES runs");
  add_experiment_flags(evolve, evolve_flags);

  ExperimentFlags inc_flags;
  auto* incremental = app.add_subcommand("incremental", "runs that grow the coefficient count");
  add_experiment_flags(incremental, inc_flags);

  std::string genome_path;
  std::size_t target_p = 0;
  std::string resize_out;
  bool as_genome = false;
  auto* resize_cmd = app.add_subcommand("resize", "rebuild a genome's network for another arm length");
  resize_cmd->add_option("genome", genome_path, "genome file")->required()->check(CLI::ExistingFile);
  resize_cmd->add_option("--p", target_p, "target compartment count")->required();
  resize_cmd->add_option("--out", resize_out, "output file (default: stdout)");
  resize_cmd->add_flag("--genome-out", as_genome,
                       "write a full-rank genome of the resized network instead of weights");

  std::string runs_dir;
  std::string trajectory_dir;
  auto* gen_pos = app.add_subcommand("gen-pos", "score trained runs from held-out starting angles");
  gen_pos->add_option("runs", runs_dir, "directory written by evolve")->required()->check(CLI::ExistingDirectory);
  gen_pos->add_option("--trajectory", trajectory_dir, "write per-trial tip trajectories here");

  std::string indirect_dir;
  std::string direct_dir;
  std::size_t p_min = 3;
  std::size_t p_max = 20;
  auto* gen_len = app.add_subcommand("gen-len", "score trained runs on shorter and longer arms");
  gen_len->add_option("indirect", indirect_dir, "runs of an indirect encoding")->required()->check(CLI::ExistingDirectory);
  gen_len->add_option("direct", direct_dir, "runs of the direct encoding")->required()->check(CLI::ExistingDirectory);
  gen_len->add_option("--pmin", p_min, "smallest arm");
  gen_len->add_option("--pmax", p_max, "largest arm");

  std::string dims_text;
  auto* order = app.add_subcommand("order", "print the coefficient order of an array");
  order->add_option("dims", dims_text, "extents, e.g. 3,3")->required();

  std::uint64_t selftest_seed = 1;
  int selftest_trials = 200;
  auto* selftest = app.add_subcommand("selftest", "check the codec against brute-force oracles");
  selftest->add_option("--seed", selftest_seed, "random seed");
  selftest->add_option("--trials", selftest_trials, "random cases per check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evolve) return run_experiment(evolve_flags, false);
    if (*incremental) return run_experiment(inc_flags, true);

    if (*resize_cmd) {
      const auto file = load_genome(genome_path);
      const auto config = config_of_header(file.header, file.genome.size());
      const auto weights = network_of(config, file.genome, target_p);
      std::ofstream file_out;
      if (!resize_out.empty()) file_out.open(resize_out);
      std::ostream& out = resize_out.empty() ? std::cout : file_out;
      if (as_genome) {
        auto target = config;
        target.compartments = target_p;
        const auto scheme = scheme_for(target, target_p);
        GenomeFile g{{std::string(to_string(scheme.name)), target_p, config.arch},
                     encode(weights, scheme)};
        write_genome(out, g);
      } else {
        write_weights(out, weights, config.arch, target_p);
      }
      return 0;
    }

    if (*gen_pos) {
      const auto runs = load_runs(runs_dir);
      const auto config = config_of_runs(runs, runs_dir);
      const auto genomes = genomes_of(runs);
      const auto scores = test_generalization_positions(genomes, config);
      std::cout << "run\tminus_pi_4\tplus_pi_4\tmean\n";
      for (std::size_t k = 0; k < runs.size(); ++k) {
        std::cout << runs[k].run_index << '\t' << scores.per_angle[k][0] << '\t'
                  << scores.per_angle[k][1] << '\t' << scores.scores[k] << '\n';
      }
      const auto& s = scores.summary;
      std::cout << "median " << s.median << " quartiles " << s.lower_quartile << ' '
                << s.upper_quartile << " min " << s.min << " max " << s.max << '\n';
      if (!trajectory_dir.empty()) {
        fs::create_directories(trajectory_dir);
        const auto trials = generalization_trials(config.compartments, config.physics);
        for (std::size_t k = 0; k < runs.size(); ++k) {
          const auto w = network_of(config, genomes[k], config.compartments);
          for (std::size_t a = 0; a < trials.size(); ++a) {
            dump_trajectory(fs::path(trajectory_dir) /
                                ("run_" + std::to_string(runs[k].run_index) + "_angle_" +
                                 std::to_string(a) + ".txt"),
                            w, config, trials[a]);
          }
        }
      }
      return 0;
    }

    if (*gen_len) {
      if (p_min < 1 || p_min > p_max) throw std::invalid_argument("need 1 <= pmin <= pmax");
      const auto indirect = load_runs(indirect_dir);
      const auto direct = load_runs(direct_dir);
      std::vector<std::size_t> range;
      for (std::size_t p = p_min; p <= p_max; ++p) range.push_back(p);
      const auto surface = test_generalization_lengths(
          genomes_of(indirect), config_of_runs(indirect, indirect_dir), genomes_of(direct),
          config_of_runs(direct, direct_dir), range);
      std::cout << "coeffs\tp\tindirect_median\tdirect_median\tdifference\n";
      for (const auto& cell : surface) {
        std::cout << cell.coefficients << '\t' << cell.compartments << '\t' << cell.indirect_median
                  << '\t' << cell.direct_median << '\t' << cell.difference << '\n';
      }
      return 0;
    }

    if (*order) {
      const auto dims = parse_dims(dims_text);
      for (const auto& cell : simplex_order(dims).cells) {
        std::cout << '(';
        for (std::size_t j = 0; j < cell.size(); ++j) std::cout << (j ? ", " : "") << cell[j];
        std::cout << ")\n";
      }
      return 0;
    }

    if (*selftest) return cli::run_selftest(std::cout, selftest_seed, selftest_trials) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
