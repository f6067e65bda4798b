#ifndef FREQNEURO_RECORDS_HPP_
#define FREQNEURO_RECORDS_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "freqneuro/harness.hpp"
#include "json.hpp"

namespace freqneuro {

nlohmann::json to_json(const PhysicsConfig& physics);
nlohmann::json to_json(const ExperimentConfig& config);

// Overwrites the fields present in `j`; absent fields keep their values.
void apply_json(const nlohmann::json& j, PhysicsConfig& physics);
void apply_json(const nlohmann::json& j, ExperimentConfig& config);

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

// One JSON object per line: a "run" header line echoing the config, seed
// and results, then one line per generation. Wall time is the only field
// that differs between reruns of the same config and seed.
void write_run_record(std::ostream& out, const RunRecord& record, bool include_timing = true);

// Writes run_<k>.jsonl and run_<k>.genome into `dir`.
void save_run(const std::filesystem::path& dir, const RunRecord& record);

struct StoredRun {
  ExperimentConfig config;
  std::size_t run_index = 0;
  double best_fitness = 0.0;
  Genome best_genome;
};

// Reads every run_<k>.jsonl / run_<k>.genome pair in `dir`, by run index.
std::vector<StoredRun> load_runs(const std::filesystem::path& dir);

// Tab-separated summary, one row per run.
void write_summary(std::ostream& out, const std::vector<RunRecord>& records);

}  // namespace freqneuro

#endif  // FREQNEURO_RECORDS_HPP_
