#include "freqneuro/records.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <regex>
#include <stdexcept>

#include "freqneuro/genome_io.hpp"

namespace freqneuro {

using nlohmann::json;

namespace {

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

json to_json(const PhysicsConfig& p) {
  return {
      {"segment_length", p.segment_length},
      {"arm_width", p.arm_width},
      {"node_mass", p.node_mass},
      {"longitudinal_stiffness", p.longitudinal_stiffness},
      {"transverse_stiffness", p.transverse_stiffness},
      {"diagonal_stiffness", p.diagonal_stiffness},
      {"active_stiffness", p.active_stiffness},
      {"max_contraction", p.max_contraction},
      {"spring_damping", p.spring_damping},
      {"area_stiffness", p.area_stiffness},
      {"drag", p.drag},
      {"gravity", p.gravity},
      {"base_torque", p.base_torque},
      {"base_damping", p.base_damping},
      {"control_dt", p.control_dt},
      {"substeps", p.substeps},
      {"goal_x", p.goal_x},
      {"goal_y", p.goal_y},
      {"touch_radius", p.touch_radius},
      {"steps_per_compartment", p.steps_per_compartment},
  };
}

void apply_json(const json& j, PhysicsConfig& p) {
  take(j, "segment_length", p.segment_length);
  take(j, "arm_width", p.arm_width);
  take(j, "node_mass", p.node_mass);
  take(j, "longitudinal_stiffness", p.longitudinal_stiffness);
  take(j, "transverse_stiffness", p.transverse_stiffness);
  take(j, "diagonal_stiffness", p.diagonal_stiffness);
  take(j, "active_stiffness", p.active_stiffness);
  take(j, "max_contraction", p.max_contraction);
  take(j, "spring_damping", p.spring_damping);
  take(j, "area_stiffness", p.area_stiffness);
  take(j, "drag", p.drag);
  take(j, "gravity", p.gravity);
  take(j, "base_torque", p.base_torque);
  take(j, "base_damping", p.base_damping);
  take(j, "control_dt", p.control_dt);
  take(j, "substeps", p.substeps);
  take(j, "goal_x", p.goal_x);
  take(j, "goal_y", p.goal_y);
  take(j, "touch_radius", p.touch_radius);
  take(j, "steps_per_compartment", p.steps_per_compartment);
  if (p.substeps < 1) throw std::invalid_argument("physics.substeps must be >= 1");
}

json to_json(const ExperimentConfig& c) {
  return {
      {"arch", std::string(to_string(c.arch))},
      {"scheme", std::string(to_string(c.encoding))},
      {"coeffs", c.coefficients},
      {"p", c.compartments},
      {"budget", c.eval_budget},
      {"runs", c.runs},
      {"seed", c.base_seed},
      {"workers", c.workers},
      {"initial_sigma", c.snes.initial_sigma},
      {"log_base", c.snes.log_base == LogBase::kNatural ? "e" : "10"},
      {"physics", to_json(c.physics)},
      {"incremental",
       {{"start", c.incremental.start_coefficients},
        {"step", c.incremental.step},
        {"stage_evaluations", c.incremental.stage_evaluations},
        {"stagnation_stages", c.incremental.stagnation_stages},
        {"epsilon", c.incremental.improvement_epsilon}}},
  };
}

void apply_json(const json& j, ExperimentConfig& c) {
  if (j.contains("arch")) c.arch = parse_architecture(j.at("arch").get<std::string>());
  if (j.contains("scheme")) c.encoding = parse_encoding(j.at("scheme").get<std::string>());
  take(j, "coeffs", c.coefficients);
  take(j, "p", c.compartments);
  take(j, "budget", c.eval_budget);
  take(j, "runs", c.runs);
  take(j, "seed", c.base_seed);
  take(j, "workers", c.workers);
  take(j, "initial_sigma", c.snes.initial_sigma);
  if (j.contains("log_base")) {
    const auto base = j.at("log_base").get<std::string>();
    if (base != "e" && base != "10") throw std::invalid_argument("log_base must be \"e\" or \"10\"");
    c.snes.log_base = base == "e" ? LogBase::kNatural : LogBase::kTen;
  }
  if (j.contains("physics")) apply_json(j.at("physics"), c.physics);
  if (j.contains("incremental")) {
    const auto& inc = j.at("incremental");
    take(inc, "start", c.incremental.start_coefficients);
    take(inc, "step", c.incremental.step);
    take(inc, "stage_evaluations", c.incremental.stage_evaluations);
    take(inc, "stagnation_stages", c.incremental.stagnation_stages);
    take(inc, "epsilon", c.incremental.improvement_epsilon);
  }
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  apply_json(json::parse(in), base);
  return base;
}

void write_run_record(std::ostream& out, const RunRecord& record, bool include_timing) {
  json header = {
      {"type", "run"},
      {"run", record.run_index},
      {"seed", record.seed},
      {"config", to_json(record.config)},
      {"evaluations", record.evaluations},
      {"best_fitness", record.best_fitness},
      {"best_coefficients", record.best_coefficients},
      {"weights_checksum", record.weights_checksum},
      {"best_genome", record.best_genome.coefficients},
      {"best_lengths", record.best_genome.chromosome_lengths},
  };
  if (include_timing) header["wall_seconds"] = record.wall_seconds;
  out << header.dump() << '\n';
  for (const auto& g : record.generations) {
    out << json{{"type", "generation"},
                {"generation", g.generation},
                {"evaluations", g.evaluations},
                {"coefficients", g.coefficients},
                {"generation_best", g.generation_best},
                {"best_so_far", g.best_so_far}}
               .dump()
        << '\n';
  }
}

void save_run(const std::filesystem::path& dir, const RunRecord& record) {
  std::filesystem::create_directories(dir);
  const std::string stem = "run_" + std::to_string(record.run_index);
  {
    std::ofstream out(dir / (stem + ".jsonl"));
    if (!out) throw std::runtime_error("cannot write run record in " + dir.string());
    write_run_record(out, record);
  }
  GenomeFile file;
  file.header.scheme = std::string(to_string(record.config.encoding));
  file.header.compartments = record.config.compartments;
  file.header.arch = record.config.arch;
  file.genome = record.best_genome;
  save_genome((dir / (stem + ".genome")).string(), file);
}

std::vector<StoredRun> load_runs(const std::filesystem::path& dir) {
  static const std::regex pattern(R"(run_(\d+)\.jsonl)");
  std::vector<StoredRun> runs;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch match;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, match, pattern)) continue;
    std::ifstream in(entry.path());
    std::string line;
    if (!std::getline(in, line)) continue;
    const json header = json::parse(line);
    StoredRun run;
    apply_json(header.at("config"), run.config);
    run.run_index = header.at("run").get<std::size_t>();
    run.best_fitness = header.at("best_fitness").get<double>();
    run.best_genome = load_genome((dir / ("run_" + match[1].str() + ".genome")).string()).genome;
    runs.push_back(std::move(run));
  }
  std::sort(runs.begin(), runs.end(),
            [](const StoredRun& a, const StoredRun& b) { return a.run_index < b.run_index; });
  return runs;
}

void write_summary(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "run\tseed\tarch\tscheme\tcoeffs\tevaluations\tbest_fitness\tbest_coefficients\twall_s\n";
  for (const auto& r : records) {
    out << r.run_index << '\t' << r.seed << '\t' << to_string(r.config.arch) << '\t'
        << to_string(r.config.encoding) << '\t' << r.config.coefficients << '\t' << r.evaluations
        << '\t' << r.best_fitness << '\t' << r.best_coefficients << '\t' << r.wall_seconds << '\n';
  }
}

}  // namespace freqneuro
