#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cfit/bench.hpp"
#include "cfit/corpus.hpp"
#include "cfit/detect.hpp"

namespace cfit {

struct RunConfig {
  std::vector<MethodId> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<double> alphas = default_alpha_grid();
  int replicates = 1;
  std::size_t mc_samples = 10'000;
  ScoreMode mode = ScoreMode::MODEL_SPECIFIC;
  std::uint64_t seed = 1;
  std::string cache_dir;  // empty: no cache
  std::string out_dir;
  unsigned threads = 0;   // 0: hardware concurrency
  bool exact_auc = false;

  // Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct NetworkRecord {
  std::string name;
  std::string domain;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::string hash;  // SHA-256 of the canonical serialization
};

struct DetectRecord {
  std::string network;
  MethodId method = MethodId::Q_LOUVAIN;
  std::size_t k = 0;
  double objective = 0.0;
  std::uint64_t seed = 0;
  double ms = 0.0;
  std::string labels_path;  // relative to the output directory
  std::optional<std::string> error;
  Partition partition;      // not serialized in the record itself
};

struct ResultStore {
  std::vector<NetworkRecord> networks;
  std::vector<DetectRecord> detections;
  std::vector<TaskResult> tasks;

  // Sorts every record list into its canonical order.
  void sort();
  // Adds records whose identity is not present yet.
  void merge(const ResultStore& other);
};

struct RunStats {
  std::size_t jobs = 0;
  std::size_t cache_hits = 0;
  std::size_t failures = 0;
  std::vector<std::string> warnings;
};

// Loads every network (simplified, largest component), runs full-graph
// detection for each method and, when `with_tasks`, every benchmark task.
// Records are merged into the store under config.out_dir and written back.
ResultStore run_pipeline(const CorpusManifest& manifest, const RunConfig& config, bool with_tasks,
                         RunStats* stats = nullptr);

// Store files inside an output directory.
ResultStore read_store(const std::string& out_dir);
void write_store(const ResultStore& store, const std::string& out_dir);

// One NDJSON line per record.
std::string task_record_json(const TaskResult& r);
TaskResult parse_task_record(const std::string& line);
std::string detect_record_json(const DetectRecord& r);
DetectRecord parse_detect_record(const std::string& line);

enum class ReportKind { CURVES, SIMILARITY, KTREND, BESTFRAC, DIAGNOSIS, DOMAINS };

std::string_view report_kind_name(ReportKind k);
ReportKind parse_report_kind(std::string_view name);

struct ReportOptions {
  double tol = kDefaultBestTolerance;
  double sigma2 = 0.3;
};

// Writes the report files for `kinds` into out_dir and refreshes
// outputs.json, which indexes every report file present. Returns the paths
// written. Throws InvalidArgument naming the prerequisite subcommand when the
// store lacks the needed records.
std::vector<std::string> emit_report(const ResultStore& store, const std::vector<ReportKind>& kinds,
                                     const std::string& out_dir, const ReportOptions& opts = {});

}  // namespace cfit
