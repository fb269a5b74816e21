#include "cfit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "cfit/error.hpp"
#include "cfit/rng.hpp"

namespace cfit {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

void RunConfig::validate() const {
  if (methods.empty()) throw InvalidArgument("no methods configured");
  if (alphas.empty()) throw InvalidArgument("alpha grid is empty");
  for (std::size_t t = 0; t < alphas.size(); ++t) {
    if (!(alphas[t] > 0.0 && alphas[t] < 1.0)) throw InvalidArgument("alpha values must lie in (0, 1)");
    if (t > 0 && !(alphas[t] > alphas[t - 1])) throw InvalidArgument("alpha grid must be increasing");
  }
  if (replicates < 1) throw InvalidArgument("replicates must be at least 1");
  if (mc_samples < 1) throw InvalidArgument("mc-samples must be at least 1");
  if (out_dir.empty()) throw InvalidArgument("an output directory is required");
}

// ---- records -------------------------------------------------------------

namespace {

auto task_key(const TaskResult& r) {
  return std::make_tuple(r.network, method_name(r.method), task_name(r.task), score_mode_name(r.mode),
                         r.alpha, r.replicate, r.seed);
}

auto detect_key(const DetectRecord& r) { return std::make_tuple(r.network, method_name(r.method), r.seed); }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << content;
  }
  fs::rename(tmp, p);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string partition_path(const std::string& network, MethodId m) {
  return "partitions/" + network + "__" + std::string(method_name(m)) + ".txt";
}

}  // namespace

std::string task_record_json(const TaskResult& r) {
  ojson j;
  j["network"] = r.network;
  j["method"] = method_name(r.method);
  j["task"] = task_name(r.task);
  j["mode"] = score_mode_name(r.mode);
  j["alpha"] = r.alpha;
  j["replicate"] = r.replicate;
  if (r.failed()) {
    j["auc"] = nullptr;
  } else {
    j["auc"] = r.auc;
  }
  j["k"] = r.k;
  j["seed"] = r.seed;
  if (r.failed()) j["error"] = *r.error;
  return j.dump();
}

TaskResult parse_task_record(const std::string& line) {
  const auto j = ojson::parse(line);
  TaskResult r;
  r.network = j.at("network").get<std::string>();
  r.method = parse_method(j.at("method").get<std::string>());
  r.task = parse_task(j.at("task").get<std::string>());
  r.mode = parse_score_mode(j.at("mode").get<std::string>());
  r.alpha = j.at("alpha").get<double>();
  r.replicate = j.at("replicate").get<int>();
  if (!j.at("auc").is_null()) r.auc = j.at("auc").get<double>();
  r.k = j.at("k").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
  return r;
}

std::string detect_record_json(const DetectRecord& r) {
  ojson j;
  j["network"] = r.network;
  j["method"] = method_name(r.method);
  j["k"] = r.k;
  j["objective"] = r.objective;
  j["seed"] = r.seed;
  j["ms"] = r.ms;
  j["labels_path"] = r.labels_path;
  if (r.error) j["error"] = *r.error;
  return j.dump();
}

DetectRecord parse_detect_record(const std::string& line) {
  const auto j = ojson::parse(line);
  DetectRecord r;
  r.network = j.at("network").get<std::string>();
  r.method = parse_method(j.at("method").get<std::string>());
  r.k = j.at("k").get<std::size_t>();
  r.objective = j.at("objective").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.ms = j.at("ms").get<double>();
  r.labels_path = j.at("labels_path").get<std::string>();
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
  return r;
}

namespace {

std::string network_json(const NetworkRecord& n) {
  ojson j;
  j["name"] = n.name;
  j["domain"] = n.domain;
  j["nodes"] = n.nodes;
  j["edges"] = n.edges;
  j["hash"] = n.hash;
  return j.dump();
}

NetworkRecord parse_network(const std::string& line) {
  const auto j = ojson::parse(line);
  return {j.at("name").get<std::string>(), j.at("domain").get<std::string>(),
          j.at("nodes").get<std::size_t>(), j.at("edges").get<std::size_t>(),
          j.at("hash").get<std::string>()};
}

Partition parse_partition_file(const fs::path& p) {
  std::vector<std::int64_t> labels;
  for (const auto& line : lines_of(read_file(p))) {
    std::istringstream ss(line);
    std::string name;
    std::int64_t label = 0;
    if (!(ss >> name >> label)) throw Error("malformed partition file '" + p.string() + "'");
    labels.push_back(label);
  }
  return Partition(std::span<const std::int64_t>(labels));
}

}  // namespace

void ResultStore::sort() {
  std::sort(networks.begin(), networks.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  std::sort(detections.begin(), detections.end(),
            [](const auto& a, const auto& b) { return detect_key(a) < detect_key(b); });
  std::sort(tasks.begin(), tasks.end(),
            [](const auto& a, const auto& b) { return task_key(a) < task_key(b); });
}

void ResultStore::merge(const ResultStore& other) {
  std::set<std::string> net;
  for (const auto& n : networks) net.insert(n.name);
  for (const auto& n : other.networks) {
    if (net.insert(n.name).second) networks.push_back(n);
  }
  std::set<decltype(detect_key(DetectRecord{}))> det;
  for (const auto& d : detections) det.insert(detect_key(d));
  for (const auto& d : other.detections) {
    if (det.insert(detect_key(d)).second) detections.push_back(d);
  }
  std::set<decltype(task_key(TaskResult{}))> tk;
  for (const auto& t : tasks) tk.insert(task_key(t));
  for (const auto& t : other.tasks) {
    if (tk.insert(task_key(t)).second) tasks.push_back(t);
  }
}

ResultStore read_store(const std::string& out_dir) {
  ResultStore s;
  const fs::path dir = fs::path(out_dir) / "store";
  if (fs::exists(dir / "networks.ndjson")) {
    for (const auto& l : lines_of(read_file(dir / "networks.ndjson"))) s.networks.push_back(parse_network(l));
  }
  if (fs::exists(dir / "detect.ndjson")) {
    for (const auto& l : lines_of(read_file(dir / "detect.ndjson"))) {
      auto d = parse_detect_record(l);
      const fs::path labels = fs::path(out_dir) / d.labels_path;
      if (!d.error && fs::exists(labels)) d.partition = parse_partition_file(labels);
      s.detections.push_back(std::move(d));
    }
  }
  if (fs::exists(dir / "tasks.ndjson")) {
    for (const auto& l : lines_of(read_file(dir / "tasks.ndjson"))) s.tasks.push_back(parse_task_record(l));
  }
  return s;
}

void write_store(const ResultStore& store, const std::string& out_dir) {
  const fs::path dir = fs::path(out_dir) / "store";
  fs::create_directories(dir);
  std::string text;
  for (const auto& n : store.networks) text += network_json(n) + "\n";
  write_file(dir / "networks.ndjson", text);
  text.clear();
  for (const auto& d : store.detections) text += detect_record_json(d) + "\n";
  write_file(dir / "detect.ndjson", text);
  text.clear();
  for (const auto& t : store.tasks) text += task_record_json(t) + "\n";
  write_file(dir / "tasks.ndjson", text);
}

// ---- cache ---------------------------------------------------------------

namespace {

class Cache {
 public:
  explicit Cache(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  std::optional<std::string> get(const std::string& key) const {
    if (dir_.empty()) return std::nullopt;
    const fs::path p = path(key);
    if (!fs::exists(p)) return std::nullopt;
    try {
      const auto j = ojson::parse(read_file(p));
      const auto payload = j.at("payload").get<std::string>();
      if (j.at("checksum").get<std::string>() != sha256_hex(payload)) return std::nullopt;
      return payload;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  void put(const std::string& key, const std::string& payload) const {
    if (dir_.empty()) return;
    ojson j;
    j["key"] = key;
    j["checksum"] = sha256_hex(payload);
    j["payload"] = payload;
    write_file(path(key), j.dump() + "\n");
  }

  fs::path path(const std::string& key) const { return fs::path(dir_) / (key + ".json"); }

 private:
  std::string dir_;
};

std::string fmt_alpha(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", a);
  return buf;
}

struct LoadedNetwork {
  NetworkRecord record;
  Graph graph;
};

struct Job {
  std::size_t network = 0;
  MethodId method = MethodId::Q_LOUVAIN;
  bool full_detect = true;
  std::size_t alpha_index = 0;
  int replicate = 0;
};

struct JobOutput {
  std::optional<DetectRecord> detection;
  std::vector<TaskResult> tasks;
  bool cache_hit = false;
};

JobOutput run_detect_job(const LoadedNetwork& net, MethodId method, const RunConfig& cfg,
                         const Cache& cache) {
  const auto seed = derive_seed(cfg.seed, net.record.name, "full", method_name(method));
  const auto key = sha256_hex("detect|1|" + net.record.hash + "|" + std::string(method_name(method)) +
                              "|" + std::to_string(seed));
  JobOutput out;
  if (auto hit = cache.get(key)) {
    try {
      const auto j = ojson::parse(*hit);
      auto d = parse_detect_record(j.at("record").get<std::string>());
      if (!d.error) {
        d.partition = Partition(j.at("labels").get<std::vector<Label>>());
        if (d.partition.size() != net.graph.node_count()) throw Error("stale cache entry");
      }
      out.detection = std::move(d);
      out.cache_hit = true;
      return out;
    } catch (const std::exception&) {
    }
  }
  DetectRecord d;
  d.network = net.record.name;
  d.method = method;
  d.seed = seed;
  d.labels_path = partition_path(net.record.name, method);
  const auto r = detect(method, net.graph, seed);
  d.ms = r.ms;
  if (r.failed()) {
    d.error = *r.failure;
    d.labels_path.clear();
  } else {
    d.k = r.k;
    d.objective = r.objective;
    d.partition = r.partition;
  }
  ojson j;
  j["record"] = detect_record_json(d);
  j["labels"] = d.partition.labels();
  cache.put(key, j.dump());
  out.detection = std::move(d);
  return out;
}

JobOutput run_task_job(const LoadedNetwork& net, const Job& job, const RunConfig& cfg,
                       const Cache& cache) {
  const double alpha = cfg.alphas[job.alpha_index];
  const auto seed = replicate_seed(derive_seed(cfg.seed, net.record.name), alpha, job.replicate);
  const auto key = sha256_hex("task|1|" + net.record.hash + "|" + std::string(method_name(job.method)) +
                              "|" + std::string(score_mode_name(cfg.mode)) + "|" + fmt_alpha(alpha) +
                              "|" + std::to_string(job.replicate) + "|" + std::to_string(seed) + "|" +
                              std::to_string(cfg.mc_samples) + "|" + (cfg.exact_auc ? "exact" : "mc"));
  JobOutput out;
  if (auto hit = cache.get(key)) {
    try {
      for (const auto& line : lines_of(*hit)) {
        auto t = parse_task_record(line);
        t.network = net.record.name;
        out.tasks.push_back(std::move(t));
      }
      if (out.tasks.size() == 2) {
        out.cache_hit = true;
        return out;
      }
      out.tasks.clear();
    } catch (const std::exception&) {
      out.tasks.clear();
    }
  }
  BenchOptions opts;
  opts.mc_samples = cfg.mc_samples;
  opts.exact = cfg.exact_auc;
  std::array<TaskResult, 2> pair;
  try {
    pair = run_task_pair(net.graph, job.method, alpha, seed, cfg.mode, opts);
  } catch (const std::exception& e) {
    for (int t = 0; t < 2; ++t) {
      pair[t].method = job.method;
      pair[t].task = t == 0 ? Task::PREDICTION : Task::DESCRIPTION;
      pair[t].mode = cfg.mode;
      pair[t].alpha = alpha;
      pair[t].seed = seed;
      pair[t].error = e.what();
    }
  }
  std::string payload;
  for (auto& t : pair) {
    t.network = net.record.name;
    t.replicate = job.replicate;
    payload += task_record_json(t) + "\n";
    out.tasks.push_back(t);
  }
  cache.put(key, payload);
  return out;
}

}  // namespace

ResultStore run_pipeline(const CorpusManifest& manifest, const RunConfig& config, bool with_tasks,
                         RunStats* stats) {
  config.validate();
  if (manifest.entries.empty()) throw InvalidArgument("manifest has no entries");

  std::vector<LoadedNetwork> nets;
  for (const auto& e : manifest.entries) {
    LoadedNetwork n;
    n.graph = load_edge_list_file(e.path, {.simplify = true, .largest_component = true});
    if (with_tasks && n.graph.edge_count() < 2) {
      throw InvalidArgument("network '" + e.name + "' has fewer than 2 edges and cannot be split");
    }
    n.record = {e.name, e.domain, n.graph.node_count(), n.graph.edge_count(), sha256_hex(serialize(n.graph))};
    nets.push_back(std::move(n));
  }

  std::vector<Job> jobs;
  for (std::size_t n = 0; n < nets.size(); ++n) {
    for (auto m : config.methods) jobs.push_back({n, m, true, 0, 0});
  }
  if (with_tasks) {
    for (std::size_t n = 0; n < nets.size(); ++n) {
      for (auto m : config.methods) {
        for (std::size_t a = 0; a < config.alphas.size(); ++a) {
          for (int r = 0; r < config.replicates; ++r) jobs.push_back({n, m, false, a, r});
        }
      }
    }
  }

  const Cache cache(config.cache_dir);
  std::vector<JobOutput> outputs(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= jobs.size()) return;
      try {
        const auto& job = jobs[t];
        outputs[t] = job.full_detect ? run_detect_job(nets[job.network], job.method, config, cache)
                                     : run_task_job(nets[job.network], job, config, cache);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  ResultStore fresh;
  RunStats local;
  local.jobs = jobs.size();
  for (const auto& n : nets) fresh.networks.push_back(n.record);
  for (auto& o : outputs) {
    local.cache_hits += o.cache_hit ? 1 : 0;
    if (o.detection) {
      if (o.detection->error) {
        ++local.failures;
        local.warnings.push_back(o.detection->network + " " + std::string(method_name(o.detection->method)) +
                                 ": " + *o.detection->error);
      }
      fresh.detections.push_back(std::move(*o.detection));
    }
    for (auto& t : o.tasks) {
      if (t.failed()) ++local.failures;
      fresh.tasks.push_back(std::move(t));
    }
  }

  ResultStore store = read_store(config.out_dir);
  store.merge(fresh);
  store.sort();
  // partitions of this run are written next to the store
  for (const auto& d : fresh.detections) {
    if (d.error) continue;
    const std::size_t idx = static_cast<std::size_t>(
        std::find_if(nets.begin(), nets.end(), [&](const auto& n) { return n.record.name == d.network; }) -
        nets.begin());
    write_file(fs::path(config.out_dir) / d.labels_path, serialize_partition(nets[idx].graph, d.partition));
  }
  write_store(store, config.out_dir);
  if (stats) *stats = std::move(local);
  return store;
}

}  // namespace cfit
