// Command-line front end: detect, bench, report, similarity, diagnose, gen.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cfit/detect.hpp"
#include "cfit/error.hpp"
#include "cfit/graph.hpp"
#include "cfit/pipeline.hpp"
#include "json.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kPartialFailure = 2;

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Flags {
  std::string manifest;
  std::string graph;
  std::string methods;
  std::string alphas;
  int replicates = 1;
  std::size_t mc_samples = 10'000;
  std::string score_mode = "model";
  std::uint64_t seed = 1;
  std::string cache_dir;
  std::string out;
  unsigned threads = 0;
  bool exact = false;
  double tol = cfit::kDefaultBestTolerance;
  double sigma2 = 0.3;
  std::string kinds;
};

void add_run_flags(CLI::App* cmd, Flags& f, bool bench) {
  cmd->add_option("--manifest", f.manifest, "corpus manifest CSV (name,path,domain)");
  cmd->add_option("--methods", f.methods, "comma-separated methods (default: all)");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--cache-dir", f.cache_dir, "result cache directory (default: $CFIT_CACHE_DIR)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads (default: hardware concurrency)");
  if (!bench) return;
  cmd->add_option("--alphas", f.alphas, "comma-separated alpha grid (default: 0.1,...,0.9)");
  cmd->add_option("--replicates", f.replicates, "replicates per alpha")->check(CLI::PositiveNumber);
  cmd->add_option("--mc-samples", f.mc_samples, "Monte Carlo AUC samples")->check(CLI::PositiveNumber);
  cmd->add_option("--score-mode", f.score_mode, "model or sbm")->check(CLI::IsMember({"model", "sbm"}));
  cmd->add_option("--tol", f.tol, "best-fraction tolerance");
  cmd->add_flag("--exact", f.exact, "exact AUC when the pair count is at most 10^6");
}

cfit::RunConfig make_config(const Flags& f) {
  cfit::RunConfig c;
  if (!f.methods.empty()) {
    c.methods.clear();
    for (const auto& m : split(f.methods)) c.methods.push_back(cfit::parse_method(m));
  }
  if (!f.alphas.empty()) {
    c.alphas.clear();
    for (const auto& a : split(f.alphas)) {
      try {
        c.alphas.push_back(std::stod(a));
      } catch (const std::exception&) {
        throw cfit::InvalidArgument("invalid alpha '" + a + "'");
      }
    }
  }
  c.replicates = f.replicates;
  c.mc_samples = f.mc_samples;
  c.mode = cfit::parse_score_mode(f.score_mode);
  c.seed = f.seed;
  c.cache_dir = f.cache_dir;
  if (c.cache_dir.empty()) {
    if (const char* env = std::getenv("CFIT_CACHE_DIR")) c.cache_dir = env;
  }
  c.out_dir = f.out;
  c.threads = f.threads;
  c.exact_auc = f.exact;
  c.validate();
  return c;
}

int report_failures(const cfit::RunStats& stats) {
  std::cerr << stats.jobs << " jobs, " << stats.cache_hits << " cache hits, " << stats.failures
            << " failed\n";
  for (const auto& w : stats.warnings) std::cerr << "warning: " << w << "\n";
  return stats.failures > 0 ? kPartialFailure : 0;
}

int print_single_detect(const Flags& f) {
  const auto g = cfit::load_edge_list_file(f.graph, {.simplify = true, .largest_component = true});
  std::vector<cfit::MethodId> methods(cfit::kAllMethods.begin(), cfit::kAllMethods.end());
  if (!f.methods.empty()) {
    methods.clear();
    for (const auto& m : split(f.methods)) methods.push_back(cfit::parse_method(m));
  }
  int code = 0;
  for (auto m : methods) {
    const auto r = cfit::detect(m, g, f.seed);
    nlohmann::ordered_json j;
    j["method"] = cfit::method_name(m);
    j["k"] = r.k;
    j["objective"] = r.objective;
    j["seed"] = r.seed;
    j["ms"] = r.ms;
    if (r.failed()) {
      j["error"] = *r.failure;
      code = kPartialFailure;
    }
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    std::cout << j.dump() << "\n";
  }
  return code;
}

std::vector<cfit::ReportKind> all_kinds() {
  using K = cfit::ReportKind;
  return {K::CURVES, K::SIMILARITY, K::KTREND, K::BESTFRAC, K::DIAGNOSIS, K::DOMAINS};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfit: community detection fit benchmark"};
  app.require_subcommand(1);
  Flags f;

  auto* det = app.add_subcommand("detect", "full-graph community detection over a corpus or one graph");
  add_run_flags(det, f, false);
  det->add_option("--graph", f.graph, "single edge-list file; prints one JSON record per method");

  auto* bench = app.add_subcommand("bench", "link prediction / description benchmark over a corpus");
  add_run_flags(bench, f, true);

  auto* report = app.add_subcommand("report", "emit report files from a result store");
  report->add_option("--out", f.out, "output directory holding the store")->required();
  report->add_option("--kinds", f.kinds, "comma-separated: curves,similarity,ktrend,bestfrac,diagnosis,domains");
  report->add_option("--tol", f.tol, "best-fraction tolerance");
  report->add_option("--sigma2", f.sigma2, "similarity kernel parameter");

  auto* sim = app.add_subcommand("similarity", "method similarity matrix and clustering");
  sim->add_option("--out", f.out, "output directory holding the store")->required();
  sim->add_option("--sigma2", f.sigma2, "similarity kernel parameter");

  auto* diag = app.add_subcommand("diagnose", "over/under-fit classification");
  diag->add_option("--out", f.out, "output directory holding the store")->required();

  auto* gen = app.add_subcommand("gen", "planted-partition graph generator");
  cfit::PlantedPartitionParams gp;
  std::size_t groups = 2;
  std::string prior, gen_out, labels_out;
  gen->add_option("--nodes", gp.nodes, "number of nodes")->required();
  gen->add_option("--groups", groups, "number of equally likely groups");
  gen->add_option("--prior", prior, "comma-separated group prior (overrides --groups)");
  gen->add_option("--p-in", gp.p_in, "within-group edge probability")->required();
  gen->add_option("--p-out", gp.p_out, "between-group edge probability")->required();
  gen->add_option("--seed", gp.seed, "generator seed");
  gen->add_flag("--allow-disassortative", gp.allow_disassortative, "permit p_out > p_in");
  gen->add_flag("--largest-component", gp.largest_component, "keep only the largest component");
  gen->add_option("--out", gen_out, "edge-list output file (default: stdout)");
  gen->add_option("--labels", labels_out, "planted labels output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (det->parsed()) {
      if (!f.graph.empty()) return print_single_detect(f);
      if (f.manifest.empty()) throw cfit::InvalidArgument("detect needs --manifest or --graph");
      const auto config = make_config(f);
      cfit::RunStats stats;
      const auto store = cfit::run_pipeline(cfit::load_manifest(f.manifest), config, false, &stats);
      std::vector<cfit::ReportKind> kinds{cfit::ReportKind::KTREND};
      if (config.methods.size() >= 2) kinds.push_back(cfit::ReportKind::SIMILARITY);
      cfit::emit_report(store, kinds, config.out_dir, {.tol = f.tol, .sigma2 = f.sigma2});
      return report_failures(stats);
    }
    if (bench->parsed()) {
      if (f.manifest.empty()) throw cfit::InvalidArgument("bench needs --manifest");
      const auto config = make_config(f);
      cfit::RunStats stats;
      const auto store = cfit::run_pipeline(cfit::load_manifest(f.manifest), config, true, &stats);
      auto kinds = all_kinds();
      if (config.methods.size() < 2) std::erase(kinds, cfit::ReportKind::SIMILARITY);
      cfit::emit_report(store, kinds, config.out_dir, {.tol = f.tol, .sigma2 = f.sigma2});
      return report_failures(stats);
    }
    if (report->parsed()) {
      std::vector<cfit::ReportKind> kinds;
      for (const auto& k : split(f.kinds)) kinds.push_back(cfit::parse_report_kind(k));
      if (kinds.empty()) kinds = all_kinds();
      const auto store = cfit::read_store(f.out);
      for (const auto& p : cfit::emit_report(store, kinds, f.out, {.tol = f.tol, .sigma2 = f.sigma2})) {
        std::cout << p << "\n";
      }
      return 0;
    }
    if (sim->parsed()) {
      cfit::emit_report(cfit::read_store(f.out), {cfit::ReportKind::SIMILARITY}, f.out, {.sigma2 = f.sigma2});
      return 0;
    }
    if (diag->parsed()) {
      cfit::emit_report(cfit::read_store(f.out), {cfit::ReportKind::DIAGNOSIS}, f.out);
      return 0;
    }
    if (gen->parsed()) {
      if (!prior.empty()) {
        for (const auto& q : split(prior)) gp.group_prior.push_back(std::stod(q));
      } else {
        if (groups < 1) throw cfit::InvalidArgument("--groups must be at least 1");
        gp.group_prior.assign(groups, 1.0 / static_cast<double>(groups));
      }
      const auto planted = cfit::generate_planted_partition(gp);
      for (const auto& w : planted.warnings) std::cerr << "warning: " << w << "\n";
      const auto text = cfit::serialize(planted.graph);
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(gen_out) << "# planted partition: nodes=" << gp.nodes << " p_in=" << gp.p_in
                               << " p_out=" << gp.p_out << " seed=" << gp.seed << "\n"
                               << text;
      }
      if (!labels_out.empty()) {
        std::ofstream(labels_out) << cfit::serialize_partition(planted.graph, planted.planted);
      }
      return 0;
    }
  } catch (const cfit::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const cfit::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const cfit::EmptyGraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return 0;
}
