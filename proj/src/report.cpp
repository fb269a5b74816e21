#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "cfit/diagnose.hpp"
#include "cfit/error.hpp"
#include "cfit/pipeline.hpp"
#include "json.hpp"

namespace cfit {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<ReportKind, std::string_view>, 6> kKinds = {{
    {ReportKind::CURVES, "curves"},
    {ReportKind::SIMILARITY, "similarity"},
    {ReportKind::KTREND, "ktrend"},
    {ReportKind::BESTFRAC, "bestfrac"},
    {ReportKind::DIAGNOSIS, "diagnosis"},
    {ReportKind::DOMAINS, "domains"},
}};

// files produced per kind, relative to the output directory
const std::map<ReportKind, std::vector<std::string>>& report_files() {
  static const std::map<ReportKind, std::vector<std::string>> files = {
      {ReportKind::CURVES, {"curves.csv"}},
      {ReportKind::SIMILARITY, {"similarity.csv", "similarity_ami.csv", "similarity_tree.json"}},
      {ReportKind::KTREND, {"ktrend.csv"}},
      {ReportKind::BESTFRAC, {"bestfrac.csv"}},
      {ReportKind::DIAGNOSIS, {"diagnosis.json", "diagnosis_common_sbm.json"}},
      {ReportKind::DOMAINS, {"domains.csv"}},
  };
  return files;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << text;
}

void require_tasks(const ResultStore& s, std::string_view kind) {
  if (s.tasks.empty()) {
    throw InvalidArgument("report '" + std::string(kind) +
                          "' needs benchmark records; run `cfit bench` first");
  }
}

void require_detections(const ResultStore& s, std::string_view kind) {
  if (s.detections.empty()) {
    throw InvalidArgument("report '" + std::string(kind) +
                          "' needs detection records; run `cfit detect` first");
  }
}

std::string curve_rows(const std::vector<AccuracyCurve>& curves, bool with_domain) {
  std::string text;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      if (with_domain) text += c.domain + ",";
      text += std::string(method_name(c.method)) + "," + std::string(task_name(c.task)) + "," +
              std::string(score_mode_name(c.mode)) + "," + num(p.alpha) + "," + num(p.mean_auc) + "," +
              num(p.stderr_auc) + "," + std::to_string(p.count) + "\n";
    }
  }
  return text;
}

std::vector<std::string> write_curves(const ResultStore& s, const fs::path& dir) {
  require_tasks(s, "curves");
  write_text(dir / "curves.csv", "method,task,mode,alpha,mean_auc,stderr,n\n" +
                                     curve_rows(aggregate(s.tasks, GroupBy::METHOD), false));
  return {"curves.csv"};
}

std::vector<std::string> write_domains(const ResultStore& s, const fs::path& dir) {
  require_tasks(s, "domains");
  std::map<std::string, std::string> domains;
  for (const auto& n : s.networks) domains[n.name] = n.domain;
  write_text(dir / "domains.csv", "domain,method,task,mode,alpha,mean_auc,stderr,n\n" +
                                      curve_rows(aggregate(s.tasks, GroupBy::METHOD_DOMAIN, domains), true));
  return {"domains.csv"};
}

std::vector<std::string> write_bestfrac(const ResultStore& s, const fs::path& dir, double tol) {
  require_tasks(s, "bestfrac");
  std::string text = "task,mode,method,alpha,fraction\n";
  for (const auto& bf : best_fraction(s.tasks, tol)) {
    for (std::size_t m = 0; m < bf.methods.size(); ++m) {
      for (std::size_t a = 0; a < bf.alphas.size(); ++a) {
        text += std::string(task_name(bf.task)) + "," + std::string(score_mode_name(bf.mode)) + "," +
                std::string(method_name(bf.methods[m])) + "," + num(bf.alphas[a]) + "," +
                num(bf.fraction[m][a]) + "\n";
      }
    }
  }
  write_text(dir / "bestfrac.csv", text);
  return {"bestfrac.csv"};
}

std::vector<std::string> write_similarity(const ResultStore& s, const fs::path& dir, double sigma2) {
  require_detections(s, "similarity");
  PartitionTable table;
  for (const auto& d : s.detections) {
    if (!d.error && d.partition.size() > 0) table[d.network][d.method] = d.partition;
  }
  const auto sim = method_similarity(table, sigma2);
  auto matrix = [&](const Eigen::MatrixXd& m) {
    std::string text = "method";
    for (auto x : sim.methods) text += "," + std::string(method_name(x));
    text += "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      text += std::string(method_name(sim.methods[r]));
      for (Eigen::Index c = 0; c < m.cols(); ++c) text += "," + num(m(r, c));
      text += "\n";
    }
    return text;
  };
  write_text(dir / "similarity.csv", matrix(sim.kernel));
  write_text(dir / "similarity_ami.csv", matrix(sim.ami));
  ojson tree;
  tree["sigma2"] = sigma2;
  tree["methods"] = ojson::array();
  for (auto m : sim.methods) tree["methods"].push_back(method_name(m));
  tree["leaf_order"] = ojson::array();
  for (auto m : sim.leaf_order) tree["leaf_order"].push_back(method_name(m));
  tree["merges"] = ojson::array();
  for (const auto& mg : sim.merges) {
    ojson step;
    step["children"] = {mg.left, mg.right};
    step["height"] = mg.height;
    tree["merges"].push_back(step);
  }
  write_text(dir / "similarity_tree.json", tree.dump(2) + "\n");
  return {"similarity.csv", "similarity_ami.csv", "similarity_tree.json"};
}

std::vector<std::string> write_ktrend(const ResultStore& s, const fs::path& dir) {
  require_detections(s, "ktrend");
  std::map<std::string, const NetworkRecord*> nets;
  for (const auto& n : s.networks) nets[n.name] = &n;
  std::vector<KObservation> obs;
  for (const auto& d : s.detections) {
    auto it = nets.find(d.network);
    if (d.error || it == nets.end()) continue;
    obs.push_back({d.network, d.method, it->second->nodes, it->second->edges, d.k});
  }
  std::string text = "axis,method,bin_lo,bin_hi,center,mean_k,max_k,count,reference\n";
  for (auto axis : {SizeAxis::N, SizeAxis::M}) {
    for (const auto& b : k_size_trend(obs, axis)) {
      text += std::string(axis == SizeAxis::N ? "N" : "M") + "," + std::string(method_name(b.method)) + "," +
              num(std::ldexp(1.0, b.bin)) + "," + num(std::ldexp(1.0, b.bin + 1)) + "," + num(b.center) +
              "," + num(b.mean_k) + "," + std::to_string(b.max_k) + "," + std::to_string(b.count) + "," +
              num(b.reference) + "\n";
    }
  }
  write_text(dir / "ktrend.csv", text);
  return {"ktrend.csv"};
}

std::vector<std::string> write_diagnosis(const ResultStore& s, const fs::path& dir) {
  require_tasks(s, "diagnosis");
  const auto curves = aggregate(s.tasks, GroupBy::METHOD);
  std::set<ScoreMode> modes;
  for (const auto& c : curves) modes.insert(c.mode);
  std::vector<std::string> written;
  for (auto mode : modes) {
    std::vector<AccuracyCurve> lp, ld;
    std::size_t grid = 0;
    for (const auto& c : curves) {
      if (c.mode == mode) grid = std::max(grid, c.points.size());
    }
    std::set<MethodId> incomplete;
    for (const auto& c : curves) {
      if (c.mode == mode && c.points.size() < grid) incomplete.insert(c.method);
    }
    for (const auto& c : curves) {
      if (c.mode != mode || incomplete.count(c.method)) continue;
      (c.task == Task::PREDICTION ? lp : ld).push_back(c);
    }
    ojson j = ojson::object();
    FitDiagnosis diag;
    if (lp.size() >= 3 && lp.size() == ld.size()) diag = classify_fit(lp, ld);
    std::set<MethodId> all;
    for (const auto& c : curves) {
      if (c.mode == mode) all.insert(c.method);
    }
    for (auto m : all) {
      ojson e;
      auto it = diag.find(m);
      if (it == diag.end()) {
        e["label"] = "INCONCLUSIVE";
        e["lp_tercile"] = nullptr;
        e["ld_tercile"] = nullptr;
        e["rank_shift"] = nullptr;
        e["note"] = incomplete.count(m) ? "incomplete accuracy curves" : "fewer than three comparable methods";
      } else {
        const auto& ev = it->second;
        e["label"] = fit_label_name(ev.label);
        e["lp_tercile"] = grade_name(ev.lp);
        e["ld_tercile"] = grade_name(ev.ld);
        e["rank_shift"] = ev.rank_shift;
        e["lp_median_rank"] = ev.lp_median_rank;
        e["ld_median_rank"] = ev.ld_median_rank;
        e["lp_low_alpha_tercile"] = grade_name(ev.lp_low);
        e["lp_high_alpha_tercile"] = grade_name(ev.lp_high);
      }
      j[std::string(method_name(m))] = e;
    }
    const std::string name = mode == ScoreMode::MODEL_SPECIFIC || modes.size() == 1
                                 ? "diagnosis.json"
                                 : "diagnosis_common_sbm.json";
    write_text(dir / name, j.dump(2) + "\n");
    written.push_back(name);
  }
  return written;
}

}  // namespace

std::string_view report_kind_name(ReportKind k) {
  for (const auto& [kind, name] : kKinds) {
    if (kind == k) return name;
  }
  return "curves";
}

ReportKind parse_report_kind(std::string_view name) {
  for (const auto& [kind, n] : kKinds) {
    if (n == name) return kind;
  }
  throw InvalidArgument("unknown report kind '" + std::string(name) + "'");
}

std::vector<std::string> emit_report(const ResultStore& store, const std::vector<ReportKind>& kinds,
                                     const std::string& out_dir, const ReportOptions& opts) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  std::vector<std::string> written;
  for (auto kind : kinds) {
    std::vector<std::string> files;
    switch (kind) {
      case ReportKind::CURVES:
        files = write_curves(store, dir);
        break;
      case ReportKind::SIMILARITY:
        files = write_similarity(store, dir, opts.sigma2);
        break;
      case ReportKind::KTREND:
        files = write_ktrend(store, dir);
        break;
      case ReportKind::BESTFRAC:
        files = write_bestfrac(store, dir, opts.tol);
        break;
      case ReportKind::DIAGNOSIS:
        files = write_diagnosis(store, dir);
        break;
      case ReportKind::DOMAINS:
        files = write_domains(store, dir);
        break;
    }
    written.insert(written.end(), files.begin(), files.end());
  }

  ojson index;
  index["files"] = ojson::array();
  for (const auto& [kind, name] : kKinds) {
    for (const auto& f : report_files().at(kind)) {
      if (!fs::exists(dir / f)) continue;
      ojson e;
      e["kind"] = name;
      e["path"] = f;
      index["files"].push_back(e);
    }
  }
  write_text(dir / "outputs.json", index.dump(2) + "\n");
  written.push_back("outputs.json");
  return written;
}

}  // namespace cfit
