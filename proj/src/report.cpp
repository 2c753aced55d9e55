// SPDX-License-Identifier: Apache-2.0
#include "cfraud/report.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "cfraud/csv.hpp"
#include "cfraud/error.hpp"

namespace cfraud {

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  CsvWriter w(out);
  w.row({"classifier", "modality", "label_setup", "metric", "mean", "std", "iterations"});
  for (const auto& r : rows)
    for (auto m : kAllMetrics) {
      const auto s = r.distribution.summary(m);
      w.row({r.classifier, r.modality, r.label_setup, std::string(to_string(m)), format_number(s.mean),
             format_number(s.std), std::to_string(r.distribution.size())});
    }
}

void write_samples_csv(std::ostream& out, const MetricsDistribution& dist) {
  CsvWriter w(out);
  w.row({"iteration", "accuracy", "precision", "recall", "f1", "auc", "tp", "fp", "tn", "fn"});
  for (std::size_t i = 0; i < dist.samples.size(); ++i) {
    const auto& s = dist.samples[i];
    w.row({std::to_string(i), format_number(s.accuracy), format_number(s.precision), format_number(s.recall),
           format_number(s.f1), format_number(s.auc), std::to_string(s.tp), std::to_string(s.fp),
           std::to_string(s.tn), std::to_string(s.fn)});
  }
}

namespace {

template <class T>
T field(const std::string& s, std::size_t line) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ParseError("bad number '" + s + "'", line);
  return v;
}

}  // namespace

MetricsDistribution read_samples_csv(std::istream& in) {
  const auto rows = read_csv(in);
  if (rows.empty() || rows.front().size() != 10 || rows.front()[0] != "iteration")
    throw ParseError("samples csv: missing header", 1);
  MetricsDistribution d;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 10) throw ParseError("samples csv: expected 10 fields", i + 1);
    Metrics m;
    m.accuracy = field<double>(r[1], i + 1);
    m.precision = field<double>(r[2], i + 1);
    m.recall = field<double>(r[3], i + 1);
    m.f1 = field<double>(r[4], i + 1);
    m.auc = field<double>(r[5], i + 1);
    m.tp = field<std::size_t>(r[6], i + 1);
    m.fp = field<std::size_t>(r[7], i + 1);
    m.tn = field<std::size_t>(r[8], i + 1);
    m.fn = field<std::size_t>(r[9], i + 1);
    d.samples.push_back(m);
  }
  return d;
}

void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows) {
  CsvWriter w(out);
  w.row({"group", "mean_auc", "std_auc", "delta_auc", "mean_accuracy", "mean_f1"});
  for (const auto& r : rows) {
    const auto auc = r.distribution.summary(Metric::AUC);
    w.row({r.name, format_number(auc.mean), format_number(auc.std), format_number(r.delta_auc),
           format_number(r.distribution.mean(Metric::Accuracy)), format_number(r.distribution.mean(Metric::F1))});
  }
}

nlohmann::json run_manifest(const ExperimentConfig& cfg, const std::map<std::string, std::string>& input_digests,
                            const std::map<std::string, std::string>& outputs) {
  return {{"tool", "cfraud"},
          {"version", std::string(kVersion)},
          {"seed", cfg.master_seed},
          {"config", config_to_json(cfg)},
          {"inputs", input_digests},
          {"outputs", outputs}};
}

}  // namespace cfraud
