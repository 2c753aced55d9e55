// SPDX-License-Identifier: Apache-2.0
// cfraud: command-line front end.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "cfraud/corpus.hpp"
#include "cfraud/csv.hpp"
#include "cfraud/error.hpp"
#include "cfraud/figures.hpp"
#include "cfraud/harness.hpp"
#include "cfraud/hash.hpp"
#include "cfraud/providers.hpp"
#include "cfraud/report.hpp"
#include "cfraud/synth.hpp"

namespace fs = std::filesystem;
using namespace cfraud;

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::string corpus_path;
  std::string sidecar_dir;
  // Overrides applied on top of --config, as key=value entries.
  std::vector<std::pair<std::string, std::string>> overrides;
};

/// Text providers: HTTP adapters when CFRAUD_SENTIMENT_URL / CFRAUD_NER_URL are
/// set, the bundled fallbacks otherwise.
class ProviderSet {
 public:
  ProviderSet() {
    if (auto ep = HttpEndpoint::from_env("CFRAUD_SENTIMENT")) http_sentiment_ = std::make_unique<HttpSentimentProvider>(*ep);
    if (auto ep = HttpEndpoint::from_env("CFRAUD_NER")) http_tagger_ = std::make_unique<HttpEntityTagger>(*ep);
  }
  TextProviders view() const {
    auto v = defaults_.view();
    if (http_sentiment_) v.sentiment = http_sentiment_.get();
    if (http_tagger_) v.tagger = http_tagger_.get();
    return v;
  }

 private:
  DefaultTextProviders defaults_;
  std::unique_ptr<HttpSentimentProvider> http_sentiment_;
  std::unique_ptr<HttpEntityTagger> http_tagger_;
};

ExperimentConfig load_config(const Options& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw IoError("cannot read " + o.config_path);
    cfg = parse_config(in);
  }
  for (const auto& [k, v] : o.overrides) apply_config_entry(cfg, k, v);
  cfg.validate();
  return cfg;
}

Corpus need_corpus(const Options& o) {
  if (o.corpus_path.empty()) throw InvalidArgument("--corpus is required");
  return load_corpus(o.corpus_path);
}

std::optional<fs::path> sidecars(const Options& o) {
  if (o.sidecar_dir.empty()) return std::nullopt;
  return fs::path(o.sidecar_dir);
}

fs::path out_file(const Options& o, const std::string& name) {
  fs::create_directories(o.out_dir);
  return fs::path(o.out_dir) / name;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

std::map<std::string, std::string> input_digests(const Options& o) {
  std::map<std::string, std::string> d;
  if (!o.corpus_path.empty()) d["corpus"] = file_digest(o.corpus_path);
  if (!o.config_path.empty()) d["config"] = file_digest(o.config_path);
  if (!o.sidecar_dir.empty() && fs::is_directory(o.sidecar_dir)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(o.sidecar_dir))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    Fnv1a h;
    for (const auto& f : files) h.update(fs::relative(f, o.sidecar_dir).generic_string()).update(file_digest(f.string()));
    d["sidecars"] = h.hex();
  }
  return d;
}

void add_config_flag(CLI::App* cmd, Options& o, const std::string& flag, const std::string& key,
                     const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o.overrides.emplace_back(key, v); }, help);
}

void add_inputs(CLI::App* cmd, Options& o) {
  cmd->add_option("--corpus", o.corpus_path, "Campaign JSON-lines file");
  cmd->add_option("--sidecars", o.sidecar_dir, "Directory holding image sidecar files");
}

// ---------------------------------------------------------------- commands

int cmd_ingest(const Options& o) {
  const Corpus corpus = need_corpus(o);
  std::map<int, std::size_t> histogram;
  for (const auto& [id, s] : corpus.scores()) ++histogram[s.score];
  nlohmann::json report = {{"retained", corpus.size()}, {"skipped", nlohmann::json::array()}};
  for (const auto& s : corpus.skipped())
    report["skipped"].push_back({{"line", s.line}, {"id", s.id}, {"reason", s.reason}});
  for (const auto& [score, n] : histogram) report["scores"][std::to_string(score)] = n;
  for (auto setup : {LabelSetup::LabelI, LabelSetup::LabelII, LabelSetup::LabelIII}) {
    const auto a = apply_label_setup(corpus, corpus.scores(), setup);
    report["labels"][std::string(to_string(setup))] = {{"fraud", a.labeled.count(kFraud)},
                                                       {"not_fraud", a.labeled.count(kNotFraud)},
                                                       {"holdout", a.holdout.size()},
                                                       {"dropped", a.dropped.size()}};
  }
  // Agreement between the first two annotators, over campaigns scored by both.
  std::vector<int> a, b;
  for (const auto& [id, list] : corpus.annotations())
    if (list.size() >= 2) {
      a.push_back(list[0].score);
      b.push_back(list[1].score);
    }
  if (!a.empty()) {
    const auto k = cohens_kappa(a, b);
    report["kappa"] = {{"value", k.kappa}, {"band", k.band}, {"campaigns", a.size()}};
  }
  {
    auto out = open_out(out_file(o, "corpus.clean.jsonl"));
    write_corpus(out, corpus);
  }
  auto out = open_out(out_file(o, "ingest.json"));
  out << report.dump(2) << '\n';
  std::cout << "retained " << corpus.size() << ", skipped " << corpus.skipped().size() << '\n';
  return 0;
}

int cmd_features(const Options& o, const std::string& modality) {
  const Corpus corpus = need_corpus(o);
  const ExperimentConfig cfg = load_config(o);
  const auto m = parse_modality(modality);
  if (m == Modality::Text) {
    ProviderSet providers;
    std::vector<std::string> docs;
    for (const auto& c : corpus.campaigns()) docs.push_back(c.description);
    const auto vocab = tfidf_fit(docs, cfg.min_df);
    std::vector<FeatureVector> rows;
    std::vector<std::string> ids;
    for (const auto& c : corpus.campaigns()) {
      rows.push_back(assemble_text_features(c, providers.view(), vocab));
      ids.push_back(c.id);
    }
    const auto matrix = FeatureMatrix::from_vectors(rows, ids);
    auto out = open_out(out_file(o, "features_text.csv"));
    write_feature_csv(out, matrix);
    std::cout << matrix.rows() << " campaigns x " << matrix.cols() << " text features\n";
  } else if (m == Modality::Image) {
    const auto dir = sidecars(o);
    if (!dir) throw InvalidArgument("--sidecars is required for image features");
    std::vector<std::string> ids;
    std::vector<double> values;
    for (const auto& c : corpus.campaigns()) {
      if (c.images.empty()) continue;
      const auto v = assemble_image_features(c, *dir, cfg.aggregation);
      values.insert(values.end(), v.values.begin(), v.values.end());
      ids.push_back(c.id);
    }
    const FeatureMatrix matrix(image_schema(), ids, std::move(values));
    auto out = open_out(out_file(o, "features_image.csv"));
    write_feature_csv(out, matrix);
    std::cout << matrix.rows() << " campaigns x " << matrix.cols() << " image features\n";
  } else {
    throw InvalidArgument("features: --modality must be text or image");
  }
  return 0;
}

int cmd_select(const Options& o) {
  const Corpus corpus = need_corpus(o);
  const ExperimentConfig cfg = load_config(o);
  if (cfg.modality == Modality::Ensemble) throw InvalidArgument("select: --modality must be text or image");
  ProviderSet providers;
  const auto data = prepare_experiment_data(corpus, providers.view(), sidecars(o), cfg.aggregation);
  const auto labeled = apply_label_setup(corpus, corpus.scores(), cfg.label_setup).labeled;

  std::vector<std::string> ids;
  std::vector<int> labels;
  std::vector<TermCounts> docs;
  for (const auto& e : labeled.entries) {
    const auto r = cfg.modality == Modality::Text ? data.text_row(e.id) : data.image_row(e.id);
    if (!r) continue;
    ids.push_back(e.id);
    labels.push_back(e.label);
    if (cfg.modality == Modality::Text) docs.push_back(data.text->documents[*r]);
  }
  FeatureMatrix matrix;
  if (cfg.modality == Modality::Text) {
    const auto vocab = tfidf_fit(docs, cfg.min_df);
    std::vector<FeatureVector> rows;
    for (const auto& id : ids) rows.push_back(assemble_text_features(corpus.at(id), providers.view(), vocab));
    matrix = FeatureMatrix::from_vectors(rows, ids);
  } else {
    std::vector<std::size_t> rows;
    for (const auto& id : ids) rows.push_back(*data.image_row(id));
    matrix = data.image->matrix.select_rows(rows);
  }
  const auto mask = select_significant(matrix, labels, cfg.test, cfg.alpha);
  auto out = open_out(out_file(o, "mask_" + std::string(to_string(cfg.modality)) + ".csv"));
  write_mask_csv(out, mask);
  std::cout << "kept " << mask.kept_count() << " of " << mask.features.size() << " " << to_string(cfg.modality)
            << " features (" << to_string(cfg.test) << ", alpha " << cfg.alpha << ")\n";
  return 0;
}

void print_summary(const std::string& title, const MetricsDistribution& d) {
  std::cout << title << " (" << d.size() << " iterations)\n";
  for (auto m : kAllMetrics) {
    const auto s = d.summary(m);
    std::cout << "  " << to_string(m) << ": " << format_number(s.mean) << " (" << format_number(s.std) << ")\n";
  }
}

int cmd_experiment(const Options& o, const std::string& model_out) {
  const Corpus corpus = need_corpus(o);
  const ExperimentConfig cfg = load_config(o);
  ProviderSet providers;
  const auto data = prepare_experiment_data(corpus, providers.view(), sidecars(o), cfg.aggregation);
  const std::string classifier = describe(cfg.classifier);
  const std::string setup(to_string(cfg.label_setup));

  std::vector<SummaryRow> rows;
  std::map<std::string, std::string> outputs;
  const auto write_samples = [&](const std::string& modality, const MetricsDistribution& d) {
    const std::string name = "samples_" + modality + ".csv";
    const auto path = out_file(o, name);
    {
      auto out = open_out(path);
      write_samples_csv(out, d);
    }
    outputs[name] = file_digest(path.string());
    rows.push_back({classifier, modality, setup, d});
    print_summary(modality, d);
  };

  const auto assignment = apply_label_setup(corpus, corpus.scores(), cfg.label_setup);
  if (cfg.modality == Modality::Ensemble && cfg.label_setup != LabelSetup::LabelIII) {
    const auto r = run_ensemble_experiment(cfg, data, assignment.labeled);
    write_samples("text", r.text);
    write_samples("image", r.image);
    write_samples("ensemble", r.ensemble);
  } else {
    write_samples(std::string(to_string(cfg.modality)), run_experiment(cfg, data, corpus));
  }
  {
    const auto path = out_file(o, "summary.csv");
    auto out = open_out(path);
    write_summary_csv(out, rows);
    out.close();
    outputs["summary.csv"] = file_digest(path.string());
  }
  if (!model_out.empty()) {
    const auto bundle = fit_scoring_bundle(cfg, data, assignment.labeled);
    std::ofstream out(model_out, std::ios::binary);
    if (!out) throw IoError("cannot write " + model_out);
    out << bundle.to_json().dump() << '\n';
  }
  auto out = open_out(out_file(o, "manifest.json"));
  out << run_manifest(cfg, input_digests(o), outputs).dump(2) << '\n';
  return 0;
}

int cmd_ablate(const Options& o) {
  const Corpus corpus = need_corpus(o);
  const ExperimentConfig cfg = load_config(o);
  if (cfg.label_setup == LabelSetup::LabelIII) throw InvalidArgument("ablate supports label setups I and II");
  std::vector<FeatureGroup> groups = cfg.ablation_groups;
  if (groups.empty())
    for (auto g : kAllFeatureGroups) {
      const bool text = is_text_group(g);
      if ((text && cfg.modality != Modality::Image) || (!text && cfg.modality != Modality::Text)) groups.push_back(g);
    }
  ProviderSet providers;
  const auto data = prepare_experiment_data(corpus, providers.view(), sidecars(o), cfg.aggregation);
  const auto labeled = apply_label_setup(corpus, corpus.scores(), cfg.label_setup).labeled;
  const auto rows = run_ablation(cfg, data, labeled, groups);
  std::map<std::string, std::string> outputs;
  {
    const auto path = out_file(o, "ablation.csv");
    auto out = open_out(path);
    write_ablation_csv(out, rows);
    out.close();
    outputs["ablation.csv"] = file_digest(path.string());
  }
  for (const auto& r : rows)
    std::cout << r.name << ": auc " << format_number(r.distribution.mean(Metric::AUC)) << " delta "
              << format_number(r.delta_auc) << '\n';
  auto out = open_out(out_file(o, "manifest.json"));
  out << run_manifest(cfg, input_digests(o), outputs).dump(2) << '\n';
  return 0;
}

int cmd_score(const Options& o, const std::string& bundle_path, const std::string& campaign_path) {
  std::ifstream bin(bundle_path);
  if (!bin) throw IoError("cannot read " + bundle_path);
  const auto bundle = ScoringBundle::from_json(nlohmann::json::parse(bin));

  std::ifstream cin_(campaign_path);
  if (!cin_) throw IoError("cannot read " + campaign_path);
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(cin_);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(campaign_path + ": " + e.what());
  }
  if (!record.contains("score")) record["score"] = 0;
  std::istringstream line(record.dump() + "\n");
  const Corpus one = read_corpus(line);
  if (one.empty()) throw InvalidArgument("campaign rejected: " + one.skipped().front().reason);
  ProviderSet providers;
  const auto s = score_campaign(bundle, one.campaigns().front(), providers.view(), sidecars(o));
  std::cout << format_number(s.combined) << '\n';
  return 0;
}

int cmd_figures(const Options& o, const std::string& kind_name, std::size_t top,
                const std::vector<std::string>& runs) {
  const auto kind = parse_figure_kind(kind_name);
  FigureInputs in;
  in.top = top;
  std::optional<ExperimentData> data;
  LabeledSet labeled;
  if (kind == FigureKind::MetricsBoxes) {
    for (const auto& r : runs) {
      const auto eq = r.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--run expects name=samples.csv");
      std::ifstream sin(r.substr(eq + 1));
      if (!sin) throw IoError("cannot read " + r.substr(eq + 1));
      in.runs.emplace_back(r.substr(0, eq), read_samples_csv(sin));
    }
  } else {
    const Corpus corpus = need_corpus(o);
    const ExperimentConfig cfg = load_config(o);
    ProviderSet providers;
    data = prepare_experiment_data(corpus, providers.view(), sidecars(o), cfg.aggregation);
    labeled = apply_label_setup(corpus, corpus.scores(), cfg.label_setup).labeled;
    in.data = &*data;
    in.labeled = &labeled;
    in.min_df = cfg.min_df;
  }
  const auto table = export_figure_data(kind, in);
  auto out = open_out(out_file(o, "figure_" + std::string(to_string(kind)) + ".csv"));
  table.write_csv(out);
  std::cout << table.rows.size() << " rows\n";
  return 0;
}

int cmd_synth(const Options& o, const std::string& per_score, std::uint64_t seed, std::size_t images) {
  SyntheticSpec spec;
  spec.seed = seed;
  spec.images_per_campaign = images;
  spec.per_score.clear();
  std::string_view rest = per_score;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidArgument("--per-score expects score=count pairs");
    spec.per_score[std::stoi(std::string(item.substr(0, eq)))] = std::stoul(std::string(item.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  const auto s = generate_synthetic_corpus(spec);
  write_synthetic_corpus(s, o.out_dir);
  std::cout << "wrote " << s.corpus.size() << " campaigns to " << o.out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fraud detection for medical crowdfunding campaigns"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "key=value experiment configuration file");
  app.add_option("--out", o.out_dir, "Output directory")->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and report label statistics");
  add_inputs(ingest, o);

  std::string modality = "text";
  auto* features = app.add_subcommand("features", "Write the assembled feature matrix as CSV");
  add_inputs(features, o);
  features->add_option("--modality", modality, "text or image")->capture_default_str();
  add_config_flag(features, o, "--min-df", "min_df", "Minimum document frequency");

  auto* select = app.add_subcommand("select", "Per-feature significance mask on all labeled campaigns");
  add_inputs(select, o);
  add_config_flag(select, o, "--modality", "modality", "text or image");
  add_config_flag(select, o, "--test", "test", "ks or welch");
  add_config_flag(select, o, "--alpha", "alpha", "Significance level");
  add_config_flag(select, o, "--label-setup", "label_setup", "I, II or III");
  add_config_flag(select, o, "--min-df", "min_df", "Minimum document frequency");

  std::string model_out;
  auto* experiment = app.add_subcommand("experiment", "Repeated balanced train/test evaluation");
  auto* ablate = app.add_subcommand("ablate", "Leave-one-group-out evaluation");
  for (auto* cmd : {experiment, ablate}) {
    add_inputs(cmd, o);
    add_config_flag(cmd, o, "--label-setup", "label_setup", "I, II or III");
    add_config_flag(cmd, o, "--classifier", "classifier", "knn, nb, tree, rf, adaboost or mlp (kind:key=value,...)");
    add_config_flag(cmd, o, "--modality", "modality", "text, image or ensemble");
    add_config_flag(cmd, o, "--iterations", "iterations", "Iterations (0: default for the classifier)");
    add_config_flag(cmd, o, "--seed", "seed", "Master seed");
    add_config_flag(cmd, o, "--selection", "selection", "leak-free or full-dataset");
    add_config_flag(cmd, o, "--test", "test", "ks or welch");
    add_config_flag(cmd, o, "--alpha", "alpha", "Significance level");
    add_config_flag(cmd, o, "--train-fraction", "train_fraction", "Training share of the balanced pool");
    add_config_flag(cmd, o, "--workers", "workers", "Worker threads");
  }
  experiment->add_option("--model-out", model_out, "Also fit a scoring bundle on all labeled data");
  add_config_flag(ablate, o, "--groups", "ablation_groups", "Comma-separated feature groups");

  std::string bundle_path, campaign_path;
  auto* score = app.add_subcommand("score", "Fraud probability of one campaign");
  score->add_option("--model", bundle_path, "Bundle written by experiment --model-out")->required();
  score->add_option("campaign", campaign_path, "Campaign JSON file")->required();
  score->add_option("--sidecars", o.sidecar_dir, "Directory holding image sidecar files");

  std::string kind;
  std::size_t top = 0;
  std::vector<std::string> runs;
  auto* figures = app.add_subcommand("figures", "Export figure data as CSV");
  add_inputs(figures, o);
  figures->add_option("--kind", kind, "text-emotions, image-emotions, word-importance, object-prevalence, "
                                      "face-histogram or metrics-boxes")
      ->required();
  figures->add_option("--top", top, "Keep the first N ranked rows (0: all)");
  figures->add_option("--run", runs, "name=samples.csv for metrics-boxes");
  add_config_flag(figures, o, "--label-setup", "label_setup", "I, II or III");

  std::string per_score = "1=200,5=200";
  std::uint64_t synth_seed = 1;
  std::size_t images = 1;
  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic corpus with sidecars");
  synth->add_option("--per-score", per_score, "score=count pairs")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synth->add_option("--images", images, "Images per campaign")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*ingest) return cmd_ingest(o);
    if (*features) return cmd_features(o, modality);
    if (*select) return cmd_select(o);
    if (*experiment) return cmd_experiment(o, model_out);
    if (*ablate) return cmd_ablate(o);
    if (*score) return cmd_score(o, bundle_path, campaign_path);
    if (*figures) return cmd_figures(o, kind, top, runs);
    if (*synth) return cmd_synth(o, per_score, synth_seed, images);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
