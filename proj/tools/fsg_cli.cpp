/*
 * tools/fsg_cli.cpp
 *
 * Copyright 2026 The fsg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// fsg: command-line front end.
//
//   fsg generate      --dataset <fixture> --out <dir>
//   fsg train         --features a.csv --features b.csv --labels l.csv --out model.json
//   fsg classify      --model model.json --features a.csv --features b.csv --out pred.csv
//   fsg evaluate      --dataset <fixture|file> --reps 10 --out <dir>
//   fsg entropy       --dataset <fixture|file> --out <dir>
//   fsg inspect-model --model model.json
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fsg/datagen.hpp"
#include "fsg/dataset_io.hpp"
#include "fsg/entropy.hpp"
#include "fsg/experiment.hpp"
#include "fsg/fsg.hpp"
#include "fsg/model_io.hpp"
#include "fsg/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct Options {
  std::string dataset;
  std::vector<std::string> features;
  std::string labels;
  std::string mode;
  std::string label_column;
  double phi = 2.0;
  std::string k = "auto";
  std::string meta_k = "auto";
  double train_fraction = 0.5;
  std::string train_ids;
  std::uint64_t seed = 1;
  std::size_t reps = fsg::kDefaultRepetitions;
  std::size_t bins = fsg::kDefaultBins;
  std::string unit = "nats";
  std::string out;
  std::string format = "both";
  std::size_t workers = 1;
  std::size_t per_class = 250;
  std::vector<std::size_t> class_counts;
  std::size_t epochs = 0;
  std::string model;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fsg::KPolicy parse_k(const std::string& text, const char* flag) {
  if (text == "auto") return fsg::KPolicy::automatic();
  std::size_t k = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc() || p != text.data() + text.size() || k < 1) {
    throw UsageError(std::string(flag) + " must be a positive integer or 'auto', got '" + text + "'");
  }
  return fsg::KPolicy::fixed(k);
}

bool is_fixture(const std::string& name) {
  const auto& names = fsg::fixture_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

fsg::EntropyUnit parse_unit(const std::string& u) {
  return u == "bits" ? fsg::EntropyUnit::Bits : fsg::EntropyUnit::Nats;
}

fsg::ExperimentConfig make_config(const Options& o) {
  fsg::ExperimentConfig cfg;
  if (is_fixture(o.dataset)) {
    cfg.fixture = o.dataset;
    cfg.per_class = o.per_class;
  } else if (o.mode == "multi-attribute" || (!o.dataset.empty() && o.mode.empty())) {
    if (o.dataset.empty()) throw UsageError("multi-attribute mode needs --dataset <file>");
    cfg.mode = fsg::DataMode::MultiAttribute;
    cfg.attribute_file = o.dataset;
    cfg.label_column = o.label_column;
  } else {
    if (o.features.empty() || o.labels.empty()) {
      throw UsageError("give --dataset <fixture|file>, or --features (repeatable) and --labels");
    }
    cfg.mode = fsg::DataMode::MultiFeature;
    cfg.feature_files.assign(o.features.begin(), o.features.end());
    cfg.label_file = o.labels;
  }
  cfg.fuzzifier = o.phi;
  cfg.base_k = parse_k(o.k, "--k");
  cfg.meta_k = parse_k(o.meta_k, "--meta-k");
  cfg.train_fraction = o.train_fraction;
  if (!o.train_ids.empty()) cfg.train_ids = o.train_ids;
  cfg.seed = fsg::RngSeed{o.seed};
  cfg.repetitions = o.reps;
  cfg.workers = o.workers;
  cfg.bins = o.bins;
  cfg.unit = parse_unit(o.unit);
  return cfg;
}

/// The whole dataset named by the options (a fixture is generated once with
/// the master seed).
fsg::LabeledDataset load_all(const Options& o) {
  const auto cfg = make_config(o);
  if (cfg.uses_fixture()) {
    const auto spec = fsg::GaussianSpec::from_fixture(fsg::omega_fixture(cfg.fixture), cfg.per_class);
    return fsg::generate_dataset(spec, fsg::derive_seed(cfg.seed, 0));
  }
  return fsg::load_dataset(cfg);
}

fsg::TrainOptions train_options(const Options& o) {
  fsg::TrainOptions t;
  t.fuzzifier = o.phi;
  t.base_k = parse_k(o.k, "--k");
  t.meta_k = parse_k(o.meta_k, "--meta-k");
  t.seed = fsg::RngSeed{o.seed};
  t.workers = o.workers;
  return t;
}

void require_out(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
}

// ---------------------------------------------------------------------------

int cmd_generate(const Options& o) {
  require_out(o);
  if (!is_fixture(o.dataset)) {
    throw UsageError("--dataset must name a fixture for generate (one of: avecorr_1.0, "
                     "avecorr_0.9, avecorr_0.8, avecorr_0.7, twoclass_geom)");
  }
  const auto fixture = fsg::omega_fixture(o.dataset);
  const std::filesystem::path dir(o.out);
  const fsg::RngSeed seed{o.seed};
  if (o.epochs == 0) {
    const auto d = load_all(o);
    const auto files = fsg::write_multi_feature(d, dir);
    std::cout << "wrote " << files.features.size() << " feature files and " << files.labels.string()
              << " (" << d.size() << " samples)\n";
    return kExitOk;
  }
  const auto schedule = fsg::generate_epochs(fixture.omega, fixture.space_dims, o.epochs);
  const auto sets = fsg::generate_epoch_datasets(schedule, fixture.space_dims, fixture.variance,
                                                 o.per_class, seed);
  for (std::size_t e = 0; e < sets.size(); ++e) {
    fsg::write_multi_feature(sets[e], dir / ("epoch_" + std::to_string(e)));
  }
  std::cout << "wrote " << sets.size() << " epoch datasets under " << dir.string()
            << (schedule.converged ? "" : " (epoch cap reached)") << "\n";
  return kExitOk;
}

int cmd_train(const Options& o) {
  require_out(o);
  const auto d = load_all(o);
  fsg::TrainTimings tt;
  const auto model = fsg::train(d, train_options(o), &tt);
  fsg::save_model(model, o.out);
  std::cout << "trained on " << d.size() << " samples, " << model.num_spaces() << " spaces, "
            << model.num_classes() << " classes; base k";
  for (auto k : model.base_k()) std::cout << ' ' << k;
  std::cout << ", meta k " << model.meta_k() << "\n";
  return kExitOk;
}

int cmd_classify(const Options& o) {
  require_out(o);
  if (o.model.empty()) throw UsageError("--model is required");
  if (o.features.empty()) throw UsageError("--features is required (one per feature space)");
  const auto model = fsg::load_model(o.model);
  const std::vector<std::filesystem::path> paths(o.features.begin(), o.features.end());
  const auto fs = fsg::load_feature_set(paths);
  const auto preds = fsg::classify(model, fs, o.workers);

  std::optional<fsg::LabeledDataset> truth;
  if (!o.labels.empty()) truth = fsg::attach_labels(fs, o.labels, model.class_names());

  std::ostringstream csv;
  csv << "id,predicted";
  for (const auto& name : model.class_names()) csv << ",mu_" << name;
  csv << '\n';
  for (const auto& p : preds) {
    csv << p.id << ',' << model.class_names()[p.predicted];
    for (double v : p.meta.values()) csv << ',' << fsg::detail::format_double(v);
    csv << '\n';
  }
  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw fsg::Error(fsg::ErrorKind::Io, "cannot write " + o.out);
  out << csv.str();
  if (!out) throw fsg::Error(fsg::ErrorKind::Io, "failed writing " + o.out);

  std::cout << "classified " << preds.size() << " samples";
  if (truth) {
    std::cout << "; accuracy " << fsg::performance(preds, truth->labels());
  }
  std::cout << "\n";
  return kExitOk;
}

fsg::ReportFormat parse_format(const std::string& f) {
  if (f == "json") return fsg::ReportFormat::Json;
  if (f == "text") return fsg::ReportFormat::Text;
  return fsg::ReportFormat::Both;
}

int cmd_evaluate(const Options& o) {
  require_out(o);
  const auto cfg = make_config(o);
  auto report = fsg::run_experiment(cfg);
  if (!o.class_counts.empty()) report.curve = fsg::class_count_curve(cfg, o.class_counts);
  const auto written = fsg::emit_report(report, o.out, parse_format(o.format));
  for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
  std::cout << "FSG average accuracy " << report.averages.fsg_accuracy << " over "
            << report.averages.repetitions << " repetitions\n";
  if (!report.complete()) {
    for (const auto& d : report.diagnostics) std::cerr << "fsg: " << d << "\n";
    return kExitData;
  }
  return kExitOk;
}

int cmd_entropy(const Options& o) {
  require_out(o);
  const auto d = load_all(o);
  const auto unit = parse_unit(o.unit);
  const auto model = fsg::train(d, train_options(o));
  const auto feature = fsg::feature_entropy_table(d, o.bins, unit);
  std::vector<fsg::MembershipMatrix> blocks;
  for (std::size_t j = 0; j < model.num_spaces(); ++j) blocks.push_back(model.loo_block(j));
  const auto decision =
      fsg::decision_entropy_analysis(blocks, fsg::fusion_loo_memberships(model, o.workers),
                                     d.labels(), d.num_classes(), o.bins, unit);

  nlohmann::ordered_json j;
  j["format"] = "fsg-entropy";
  j["version"] = 1;
  j["samples"] = d.size();
  j["class_names"] = d.class_names();
  j["feature_entropy"] = fsg::detail::table_json(feature);
  auto dj = fsg::detail::table_json(decision.table);
  auto pc = nlohmann::ordered_json::array();
  for (const auto& c : decision.per_class) pc.push_back(fsg::detail::comparison_json(c));
  dj["fusion_vs_sum_per_class"] = std::move(pc);
  dj["fusion_vs_sum_pooled"] = fsg::detail::comparison_json(decision.pooled);
  j["decision_entropy"] = std::move(dj);

  std::ostringstream text;
  fsg::detail::write_entropy_block(text, "Feature space entropy", feature, d.num_classes());
  fsg::detail::write_entropy_block(text, "Decision and fusion space entropy", decision.table,
                                   d.num_classes());
  text << "Joint fusion entropy " << decision.pooled.fusion << " vs sum over spaces "
       << decision.pooled.sum_of_spaces << " (" << fsg::unit_name(unit) << "): decisions "
       << (decision.pooled.dependent ? "dependent" : "not shown dependent") << "\n";

  const std::filesystem::path dir(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw fsg::Error(fsg::ErrorKind::Io, "cannot create " + dir.string());
  const auto fmt = parse_format(o.format);
  if (fmt != fsg::ReportFormat::Text) {
    fsg::detail::write_text_file(dir / "entropy.json", j.dump(2) + "\n");
  }
  if (fmt != fsg::ReportFormat::Json) fsg::detail::write_text_file(dir / "entropy.txt", text.str());
  std::cout << text.str();
  return kExitOk;
}

int cmd_inspect(const Options& o) {
  if (o.model.empty()) throw UsageError("--model is required");
  const auto m = fsg::load_model(o.model);
  nlohmann::ordered_json j;
  j["num_classes"] = m.num_classes();
  j["class_names"] = m.class_names();
  j["num_spaces"] = m.num_spaces();
  j["space_dims"] = m.space_dims();
  j["training_samples"] = m.labels().size();
  j["fuzzifier"] = m.fuzzifier();
  j["base_k"] = m.base_k();
  j["meta_k"] = m.meta_k();
  std::vector<double> loo;
  for (std::size_t s = 0; s < m.num_spaces(); ++s) loo.push_back(m.training_accuracy(s));
  j["base_training_accuracy"] = loo;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

void add_data_options(CLI::App* sub, Options& o) {
  sub->add_option("--dataset", o.dataset,
                  "Fixture name (avecorr_1.0, avecorr_0.9, avecorr_0.8, avecorr_0.7, "
                  "twoclass_geom) or a multi-attribute CSV file");
  sub->add_option("--features", o.features, "Feature file, one per feature space (repeatable)");
  sub->add_option("--labels", o.labels, "Label file (id,label)");
  sub->add_option("--mode", o.mode, "multi-feature or multi-attribute")
      ->check(CLI::IsMember({"multi-feature", "multi-attribute"}));
  sub->add_option("--label-column", o.label_column,
                  "Label column name (or 0-based index without header), multi-attribute mode");
  sub->add_option("--per-class", o.per_class, "Samples per class for fixtures")
      ->check(CLI::PositiveNumber);
}

void add_model_options(CLI::App* sub, Options& o) {
  sub->add_option("--phi", o.phi, "Fuzzifier (> 1)")->check(CLI::Range(1.0 + 1e-9, 1e9));
  sub->add_option("--k", o.k, "Base-layer k: positive integer or 'auto'");
  sub->add_option("--meta-k", o.meta_k, "Meta-layer k: positive integer or 'auto'");
  sub->add_option("--seed", o.seed, "Master seed");
  sub->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
}

int dispatch(int argc, char** argv) {
  Options o;
  CLI::App app{"Fuzzy stacked generalization: train, classify and evaluate"};
  app.set_config("--config", "", "INI/TOML configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write a synthetic fixture dataset as CSV files");
  add_data_options(gen, o);
  gen->add_option("--seed", o.seed, "Master seed");
  gen->add_option("--epochs", o.epochs, "Also write overlap epochs up to this many steps");
  gen->add_option("--out", o.out, "Output directory");

  auto* trn = app.add_subcommand("train", "Train a model and save it as JSON");
  add_data_options(trn, o);
  add_model_options(trn, o);
  trn->add_option("--out", o.out, "Model file");

  auto* cls = app.add_subcommand("classify", "Classify feature files with a saved model");
  cls->add_option("--model", o.model, "Model file");
  cls->add_option("--features", o.features, "Feature file, one per feature space (repeatable)");
  cls->add_option("--labels", o.labels, "Optional label file, to report accuracy");
  cls->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
  cls->add_option("--out", o.out, "Predictions CSV");

  auto* eva = app.add_subcommand("evaluate", "Run repeated train/test experiments");
  add_data_options(eva, o);
  add_model_options(eva, o);
  eva->add_option("--train-fraction", o.train_fraction, "Training share per class, in (0, 1)");
  eva->add_option("--train-ids", o.train_ids, "File of training ids (explicit split)");
  eva->add_option("--reps", o.reps, "Repetitions")->check(CLI::PositiveNumber);
  eva->add_option("--bins", o.bins, "Entropy histogram bins")->check(CLI::PositiveNumber);
  eva->add_option("--unit", o.unit, "Entropy unit")->check(CLI::IsMember({"nats", "bits"}));
  eva->add_option("--class-counts", o.class_counts,
                  "Class counts for the accuracy-versus-classes curve")
      ->delimiter(',');
  eva->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"json", "text", "both"}));
  eva->add_option("--out", o.out, "Report directory");

  auto* ent = app.add_subcommand("entropy", "Feature, decision and fusion space entropy");
  add_data_options(ent, o);
  add_model_options(ent, o);
  ent->add_option("--bins", o.bins, "Histogram bins")->check(CLI::PositiveNumber);
  ent->add_option("--unit", o.unit, "Entropy unit")->check(CLI::IsMember({"nats", "bits"}));
  ent->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "text", "both"}));
  ent->add_option("--out", o.out, "Output directory");

  auto* ins = app.add_subcommand("inspect-model", "Summarize a saved model");
  ins->add_option("--model", o.model, "Model file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (gen->parsed()) return cmd_generate(o);
  if (trn->parsed()) return cmd_train(o);
  if (cls->parsed()) return cmd_classify(o);
  if (eva->parsed()) return cmd_evaluate(o);
  if (ent->parsed()) return cmd_entropy(o);
  return cmd_inspect(o);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "fsg: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fsg::Error& e) {
    std::cerr << "fsg: " << e.what() << "\n";
    return e.kind() == fsg::ErrorKind::InvalidArgument ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "fsg: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
