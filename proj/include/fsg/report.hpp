/*
 * include/fsg/report.hpp
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

// Report emission. The JSON document carries every value; wall-clock data
// lives exclusively under keys named "timings", so stripping those keys
// leaves a document that depends only on the configuration and seed.

#ifndef FSG_REPORT_HPP
#define FSG_REPORT_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsg/experiment.hpp"

namespace fsg {

enum class ReportFormat { Json, Text, Both };

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson optional_json(const std::optional<double>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

inline ojson optional_row(const std::vector<std::optional<double>>& xs) {
  auto a = ojson::array();
  for (const auto& x : xs) a.push_back(optional_json(x));
  return a;
}

inline ojson timings_json(const PhaseTimings& t) {
  return ojson{{"base_train_seconds", t.base_train},
               {"meta_train_seconds", t.meta_train},
               {"base_classify_seconds", t.base_classify},
               {"meta_classify_seconds", t.meta_classify}};
}

inline ojson table_json(const EntropyTable& t) {
  return ojson{{"bins", t.bins}, {"unit", unit_name(t.unit)}, {"rows", t.rows}, {"values", t.values}};
}

inline ojson comparison_json(const FusionEntropyComparison& c) {
  return ojson{{"sum_of_spaces", c.sum_of_spaces},
               {"fusion", c.fusion},
               {"difference", c.difference},
               {"dependent", c.dependent}};
}

inline ojson repetition_json(const RepetitionResult& r) {
  ojson j;
  j["index"] = r.index;
  j["seed"] = r.seed;
  if (r.error) {
    j["error"] = *r.error;
    return j;
  }
  j["train_size"] = r.train_size;
  j["test_size"] = r.test_size;
  j["fsg_accuracy"] = r.fsg_accuracy;
  j["base_accuracy"] = r.base_accuracy;
  j["base_train_accuracy"] = r.base_train_accuracy;
  j["fsg_per_class"] = optional_row(r.fsg_per_class);
  auto bpc = ojson::array();
  for (const auto& row : r.base_per_class) bpc.push_back(optional_row(row));
  j["base_per_class"] = std::move(bpc);
  j["ave_corr"] = r.ave_corr;
  j["sharing"] = ojson{{"counts", r.sharing.counts}, {"totals", r.sharing.totals}};
  j["base_k"] = r.base_k;
  j["meta_k"] = r.meta_k;
  if (r.feature_entropy) j["feature_entropy"] = table_json(*r.feature_entropy);
  if (r.decision_entropy) {
    ojson d = table_json(r.decision_entropy->table);
    auto pc = ojson::array();
    for (const auto& c : r.decision_entropy->per_class) pc.push_back(comparison_json(c));
    d["fusion_vs_sum_per_class"] = std::move(pc);
    d["fusion_vs_sum_pooled"] = comparison_json(r.decision_entropy->pooled);
    j["decision_entropy"] = std::move(d);
  }
  if (r.entropy_note) j["entropy_note"] = *r.entropy_note;
  j["timings"] = timings_json(r.timings);
  return j;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const ExperimentReport& report) {
  using detail::ojson;
  ojson j;
  j["format"] = "fsg-report";
  j["version"] = 1;
  j["complete"] = report.complete();
  j["diagnostics"] = report.diagnostics;
  j["source"] = report.source;
  j["class_names"] = report.class_names;
  j["space_dims"] = report.space_dims;
  j["master_seed"] = report.master_seed;
  j["fuzzifier"] = report.fuzzifier;
  j["entropy_bins"] = report.bins;
  j["entropy_unit"] = unit_name(report.unit);
  auto reps = ojson::array();
  for (const auto& r : report.repetitions) reps.push_back(detail::repetition_json(r));
  j["repetitions"] = std::move(reps);

  const auto& a = report.averages;
  ojson avg;
  avg["repetitions"] = a.repetitions;
  avg["fsg_accuracy"] = a.fsg_accuracy;
  avg["base_accuracy"] = a.base_accuracy;
  avg["base_train_accuracy"] = a.base_train_accuracy;
  avg["fsg_per_class"] = detail::optional_row(a.fsg_per_class);
  auto bpc = ojson::array();
  for (const auto& row : a.base_per_class) bpc.push_back(detail::optional_row(row));
  avg["base_per_class"] = std::move(bpc);
  avg["ave_corr"] = a.ave_corr;
  avg["sharing"] = ojson{{"counts", a.sharing}, {"totals", a.sharing_totals}};
  if (a.feature_entropy) avg["feature_entropy"] = detail::table_json(*a.feature_entropy);
  if (a.decision_entropy) avg["decision_entropy"] = detail::table_json(*a.decision_entropy);
  avg["timings"] = detail::timings_json(a.timings);
  j["averages"] = std::move(avg);

  if (!report.curve.empty()) {
    auto curve = ojson::array();
    for (const auto& p : report.curve) {
      curve.push_back(ojson{{"classes", p.classes},
                            {"fsg_accuracy", p.fsg_accuracy},
                            {"mean_base_accuracy", p.mean_base_accuracy},
                            {"best_base_accuracy", p.best_base_accuracy}});
    }
    j["class_count_curve"] = std::move(curve);
  }
  return j;
}

/// Removes every "timings" member, recursively.
inline nlohmann::ordered_json strip_timings(nlohmann::ordered_json j) {
  if (j.is_object()) {
    j.erase("timings");
    for (auto& [key, value] : j.items()) value = strip_timings(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timings(value);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Human-readable tables.

namespace detail {

inline std::string cell(double v, int precision = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

inline std::string cell(const std::optional<double>& v, int precision = 2) {
  return v ? cell(*v, precision) : std::string("-");
}

inline void write_row(std::ostream& out, const std::string& label, std::size_t label_width,
                      const std::vector<std::string>& cells, std::size_t width = 9) {
  out << label;
  for (std::size_t p = label.size(); p < label_width; ++p) out << ' ';
  for (const auto& c : cells) {
    for (std::size_t p = c.size(); p < width; ++p) out << ' ';
    out << c;
  }
  out << '\n';
}

inline void write_entropy_block(std::ostream& out, const std::string& title, const EntropyTable& t,
                                std::size_t num_classes) {
  out << title << " (" << unit_name(t.unit) << ", " << t.bins << " bins)\n";
  std::vector<std::string> head;
  for (std::size_t c = 0; c < num_classes; ++c) head.push_back("Class-" + std::to_string(c + 1));
  write_row(out, "", 14, head, 10);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::vector<std::string> cells;
    for (double v : t.values[r]) cells.push_back(cell(v, 3));
    write_row(out, t.rows[r], 14, cells, 10);
  }
  out << '\n';
}

}  // namespace detail

inline std::string report_to_text(const ExperimentReport& report) {
  using detail::cell;
  using detail::write_row;
  const auto& a = report.averages;
  const std::size_t spaces = report.num_spaces();
  const std::size_t classes = report.num_classes();
  std::ostringstream out;
  out << "Source: " << report.source << "\n";
  out << "Classes: " << classes << ", feature spaces: " << spaces << ", repetitions: "
      << a.repetitions << " of " << report.repetitions.size()
      << (report.complete() ? "" : " (INCOMPLETE)") << "\n";
  out << "Master seed: " << report.master_seed << ", fuzzifier: " << report.fuzzifier << "\n";
  for (const auto& d : report.diagnostics) out << "! " << d << "\n";
  out << "\n";

  std::vector<std::string> head;
  for (std::size_t j = 0; j < spaces; ++j) head.push_back("F" + std::to_string(j + 1));
  auto with_fsg = head;
  with_fsg.push_back("FSG");
  const std::size_t lw = 26;

  out << "Test performance (%), mean over repetitions\n";
  write_row(out, "", lw, with_fsg);
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<std::string> cells;
    for (std::size_t j = 0; j < spaces; ++j) {
      const auto& v = a.base_per_class[j][c];
      cells.push_back(cell(v ? std::optional<double>(100.0 * *v) : std::nullopt));
    }
    const auto& f = a.fsg_per_class[c];
    cells.push_back(cell(f ? std::optional<double>(100.0 * *f) : std::nullopt));
    write_row(out, "Class-" + std::to_string(c + 1), lw, cells);
  }
  {
    std::vector<std::string> cells;
    for (double v : a.base_accuracy) cells.push_back(cell(100.0 * v));
    cells.push_back(cell(100.0 * a.fsg_accuracy));
    write_row(out, "Average Performance (%)", lw, cells);
  }
  {
    std::vector<std::string> cells;
    for (double v : a.base_train_accuracy) cells.push_back(cell(100.0 * v));
    write_row(out, "Training, leave-one-out (%)", lw, cells);
  }
  out << "Ave_corr: " << cell(100.0 * a.ave_corr) << "%\n\n";

  out << "Per-repetition test performance (%)\n";
  write_row(out, "", lw, with_fsg);
  for (const auto& r : report.repetitions) {
    const std::string label = "Repetition " + std::to_string(r.index + 1);
    if (!r.ok()) {
      out << label << ": failed: " << *r.error << "\n";
      continue;
    }
    std::vector<std::string> cells;
    for (double v : r.base_accuracy) cells.push_back(cell(100.0 * v));
    cells.push_back(cell(100.0 * r.fsg_accuracy));
    write_row(out, label, lw, cells);
  }
  out << "\n";

  if (const auto* first = [&]() -> const RepetitionResult* {
        for (const auto& r : report.repetitions)
          if (r.ok()) return &r;
        return nullptr;
      }()) {
    out << "Selected k (repetition " << first->index + 1 << "): base";
    for (auto k : first->base_k) out << ' ' << k;
    out << ", meta " << first->meta_k << "\n\n";
  }

  out << "Sharing matrix, mean counts (row: misclassified by, column: correct by)\n";
  auto with_total = head;
  with_total.push_back("Total");
  write_row(out, "", lw, with_total);
  for (std::size_t r = 0; r < spaces; ++r) {
    std::vector<std::string> cells;
    for (std::size_t c = 0; c < spaces; ++c) cells.push_back(cell(a.sharing[r * spaces + c], 1));
    cells.push_back(cell(a.sharing_totals[r], 1));
    write_row(out, "F" + std::to_string(r + 1), lw, cells);
  }
  out << "\n";

  if (a.feature_entropy) {
    detail::write_entropy_block(out, "Feature space entropy", *a.feature_entropy, classes);
  }
  if (a.decision_entropy) {
    detail::write_entropy_block(out, "Decision and fusion space entropy", *a.decision_entropy,
                                classes);
  }

  if (!report.curve.empty()) {
    out << "Accuracy versus number of classes (%)\n";
    write_row(out, "Classes", 10, {"FSG", "MeanBase", "BestBase"}, 10);
    for (const auto& p : report.curve) {
      write_row(out, std::to_string(p.classes), 10,
                {cell(100.0 * p.fsg_accuracy), cell(100.0 * p.mean_base_accuracy),
                 cell(100.0 * p.best_base_accuracy)},
                10);
    }
    out << "\n";
  }

  out << "Mean wall-clock (s): base train " << cell(a.timings.base_train, 4) << ", meta train "
      << cell(a.timings.meta_train, 4) << ", base classify " << cell(a.timings.base_classify, 4)
      << ", meta classify " << cell(a.timings.meta_classify, 4) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------

namespace detail {

inline void write_text_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
  out << content;
  if (!out) throw Error(ErrorKind::Io, "failed writing " + p.string());
}

}  // namespace detail

/// Writes report.json and/or report.txt plus plot-ready two-column .dat
/// files into `dir`; returns the written paths. Refuses reports without any
/// successful repetition.
inline std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                                      const std::filesystem::path& dir,
                                                      ReportFormat format = ReportFormat::Both) {
  if (report.repetitions.empty() || report.averages.repetitions == 0) {
    throw Error(ErrorKind::InvalidArgument,
                "refusing to emit a report without metrics (no successful repetition)");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  if (format != ReportFormat::Text) {
    written.push_back(dir / "report.json");
    detail::write_text_file(written.back(), report_to_json(report).dump(2) + "\n");
  }
  if (format != ReportFormat::Json) {
    written.push_back(dir / "report.txt");
    detail::write_text_file(written.back(), report_to_text(report));
  }
  {
    std::ostringstream dat;
    dat << "# repetition fsg_accuracy\n";
    for (const auto& r : report.repetitions)
      if (r.ok()) dat << (r.index + 1) << ' ' << detail::format_double(r.fsg_accuracy) << '\n';
    written.push_back(dir / "accuracy_per_repetition.dat");
    detail::write_text_file(written.back(), dat.str());
  }
  if (!report.curve.empty()) {
    std::ostringstream fsg_dat, base_dat;
    fsg_dat << "# classes fsg_accuracy\n";
    base_dat << "# classes mean_base_accuracy\n";
    for (const auto& p : report.curve) {
      fsg_dat << p.classes << ' ' << detail::format_double(p.fsg_accuracy) << '\n';
      base_dat << p.classes << ' ' << detail::format_double(p.mean_base_accuracy) << '\n';
    }
    written.push_back(dir / "accuracy_vs_classes_fsg.dat");
    detail::write_text_file(written.back(), fsg_dat.str());
    written.push_back(dir / "accuracy_vs_classes_base.dat");
    detail::write_text_file(written.back(), base_dat.str());
  }
  return written;
}

}  // namespace fsg

#endif  // FSG_REPORT_HPP
