// Copyright 2026 The spgan-prior Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPGAN_ABLATION_HPP
#define SPGAN_ABLATION_HPP

#include "spgan/config.hpp"
#include "spgan/dataset.hpp"
#include "spgan/metrics.hpp"
#include "spgan/training.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace spgan {

inline const std::vector<std::string>& default_ablation_columns() {
  static const std::vector<std::string> cols = {"vanilla", "2048", "128", "64", "32", "16"};
  return cols;
}

/// Categories x prior columns, on top of a shared base configuration.
struct AblationMatrix {
  RunConfig base;
  std::vector<std::pair<std::string, std::string>> categories;  // name, dataset dir
  std::vector<std::string> columns = default_ablation_columns();
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto end = s.find(',', pos);
    if (end == std::string::npos) end = s.size();
    const auto item = trim(std::string_view(s).substr(pos, end - pos));
    if (!item.empty()) out.emplace_back(item);
    pos = end + 1;
  }
  return out;
}

/// Matrix file: any RunConfig key plus
///   categories = name:dir, name:dir, ...
///   columns = vanilla, 2048, 128, ...      (optional)
inline AblationMatrix parse_ablation_matrix(const KeyValueFile& kv) {
  AblationMatrix m;
  m.base = run_config_from(kv, {"categories", "columns"});
  for (const auto& e : kv.entries) {
    if (e.key == "categories") {
      for (const auto& item : split_list(e.value)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
          throw ConfigError(kv.origin + ":" + std::to_string(e.line) +
                            ": category entries must be name:dir, got '" + item + "'");
        }
        m.categories.emplace_back(item.substr(0, colon), item.substr(colon + 1));
      }
    } else if (e.key == "columns") {
      m.columns = split_list(e.value);
      for (const auto& c : m.columns) {
        if (c == "vanilla") continue;
        detail::parse_unsigned<std::size_t>("columns", c);
      }
    }
  }
  if (m.categories.empty()) throw ConfigError(kv.origin + ": 'categories' is required");
  if (m.columns.empty()) throw ConfigError(kv.origin + ": 'columns' must not be empty");
  return m;
}

/// Config for one column: "vanilla" drops the centroid block; an integer K
/// sets k_centroids, with K >= n_points meaning the whole reference cloud.
inline RunConfig column_config(const RunConfig& base, const std::string& column) {
  RunConfig cfg = base;
  if (column == "vanilla") {
    cfg.vanilla = true;
  } else {
    const auto k = detail::parse_unsigned<std::size_t>("columns", column);
    cfg.vanilla = false;
    cfg.k_centroids = k >= cfg.n_points ? cfg.n_points : k;
  }
  return cfg;
}

struct AblationTable {
  struct Row {
    std::string category;
    std::string metric;  // "FPD" (1e-3 units) or "JSD"
    std::vector<std::optional<double>> values;
  };
  std::vector<std::string> columns;
  std::vector<Row> rows;

  static std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
  }

  /// Index of the smallest value as printed; the first one wins ties.
  static std::optional<std::size_t> row_minimum(const Row& row) {
    std::optional<std::size_t> best;
    double best_v = 0.0;
    for (std::size_t i = 0; i < row.values.size(); ++i) {
      if (!row.values[i]) continue;
      const double v = std::stod(format_value(*row.values[i]));
      if (!best || v < best_v) {
        best = i;
        best_v = v;
      }
    }
    return best;
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << "category,metric";
    for (const auto& c : columns) os << ',' << c;
    os << ",min_column\n";
    for (const auto& r : rows) {
      os << r.category << ',' << r.metric;
      for (const auto& v : r.values) os << ',' << (v ? format_value(*v) : "NA");
      const auto m = row_minimum(r);
      os << ',' << (m ? columns[*m] : "NA") << '\n';
    }
    return os.str();
  }

  std::string to_markdown() const {
    std::ostringstream os;
    os << "| Categories | Metrics |";
    for (const auto& c : columns) os << ' ' << (c == "vanilla" ? "Vanilla" : c) << " |";
    os << "\n|---|---|";
    for (std::size_t i = 0; i < columns.size(); ++i) os << "---|";
    os << '\n';
    for (const auto& r : rows) {
      os << "| " << r.category << " | " << r.metric << " (lower is better) |";
      const auto m = row_minimum(r);
      for (std::size_t i = 0; i < r.values.size(); ++i) {
        if (!r.values[i]) {
          os << " NA |";
        } else if (m && *m == i) {
          os << " **" << format_value(*r.values[i]) << "** |";
        } else {
          os << ' ' << format_value(*r.values[i]) << " |";
        }
      }
      os << '\n';
    }
    os << "\nFPD in units of 1e-3; JSD in nats. Bold marks the row minimum.\n";
    return os.str();
  }
};

struct AblationOutcome {
  AblationTable table;
  std::vector<std::string> failures;  // "<category>/<column>: <reason>"
};

/// Trains and evaluates one model per (category, column) cell. A failing
/// cell is recorded as NA and the sweep continues.
inline AblationOutcome run_ablation(const AblationMatrix& matrix,
                                    const std::filesystem::path& out_dir,
                                    std::ostream* progress = nullptr) {
  AblationOutcome out;
  out.table.columns = matrix.columns;
  for (const auto& [category, dir] : matrix.categories) {
    AblationTable::Row fpd_row{category, "FPD", {}};
    AblationTable::Row jsd_row{category, "JSD", {}};
    std::optional<std::vector<PointCloud>> dataset;
    std::string load_error;
    try {
      dataset = load_dataset(dir);
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (const auto& column : matrix.columns) {
      std::optional<EvalResult> result;
      try {
        if (!dataset) throw std::runtime_error(load_error);
        const RunConfig cfg = column_config(matrix.base, column);
        cfg.validate();
        const auto cell_dir = out_dir / category / column;
        std::filesystem::create_directories(cell_dir);
        std::ofstream(cell_dir / "config.txt", std::ios::trunc) << cfg.serialize();
        std::ofstream log(cell_dir / "loss.csv", std::ios::trunc);
        const auto opts = cfg.train_options();
        CheckpointPolicy policy{cell_dir / "checkpoints", 0, cfg.serialize()};
        TrainState state = train(initial_state(opts), *dataset, opts, cfg.run_length(), policy, &log);
        FeatureExtractor fx = cfg.feature_weights.empty()
                                  ? FeatureExtractor()
                                  : FeatureExtractor::from_checkpoint(load_checkpoint(cfg.feature_weights));
        EvalOptions eval{cfg.eval_samples, cfg.grid_resolution, derive_seed(cfg.seed, streams::kEval)};
        result = evaluate_generator(state.params, state.sphere, *dataset, eval, fx);
        if (progress != nullptr) {
          *progress << category << '/' << column << ": FPD " << result->fpd_in_units()
                    << "e-3, JSD " << result->jsd << '\n';
        }
      } catch (const std::exception& e) {
        out.failures.push_back(category + "/" + column + ": " + e.what());
        if (progress != nullptr) *progress << category << '/' << column << ": FAILED " << e.what() << '\n';
      }
      fpd_row.values.push_back(result ? std::optional<double>(result->fpd_in_units()) : std::nullopt);
      jsd_row.values.push_back(result ? std::optional<double>(result->jsd) : std::nullopt);
    }
    out.table.rows.push_back(std::move(fpd_row));
    out.table.rows.push_back(std::move(jsd_row));
  }
  return out;
}

}  // namespace spgan

#endif  // SPGAN_ABLATION_HPP
