/*
 * Copyright 2026 The cagebo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cagebo/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace cagebo {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::EmptyFeasibleSet: return "EmptyFeasibleSet";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::EmptyCandidates: return "EmptyCandidates";
    case Errc::DivergedTraining: return "DivergedTraining";
    case Errc::NonPositiveDefinite: return "NonPositiveDefinite";
    case Errc::SingularInput: return "SingularInput";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::ZoneTooLarge: return "ZoneTooLarge";
    case Errc::SingularBalance: return "SingularBalance";
    case Errc::InfeasiblePlan: return "InfeasiblePlan";
    case Errc::InfeasibleBase: return "InfeasibleBase";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

std::size_t Dataset::feasible_count() const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const auto& it) { return it.feasible; }));
}

void Dataset::validate() const {
  for (const auto& item : items) {
    require_dim(static_cast<std::size_t>(item.x.size()), dim, "Dataset");
    if (!in_unit_box(item.x)) {
      throw Error(Errc::DomainViolation, "Dataset: decision outside [0,1]^d");
    }
  }
}

std::vector<Decision> feasible_subset(const Dataset& dataset) {
  std::vector<Decision> out;
  for (const auto& item : dataset.items) {
    if (item.feasible) out.push_back(item.x);
  }
  if (out.empty()) throw Error(Errc::EmptyFeasibleSet, "no item labeled feasible");
  return out;
}

std::vector<Decision> infeasible_subset(const Dataset& dataset) {
  std::vector<Decision> out;
  for (const auto& item : dataset.items) {
    if (!item.feasible) out.push_back(item.x);
  }
  return out;
}

double best_so_far(std::span<const EvaluationRecord> records) {
  if (records.empty()) throw Error(Errc::EmptyTrace, "no records");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : records) best = std::min(best, r.y);
  return best;
}

bool in_unit_box(const Decision& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || x[i] < 0.0 || x[i] > 1.0) return false;
  }
  return true;
}

std::string dataset_to_json(const Dataset& dataset) {
  nlohmann::json doc;
  doc["d"] = dataset.dim;
  auto& items = doc["items"] = nlohmann::json::array();
  for (const auto& item : dataset.items) {
    items.push_back({{"x", std::vector<double>(item.x.data(), item.x.data() + item.x.size())},
                     {"c", item.feasible ? 1 : 0}});
  }
  return doc.dump();
}

Dataset dataset_from_json(const std::string& text) {
  Dataset out;
  try {
    const auto doc = nlohmann::json::parse(text);
    out.dim = doc.at("d").get<std::size_t>();
    for (const auto& item : doc.at("items")) {
      const auto xs = item.at("x").get<std::vector<double>>();
      const int c = item.at("c").get<int>();
      if (c != 0 && c != 1) throw Error(Errc::InvalidConfig, "label c must be 0 or 1");
      out.items.push_back({Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                           c == 1});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("dataset: ") + e.what());
  }
  out.validate();
  return out;
}

Dataset read_dataset(const std::filesystem::path& path) {
  return dataset_from_json(read_file(path));
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  write_file(path, dataset_to_json(dataset) + "\n");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> rows,
                     bool with_timing) {
  std::ostringstream os;
  os << "iter,y,best,projected,seconds\n";
  for (const auto& r : rows) {
    os << r.iteration << ',' << format_double(r.y) << ',' << format_double(r.best) << ','
       << (r.projected ? 1 : 0) << ',' << format_double(with_timing ? r.seconds : 0.0) << '\n';
  }
  write_file(path, os.str());
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::istringstream is(read_file(path));
  std::string line;
  std::getline(is, line);
  if (line != "iter,y,best,projected,seconds") {
    throw Error(Errc::IoError, "unexpected trace header in " + path.string());
  }
  std::vector<TraceRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw Error(Errc::IoError, "malformed trace row in " + path.string());
    TraceRow r;
    r.iteration = std::stoul(cells[0]);
    r.y = std::stod(cells[1]);
    r.best = std::stod(cells[2]);
    r.projected = cells[3] == "1";
    r.seconds = std::stod(cells[4]);
    rows.push_back(r);
  }
  return rows;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

}  // namespace cagebo
