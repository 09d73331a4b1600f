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

#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "cagebo/error.hpp"
#include "cagebo/experiment.hpp"

using namespace cagebo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cagebo_experiment_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig config(const std::string& body, const fs::path& out) {
  return parse_experiment_config("{" + body + ", \"output\": \"" + out.string() + "\"}");
}

const char* kGrid = R"("problem": {"type": "districting", "instance": "grid", "n": 2000, "data_seed": 4})";
const char* kDisk = R"("problem": {"type": "ackley-disk", "d": 2, "n": 400, "data_seed": 1},
  "cvae": {"latent_dim": 2, "epochs": 3, "learning_rate": 0.001},
  "optimizer": {"iterations": 10, "initial": 3, "pool_size": 64})";

std::size_t count_substr(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto out = scratch("parse");
  CHECK_NOTHROW(config(kGrid, out));
  CHECK_THROWS_AS(config(std::string(kGrid) + R"(, "bogus": 1)", out), Error);
  CHECK_THROWS_AS(config(R"("problem": {"type": "districting", "instance": "grid", "colour": 2})", out), Error);
  CHECK_THROWS_AS(config(std::string(kGrid) + R"(, "seeds": [])", out), Error);
  CHECK_THROWS_AS(config(R"("problem": {"type": "districting", "instance": "/no/such/file.json"})", out), Error);
  CHECK_THROWS_AS(config(std::string(kGrid) + R"(, "method": "gradient-descent")", out), Error);
  try {
    config(std::string(kGrid) + R"(, "bogus": 1)", out);
  } catch (const Error& e) {
    CHECK(exit_code_for(e.code()) == 2);
  }
  CHECK(exit_code_for(Errc::InfeasiblePlan) == 3);
  CHECK(exit_code_for(Errc::SingularBalance) == 4);
}

TEST_CASE("gen-data writes reproducible datasets") {
  const auto a = scratch("gen_a"), b = scratch("gen_b");
  std::ostringstream log;
  cmd_gen_data(config(kGrid, a), log);
  cmd_gen_data(config(kGrid, b), log);
  const Dataset d = read_dataset(a / "dataset.json");
  CHECK(d.size() == 2000);
  CHECK(read_file(a / "dataset.json") == read_file(b / "dataset.json"));
  CHECK(log.str().find("feasible") != std::string::npos);

  const auto s = scratch("gen_s");
  cmd_gen_data(config(R"("problem": {"type": "synthetic", "function": "keane", "d": 30, "n": 2000})", s), log);
  CHECK(read_dataset(s / "dataset.json").feasible_count() == 1000);
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(s);
}

TEST_CASE("train-cvae persists the model and the loss curve") {
  const auto out = scratch("train");
  std::ostringstream log;
  auto cfg = config(kDisk, out);
  cmd_gen_data(cfg, log);
  cfg.cvae.epochs = 0;
  cmd_train_cvae(cfg, log);
  CHECK(fs::exists(out / "model.json"));
  const CvaeModel init = load_model(out / "model.json");
  const CvaeModel fresh = init_model(2, [&] {
    CvaeConfig c = cfg.cvae;
    c.seed = cfg.seeds.front();
    return c;
  }());
  CHECK(init.encoder.layers[0].weight == fresh.encoder.layers[0].weight);

  cfg.cvae.epochs = 7;
  cmd_train_cvae(cfg, log);
  const auto csv = read_file(out / "loss.csv");
  CHECK(count_substr(csv, "\n") == 8);
  const CvaeModel m = load_model(out / "model.json");
  Vector x(2);
  x << 0.4, 0.6;
  CHECK(encode(m, x, true).mean == encode(load_model(out / "model.json"), x, true).mean);
  fs::remove_all(out);
}

TEST_CASE("optimize writes traces and summaries") {
  const auto out = scratch("opt");
  std::ostringstream log;
  auto cfg = config(std::string(kDisk) + R"(, "method": "sa", "seeds": [1])", out);
  cmd_gen_data(cfg, log);
  cmd_optimize(cfg, log);
  std::size_t traces = 0;
  for (const auto& e : fs::directory_iterator(out / "sa")) traces += e.path().filename().string().rfind("trace_", 0) == 0;
  CHECK(traces == 1);
  const auto one = nlohmann::json::parse(read_file(out / "sa" / "summary_seed1.json"));
  for (const char* k : {"method", "seed", "best", "evals", "projections", "seconds"}) CHECK(one.contains(k));
  CHECK(one["evals"] == 13);

  cfg.seeds = {0, 1, 2, 3, 4};
  cmd_optimize(cfg, log);
  const auto agg = nlohmann::json::parse(read_file(out / "sa" / "summary.json"));
  std::vector<double> firsts;
  for (auto s : cfg.seeds) {
    firsts.push_back(read_trace_csv(out / "sa" / ("trace_seed" + std::to_string(s) + ".csv")).front().best);
  }
  CHECK(agg["median"][0].get<double>() == median_of(firsts));

  cfg.method = Method::cagebo;
  cfg.seeds = {0};
  cmd_optimize(cfg, log);
  CHECK(fs::exists(out / "cagebo" / "trace_seed0.csv"));

  const auto svg = out / "fig.svg";
  cmd_plot({out / "sa"}, svg, log);
  const auto text = read_file(svg);
  CHECK(count_substr(text, "<polyline") == 1);
  CHECK(text.find(">sa<") != std::string::npos);
  cmd_plot({out}, svg, log);
  CHECK(count_substr(read_file(svg), "<polyline") == 2);
  fs::create_directories(out / "empty");
  CHECK_THROWS_AS(cmd_plot({out / "empty"}, svg, log), Error);
  fs::remove_all(out);
}

TEST_CASE("confidence band narrows with more seeds") {
  std::vector<std::vector<TraceRow>> traces;
  std::vector<double> widths;
  // Fixed pseudo-random finals; only the count changes.
  const double finals[] = {0.8, 1.3, 0.9, 1.1, 1.0, 0.7, 1.2, 0.95, 1.05, 1.0};
  for (int n : {3, 10}) {
    traces.clear();
    for (int i = 0; i < n; ++i) traces.push_back({{0, finals[i], finals[i], false, 0.0}});
    const auto s = summarize_best(traces);
    widths.push_back(s.ci_high[0] - s.ci_low[0]);
  }
  CHECK(widths[1] < widths[0]);
}

TEST_CASE("eval-plan reports and rejects") {
  const auto out = scratch("eval");
  std::ostringstream log;
  cmd_gen_data(config(kGrid, out), log);
  const auto inst = load_instance(out / "instance.json");
  write_file(out / "base.json", nlohmann::json{{"assignment", inst.base_plan}}.dump());
  std::ostringstream report;
  const auto eval = cmd_eval_plan(out / "instance.json", out / "base.json", report);
  CHECK(eval.zones.size() == 4);
  CHECK(count_substr(report.str(), "\n") == 6);
  CHECK(eval.variance == workload_variance(inst, Plan{inst.base_plan}));

  std::vector<std::size_t> diag(36, 0);
  for (std::size_t a = 0; a < 36; ++a) diag[a] = (a / 6 + a % 6) % 4;
  write_file(out / "diag.json", nlohmann::json(diag).dump());
  std::ostringstream bad;
  CHECK_THROWS_AS(cmd_eval_plan(out / "instance.json", out / "diag.json", bad), Error);
  CHECK(bad.str().find("contiguity") != std::string::npos);
  fs::remove_all(out);
}
