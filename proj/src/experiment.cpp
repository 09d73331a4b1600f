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

#include "cagebo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cagebo/svg.hpp"

namespace cagebo {

using nlohmann::json;

Method parse_method(const std::string& name) {
  if (name == "cagebo") return Method::cagebo;
  if (name == "bo") return Method::bo;
  if (name == "sa") return Method::sa;
  if (name == "vae-bo") return Method::vae_bo;
  throw Error(Errc::InvalidConfig, "unknown method '" + name + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::cagebo: return "cagebo";
    case Method::bo: return "bo";
    case Method::sa: return "sa";
    case Method::vae_bo: return "vae-bo";
  }
  return "unknown";
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(Errc::InvalidConfig, where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw Error(Errc::InvalidConfig, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

ProblemBlock parse_problem(const json& j) {
  ProblemBlock b;
  const auto type = j.at("type").get<std::string>();
  if (type == "synthetic") {
    b.kind = ProblemKind::synthetic;
    check_keys(j, {"type", "function", "d", "noise_std", "n", "latent_dim", "data_seed"}, "problem");
    b.function = parse_test_function(j.value("function", std::string("michalewicz")));
  } else if (type == "ackley-disk") {
    b.kind = ProblemKind::ackley_disk;
    check_keys(j, {"type", "d", "noise_std", "n", "center", "radius", "data_seed"}, "problem");
    b.function = TestFunction::ackley;
    b.dim = 2;
    if (j.contains("center")) {
      const auto c = j.at("center").get<std::vector<double>>();
      b.center = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
    }
    read(j, "radius", b.radius);
  } else if (type == "districting") {
    b.kind = ProblemKind::districting;
    check_keys(j, {"type", "instance", "width", "height", "regions", "zones", "instance_seed", "n",
                   "locality_radius", "max_zone_size", "data_seed", "noise_std"},
               "problem");
    read(j, "instance", b.instance);
    read(j, "width", b.width);
    read(j, "height", b.height);
    read(j, "regions", b.regions);
    read(j, "zones", b.zones);
    read(j, "instance_seed", b.instance_seed);
    read(j, "locality_radius", b.locality_radius);
    read(j, "max_zone_size", b.max_zone_size);
  } else {
    throw Error(Errc::InvalidConfig, "unknown problem type '" + type + "'");
  }
  read(j, "d", b.dim);
  read(j, "noise_std", b.noise_std);
  read(j, "n", b.n);
  read(j, "latent_dim", b.latent_dim);
  read(j, "data_seed", b.data_seed);
  if (b.n == 0) throw Error(Errc::InvalidConfig, "problem.n must be >= 1");
  if (b.noise_std < 0.0) throw Error(Errc::InvalidConfig, "problem.noise_std must be >= 0");
  return b;
}

void parse_cvae(const json& j, CvaeConfig& c) {
  check_keys(j, {"latent_dim", "encoder_hidden", "decoder_hidden", "epochs", "batch_size",
                 "learning_rate", "kl_weight", "feasible_weight", "infeasible_weight",
                 "reconstruction", "seed"},
             "cvae");
  read(j, "latent_dim", c.latent_dim);
  read(j, "encoder_hidden", c.encoder_hidden);
  read(j, "decoder_hidden", c.decoder_hidden);
  read(j, "epochs", c.epochs);
  read(j, "batch_size", c.batch_size);
  read(j, "learning_rate", c.learning_rate);
  read(j, "kl_weight", c.kl_weight);
  read(j, "feasible_weight", c.feasible_weight);
  if (j.contains("infeasible_weight") && !j.at("infeasible_weight").is_null()) {
    c.infeasible_weight = j.at("infeasible_weight").get<double>();
  }
  if (j.contains("reconstruction")) {
    const auto r = j.at("reconstruction").get<std::string>();
    if (r == "bernoulli") {
      c.reconstruction = Reconstruction::bernoulli;
    } else if (r == "squared_error") {
      c.reconstruction = Reconstruction::squared_error;
    } else {
      throw Error(Errc::InvalidConfig, "unknown reconstruction '" + r + "'");
    }
  }
  read(j, "seed", c.seed);
  c.validate();
}

void parse_optimizer(const json& j, CageboConfig& c) {
  check_keys(j, {"iterations", "initial", "pool_size", "beta", "beta_schedule", "perturbation",
                 "skip_evaluated"},
             "optimizer");
  read(j, "iterations", c.iterations);
  read(j, "initial", c.initial);
  read(j, "pool_size", c.pool_size);
  read(j, "beta", c.beta);
  read(j, "beta_schedule", c.beta_schedule);
  read(j, "perturbation", c.perturbation);
  read(j, "skip_evaluated", c.skip_evaluated);
  c.validate();
}

void parse_sa(const json& j, SaConfig& c) {
  check_keys(j, {"initial_temperature", "cooling", "step", "max_proposals"}, "sa");
  if (j.contains("initial_temperature") && !j.at("initial_temperature").is_null()) {
    c.initial_temperature = j.at("initial_temperature").get<double>();
  }
  read(j, "cooling", c.cooling);
  read(j, "step", c.step);
  read(j, "max_proposals", c.max_proposals);
  c.validate();
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  try {
    const auto doc = json::parse(text);
    check_keys(doc, {"problem", "method", "cvae", "optimizer", "sa", "seeds", "output", "timing"}, "config");
    cfg.problem = parse_problem(doc.at("problem"));
    if (cfg.problem.kind == ProblemKind::districting) cfg.cvae.reconstruction = Reconstruction::bernoulli;
    if (doc.contains("method")) cfg.method = parse_method(doc.at("method").get<std::string>());
    if (doc.contains("cvae")) parse_cvae(doc.at("cvae"), cfg.cvae);
    if (doc.contains("optimizer")) parse_optimizer(doc.at("optimizer"), cfg.optimizer);
    if (doc.contains("sa")) parse_sa(doc.at("sa"), cfg.sa);
    read(doc, "seeds", cfg.seeds);
    if (doc.contains("output")) cfg.output = doc.at("output").get<std::string>();
    read(doc, "timing", cfg.timing);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("config: ") + e.what());
  }
  if (cfg.seeds.empty()) throw Error(Errc::InvalidConfig, "seeds must be non-empty");
  cfg.sa.iterations = cfg.optimizer.iterations;
  cfg.sa.initial = cfg.optimizer.initial;
  if (cfg.problem.kind == ProblemKind::districting && cfg.problem.instance != "grid" &&
      cfg.problem.instance != "atlanta" && !std::filesystem::exists(cfg.problem.instance)) {
    throw Error(Errc::InvalidConfig, "instance file not found: " + cfg.problem.instance);
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(Errc::InvalidConfig, "config not found: " + path.string());
  return parse_experiment_config(read_file(path));
}

namespace {

SyntheticProblemSpec spec_of(const ProblemBlock& b) {
  return default_spec(b.function, b.dim, b.noise_std);
}

Disk disk_of(const ProblemBlock& b) {
  Disk disk = default_disk(b.dim);
  if (b.center) {
    require_dim(static_cast<std::size_t>(b.center->size()), b.dim, "problem.center");
    disk.center = *b.center;
  }
  disk.radius = b.radius;
  return disk;
}

DistrictingInstance instance_of(const ProblemBlock& b) {
  if (b.instance == "grid") return grid_instance(b.width, b.height, b.zones, b.instance_seed);
  if (b.instance == "atlanta") return atlanta_like_instance(b.regions, b.zones, b.instance_seed);
  return load_instance(b.instance);
}

Problem districting_problem(const ProblemBlock& b, const DistrictingInstance& inst) {
  Problem p = make_districting_problem(inst, b.max_zone_size);
  p.noise_std = b.noise_std;
  return p;
}

}  // namespace

ProblemSetup generate_problem(const ProblemBlock& b) {
  ProblemSetup s;
  switch (b.kind) {
    case ProblemKind::synthetic: {
      auto g = make_random_decoder_dataset(b.data_seed, spec_of(b), b.n, b.latent_dim);
      s.dataset = std::move(g.dataset);
      s.problem = std::move(g.problem);
      break;
    }
    case ProblemKind::ackley_disk: {
      auto g = make_disk_dataset(b.data_seed, spec_of(b), disk_of(b), b.n);
      s.dataset = std::move(g.dataset);
      s.problem = std::move(g.problem);
      break;
    }
    case ProblemKind::districting: {
      DistrictingInstance inst = instance_of(b);
      if (inst.base_plan.empty()) throw Error(Errc::InvalidConfig, "instance has no base plan");
      s.dataset = generate_labeled_plans(inst, Plan{inst.base_plan}, b.n, b.data_seed, b.locality_radius);
      s.problem = districting_problem(b, inst);
      s.instance = std::move(inst);
      break;
    }
  }
  return s;
}

ProblemSetup load_problem(const ProblemBlock& b, const std::filesystem::path& dir) {
  ProblemSetup s;
  s.dataset = read_dataset(dir / "dataset.json");
  switch (b.kind) {
    case ProblemKind::synthetic: {
      const auto spec = spec_of(b);
      require_dim(s.dataset.dim, spec.dim, "dataset vs problem.d");
      s.problem.name = to_string(spec.function);
      s.problem.dim = spec.dim;
      s.problem.noise_std = spec.noise_std;
      s.problem.objective = [spec](const Decision& x) { return evaluate_synthetic(spec, x); };
      s.problem.feasible = membership_oracle(feasible_subset(s.dataset));
      break;
    }
    case ProblemKind::ackley_disk: {
      const auto spec = spec_of(b);
      require_dim(s.dataset.dim, spec.dim, "dataset vs problem.d");
      const Disk disk = disk_of(b);
      s.problem.name = "ackley-disk";
      s.problem.dim = spec.dim;
      s.problem.noise_std = spec.noise_std;
      s.problem.objective = [spec](const Decision& x) { return evaluate_synthetic(spec, x); };
      s.problem.feasible = [disk](const Decision& x) { return in_disk(disk, x); };
      break;
    }
    case ProblemKind::districting: {
      DistrictingInstance inst = load_instance(dir / "instance.json");
      require_dim(s.dataset.dim, inst.regions * inst.zones, "dataset vs instance");
      s.problem = districting_problem(b, inst);
      s.instance = std::move(inst);
      break;
    }
  }
  return s;
}

double median_of(std::vector<double> v) {
  if (v.empty()) throw Error(Errc::EmptyTrace, "median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SeriesStats summarize_best(const std::vector<std::vector<TraceRow>>& traces) {
  if (traces.empty()) throw Error(Errc::EmptyTrace, "no traces to summarize");
  std::size_t len = traces.front().size();
  for (const auto& t : traces) len = std::min(len, t.size());
  SeriesStats s;
  const double n = static_cast<double>(traces.size());
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<double> col;
    for (const auto& t : traces) col.push_back(t[i].best);
    double sum = 0.0;
    for (double v : col) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = traces.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    const double half = 1.96 * sd / std::sqrt(n);
    s.median.push_back(median_of(col));
    s.mean.push_back(mean);
    s.ci_low.push_back(mean - half);
    s.ci_high.push_back(mean + half);
  }
  return s;
}

RunResult run_method(const ExperimentConfig& cfg, const ProblemSetup& setup, std::uint64_t seed,
                     const std::optional<CvaeModel>& model) {
  CageboConfig opt = cfg.optimizer;
  opt.seed = seed;
  SaConfig sa = cfg.sa;
  sa.seed = seed;
  CvaeConfig cvae = cfg.cvae;
  cvae.seed = seed;
  switch (cfg.method) {
    case Method::cagebo:
      return model ? cagebo_run_with_model(*model, setup.dataset, setup.problem, opt)
                   : cagebo_run(setup.dataset, setup.problem, cvae, opt);
    case Method::vae_bo:
      return model ? cagebo_run_with_model(*model, setup.dataset, setup.problem, opt)
                   : vae_bo_run(setup.dataset, setup.problem, cvae, opt);
    case Method::bo: return vanilla_bo_run(setup.dataset, setup.problem, opt);
    case Method::sa: return simulated_annealing_run(setup.dataset, setup.problem, sa);
  }
  throw Error(Errc::InvalidConfig, "unknown method");
}

void cmd_gen_data(const ExperimentConfig& cfg, std::ostream& log) {
  const ProblemSetup s = generate_problem(cfg.problem);
  write_dataset(cfg.output / "dataset.json", s.dataset);
  if (s.instance) save_instance(cfg.output / "instance.json", *s.instance);
  const std::size_t f = s.dataset.feasible_count();
  log << "wrote " << (cfg.output / "dataset.json").string() << ": " << s.dataset.size() << " items, "
      << f << " feasible, " << s.dataset.size() - f << " infeasible\n";
}

namespace {

std::filesystem::path model_path(const ExperimentConfig& cfg) {
  return cfg.output / (cfg.method == Method::vae_bo ? "vae_model.json" : "model.json");
}

}  // namespace

void cmd_train_cvae(const ExperimentConfig& cfg, std::ostream& log) {
  const Dataset dataset = read_dataset(cfg.output / "dataset.json");
  CvaeConfig c = cfg.cvae;
  c.conditional = cfg.method != Method::vae_bo;
  c.seed = cfg.seeds.front();
  const auto [model, report] = train(dataset, c);
  save_model(model_path(cfg), model);
  std::ostringstream csv;
  csv << "epoch,elbo,reconstruction,kl\n";
  for (std::size_t e = 0; e < report.elbo.size(); ++e) {
    csv << e + 1 << ',' << format_double(report.elbo[e]) << ',' << format_double(report.reconstruction[e])
        << ',' << format_double(report.kl[e]) << '\n';
  }
  const auto loss_name = cfg.method == Method::vae_bo ? "vae_loss.csv" : "loss.csv";
  write_file(cfg.output / loss_name, csv.str());
  log << "wrote " << model_path(cfg).string() << " after " << report.elbo.size() << " epochs";
  if (!report.elbo.empty()) log << ", final ELBO " << report.elbo.back();
  log << '\n';
}

void cmd_optimize(const ExperimentConfig& cfg, std::ostream& log) {
  const ProblemSetup setup = load_problem(cfg.problem, cfg.output);
  std::optional<CvaeModel> model;
  if ((cfg.method == Method::cagebo || cfg.method == Method::vae_bo) &&
      std::filesystem::exists(model_path(cfg))) {
    model = load_model(model_path(cfg));
    if (model->config.conditional != (cfg.method == Method::cagebo)) {
      throw Error(Errc::InvalidConfig, "model file does not match method " + to_string(cfg.method));
    }
  }
  const auto dir = cfg.output / to_string(cfg.method);
  std::filesystem::create_directories(dir);
  std::vector<std::vector<TraceRow>> traces;
  json runs = json::array();
  for (auto seed : cfg.seeds) {
    const RunResult r = run_method(cfg, setup, seed, model);
    auto rows = r.trace_rows();
    const auto tag = "seed" + std::to_string(seed);
    write_trace_csv(dir / ("trace_" + tag + ".csv"), rows, cfg.timing);
    json summary = {{"method", r.method},
                    {"seed", seed},
                    {"best", r.incumbent_value},
                    {"evals", r.evaluations},
                    {"projections", r.projections},
                    {"seconds", cfg.timing ? r.seconds : 0.0}};
    write_file(dir / ("summary_" + tag + ".json"), summary.dump(2) + "\n");
    if (setup.instance) {
      const Plan plan = plan_decode(r.incumbent, setup.instance->regions, setup.instance->zones);
      write_file(dir / ("best_plan_" + tag + ".json"),
                 plan_report_json(plan, evaluate_plan(*setup.instance, plan)) + "\n");
    }
    runs.push_back(summary);
    traces.push_back(std::move(rows));
    log << to_string(cfg.method) << " seed " << seed << ": best " << r.incumbent_value << " ("
        << r.evaluations << " evaluations, " << r.projections << " projections)\n";
  }
  const SeriesStats stats = summarize_best(traces);
  json agg = {{"method", to_string(cfg.method)},
              {"seeds", cfg.seeds},
              {"median", stats.median},
              {"mean", stats.mean},
              {"ci_low", stats.ci_low},
              {"ci_high", stats.ci_high},
              {"runs", runs}};
  write_file(dir / "summary.json", agg.dump(2) + "\n");
}

namespace {

std::vector<std::filesystem::path> summary_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) throw Error(Errc::IoError, "not a directory: " + dir.string());
  if (std::filesystem::exists(dir / "summary.json")) {
    out.push_back(dir / "summary.json");
    return out;
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "summary.json")) {
      out.push_back(entry.path() / "summary.json");
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void cmd_plot(const std::vector<std::filesystem::path>& run_dirs, const std::filesystem::path& out,
              std::ostream& log) {
  std::vector<MethodSeries> series;
  for (const auto& dir : run_dirs) {
    for (const auto& file : summary_files(dir)) {
      try {
        const auto doc = json::parse(read_file(file));
        series.push_back({doc.at("method").get<std::string>(), doc.at("median").get<std::vector<double>>(),
                          doc.at("ci_low").get<std::vector<double>>(),
                          doc.at("ci_high").get<std::vector<double>>()});
      } catch (const json::exception& e) {
        throw Error(Errc::IoError, "bad summary " + file.string() + ": " + e.what());
      }
    }
  }
  if (series.empty()) throw Error(Errc::IoError, "no run summaries found");
  write_file(out, convergence_svg(series, "best-so-far (median, 95% CI)"));
  log << "wrote " << out.string() << " with " << series.size() << " method(s)\n";
}

void cmd_plot_plan(const std::filesystem::path& instance, const std::filesystem::path& plan_path,
                   const std::filesystem::path& out, std::ostream& log) {
  const DistrictingInstance inst = load_instance(instance);
  const Plan plan = load_plan(plan_path);
  const PlanViolation v = check_plan(inst, plan);
  if (v != PlanViolation::none) throw Error(Errc::InfeasiblePlan, violation_name(v));
  write_file(out, district_map_svg(inst, plan, evaluate_plan(inst, plan)));
  log << "wrote " << out.string() << '\n';
}

PlanEvaluation cmd_eval_plan(const std::filesystem::path& instance, const std::filesystem::path& plan_path,
                             std::ostream& out) {
  const DistrictingInstance inst = load_instance(instance);
  const Plan plan = load_plan(plan_path);
  const PlanViolation v = check_plan(inst, plan);
  if (v != PlanViolation::none) {
    out << "infeasible: " << violation_name(v) << " constraint violated\n";
    throw Error(Errc::InfeasiblePlan, std::string(violation_name(v)) + " constraint violated");
  }
  const PlanEvaluation eval = evaluate_plan(inst, plan);
  out << "zone  regions  lambda        tau           rho           loss_prob\n";
  out << std::setprecision(10);
  for (const auto& z : eval.zones) {
    out << std::left << std::setw(6) << z.zone << std::setw(9) << z.members.size() << std::setw(14)
        << z.arrival << std::setw(14) << z.mean_travel << std::setw(14) << z.workload << z.loss_probability
        << '\n';
  }
  out << "variance " << format_double(eval.variance) << '\n';
  return eval;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::InvalidConfig:
    case Errc::DimensionMismatch:
    case Errc::DomainViolation:
      return 2;
    case Errc::InfeasiblePlan:
    case Errc::InfeasibleBase:
    case Errc::EmptyFeasibleSet:
      return 3;
    case Errc::DivergedTraining:
    case Errc::NonPositiveDefinite:
    case Errc::SingularBalance:
    case Errc::SingularInput:
    case Errc::ZoneTooLarge:
      return 4;
    default:
      return 1;
  }
}

}  // namespace cagebo
