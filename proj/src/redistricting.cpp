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

#include "cagebo/redistricting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <numeric>
#include <queue>

#include <json.hpp>

namespace cagebo {

bool DistrictingInstance::adjacent(std::size_t a, std::size_t b) const {
  const auto& n = neighbors[a];
  return std::binary_search(n.begin(), n.end(), b);
}

void DistrictingInstance::validate() const {
  auto bad = [](const std::string& msg) { throw Error(Errc::InvalidConfig, "instance: " + msg); };
  if (regions == 0 || zones == 0) bad("regions and zones must be positive");
  if (zones > regions) bad("more zones than regions");
  if (neighbors.size() != regions) bad("adjacency size mismatch");
  if (arrival.size() != regions) bad("arrival size mismatch");
  if (static_cast<std::size_t>(travel.rows()) != regions ||
      static_cast<std::size_t>(travel.cols()) != regions) {
    bad("travel matrix shape mismatch");
  }
  if (!(service_rate > 0.0) || !std::isfinite(service_rate)) bad("service rate must be > 0");
  for (std::size_t a = 0; a < regions; ++a) {
    if (!(arrival[a] >= 0.0) || !std::isfinite(arrival[a])) bad("arrival rates must be >= 0");
    if (travel(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) != 0.0) bad("travel diagonal must be 0");
    for (std::size_t b = 0; b < regions; ++b) {
      const double t = travel(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (!(t >= 0.0) || !std::isfinite(t)) bad("travel times must be finite and >= 0");
    }
    for (std::size_t b : neighbors[a]) {
      if (b >= regions || b == a) bad("adjacency must be irreflexive and in range");
      if (!adjacent(b, a)) bad("adjacency must be symmetric");
    }
  }
  // connectivity of the full region graph
  std::vector<char> seen(regions, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto a = stack.back();
    stack.pop_back();
    for (auto b : neighbors[a]) {
      if (!seen[b]) {
        seen[b] = 1;
        ++count;
        stack.push_back(b);
      }
    }
  }
  if (count != regions) bad("region graph is not connected");
  if (!base_plan.empty() && base_plan.size() != regions) bad("base plan size mismatch");
  if (!coords.empty() && coords.size() != regions) bad("coords size mismatch");
}

Decision plan_encode(const Plan& plan, std::size_t zones) {
  Decision x = Decision::Zero(static_cast<Eigen::Index>(plan.zone.size() * zones));
  for (std::size_t l = 0; l < plan.zone.size(); ++l) {
    if (plan.zone[l] >= zones) throw Error(Errc::DimensionMismatch, "plan_encode: zone index out of range");
    x[static_cast<Eigen::Index>(l * zones + plan.zone[l])] = 1.0;
  }
  return x;
}

Plan plan_decode(const Decision& x, std::size_t regions, std::size_t zones) {
  require_dim(static_cast<std::size_t>(x.size()), regions * zones, "plan_decode");
  Plan plan;
  plan.zone.resize(regions);
  for (std::size_t l = 0; l < regions; ++l) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < zones; ++j) {
      if (x[static_cast<Eigen::Index>(l * zones + j)] > x[static_cast<Eigen::Index>(l * zones + best)]) best = j;
    }
    plan.zone[l] = best;
  }
  return plan;
}

const char* violation_name(PlanViolation v) {
  switch (v) {
    case PlanViolation::none: return "none";
    case PlanViolation::primal: return "primal";
    case PlanViolation::empty_zone: return "empty zone";
    case PlanViolation::contiguity: return "contiguity";
  }
  return "unknown";
}

std::vector<std::vector<std::size_t>> zone_members(const Plan& plan, std::size_t zones) {
  std::vector<std::vector<std::size_t>> out(zones);
  for (std::size_t l = 0; l < plan.zone.size(); ++l) {
    if (plan.zone[l] < zones) out[plan.zone[l]].push_back(l);
  }
  return out;
}

PlanViolation check_plan(const DistrictingInstance& inst, const Plan& plan) {
  if (plan.zone.size() != inst.regions) return PlanViolation::primal;
  for (auto z : plan.zone) {
    if (z >= inst.zones) return PlanViolation::primal;
  }
  const auto members = zone_members(plan, inst.zones);
  for (const auto& m : members) {
    if (m.empty()) return PlanViolation::empty_zone;
  }
  std::vector<char> seen(inst.regions, 0);
  for (std::size_t j = 0; j < inst.zones; ++j) {
    const auto& m = members[j];
    std::vector<std::size_t> stack{m.front()};
    seen[m.front()] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      for (auto b : inst.neighbors[a]) {
        if (!seen[b] && plan.zone[b] == j) {
          seen[b] = 1;
          ++reached;
          stack.push_back(b);
        }
      }
    }
    if (reached != m.size()) return PlanViolation::contiguity;
  }
  return PlanViolation::none;
}

bool feasibility_oracle(const DistrictingInstance& inst, const Plan& plan) {
  return check_plan(inst, plan) == PlanViolation::none;
}

namespace {

/// Transition structure of one zone's hypercube chain.
struct HypercubeChain {
  std::size_t n = 0;
  std::size_t states = 0;
  double total_arrival = 0.0;
  double mu = 1.0;
  // dispatch_rate[s * n + p]: arrival rate of calls dispatched to unit p in state s
  std::vector<double> dispatch_rate;
  // travel_rate[s]: sum over origins of lambda_l * travel of the dispatched unit
  std::vector<double> travel_rate;
};

HypercubeChain build_chain(const DistrictingInstance& inst, std::span<const std::size_t> members) {
  HypercubeChain c;
  c.n = members.size();
  if (c.n > kMaxZoneSize) {
    throw Error(Errc::ZoneTooLarge, "zone of " + std::to_string(c.n) + " regions exceeds " +
                                        std::to_string(kMaxZoneSize));
  }
  c.states = std::size_t{1} << c.n;
  c.mu = inst.service_rate;
  const auto T = [&](std::size_t u, std::size_t l) {
    return inst.travel(static_cast<Eigen::Index>(members[u]), static_cast<Eigen::Index>(members[l]));
  };
  // preference[k]: unit positions ordered by travel time to origin k, ties by region index
  std::vector<std::vector<std::size_t>> preference(c.n);
  for (std::size_t k = 0; k < c.n; ++k) {
    auto& pref = preference[k];
    pref.resize(c.n);
    std::iota(pref.begin(), pref.end(), std::size_t{0});
    std::stable_sort(pref.begin(), pref.end(), [&](std::size_t a, std::size_t b) {
      const double ta = T(a, k), tb = T(b, k);
      if (ta != tb) return ta < tb;
      return members[a] < members[b];
    });
    c.total_arrival += inst.arrival[members[k]];
  }
  c.dispatch_rate.assign(c.states * c.n, 0.0);
  c.travel_rate.assign(c.states, 0.0);
  for (std::size_t s = 0; s + 1 < c.states; ++s) {
    for (std::size_t k = 0; k < c.n; ++k) {
      const double lam = inst.arrival[members[k]];
      if (lam == 0.0) continue;
      for (std::size_t p : preference[k]) {
        if (!((s >> p) & 1U)) {
          c.dispatch_rate[s * c.n + p] += lam;
          c.travel_rate[s] += lam * T(p, k);
          break;
        }
      }
    }
  }
  return c;
}

Vector solve_dense(const HypercubeChain& c) {
  const auto N = static_cast<Eigen::Index>(c.states);
  Matrix a = Matrix::Zero(N, N);  // transpose of the generator
  for (std::size_t s = 0; s < c.states; ++s) {
    const auto from = static_cast<Eigen::Index>(s);
    for (std::size_t p = 0; p < c.n; ++p) {
      const std::size_t bit = std::size_t{1} << p;
      if (s & bit) {
        a(static_cast<Eigen::Index>(s ^ bit), from) += c.mu;
        a(from, from) -= c.mu;
      } else {
        const double r = c.dispatch_rate[s * c.n + p];
        if (r != 0.0) {
          a(static_cast<Eigen::Index>(s | bit), from) += r;
          a(from, from) -= r;
        }
      }
    }
  }
  a.row(N - 1).setOnes();
  Vector b = Vector::Zero(N);
  b[N - 1] = 1.0;
  Eigen::FullPivLU<Matrix> lu(a);
  if (lu.rank() < N) throw Error(Errc::SingularBalance, "balance equations are rank deficient");
  Vector pi = lu.solve(b);
  if (!pi.allFinite() || (a * pi - b).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(Errc::SingularBalance, "balance solve did not converge");
  }
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

Vector solve_gauss_seidel(const HypercubeChain& c) {
  const std::size_t N = c.states;
  const std::size_t full = N - 1;
  // Start from the Erlang-loss level distribution spread evenly within levels.
  std::vector<double> level(c.n + 1);
  {
    const double a = c.total_arrival / c.mu;
    double term = 1.0, sum = 0.0;
    for (std::size_t k = 0; k <= c.n; ++k) {
      if (k > 0) term *= a / static_cast<double>(k);
      level[k] = term;
      sum += term;
    }
    for (std::size_t k = 0; k <= c.n; ++k) {
      double binom = 1.0;
      for (std::size_t i = 0; i < k; ++i) binom = binom * static_cast<double>(c.n - i) / static_cast<double>(i + 1);
      level[k] /= sum * binom;
    }
  }
  Vector pi(static_cast<Eigen::Index>(N));
  for (std::size_t s = 0; s < N; ++s) pi[static_cast<Eigen::Index>(s)] = level[std::popcount(s)];

  constexpr std::size_t kMaxSweeps = 200000;
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t s = 0; s < N; ++s) {
      double in = 0.0;
      for (std::size_t p = 0; p < c.n; ++p) {
        const std::size_t bit = std::size_t{1} << p;
        if (s & bit) {
          const std::size_t prev = s ^ bit;
          in += pi[static_cast<Eigen::Index>(prev)] * c.dispatch_rate[prev * c.n + p];
        } else {
          in += pi[static_cast<Eigen::Index>(s | bit)] * c.mu;
        }
      }
      const double out = (s != full ? c.total_arrival : 0.0) +
                         static_cast<double>(std::popcount(s)) * c.mu;
      const double next = in / out;
      change += std::abs(next - pi[static_cast<Eigen::Index>(s)]);
      pi[static_cast<Eigen::Index>(s)] = next;
    }
    const double total = pi.sum();
    if (!std::isfinite(total) || total <= 0.0) {
      throw Error(Errc::SingularBalance, "iterative balance solve diverged");
    }
    pi /= total;
    if (change <= 1e-14 * total) return pi;
  }
  throw Error(Errc::SingularBalance, "iterative balance solve did not converge");
}

Vector steady_state(const HypercubeChain& c, BalanceSolver solver) {
  if (c.total_arrival == 0.0) {
    Vector pi = Vector::Zero(static_cast<Eigen::Index>(c.states));
    pi[0] = 1.0;
    return pi;
  }
  if (solver == BalanceSolver::automatic) {
    solver = c.n <= 8 ? BalanceSolver::dense : BalanceSolver::iterative;
  }
  return solver == BalanceSolver::dense ? solve_dense(c) : solve_gauss_seidel(c);
}

}  // namespace

Vector hypercube_steady_state(const DistrictingInstance& inst, std::span<const std::size_t> members,
                              BalanceSolver solver) {
  return steady_state(build_chain(inst, members), solver);
}

ZoneEvaluation zone_workload(const DistrictingInstance& inst, std::span<const std::size_t> members,
                             BalanceSolver solver) {
  const HypercubeChain chain = build_chain(inst, members);
  const Vector pi = steady_state(chain, solver);
  ZoneEvaluation z;
  z.members.assign(members.begin(), members.end());
  z.arrival = chain.total_arrival;
  z.loss_probability = pi[static_cast<Eigen::Index>(chain.states - 1)];
  double travel = 0.0;
  for (std::size_t s = 0; s + 1 < chain.states; ++s) travel += pi[static_cast<Eigen::Index>(s)] * chain.travel_rate[s];
  const double served = z.arrival * (1.0 - z.loss_probability);
  z.mean_travel = served > 0.0 ? travel / served : 0.0;
  z.workload = (z.mean_travel + 1.0 / inst.service_rate) * z.arrival;
  return z;
}

PlanEvaluation evaluate_plan(const DistrictingInstance& inst, const Plan& plan, Exec exec) {
  if (plan.zone.size() != inst.regions) throw Error(Errc::DimensionMismatch, "evaluate_plan: plan size");
  const auto members = zone_members(plan, inst.zones);
  for (std::size_t j = 0; j < inst.zones; ++j) {
    if (members[j].empty()) throw Error(Errc::InfeasiblePlan, "zone " + std::to_string(j) + " is empty");
  }
  PlanEvaluation out;
  out.zones.resize(inst.zones);
  std::vector<std::exception_ptr> errors(inst.zones);
  const auto J = static_cast<std::ptrdiff_t>(inst.zones);
  auto run = [&](std::ptrdiff_t j) {
    try {
      out.zones[j] = zone_workload(inst, members[j]);
      out.zones[j].zone = static_cast<std::size_t>(j);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < J; ++j) run(j);
  } else {
    for (std::ptrdiff_t j = 0; j < J; ++j) run(j);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  double mean = 0.0;
  for (const auto& z : out.zones) mean += z.workload;
  mean /= static_cast<double>(inst.zones);
  double var = 0.0;
  for (const auto& z : out.zones) var += (z.workload - mean) * (z.workload - mean);
  out.variance = var / static_cast<double>(inst.zones);
  return out;
}

double workload_variance(const DistrictingInstance& inst, const Plan& plan, Exec exec) {
  return evaluate_plan(inst, plan, exec).variance;
}

bool random_border_move(const DistrictingInstance& inst, Plan& plan, RngStream& rng) {
  std::vector<std::size_t> border;
  for (std::size_t l = 0; l < inst.regions; ++l) {
    for (auto b : inst.neighbors[l]) {
      if (plan.zone[b] != plan.zone[l]) {
        border.push_back(l);
        break;
      }
    }
  }
  if (border.empty()) return false;
  const std::size_t l = border[rng.below(border.size())];
  std::vector<std::size_t> targets;
  for (auto b : inst.neighbors[l]) {
    if (plan.zone[b] != plan.zone[l]) targets.push_back(plan.zone[b]);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  plan.zone[l] = targets[rng.below(targets.size())];
  return true;
}

Dataset generate_labeled_plans(const DistrictingInstance& inst, const Plan& base, std::size_t n,
                               std::uint64_t seed, std::size_t radius) {
  if (!feasibility_oracle(inst, base)) throw Error(Errc::InfeasibleBase, "base plan is infeasible");
  const RngStream root = RngStream(RngSeed{seed}).derive("labeled-plans");
  Dataset out;
  out.dim = inst.regions * inst.zones;
  out.items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Plan p = base;
    if (radius > 0) {
      auto rng = root.derive(i);
      const std::size_t k = 1 + rng.below(radius);
      for (std::size_t m = 0; m < k; ++m) random_border_move(inst, p, rng);
    }
    out.items.push_back({plan_encode(p, inst.zones), feasibility_oracle(inst, p)});
  }
  return out;
}

DistrictingInstance grid_instance(std::size_t width, std::size_t height, std::size_t zones,
                                  std::uint64_t seed) {
  if (width * height < zones || zones == 0) throw Error(Errc::InvalidConfig, "grid too small for zone count");
  DistrictingInstance inst;
  inst.regions = width * height;
  inst.zones = zones;
  inst.neighbors.resize(inst.regions);
  inst.travel.resize(static_cast<Eigen::Index>(inst.regions), static_cast<Eigen::Index>(inst.regions));
  auto id = [width](std::size_t r, std::size_t c) { return r * width + c; };
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      auto& nb = inst.neighbors[id(r, c)];
      if (r > 0) nb.push_back(id(r - 1, c));
      if (c > 0) nb.push_back(id(r, c - 1));
      if (c + 1 < width) nb.push_back(id(r, c + 1));
      if (r + 1 < height) nb.push_back(id(r + 1, c));
      inst.coords.push_back({static_cast<double>(c) + 0.5, static_cast<double>(r) + 0.5});
    }
  }
  for (std::size_t a = 0; a < inst.regions; ++a) {
    for (std::size_t b = 0; b < inst.regions; ++b) {
      const double dr = std::abs(static_cast<double>(a / width) - static_cast<double>(b / width));
      const double dc = std::abs(static_cast<double>(a % width) - static_cast<double>(b % width));
      inst.travel(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = dr + dc;
    }
  }
  auto rng = RngStream(RngSeed{seed}).derive("arrival");
  for (std::size_t a = 0; a < inst.regions; ++a) inst.arrival.push_back(rng.uniform());
  inst.service_rate = 1.0;
  for (std::size_t a = 0; a < inst.regions; ++a) inst.base_plan.push_back(a * zones / inst.regions);
  inst.validate();
  return inst;
}

DistrictingInstance atlanta_like_instance(std::size_t regions, std::size_t zones, std::uint64_t seed) {
  if (regions < zones || zones == 0) throw Error(Errc::InvalidConfig, "fewer regions than zones");
  const RngStream root(RngSeed{seed});
  auto pts_rng = root.derive("points");
  DistrictingInstance inst;
  inst.regions = regions;
  inst.zones = zones;
  for (std::size_t i = 0; i < regions; ++i) inst.coords.push_back({pts_rng.uniform(), pts_rng.uniform()});
  auto d2 = [&](std::size_t a, std::size_t b) {
    const double dx = inst.coords[a][0] - inst.coords[b][0];
    const double dy = inst.coords[a][1] - inst.coords[b][1];
    return dx * dx + dy * dy;
  };
  inst.neighbors.resize(regions);
  for (std::size_t a = 0; a < regions; ++a) {
    for (std::size_t b = a + 1; b < regions; ++b) {
      const double ab = d2(a, b);
      bool gabriel = true;
      for (std::size_t k = 0; k < regions && gabriel; ++k) {
        if (k != a && k != b && d2(a, k) + d2(b, k) < ab) gabriel = false;
      }
      if (gabriel) {
        inst.neighbors[a].push_back(b);
        inst.neighbors[b].push_back(a);
      }
    }
  }
  for (auto& n : inst.neighbors) std::sort(n.begin(), n.end());
  inst.travel.resize(static_cast<Eigen::Index>(regions), static_cast<Eigen::Index>(regions));
  for (std::size_t a = 0; a < regions; ++a) {
    for (std::size_t b = 0; b < regions; ++b) {
      inst.travel(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = std::sqrt(d2(a, b));
    }
  }
  auto lam_rng = root.derive("arrival");
  double total = 0.0;
  for (std::size_t a = 0; a < regions; ++a) {
    inst.arrival.push_back(std::exp(0.75 * lam_rng.normal()));
    total += inst.arrival.back();
  }
  inst.service_rate = total / (0.4 * static_cast<double>(regions));

  // Base plan: farthest-point seeds, then grow the smallest zone that can grow.
  std::vector<std::size_t> seeds{root.derive("seed").below(regions)};
  while (seeds.size() < zones) {
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t a = 0; a < regions; ++a) {
      double nearest = std::numeric_limits<double>::infinity();
      for (auto s : seeds) nearest = std::min(nearest, d2(a, s));
      if (nearest > far_d) {
        far_d = nearest;
        far = a;
      }
    }
    seeds.push_back(far);
  }
  constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
  inst.base_plan.assign(regions, kUnassigned);
  std::vector<std::size_t> size(zones, 1);
  for (std::size_t j = 0; j < zones; ++j) inst.base_plan[seeds[j]] = j;
  std::size_t assigned = zones;
  while (assigned < regions) {
    std::size_t best_zone = kUnassigned, best_region = kUnassigned;
    double best_d = 0.0;
    for (std::size_t j = 0; j < zones; ++j) {
      if (best_zone != kUnassigned && size[j] >= size[best_zone]) continue;
      std::size_t cand = kUnassigned;
      double cand_d = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < regions; ++a) {
        if (inst.base_plan[a] != j) continue;
        for (auto b : inst.neighbors[a]) {
          if (inst.base_plan[b] == kUnassigned && d2(b, seeds[j]) < cand_d) {
            cand = b;
            cand_d = d2(b, seeds[j]);
          }
        }
      }
      if (cand != kUnassigned) {
        best_zone = j;
        best_region = cand;
        best_d = cand_d;
      }
    }
    (void)best_d;
    inst.base_plan[best_region] = best_zone;
    ++size[best_zone];
    ++assigned;
  }
  inst.validate();
  return inst;
}

std::string instance_to_json(const DistrictingInstance& inst) {
  nlohmann::json doc;
  doc["L"] = inst.regions;
  doc["J"] = inst.zones;
  doc["mu"] = inst.service_rate;
  doc["lambda"] = inst.arrival;
  auto edges = nlohmann::json::array();
  for (std::size_t a = 0; a < inst.regions; ++a) {
    for (auto b : inst.neighbors[a]) {
      if (a < b) edges.push_back({a, b});
    }
  }
  doc["adjacency"] = std::move(edges);
  auto travel = nlohmann::json::array();
  for (Eigen::Index a = 0; a < inst.travel.rows(); ++a) {
    std::vector<double> row(static_cast<std::size_t>(inst.travel.cols()));
    for (Eigen::Index b = 0; b < inst.travel.cols(); ++b) row[static_cast<std::size_t>(b)] = inst.travel(a, b);
    travel.push_back(std::move(row));
  }
  doc["travel"] = std::move(travel);
  doc["base_plan"] = inst.base_plan;
  if (!inst.coords.empty()) doc["coords"] = inst.coords;
  return doc.dump();
}

DistrictingInstance instance_from_json(const std::string& text) {
  DistrictingInstance inst;
  try {
    const auto doc = nlohmann::json::parse(text);
    inst.regions = doc.at("L").get<std::size_t>();
    inst.zones = doc.at("J").get<std::size_t>();
    inst.service_rate = doc.at("mu").get<double>();
    inst.arrival = doc.at("lambda").get<std::vector<double>>();
    inst.neighbors.resize(inst.regions);
    for (const auto& e : doc.at("adjacency")) {
      const auto a = e.at(0).get<std::size_t>(), b = e.at(1).get<std::size_t>();
      if (a >= inst.regions || b >= inst.regions) throw Error(Errc::InvalidConfig, "instance: edge out of range");
      inst.neighbors[a].push_back(b);
      inst.neighbors[b].push_back(a);
    }
    for (auto& n : inst.neighbors) {
      std::sort(n.begin(), n.end());
      n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    const auto rows = doc.at("travel").get<std::vector<std::vector<double>>>();
    inst.travel.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (rows[a].size() != static_cast<std::size_t>(inst.travel.cols())) {
        throw Error(Errc::InvalidConfig, "instance: ragged travel matrix");
      }
      for (std::size_t b = 0; b < rows[a].size(); ++b) {
        inst.travel(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = rows[a][b];
      }
    }
    if (doc.contains("base_plan")) inst.base_plan = doc.at("base_plan").get<std::vector<std::size_t>>();
    if (doc.contains("coords")) inst.coords = doc.at("coords").get<std::vector<std::array<double, 2>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("instance: ") + e.what());
  }
  inst.validate();
  return inst;
}

void save_instance(const std::filesystem::path& path, const DistrictingInstance& inst) {
  write_file(path, instance_to_json(inst) + "\n");
}

DistrictingInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_file(path));
}

Plan load_plan(const std::filesystem::path& path) {
  try {
    const auto doc = nlohmann::json::parse(read_file(path));
    const auto& arr = doc.is_array() ? doc : doc.at("assignment");
    Plan p;
    for (const auto& v : arr) {
      const auto z = v.get<long long>();
      // Negative indices cannot be represented; map them past any zone count so
      // the primal check rejects them.
      p.zone.push_back(z < 0 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(z));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("plan: ") + e.what());
  }
}

std::string plan_report_json(const Plan& plan, const PlanEvaluation& eval) {
  nlohmann::json doc;
  doc["assignment"] = plan.zone;
  std::vector<double> rho, tau, lam, loss;
  for (const auto& z : eval.zones) {
    rho.push_back(z.workload);
    tau.push_back(z.mean_travel);
    lam.push_back(z.arrival);
    loss.push_back(z.loss_probability);
  }
  doc["rho"] = rho;
  doc["tau"] = tau;
  doc["lambda"] = lam;
  doc["loss_probability"] = loss;
  doc["variance"] = eval.variance;
  return doc.dump(2);
}

Problem make_districting_problem(const DistrictingInstance& inst, std::size_t max_zone_size) {
  Problem p;
  p.name = "districting";
  p.dim = inst.regions * inst.zones;
  const auto shared = std::make_shared<const DistrictingInstance>(inst);
  const std::size_t L = inst.regions, J = inst.zones;
  p.objective = [shared, L, J](const Decision& x) {
    return workload_variance(*shared, plan_decode(x, L, J));
  };
  p.feasible = [shared, L, J, max_zone_size](const Decision& x) {
    const Plan plan = plan_decode(x, L, J);
    if (!feasibility_oracle(*shared, plan)) return false;
    for (const auto& m : zone_members(plan, J)) {
      if (m.size() > max_zone_size) return false;
    }
    return true;
  };
  p.canonicalize = [L, J](const Decision& x) { return plan_encode(plan_decode(x, L, J), J); };
  p.neighbor = [shared, L, J](const Decision& x, RngStream& rng) {
    Plan plan = plan_decode(x, L, J);
    random_border_move(*shared, plan, rng);
    return plan_encode(plan, J);
  };
  return p;
}

}  // namespace cagebo
