// Copyright 2026 The Authors.
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

#include "adsub/instances.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace adsub {

namespace {

constexpr int kWeightTableMaxElements = 16;

std::uint64_t pow_u64(std::uint64_t base, int exp) {
  std::uint64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

CoverageOracle::CoverageOracle(CoverageModel model) : model_(std::move(model)) {
  const int m = static_cast<int>(model_.element_weights.size());
  if (m < 0 || m > 62)
    throw std::invalid_argument("unsupported element count");
  for (double w : model_.element_weights)
    if (w < 0.0) throw std::invalid_argument("negative element weight");
  const std::uint64_t all = (m == 0) ? 0 : ((std::uint64_t{1} << m) - 1);
  for (std::uint64_t mask : model_.covers)
    if (mask & ~all)
      throw std::invalid_argument("coverage set refers to unknown elements");
  if (m <= kWeightTableMaxElements) {
    weight_table_.assign(std::size_t{1} << m, 0.0);
    for (std::uint64_t mask = 1; mask < weight_table_.size(); ++mask) {
      const int low = std::countr_zero(mask);
      weight_table_[mask] = weight_table_[mask & (mask - 1)] +
                            model_.element_weights[static_cast<std::size_t>(low)];
    }
  }
}

double CoverageOracle::weight_of(std::uint64_t element_mask) const {
  if (!weight_table_.empty()) return weight_table_[element_mask];
  double total = 0.0;
  while (element_mask) {
    const int low = std::countr_zero(element_mask);
    total += model_.element_weights[static_cast<std::size_t>(low)];
    element_mask &= element_mask - 1;
  }
  return total;
}

double CoverageOracle::value(std::uint64_t real_mask,
                             const Realization& phi) const {
  std::uint64_t covered = 0;
  std::uint64_t rest = real_mask;
  while (rest) {
    const int e = std::countr_zero(rest);
    rest &= rest - 1;
    if (phi.states[static_cast<std::size_t>(e)] == 1)
      covered |= model_.covers[static_cast<std::size_t>(e)];
  }
  return weight_of(covered);
}

std::optional<double> CoverageOracle::marginal_shortcut(
    ItemId e, const PartialRealization& psi, const Instance& inst) const {
  // Observed working items pin down the covered elements exactly, so the
  // marginal reduces to P(working | psi) times the weight still uncovered.
  std::uint64_t covered = 0;
  for (const Observation& ob : psi.observations())
    if (ob.state == 1) covered |= model_.covers[static_cast<std::size_t>(ob.item)];
  const double fresh = weight_of(model_.covers[static_cast<std::size_t>(e)] &
                                 ~covered);
  if (fresh == 0.0) return 0.0;
  const std::vector<double> dist = state_distribution(e, psi, inst);
  return dist[1] * fresh;
}

TableOracle::TableOracle(TableModel model, int num_items, int num_states)
    : model_(std::move(model)), num_items_(num_items), num_states_(num_states) {
  const std::size_t masks = std::size_t{1} << num_items_;
  const std::uint64_t codes = pow_u64(static_cast<std::uint64_t>(num_states_),
                                      num_items_);
  if (model_.values.size() != masks)
    throw std::invalid_argument("revenue table has wrong subset count");
  for (const auto& row : model_.values) {
    if (row.size() != codes)
      throw std::invalid_argument("revenue table has wrong realization count");
    for (double v : row)
      if (v < 0.0) throw std::invalid_argument("negative revenue entry");
  }
  for (double v : model_.values[0])
    if (v != 0.0)
      throw std::invalid_argument("revenue of the empty set must be 0");
}

std::uint64_t TableOracle::state_code(const Realization& phi) const {
  std::uint64_t code = 0;
  for (int e = 0; e < num_items_; ++e) {
    code = code * static_cast<std::uint64_t>(num_states_) +
           static_cast<std::uint64_t>(phi.states[static_cast<std::size_t>(e)]);
  }
  return code;
}

double TableOracle::value(std::uint64_t real_mask,
                          const Realization& phi) const {
  return model_.values[real_mask][state_code(phi)];
}

Instance make_coverage_instance(std::string name, CoverageModel model,
                                std::vector<double> working_probabilities,
                                std::vector<double> costs) {
  const std::size_t n = costs.size();
  if (model.covers.size() != n || working_probabilities.size() != n)
    throw std::invalid_argument("coverage instance dimensions disagree");
  std::vector<std::vector<double>> marginals;
  marginals.reserve(n);
  for (double p : working_probabilities) {
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("working probability outside [0, 1]");
    marginals.push_back({1.0 - p, p});
  }
  auto oracle = std::make_shared<CoverageOracle>(model);
  return Instance(std::move(name), 2, std::move(costs),
                  Prior(IndependentPrior{std::move(marginals)}),
                  RevenueModel{std::move(model)}, std::move(oracle));
}

Instance make_table_instance(std::string name, int num_states,
                             TableModel model, Prior prior,
                             std::vector<double> costs) {
  auto oracle = std::make_shared<TableOracle>(
      model, static_cast<int>(costs.size()), num_states);
  return Instance(std::move(name), num_states, std::move(costs),
                  std::move(prior), RevenueModel{std::move(model)},
                  std::move(oracle));
}

Instance demo2() {
  CoverageModel model;
  model.element_weights = {1.0, 1.0};
  model.covers = {0b01, 0b11};
  return make_coverage_instance("demo2", std::move(model), {0.5, 0.5},
                                {0.1, 0.4});
}

Instance gen_coverage(const CoverageGenParams& params, std::uint64_t seed) {
  if (params.n_items < 1 || params.n_elements < 1 || params.n_elements > 62)
    throw std::invalid_argument("bad coverage generator dimensions");
  std::mt19937_64 rng(mix64(seed, 0x9e3779b9));
  CoverageModel model;
  model.element_weights.reserve(static_cast<std::size_t>(params.n_elements));
  for (int u = 0; u < params.n_elements; ++u)
    model.element_weights.push_back(
        uniform_range(rng, params.weight_min, params.weight_max));
  model.covers.reserve(static_cast<std::size_t>(params.n_items));
  for (int e = 0; e < params.n_items; ++e) {
    std::uint64_t mask = 0;
    for (int u = 0; u < params.n_elements; ++u)
      if (uniform01(rng) < params.cover_density) mask |= std::uint64_t{1} << u;
    if (mask == 0)  // keep every item covering something
      mask = std::uint64_t{1} << uniform_index(rng, params.n_elements);
    model.covers.push_back(mask);
  }
  std::vector<double> probs, costs;
  for (int e = 0; e < params.n_items; ++e)
    probs.push_back(uniform_range(rng, params.prob_min, params.prob_max));
  for (int e = 0; e < params.n_items; ++e)
    costs.push_back(uniform_range(rng, params.cost_min, params.cost_max));
  std::ostringstream name;
  name << "coverage-n" << params.n_items << "-s" << seed;
  return make_coverage_instance(name.str(), std::move(model), std::move(probs),
                                std::move(costs));
}

namespace {

// One attempt at a random non-monotone table. Items carry per-state base
// values and pairwise non-positive interaction penalties; the base values are
// padded with half of the worst-case penalty mass so every table entry stays
// non-negative, which also makes the per-observation marginal of any item
// non-increasing as observations accumulate.
Instance random_penalty_table(const TableGenParams& params, std::uint64_t seed,
                              int attempt) {
  const int n = params.n_items;
  const int s = params.num_states;
  std::mt19937_64 rng(mix64(seed, static_cast<std::uint64_t>(attempt)));

  std::vector<std::vector<std::vector<std::vector<double>>>> penalty(
      static_cast<std::size_t>(n),
      std::vector<std::vector<std::vector<double>>>(
          static_cast<std::size_t>(n),
          std::vector<std::vector<double>>(
              static_cast<std::size_t>(s),
              std::vector<double>(static_cast<std::size_t>(s), 0.0))));
  for (int e = 0; e < n; ++e) {
    for (int f = e + 1; f < n; ++f) {
      if (uniform01(rng) > 0.85) continue;
      for (int oe = 0; oe < s; ++oe) {
        for (int of = 0; of < s; ++of) {
          const double j = -uniform_range(rng, 0.4, 1.0);
          penalty[static_cast<std::size_t>(e)][static_cast<std::size_t>(f)]
                 [static_cast<std::size_t>(oe)][static_cast<std::size_t>(of)] = j;
          penalty[static_cast<std::size_t>(f)][static_cast<std::size_t>(e)]
                 [static_cast<std::size_t>(of)][static_cast<std::size_t>(oe)] = j;
        }
      }
    }
  }

  std::vector<std::vector<double>> base(
      static_cast<std::size_t>(n),
      std::vector<double>(static_cast<std::size_t>(s), 0.0));
  for (int e = 0; e < n; ++e) {
    double worst = 0.0;
    for (int f = 0; f < n; ++f) {
      if (f == e) continue;
      double most = 0.0;
      for (int oe = 0; oe < s; ++oe)
        for (int of = 0; of < s; ++of)
          most = std::max(most,
                          -penalty[static_cast<std::size_t>(e)]
                                  [static_cast<std::size_t>(f)]
                                  [static_cast<std::size_t>(oe)]
                                  [static_cast<std::size_t>(of)]);
      worst += most;
    }
    for (int o = 0; o < s; ++o)
      base[static_cast<std::size_t>(e)][static_cast<std::size_t>(o)] =
          0.5 * worst + uniform_range(rng, 0.0, 0.25);
  }

  const std::uint64_t codes = pow_u64(static_cast<std::uint64_t>(s), n);
  TableModel model;
  model.values.assign(std::size_t{1} << n,
                      std::vector<double>(codes, 0.0));
  std::vector<StateValue> states(static_cast<std::size_t>(n), 0);
  for (std::uint64_t code = 0; code < codes; ++code) {
    std::uint64_t rest = code;
    for (int e = n - 1; e >= 0; --e) {
      states[static_cast<std::size_t>(e)] =
          static_cast<StateValue>(rest % static_cast<std::uint64_t>(s));
      rest /= static_cast<std::uint64_t>(s);
    }
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      double v = 0.0;
      for (int e = 0; e < n; ++e) {
        if (!(mask & item_bit(e))) continue;
        v += base[static_cast<std::size_t>(e)]
                 [static_cast<std::size_t>(states[static_cast<std::size_t>(e)])];
        for (int f = e + 1; f < n; ++f) {
          if (!(mask & item_bit(f))) continue;
          v += penalty[static_cast<std::size_t>(e)][static_cast<std::size_t>(f)]
                      [static_cast<std::size_t>(states[static_cast<std::size_t>(e)])]
                      [static_cast<std::size_t>(states[static_cast<std::size_t>(f)])];
        }
      }
      model.values[mask][code] = v;
    }
  }

  std::vector<std::vector<double>> marginals;
  for (int e = 0; e < n; ++e) {
    std::vector<double> row(static_cast<std::size_t>(s), 0.0);
    double total = 0.0;
    for (int o = 0; o < s; ++o) {
      row[static_cast<std::size_t>(o)] = uniform_range(rng, 0.3, 1.0);
      total += row[static_cast<std::size_t>(o)];
    }
    for (double& p : row) p /= total;
    marginals.push_back(std::move(row));
  }
  std::vector<double> costs;
  for (int e = 0; e < n; ++e) costs.push_back(uniform_range(rng, 0.0, 0.3));

  std::ostringstream name;
  name << "table-n" << n << "-s" << seed << "-a" << attempt;
  return make_table_instance(name.str(), s, std::move(model),
                             Prior(IndependentPrior{std::move(marginals)}),
                             std::move(costs));
}

}  // namespace

Instance gen_table_nonmonotone(const TableGenParams& params,
                               std::uint64_t seed) {
  if (params.n_items < 1 || params.n_items > 6 || params.num_states < 2)
    throw std::invalid_argument("bad table generator dimensions");
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    Instance candidate = random_penalty_table(params, seed, attempt);
    if (!check_adaptive_submodular(candidate).passed) continue;
    if (check_adaptive_monotone(candidate).passed) continue;
    return candidate;
  }
  throw GenerationError(
      "no non-monotone adaptive-submodular table found; shrink dimensions");
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double out = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw SchemaError("malformed numeric string: " + s);
  return out;
}

namespace {

nlohmann::ordered_json doubles_to_strings(const std::vector<double>& xs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (double x : xs) arr.push_back(format_double(x));
  return arr;
}

std::vector<double> strings_to_doubles(const nlohmann::json& arr,
                                       const std::string& field) {
  if (!arr.is_array()) throw SchemaError("field must be an array: " + field);
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_string())
      throw SchemaError("field must hold decimal strings: " + field);
    out.push_back(parse_double(v.get<std::string>()));
  }
  return out;
}

const nlohmann::json& require_field(const nlohmann::json& doc,
                                    const std::string& field) {
  if (!doc.contains(field))
    throw SchemaError("missing required field: " + field);
  return doc.at(field);
}

}  // namespace

nlohmann::ordered_json instance_to_json(const Instance& inst) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["name"] = inst.name();
  doc["n"] = inst.num_real_items();
  doc["state_space"] = inst.num_states();
  doc["dummy_count"] = inst.num_dummies();
  std::vector<double> costs;
  for (int e = 0; e < inst.num_real_items(); ++e) costs.push_back(inst.cost(e));
  doc["costs"] = doubles_to_strings(costs);

  nlohmann::ordered_json prior;
  if (inst.prior().is_independent()) {
    prior["kind"] = "independent";
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : inst.prior().marginals())
      rows.push_back(doubles_to_strings(row));
    prior["marginals"] = std::move(rows);
  } else {
    prior["kind"] = "explicit";
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const Realization& phi : inst.prior().support()) {
      nlohmann::ordered_json entry;
      entry["states"] = phi.states;
      entry["probability"] = format_double(phi.probability);
      entries.push_back(std::move(entry));
    }
    prior["support"] = std::move(entries);
  }
  doc["prior"] = std::move(prior);

  nlohmann::ordered_json revenue;
  if (const auto* cov = std::get_if<CoverageModel>(&inst.revenue_model())) {
    revenue["kind"] = "coverage";
    revenue["element_weights"] = doubles_to_strings(cov->element_weights);
    nlohmann::ordered_json covers = nlohmann::ordered_json::array();
    for (std::uint64_t mask : cov->covers) {
      nlohmann::ordered_json elems = nlohmann::ordered_json::array();
      for (int u = 0; u < 62; ++u)
        if (mask & (std::uint64_t{1} << u)) elems.push_back(u);
      covers.push_back(std::move(elems));
    }
    revenue["covers"] = std::move(covers);
  } else {
    const auto& table = std::get<TableModel>(inst.revenue_model());
    revenue["kind"] = "table";
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.values) rows.push_back(doubles_to_strings(row));
    revenue["values"] = std::move(rows);
  }
  doc["revenue"] = std::move(revenue);
  return doc;
}

Instance instance_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("instance document must be an object");
  const int version = require_field(doc, "schema_version").get<int>();
  if (version != 1) throw SchemaError("unsupported schema_version");
  const std::string name = require_field(doc, "name").get<std::string>();
  const int n = require_field(doc, "n").get<int>();
  const int num_states = require_field(doc, "state_space").get<int>();
  const int dummy_count = doc.value("dummy_count", 0);
  const std::vector<double> costs =
      strings_to_doubles(require_field(doc, "costs"), "costs");
  if (static_cast<int>(costs.size()) != n)
    throw SchemaError("field costs must list exactly n entries");

  const nlohmann::json& prior_doc = require_field(doc, "prior");
  const std::string prior_kind =
      require_field(prior_doc, "kind").get<std::string>();
  std::optional<Prior> prior;
  if (prior_kind == "independent") {
    std::vector<std::vector<double>> marginals;
    for (const auto& row : require_field(prior_doc, "marginals"))
      marginals.push_back(strings_to_doubles(row, "prior.marginals"));
    prior.emplace(IndependentPrior{std::move(marginals)});
  } else if (prior_kind == "explicit") {
    std::vector<Realization> support;
    for (const auto& entry : require_field(prior_doc, "support")) {
      Realization phi;
      phi.states = require_field(entry, "states").get<std::vector<StateValue>>();
      phi.probability = parse_double(
          require_field(entry, "probability").get<std::string>());
      support.push_back(std::move(phi));
    }
    prior.emplace(ExplicitPrior{std::move(support)});
  } else {
    throw SchemaError("unknown prior kind: " + prior_kind);
  }

  const nlohmann::json& revenue_doc = require_field(doc, "revenue");
  const std::string revenue_kind =
      require_field(revenue_doc, "kind").get<std::string>();
  Instance out = [&]() -> Instance {
    if (revenue_kind == "coverage") {
      CoverageModel model;
      model.element_weights = strings_to_doubles(
          require_field(revenue_doc, "element_weights"),
          "revenue.element_weights");
      for (const auto& elems : require_field(revenue_doc, "covers")) {
        std::uint64_t mask = 0;
        for (const auto& u : elems) mask |= std::uint64_t{1} << u.get<int>();
        model.covers.push_back(mask);
      }
      auto oracle = std::make_shared<CoverageOracle>(model);
      return Instance(name, num_states, costs, std::move(*prior),
                      RevenueModel{std::move(model)}, std::move(oracle));
    }
    if (revenue_kind == "table") {
      TableModel model;
      for (const auto& row : require_field(revenue_doc, "values"))
        model.values.push_back(strings_to_doubles(row, "revenue.values"));
      auto oracle = std::make_shared<TableOracle>(model, n, num_states);
      return Instance(name, num_states, costs, std::move(*prior),
                      RevenueModel{std::move(model)}, std::move(oracle));
    }
    throw SchemaError("unknown revenue kind: " + revenue_kind);
  }();
  if (dummy_count > 0) out = out.with_dummies(dummy_count);
  return out;
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << instance_to_json(inst).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw SchemaError(std::string("malformed instance file: ") + err.what());
  }
  try {
    return instance_from_json(doc);
  } catch (const nlohmann::json::exception& err) {
    throw SchemaError(std::string("malformed instance document: ") + err.what());
  }
}

bool instances_equal(const Instance& a, const Instance& b) {
  if (a.name() != b.name() || a.num_real_items() != b.num_real_items() ||
      a.num_dummies() != b.num_dummies() || a.num_states() != b.num_states())
    return false;
  for (int e = 0; e < a.num_real_items(); ++e)
    if (a.cost(e) != b.cost(e)) return false;
  if (a.prior().is_independent() != b.prior().is_independent()) return false;
  if (a.prior().is_independent()) {
    if (a.prior().marginals() != b.prior().marginals()) return false;
  } else {
    const auto& sa = a.prior().support();
    const auto& sb = b.prior().support();
    if (sa.size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i)
      if (!same_states(sa[i], sb[i]) ||
          sa[i].probability != sb[i].probability)
        return false;
  }
  if (a.revenue_model().index() != b.revenue_model().index()) return false;
  if (const auto* cov = std::get_if<CoverageModel>(&a.revenue_model())) {
    const auto& other = std::get<CoverageModel>(b.revenue_model());
    return cov->element_weights == other.element_weights &&
           cov->covers == other.covers;
  }
  return std::get<TableModel>(a.revenue_model()).values ==
         std::get<TableModel>(b.revenue_model()).values;
}

}  // namespace adsub
