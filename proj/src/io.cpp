// Copyright 2026 The BankFair Authors
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

#include "bankfair/io.hpp"

#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

namespace bankfair {

namespace {

using Json = nlohmann::ordered_json;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_log(std::ostream& out, const SessionLog& log, const Dataset& dataset) {
  const auto& users = dataset.store.users();
  const auto& items = dataset.catalog.items();
  for (const auto& d : log.decisions) {
    Json row;
    row["t"] = d.t;
    row["interval"] = d.interval;
    row["user_id"] = users.id(d.user);
    Json ids = Json::array();
    for (Index i : d.items) ids.push_back(items.id(i));
    row["items"] = std::move(ids);
    row["ndcg"] = d.ndcg;
    row["z_prime"] = d.z_prime;
    row["objective"] = d.objective;
    out << row.dump() << '\n';
  }
  Json summary;
  summary["summary"] = true;
  summary["policy"] = std::string(to_string(log.policy));
  summary["decisions"] = log.decisions.size();
  summary["K"] = log.metrics.K;
  summary["lambda"] = log.config.lambda;
  summary["delta"] = log.config.delta;
  summary["ndcg_mean"] = log.metrics.ndcg_mean;
  summary["esp"] = log.metrics.esp;
  summary["gini"] = log.metrics.gini;
  summary["mmr"] = log.metrics.mmr;
  summary["var"] = log.metrics.var;
  out << summary.dump() << '\n';
}

void write_log(const std::filesystem::path& path, const SessionLog& log, const Dataset& dataset) {
  auto out = open_out(path);
  write_log(out, log, dataset);
}

std::vector<Decision> read_log(const std::filesystem::path& path, const Dataset& dataset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::vector<Decision> decisions;
  std::string line;
  std::size_t line_no = 0;
  bool summary_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (summary_seen) throw ParseError("content after the summary line", line_no);
    Json row;
    try {
      row = Json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw ParseError("malformed JSON", line_no);
    }
    if (!row.is_object()) throw ParseError("expected a JSON object", line_no);
    if (row.contains("summary")) {
      summary_seen = true;
      continue;
    }
    Decision d;
    try {
      d.t = row.at("t").get<Index>();
      d.interval = row.at("interval").get<Index>();
      const std::string user = row.at("user_id").get<std::string>();
      const auto u = dataset.store.users().find(user);
      if (!u) throw ValidationError("line " + std::to_string(line_no) + ": unknown user '" + user + "'");
      d.user = *u;
      for (const auto& item : row.at("items")) {
        const std::string id = item.get<std::string>();
        const auto i = dataset.catalog.items().find(id);
        if (!i) throw ValidationError("line " + std::to_string(line_no) + ": unknown item '" + id + "'");
        d.items.push_back(*i);
      }
      d.ndcg = row.value("ndcg", 0.0);
      d.z_prime = row.value("z_prime", 0.0);
      d.objective = row.value("objective", 0.0);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad decision record: ") + e.what(), line_no);
    }
    if (d.interval < 1) throw ParseError("interval must be >= 1", line_no);
    decisions.push_back(std::move(d));
  }
  if (!summary_seen) throw ParseError("log ends without a summary line", line_no + 1);
  if (decisions.empty()) throw ValidationError("log holds no decisions");
  return decisions;
}

void write_metrics(std::ostream& out, const MetricsSummary& m) {
  out << "metric,K,value\n";
  out << "NDCG," << m.K << ',' << format_double(m.ndcg_mean) << '\n';
  out << "ESP," << m.K << ',' << format_double(m.esp) << '\n';
  out << "Gini," << m.K << ',' << format_double(m.gini) << '\n';
  out << "MMR," << m.K << ',' << format_double(m.mmr) << '\n';
  out << "Var," << m.K << ',' << format_double(m.var) << '\n';
}

void write_metrics(const std::filesystem::path& path, const MetricsSummary& metrics) {
  auto out = open_out(path);
  write_metrics(out, metrics);
}

void write_plans(std::ostream& out, const std::vector<AllocationPlan>& plans,
                 const ProviderCatalog& catalog) {
  out << "provider_id,interval,demand,allocation,estate_before\n";
  for (const auto& plan : plans) {
    for (Index p = 0; p < plan.estate.size(); ++p) {
      out << catalog.providers().id(p) << ',' << plan.interval << ','
          << format_double(plan.demand(p, 0)) << ',' << format_double(plan.current_target[p]) << ','
          << format_double(plan.estate[p]) << '\n';
    }
  }
}

void write_duals(std::ostream& out, const std::vector<DualSample>& duals,
                 const ProviderCatalog& catalog) {
  out << "t,provider_id,mu\n";
  for (const auto& s : duals) {
    for (Index p = 0; p < s.mu.size(); ++p) {
      out << s.t << ',' << catalog.providers().id(p) << ',' << format_double(s.mu[p]) << '\n';
    }
  }
}

void write_frontier(std::ostream& out, const std::vector<FrontierRow>& rows) {
  out << "lambda,delta,ndcg_mean,esp,gini,mmr,var\n";
  for (const auto& r : rows) {
    out << format_double(r.lambda) << ',' << format_double(r.delta) << ','
        << format_double(r.metrics.ndcg_mean) << ',' << format_double(r.metrics.esp) << ','
        << format_double(r.metrics.gini) << ',' << format_double(r.metrics.mmr) << ','
        << format_double(r.metrics.var) << '\n';
  }
}

}  // namespace bankfair
