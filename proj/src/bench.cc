// Copyright 2026 The matctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "matctl/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <thread>
#include <unordered_set>

#include "json.hpp"
#include "matctl/error.h"
#include "matctl/stats.h"

namespace matctl::bench {

std::vector<std::size_t> DefaultBatchSizes() {
  std::vector<std::size_t> sizes;
  std::size_t power = 1;
  for (int i = 0; i <= 4; ++i, power *= 10) {
    sizes.push_back(power);
    sizes.push_back(3 * power);
  }
  return sizes;
}

void ExperimentConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  if (total_entries == 0) fail("total_entries must be positive");
  if (batch_sizes.empty()) fail("at least one batch size is required");
  for (std::size_t b : batch_sizes) {
    if (b == 0) fail("batch sizes must be positive");
    if (b > total_entries) {
      fail("batch size " + std::to_string(b) + " exceeds total_entries " +
           std::to_string(total_entries));
    }
  }
  if (runs == 0) fail("runs must be positive");
  if (!(overall_significance > 0.0 && overall_significance < 1.0)) {
    fail("overall significance must lie in (0, 1)");
  }
  if (!(response_delay_ms >= 0.0)) fail("response delay must be non-negative");
}

std::vector<TableUpdate> GenerateWorkload(const TableSchema& table, std::size_t n,
                                          std::uint64_t seed) {
  if (n > table.capacity) {
    throw Error(ErrorCode::kInvalidArgument,
                "workload of " + std::to_string(n) + " exceeds capacity of '" +
                    table.name + "'");
  }
  if (table.actions.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "table '" + table.name + "' has no actions");
  }
  std::size_t key_bits = 0;
  for (const auto& f : table.key_fields) {
    if (f.match_kind != MatchKind::kExact) {
      throw Error(ErrorCode::kInvalidArgument,
                  "workload generation needs an exact-match table");
    }
    key_bits += f.bit_width;
  }
  if (key_bits < 64 && n > (std::uint64_t{1} << key_bits)) {
    throw Error(ErrorCode::kInvalidArgument, "key space too small for workload");
  }

  std::mt19937_64 rng(seed);
  auto draw = [&rng](std::uint32_t bits) {
    Bytes out((bits + 7) / 8, 0);
    std::uint64_t pool = 0;
    int left = 0;
    for (std::size_t i = out.size(); i-- > 0;) {
      if (left == 0) {
        pool = rng();
        left = 8;
      }
      out[i] = static_cast<std::uint8_t>(pool);
      pool >>= 8;
      --left;
    }
    const std::size_t excess = out.size() * 8 - bits;
    if (excess > 0) out[0] &= static_cast<std::uint8_t>(0xFFu >> excess);
    return out;
  };

  const ActionSpec& action = table.actions.front();
  std::vector<TableUpdate> updates;
  updates.reserve(n);
  std::unordered_set<std::string> seen;
  seen.reserve(n);
  while (updates.size() < n) {
    TableUpdate u;
    u.op = UpdateOp::kInsert;
    u.table_id = table.id;
    std::string id;
    for (const auto& f : table.key_fields) {
      Bytes v = draw(f.bit_width);
      id.append(v.begin(), v.end());
      u.key.fields.push_back(FieldMatch{f.id, MatchValue::Exact(std::move(v))});
    }
    if (!seen.insert(std::move(id)).second) continue;
    u.action_id = action.id;
    for (const auto& p : action.params) u.params.push_back(ActionParam{p.id, draw(p.bit_width)});
    updates.push_back(std::move(u));
  }
  return updates;
}

void ClearTable(Session& session, const TableSchema& table) {
  const auto entries = session.Read(table.name);
  if (entries.empty()) return;
  WriteBatch batch;
  batch.updates.reserve(entries.size());
  for (const auto& e : entries) {
    batch.updates.push_back(TableUpdate{UpdateOp::kDelete, table.id, e.key, 0, {}});
  }
  const TimedReport r = session.Write(batch);
  if (r.report.overall != Overall::kOk) {
    throw Error(ErrorCode::kRunFailed, "clearing '" + table.name + "' failed");
  }
}

double InsertionRate(std::size_t n, double cumulative_seconds) {
  if (cumulative_seconds == 0.0) {
    throw Error(ErrorCode::kDivideByZero, "insertion rate over zero duration");
  }
  if (!(cumulative_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "duration must be positive");
  }
  return static_cast<double>(n) / cumulative_seconds;
}

std::size_t RequestCount(std::size_t n, std::size_t batch_size) {
  if (batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch size must be positive");
  return (n + batch_size - 1) / batch_size;
}

double ResponseTime(std::size_t n, std::size_t batch_size, double cumulative_seconds) {
  if (cumulative_seconds == 0.0) {
    throw Error(ErrorCode::kDivideByZero, "response time over zero duration");
  }
  if (!(cumulative_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "duration must be positive");
  }
  const std::size_t requests = RequestCount(n, batch_size);
  if (requests == 0) throw Error(ErrorCode::kInvalidArgument, "no requests were sent");
  return cumulative_seconds / static_cast<double>(requests);
}

RunOutcome RunOnce(Session& session, const TableSchema& table,
                   std::span<const TableUpdate> workload, std::size_t batch_size) {
  RunOutcome out;
  if (workload.empty()) return out;
  out.reports = session.InsertAll(workload, batch_size);
  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    const WriteReport& r = out.reports[i].report;
    if (r.overall != Overall::kOk) {
      std::string detail;
      for (const auto& s : r.per_op) {
        if (!s.ok()) {
          detail = std::string(StatusCodeName(s.code)) + ": " + s.message;
          break;
        }
      }
      throw Error(ErrorCode::kRunFailed,
                  "request " + std::to_string(i) + " not acknowledged OK (" + detail + ")");
    }
  }
  const auto span = out.reports.back().response_received_at -
                    out.reports.front().request_created_at;
  out.cumulative_seconds = std::chrono::duration<double>(span).count();

  const std::size_t stored = session.Read(table.name).size();
  if (stored != workload.size()) {
    throw Error(ErrorCode::kRunFailed, "read back " + std::to_string(stored) +
                                           " entries, expected " +
                                           std::to_string(workload.size()));
  }
  return out;
}

namespace {

const TableSchema& SelectTable(const ProgramSchema& schema, const std::string& name) {
  if (!name.empty()) return TableByName(schema, name);
  for (const auto& t : schema.tables) {
    if (t.kind == TableKind::kMatchAction) return t;
  }
  throw Error(ErrorCode::kInvalidArgument, "schema has no match-action table");
}

std::optional<stats::ConfidenceInterval> MaybeInterval(const std::vector<double>& xs,
                                                       double alpha) {
  if (xs.size() < 2) return std::nullopt;
  return stats::ComputeConfidenceInterval(xs, alpha);
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& config, Session& session,
                               const ProgressFn& progress) {
  config.Validate();
  const TableSchema& table = SelectTable(session.schema(), config.table);
  const auto workload = GenerateWorkload(table, config.total_entries, config.rng_seed);

  ExperimentResult result;
  result.per_test_alpha =
      stats::BonferroniAlpha(config.overall_significance, config.batch_sizes.size());
  bool all_below = true;
  bool all_computable = true;

  // Runs are interleaved across batch sizes so slow host drift lands on every
  // size alike instead of on whichever size happened to be measured then.
  const std::size_t sizes = config.batch_sizes.size();
  std::vector<std::vector<double>> rates(sizes);
  std::vector<std::vector<double>> rts(sizes);
  for (std::size_t run = 0; run < config.runs; ++run) {
    for (std::size_t k = 0; k < sizes; ++k) {
      const std::size_t batch_size = config.batch_sizes[k];
      RunOutcome outcome;
      try {
        ClearTable(session, table);
        outcome = RunOnce(session, table, workload, batch_size);
      } catch (const Error& e) {
        throw Error(ErrorCode::kRunFailed, "batch size " + std::to_string(batch_size) +
                                               ", run " + std::to_string(run) + ": " +
                                               e.what());
      }
      RunSample sample;
      sample.batch_size = batch_size;
      sample.run = run;
      sample.cumulative_seconds = outcome.cumulative_seconds;
      sample.insertion_rate = InsertionRate(workload.size(), outcome.cumulative_seconds);
      sample.response_time_seconds =
          ResponseTime(workload.size(), batch_size, outcome.cumulative_seconds);
      rates[k].push_back(sample.insertion_rate);
      rts[k].push_back(sample.response_time_seconds);
      result.samples.push_back(sample);
      if (config.log_requests) {
        for (std::size_t i = 0; i < outcome.reports.size(); ++i) {
          result.requests.push_back(RequestSample{
              batch_size, run, i, outcome.reports[i].report.per_op.size(),
              std::chrono::duration<double>(outcome.reports[i].elapsed()).count()});
        }
      }
      if (progress) progress(batch_size, run, outcome.cumulative_seconds);
    }
  }
  ClearTable(session, table);

  for (std::size_t k = 0; k < sizes; ++k) {
    BenchRecord record;
    record.batch_size = config.batch_sizes[k];
    record.runs_used = rates[k].size();
    record.mean_insertion_rate = stats::Mean(rates[k]);
    record.mean_response_time = stats::Mean(rts[k]);
    if (auto ci = MaybeInterval(rates[k], result.per_test_alpha)) {
      record.ci_halfwidth_rate = ci->halfwidth;
      all_below = all_below && ci->halfwidth < 0.01 * ci->mean;
    } else {
      all_computable = false;
    }
    if (auto ci = MaybeInterval(rts[k], result.per_test_alpha)) {
      record.ci_halfwidth_rt = ci->halfwidth;
      all_below = all_below && ci->halfwidth < 0.01 * ci->mean;
    } else {
      all_computable = false;
    }
    result.records.push_back(record);
  }
  if (all_computable) result.halfwidths_below_1pct = all_below;
  return result;
}

namespace {

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Opt(const std::optional<double>& v) { return v ? Num(*v) : "NA"; }

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  return out;
}

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void WriteOutputs(const ExperimentConfig& config, const ExperimentResult& result,
                  const OutputInfo& info, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    auto out = OpenOut(out_dir / "runs.csv");
    out << "batch_size,run,cumulative_seconds,insertion_rate,response_time_seconds\n";
    for (const auto& s : result.samples) {
      out << s.batch_size << ',' << s.run << ',' << Num(s.cumulative_seconds) << ','
          << Num(s.insertion_rate) << ',' << Num(s.response_time_seconds) << '\n';
    }
  }
  {
    auto out = OpenOut(out_dir / "summary.csv");
    out << "batch_size,mean_rate,rate_ci_halfwidth,mean_rt,rt_ci_halfwidth,runs\n";
    for (const auto& r : result.records) {
      out << r.batch_size << ',' << Num(r.mean_insertion_rate) << ','
          << Opt(r.ci_halfwidth_rate) << ',' << Num(r.mean_response_time) << ','
          << Opt(r.ci_halfwidth_rt) << ',' << r.runs_used << '\n';
    }
  }
  {
    auto rate = OpenOut(out_dir / "plot_insertion_rate.dat");
    auto rt = OpenOut(out_dir / "plot_response_time.dat");
    rate << "# batch_size mean_entries_per_s ci_halfwidth\n";
    rt << "# batch_size mean_seconds_per_request ci_halfwidth\n";
    for (const auto& r : result.records) {
      rate << r.batch_size << ' ' << Num(r.mean_insertion_rate) << ' '
           << Opt(r.ci_halfwidth_rate) << '\n';
      rt << r.batch_size << ' ' << Num(r.mean_response_time) << ' '
         << Opt(r.ci_halfwidth_rt) << '\n';
    }
  }
  if (config.log_requests) {
    auto out = OpenOut(out_dir / "requests.csv");
    out << "batch_size,run,request,entries,elapsed_seconds\n";
    for (const auto& q : result.requests) {
      out << q.batch_size << ',' << q.run << ',' << q.request << ',' << q.entries << ','
          << Num(q.elapsed_seconds) << '\n';
    }
  }

  nlohmann::json meta;
  meta["config"] = {{"entries", config.total_entries},
                    {"batch_sizes", config.batch_sizes},
                    {"runs", config.runs},
                    {"overall_significance", config.overall_significance},
                    {"delay_ms", config.response_delay_ms},
                    {"seed", config.rng_seed},
                    {"table", config.table}};
  meta["statistics"] = {
      {"interval", "two-sided Student t"},
      {"correction", "bonferroni"},
      {"per_test_alpha", result.per_test_alpha},
      {"response_time_method", "cumulative_seconds / ceil(entries / batch_size)"}};
  if (result.halfwidths_below_1pct.has_value()) {
    meta["halfwidths_below_1pct_of_mean"] = *result.halfwidths_below_1pct;
  } else {
    meta["halfwidths_below_1pct_of_mean"] = "not computable (fewer than 2 runs)";
  }
  meta["environment"] = {{"endpoint", info.endpoint},
                         {"target_mode", info.target_mode},
                         {"schema", info.schema_path},
                         {"hardware_threads", std::thread::hardware_concurrency()},
                         {"compiler", __VERSION__},
                         {"written_utc", UtcNow()}};
  auto out = OpenOut(out_dir / "metadata.json");
  out << meta.dump(2) << '\n';
}

}  // namespace matctl::bench
