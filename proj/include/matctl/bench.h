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

#ifndef MATCTL_BENCH_H_
#define MATCTL_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matctl/client.h"
#include "matctl/schema.h"
#include "matctl/wire.h"

namespace matctl::bench {

// {a * 10^i | a in {1, 3}, i in 0..4}, ascending.
std::vector<std::size_t> DefaultBatchSizes();

struct ExperimentConfig {
  std::size_t total_entries = 30000;
  std::vector<std::size_t> batch_sizes = DefaultBatchSizes();
  std::size_t runs = 100;
  double overall_significance = 0.01;
  // 0 emulates a local controller, > 0 a remote one.
  double response_delay_ms = 0.0;
  std::uint64_t rng_seed = 1;
  // Empty selects the first match-action table of the schema.
  std::string table;
  // Also keep every per-request TimedReport (requests.csv).
  bool log_requests = false;

  // Throws Error(kInvalidArgument).
  void Validate() const;
};

struct BenchRecord {
  std::size_t batch_size = 0;
  double mean_insertion_rate = 0;  // entries/s
  double mean_response_time = 0;   // s/request
  // Unset when fewer than two runs make the interval undefined.
  std::optional<double> ci_halfwidth_rate;
  std::optional<double> ci_halfwidth_rt;
  std::size_t runs_used = 0;
};

struct RunSample {
  std::size_t batch_size = 0;
  std::size_t run = 0;
  double cumulative_seconds = 0;
  double insertion_rate = 0;
  double response_time_seconds = 0;
};

struct RequestSample {
  std::size_t batch_size = 0;
  std::size_t run = 0;
  std::size_t request = 0;
  std::size_t entries = 0;
  double elapsed_seconds = 0;
};

struct ExperimentResult {
  std::vector<BenchRecord> records;
  std::vector<RunSample> samples;
  std::vector<RequestSample> requests;
  double per_test_alpha = 0;
  // Whether every half-width is below 1% of its mean; unset if some interval
  // was not computable.
  std::optional<bool> halfwidths_below_1pct;
};

// n INSERT updates with pairwise distinct keys for a table whose key fields
// are all exact, using the table's first action. Deterministic for a seed.
// Throws Error(kInvalidArgument) if n exceeds capacity or the key space.
std::vector<TableUpdate> GenerateWorkload(const TableSchema& table, std::size_t n,
                                          std::uint64_t seed);

// Deletes every entry of the table in one batch.
void ClearTable(Session& session, const TableSchema& table);

struct RunOutcome {
  double cumulative_seconds = 0;
  std::vector<TimedReport> reports;
};

// Inserts workload in batches of batch_size into an empty table. Cumulative
// time spans the first request's creation to the last response. Throws
// Error(kRunFailed) on any non-OK status or if the read-back count differs.
RunOutcome RunOnce(Session& session, const TableSchema& table,
                   std::span<const TableUpdate> workload, std::size_t batch_size);

// n / cumulative_seconds. Throws Error(kDivideByZero) for a zero duration.
double InsertionRate(std::size_t n, double cumulative_seconds);

// cumulative_seconds / ceil(n / batch_size).
double ResponseTime(std::size_t n, std::size_t batch_size, double cumulative_seconds);

std::size_t RequestCount(std::size_t n, std::size_t batch_size);

using ProgressFn = std::function<void(std::size_t batch_size, std::size_t run,
                                      double cumulative_seconds)>;

// Full sweep: for every batch size, `runs` runs on a cleared table. Failures
// are rethrown as Error(kRunFailed) naming the batch size and run index.
ExperimentResult RunExperiment(const ExperimentConfig& config, Session& session,
                               const ProgressFn& progress = {});

struct OutputInfo {
  std::string endpoint;
  std::string target_mode;  // "in-process" or "external"
  std::string schema_path;
};

// Writes runs.csv, summary.csv, plot_insertion_rate.dat,
// plot_response_time.dat, metadata.json and, if logged, requests.csv.
void WriteOutputs(const ExperimentConfig& config, const ExperimentResult& result,
                  const OutputInfo& info, const std::filesystem::path& out_dir);

}  // namespace matctl::bench

#endif  // MATCTL_BENCH_H_
