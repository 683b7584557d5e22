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

// Insertion-rate / response-time benchmark against a target.

#include <chrono>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "matctl/bench.h"
#include "matctl/client.h"
#include "matctl/error.h"
#include "matctl/schema.h"
#include "matctl/server.h"
#include "matctl/target.h"

namespace {

std::string Optional(const std::optional<double>& v, double scale) {
  if (!v.has_value()) return "n/a";
  std::ostringstream out;
  out << std::setprecision(4) << *v * scale;
  return out.str();
}

int Run(const std::string& schema_path, const std::string& endpoint,
        matctl::bench::ExperimentConfig config, const std::string& out_dir) {
  matctl::ProgramSchema schema = matctl::LoadSchemaFile(schema_path);

  // Without --endpoint an in-process target on loopback carries the delay.
  std::unique_ptr<matctl::TargetServer> local;
  std::string connect_to = endpoint;
  if (endpoint.empty()) {
    const auto delay = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::duration<double, std::milli>(config.response_delay_ms));
    auto state = std::make_shared<matctl::TargetState>(schema, delay);
    local = std::make_unique<matctl::TargetServer>(state, "127.0.0.1:0");
    local->Start();
    connect_to = local->endpoint();
  }

  auto session = matctl::Session::Connect(connect_to, schema.program_name, "matctl-bench");
  if (session->schema().schema_digest != schema.schema_digest) {
    std::cerr << "matctl-bench: target schema differs from " << schema_path << std::endl;
    return 1;
  }

  std::cout << "batch_size  run  cumulative_s" << std::endl;
  auto result = matctl::bench::RunExperiment(
      config, *session, [](std::size_t batch, std::size_t run, double seconds) {
        std::cout << std::setw(10) << batch << std::setw(5) << run << "  " << seconds
                  << std::endl;
      });

  matctl::bench::WriteOutputs(
      config, result,
      {connect_to, local ? "in-process" : "external", schema_path}, out_dir);

  std::cout << "\n batch_size   rate[entries/s]  +-ci      rt[ms]     +-ci\n";
  for (const auto& r : result.records) {
    std::cout << std::setw(11) << r.batch_size << std::setw(17) << std::setprecision(6)
              << r.mean_insertion_rate << "  " << std::setw(8)
              << Optional(r.ci_halfwidth_rate, 1.0) << std::setw(11)
              << r.mean_response_time * 1e3 << "  " << std::setw(8)
              << Optional(r.ci_halfwidth_rt, 1e3) << '\n';
  }
  std::cout << "per-test alpha " << result.per_test_alpha << " (bonferroni)\n";
  if (result.halfwidths_below_1pct.has_value()) {
    std::cout << "all CI half-widths below 1% of mean: "
              << (*result.halfwidths_below_1pct ? "yes" : "no") << '\n';
  } else {
    std::cout << "CI half-widths not computable (runs < 2)\n";
  }
  std::cout << "wrote " << out_dir << std::endl;
  session->Close();
  if (local) local->Shutdown();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch insertion benchmark for match-action targets"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run the batch-size sweep");

  matctl::bench::ExperimentConfig config;
  std::string schema_path;
  std::string endpoint;
  std::string out_dir = "bench-out";
  run->add_option("--schema", schema_path, "Schema JSON document")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--endpoint", endpoint,
                  "Target host:port; omitted starts an in-process loopback target");
  run->add_option("--entries", config.total_entries, "Entries inserted per run")
      ->capture_default_str();
  run->add_option("--batch-sizes", config.batch_sizes, "Comma-separated batch sizes")
      ->delimiter(',');
  run->add_option("--runs", config.runs, "Runs per batch size")->capture_default_str();
  run->add_option("--significance", config.overall_significance,
                  "Overall significance level")
      ->capture_default_str();
  run->add_option("--delay-ms", config.response_delay_ms,
                  "Injected response delay (in-process target) or the delay the "
                  "external target was started with")
      ->capture_default_str();
  run->add_option("--seed", config.rng_seed, "Workload seed")->capture_default_str();
  run->add_option("--table", config.table, "Table to fill (default: first match-action table)");
  run->add_flag("--log-requests", config.log_requests, "Also write requests.csv");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    config.Validate();
    return Run(schema_path, endpoint, config, out_dir);
  } catch (const matctl::Error& e) {
    std::cerr << "matctl-bench: " << e.what() << std::endl;
    return 1;
  }
}
