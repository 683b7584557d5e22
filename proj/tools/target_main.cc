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

// Serves a simulated match-action target over TCP.

#include <chrono>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "matctl/error.h"
#include "matctl/schema.h"
#include "matctl/server.h"
#include "matctl/target.h"

int main(int argc, char** argv) {
  CLI::App app{"Simulated match-action target"};
  std::string schema_path;
  std::string listen = "127.0.0.1:50052";
  double delay_ms = 0.0;
  app.add_option("--schema", schema_path, "Schema JSON document")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--listen", listen, "host:port to listen on")->capture_default_str();
  app.add_option("--response-delay-ms", delay_ms,
                 "Delay applied before every response, in milliseconds")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    matctl::ProgramSchema schema = matctl::LoadSchemaFile(schema_path);
    const auto delay = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::duration<double, std::milli>(delay_ms));
    auto state = std::make_shared<matctl::TargetState>(std::move(schema), delay);
    matctl::TargetServer server(state, listen);
    std::cout << "serving program '" << state->schema().program_name << "' ("
              << state->schema().tables.size() << " tables, digest 0x" << std::hex
              << state->schema().schema_digest << std::dec << ") on "
              << server.endpoint() << std::endl;
    server.Serve();
  } catch (const matctl::Error& e) {
    std::cerr << "matctl-target: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
