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

#ifndef MATCTL_TESTS_TESTING_FIXTURES_H_
#define MATCTL_TESTS_TESTING_FIXTURES_H_

#include <chrono>
#include <memory>
#include <string>

#include "matctl/schema.h"
#include "matctl/server.h"
#include "matctl/target.h"

namespace matctl::testing {

inline std::string TestdataPath(const std::string& name) {
  return std::string(MATCTL_TESTDATA_DIR) + "/" + name;
}

inline ProgramSchema FirewallSchema() {
  return LoadSchemaFile(TestdataPath("firewall.json"));
}

inline ProgramSchema RouterSchema() {
  return LoadSchemaFile(TestdataPath("router.json"));
}

// A target serving on an ephemeral loopback port for the lifetime of the
// object.
struct LoopbackTarget {
  explicit LoopbackTarget(ProgramSchema schema,
                          std::chrono::nanoseconds delay = {})
      : state(std::make_shared<TargetState>(std::move(schema), delay)),
        server(std::make_unique<TargetServer>(state, "127.0.0.1:0")) {
    server->Start();
  }
  ~LoopbackTarget() { server->Shutdown(); }

  std::string endpoint() const { return server->endpoint(); }

  std::shared_ptr<TargetState> state;
  std::unique_ptr<TargetServer> server;
};

}  // namespace matctl::testing

#endif  // MATCTL_TESTS_TESTING_FIXTURES_H_
