// Copyright 2026 The lyapcert Authors
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

// Runs the default escalation on the bundled two-variable systems and prints
// a result table.  Pass system files as arguments to run others.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lyapcert/lyapcert.hpp"

using namespace lyapcert;

int main(int argc, char** argv) {
  std::vector<std::string> files;
  for (int i = 1; i < argc; ++i) files.emplace_back(argv[i]);
  if (files.empty())
    for (const char* name : {"cubic_damping", "cubic_pair", "quintic_coupling"})
      files.push_back(std::string(LYAPCERT_DATA_DIR) + "/systems/" + name + ".ode");

  std::vector<ReportRow> rows;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "cannot open " << path << '\n';
      return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const SystemSpec spec = parse_system(ss.str());
    LyapunovQuery q = LyapunovQuery::with_defaults(spec.system, spec.region);
    q.time_limit_s = 30.0;
    LyapunovResult r = escalate(q);
    const std::string name = path.substr(path.find_last_of('/') + 1);
    std::cout << name << ":\n";
    for (const auto& d : r.diagnostics) std::cout << "  " << d << '\n';
    rows.push_back({name, std::move(r), spec});
  }
  std::cout << '\n' << emit_report(rows, ReportFormat::Text);
  return 0;
}
