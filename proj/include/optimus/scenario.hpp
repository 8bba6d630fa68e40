// Copyright 2026 The Optimus Authors.
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

#pragma once

#include <iosfwd>
#include <string>

#include "optimus/session.hpp"

namespace optimus {

/// Scenario scripts are line-oriented, one step per line, '#' comments:
///
///   advance <seconds>
///   jump <param> <delta>                    e.g. jump q0.f_q_ghz 0.003
///   fault flatline_readout
///   fault corrupt_param <node> <param> <factor>
///   maintain <node>
///   assert <term> <op> <value>
///
/// Assert terms: experiments, calibrates[.<node>], check_datas[.<node>]
/// (all counted over the most recent maintain), clock, last_error,
/// status.<node>, check_state.<node>, cal_version.<node>.
struct ScenarioResult {
  int exit_code = 0;   // 0 ok, 1 parse error, 5 assert failure
  int failed_step = 0; // 1-based step index for exit code 5
  std::string message;
};

ScenarioResult run_scenario(std::istream& script, Session& session,
                            std::ostream& diagnostics);

}  // namespace optimus
