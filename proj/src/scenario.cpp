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

#include "optimus/scenario.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "optimus/errors.hpp"

namespace optimus {

namespace {

struct Term {
  bool numeric = true;
  double number = 0.0;
  std::string text;
};

// Splits "check_state.two_qubit_phase.q0q1" into the term name and the node
// id (node ids themselves contain dots, so only the first dot separates).
std::pair<std::string, std::string> split_term(const std::string& term) {
  auto dot = term.find('.');
  if (dot == std::string::npos) return {term, ""};
  return {term.substr(0, dot), term.substr(dot + 1)};
}

Term evaluate_term(Session& session, const std::string& term) {
  const auto [name, node] = split_term(term);
  Term out;
  if (name == "experiments" && node.empty()) {
    out.number = static_cast<double>(session.last_experiments());
  } else if (name == "calibrates") {
    out.number = static_cast<double>(session.last_calibrates(node));
  } else if (name == "check_datas") {
    out.number = static_cast<double>(session.last_check_datas(node));
  } else if (name == "clock" && node.empty()) {
    out.number = session.device().now();
  } else if (name == "cal_version") {
    out.number = static_cast<double>(session.store().cal_version(node));
  } else if (name == "last_error" && node.empty()) {
    out.numeric = false;
    out.text = session.last_error().empty() ? "none" : session.last_error();
  } else if (name == "status") {
    out.numeric = false;
    out.text = to_string(session.store().record(node).status);
  } else if (name == "check_state") {
    out.numeric = false;
    out.text = session.engine().check_state(node).passed ? "pass" : "fail";
  } else {
    throw ConfigError("unknown assert term '" + term + "'");
  }
  return out;
}

bool compare(const Term& lhs, const std::string& op, const std::string& rhs) {
  if (!lhs.numeric) {
    if (op == "==") return lhs.text == rhs;
    if (op == "!=") return lhs.text != rhs;
    throw ConfigError("operator '" + op + "' needs a numeric term");
  }
  double value = 0.0;
  try {
    value = std::stod(rhs);
  } catch (...) {
    throw ConfigError("expected a number, got '" + rhs + "'");
  }
  if (op == "==") return lhs.number == value;
  if (op == "!=") return lhs.number != value;
  if (op == "<") return lhs.number < value;
  if (op == "<=") return lhs.number <= value;
  if (op == ">") return lhs.number > value;
  if (op == ">=") return lhs.number >= value;
  throw ConfigError("unknown operator '" + op + "'");
}

}  // namespace

ScenarioResult run_scenario(std::istream& script, Session& session,
                            std::ostream& diagnostics) {
  ScenarioResult result;
  std::string line;
  int lineno = 0;
  int step = 0;
  while (std::getline(script, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tok;
    for (std::string w; words >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    ++step;

    try {
      if (tok[0] == "advance" && tok.size() == 2) {
        session.advance(std::stod(tok[1]));
      } else if (tok[0] == "jump" && tok.size() == 3) {
        session.jump(tok[1], std::stod(tok[2]));
      } else if (tok[0] == "fault" && tok.size() == 2 &&
                 tok[1] == "flatline_readout") {
        session.inject_fault({"flatline_readout", "", "", 1.0});
      } else if (tok[0] == "fault" && tok.size() == 5 &&
                 tok[1] == "corrupt_param") {
        session.inject_fault({"corrupt_param", tok[2], tok[3], std::stod(tok[4])});
      } else if (tok[0] == "maintain" && tok.size() == 2) {
        const SessionMaintainResult r = session.maintain(tok[1]);
        diagnostics << "maintain " << tok[1] << ": "
                    << (r.error_kind.empty()
                            ? (r.report.success ? "ok" : "failed")
                            : r.error_kind)
                    << " experiments=" << r.report.experiments_run << "\n";
      } else if (tok[0] == "assert" && tok.size() == 4) {
        const Term lhs = evaluate_term(session, tok[1]);
        if (!compare(lhs, tok[2], tok[3])) {
          result.exit_code = 5;
          result.failed_step = step;
          std::ostringstream msg;
          msg << "assert failed at step " << step << " (line " << lineno
              << "): " << tok[1] << " ";
          if (lhs.numeric)
            msg << "= " << lhs.number;
          else
            msg << "= " << lhs.text;
          msg << ", wanted " << tok[2] << " " << tok[3];
          result.message = msg.str();
          diagnostics << result.message << "\n";
          return result;
        }
      } else {
        result.exit_code = 1;
        result.failed_step = step;
        result.message = "parse error at line " + std::to_string(lineno) +
                         ": " + line;
        diagnostics << result.message << "\n";
        return result;
      }
    } catch (const std::invalid_argument&) {
      result.exit_code = 1;
      result.failed_step = step;
      result.message = "bad number at line " + std::to_string(lineno);
      diagnostics << result.message << "\n";
      return result;
    } catch (const ConfigError& e) {
      result.exit_code = 1;
      result.failed_step = step;
      result.message =
          "error at line " + std::to_string(lineno) + ": " + e.what();
      diagnostics << result.message << "\n";
      return result;
    }
  }
  return result;
}

}  // namespace optimus
