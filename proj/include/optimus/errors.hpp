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

#include <stdexcept>
#include <string>
#include <vector>

namespace optimus {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---- graph construction errors ----

class DuplicateNodeError : public Error {
 public:
  explicit DuplicateNodeError(const std::string& id)
      : Error("duplicate node id: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class UnknownDependencyError : public Error {
 public:
  UnknownDependencyError(const std::string& from, const std::string& to)
      : Error("node '" + from + "' depends on unknown node '" + to + "'"),
        from_(from),
        to_(to) {}
  const std::string& from() const { return from_; }
  const std::string& to() const { return to_; }

 private:
  std::string from_;
  std::string to_;
};

class CycleDetectedError : public Error {
 public:
  explicit CycleDetectedError(std::vector<std::string> cycle)
      : Error(format(cycle)), cycle_(std::move(cycle)) {}
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  static std::string format(const std::vector<std::string>& cycle) {
    std::string msg = "dependency cycle:";
    for (const auto& id : cycle) msg += " " + id;
    return msg;
  }
  std::vector<std::string> cycle_;
};

// ---- state store errors ----

class UnknownNodeError : public Error {
 public:
  explicit UnknownNodeError(const std::string& id)
      : Error("unknown node: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

/// Raised when a state transition is not allowed, e.g. a check_data pass
/// trying to clear a FailedUnresolved flag.
class IllegalTransitionError : public Error {
 public:
  IllegalTransitionError(const std::string& id, const std::string& why)
      : Error("illegal transition on '" + id + "': " + why) {}
};

class CorruptSnapshotError : public Error {
 public:
  CorruptSnapshotError(int line, const std::string& why)
      : Error("corrupt snapshot at line " + std::to_string(line) + ": " + why),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// ---- device errors ----

class UnknownQubitError : public Error {
 public:
  explicit UnknownQubitError(const std::string& label)
      : Error("unknown qubit: " + label) {}
};

class UnknownTargetError : public Error {
 public:
  explicit UnknownTargetError(const std::string& what)
      : Error("unknown fault target: " + what) {}
};

// ---- engine errors ----

class MissingParameterError : public Error {
 public:
  MissingParameterError(const std::string& node, const std::string& param)
      : Error("parameter '" + param + "' not available from node '" + node +
              "' or its dependencies"),
        node_(node),
        param_(param) {}
  const std::string& node() const { return node_; }
  const std::string& param() const { return param_; }

 private:
  std::string node_;
  std::string param_;
};

/// diagnose examined every dependency of a bad-data node and found all of
/// them in spec: the graph no longer explains the device's behavior.
class DiagnoseError : public Error {
 public:
  DiagnoseError(const std::string& node, std::vector<std::string> checked)
      : Error(format(node, checked)),
        node_(node),
        checked_dependencies_(std::move(checked)) {}
  const std::string& node() const { return node_; }
  const std::vector<std::string>& checked_dependencies() const {
    return checked_dependencies_;
  }

 private:
  static std::string format(const std::string& node,
                            const std::vector<std::string>& checked) {
    std::string msg = "diagnose on '" + node +
                      "' found no out-of-spec dependency (checked:";
    if (checked.empty()) msg += " none";
    for (const auto& id : checked) msg += " " + id;
    return msg + ")";
  }
  std::string node_;
  std::vector<std::string> checked_dependencies_;
};

/// Unwinds a maintain/diagnose run after a calibrate converged but landed
/// outside tolerance; the node is left marked FailedUnresolved.
class CalibrateFailedError : public Error {
 public:
  explicit CalibrateFailedError(const std::string& node)
      : Error("calibrate on '" + node + "' failed; node marked unresolved"),
        node_(node) {}
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

/// A calibration scan produced bad data. check_data gates calibrate, so this
/// indicates a protocol violation rather than a routine failure.
class BadDataInCalibrateError : public Error {
 public:
  explicit BadDataInCalibrateError(const std::string& node)
      : Error("calibrate on '" + node + "' saw bad data"), node_(node) {}
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

// ---- fitting errors ----

class FitDivergedError : public Error {
 public:
  explicit FitDivergedError(const std::string& why)
      : Error("fit diverged: " + why) {}
};

class FitPreconditionError : public Error {
 public:
  explicit FitPreconditionError(const std::string& why)
      : Error("fit precondition: " + why) {}
};

// ---- config errors ----

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& why) : Error(why) {}
};

}  // namespace optimus
