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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "optimus/graph.hpp"
#include "optimus/scan.hpp"
#include "optimus/state.hpp"

namespace optimus {

enum class CheckClass { InSpec, OutOfSpec, BadData };
const char* to_string(CheckClass c);

/// Three-way check_data classification: the data matches the expectation,
/// the target parameter has shifted, or the data does not belong to the
/// expected curve family at all (a dependency is bad).
struct CheckDataOutcome {
  CheckClass classification = CheckClass::InSpec;
  std::map<std::string, double> figures_of_merit;
  std::optional<double> fitted_shift;  // absent for BadData
  std::string detail;
};

enum class CalVerdict { Success, OutOfTolerance, BadData };

struct CalibrationAnalysis {
  CalVerdict verdict = CalVerdict::Success;
  std::map<std::string, double> params;  // proposed parameter values
  std::map<std::string, double> figures_of_merit;
  std::string detail;
};

/// Looks up stored parameters starting from a node and walking its
/// dependency chain depth-first in declaration order. The nearest owner
/// wins, so a fine cal's own value shadows the coarse value it refined.
class ParamResolver {
 public:
  ParamResolver(const CalGraph& graph, const StateStore& store, NodeId node)
      : graph_(&graph), store_(&store), node_(std::move(node)) {}

  std::optional<double> own(const std::string& name) const;
  std::optional<double> find(const std::string& name) const;
  std::optional<double> find_from(const NodeId& start,
                                  const std::string& name) const;
  double require(const std::string& name) const;
  double require_from(const NodeId& start, const std::string& name) const;

  const NodeId& node_id() const { return node_; }
  const CalGraph& graph() const { return *graph_; }
  const StateStore& store() const { return *store_; }

 private:
  const CalGraph* graph_;
  const StateStore* store_;
  NodeId node_;
};

struct BehaviorContext {
  const NodeSpec& spec;
  ParamResolver params;
};

enum class ScanKind { CheckData, Calibrate };

struct RefitResult {
  double shift = 0.0;         // in the behavior's target-parameter units
  double residual_rms = 0.0;  // of the data against the best shifted model
};

/// A node behavior supplies everything cal-specific: how to turn a scan
/// template into resolved experiments, what the data should look like, how
/// to refit the target parameter, and how to analyze a full calibration.
/// Behaviors are stateless and safe to share across sessions.
class NodeBehavior {
 public:
  virtual ~NodeBehavior() = default;

  virtual std::string name() const = 0;

  /// The parameter whose presence makes check_data meaningful; without it
  /// there is no expectation to compare against and the node is out of
  /// spec by definition.
  virtual std::string primary_parameter() const = 0;

  /// Name of the figure of merit carrying the check_data shift and the
  /// calibrate uncertainty; must have an entry in the node's tolerances.
  virtual std::string shift_fom_name() const = 0;

  virtual bool ready_to_check(const BehaviorContext& ctx) const;

  /// Hook for graph-load validation of node specs bound to this behavior.
  virtual void validate_spec(const NodeSpec& spec) const;

  virtual ScanRequest build_scan(ScanKind kind,
                                 const BehaviorContext& ctx) const = 0;

  /// Predicted measured probabilities at the request's points given the
  /// currently stored parameters.
  virtual std::vector<double> expected_curve(const BehaviorContext& ctx,
                                             const ScanRequest& request) const = 0;

  /// Refit with only the target parameter free.
  virtual RefitResult refit_target(const BehaviorContext& ctx,
                                   const ScanRequest& request,
                                   const std::vector<double>& measured) const = 0;

  /// Defaults to classify_check_data().
  virtual CheckDataOutcome analyze_check(const BehaviorContext& ctx,
                                         const ScanRequest& request,
                                         const ScanData& data) const;

  virtual CalibrationAnalysis analyze_calibrate(const BehaviorContext& ctx,
                                                const ScanRequest& request,
                                                const ScanData& data) const = 0;
};

/// Expected binomial shot noise of the mean measured probability.
double shot_noise(const std::vector<double>& measured, int shots);

/// Shared three-case classifier: refit the target parameter; a residual
/// above 5x shot noise means the data is off-family (bad data); otherwise
/// the fitted shift against the node's tolerance separates in spec from
/// out of spec.
CheckDataOutcome classify_check_data(const BehaviorContext& ctx,
                                     const NodeBehavior& behavior,
                                     const ScanRequest& request,
                                     const ScanData& data);

using BehaviorRegistry =
    std::map<std::string, std::shared_ptr<const NodeBehavior>>;

/// The shipped behaviors: readout_threshold, spectroscopy, rabi_coarse,
/// rabi_fine, two_qubit_phase.
BehaviorRegistry default_behavior_registry();

/// Qubit label encoded in a node id ("rabi_fine.q0" -> "q0").
std::string qubit_label_of(const NodeId& id);

}  // namespace optimus
