#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbnet/execution.hpp"

namespace rbnet {

// Closed family of bounding functions, evaluated at the node count.
enum class BoundKind : uint8_t { Constant, Identity, Linear, FloorSqrt, FloorLog2 };

struct Bound {
  BoundKind kind = BoundKind::Identity;
  int64_t a = 0;
  int64_t b = 0;

  int64_t eval(int64_t n) const;
  // False exactly for Constant and Linear with a == 0.
  bool diverges() const;
  std::string to_string() const;

  // Grammar: identity | floor_sqrt | floor_log2 | const:K | linear:A,B
  static Bound parse(const std::string& text);
  static Bound constant(int64_t k) { return Bound{BoundKind::Constant, k, 0}; }
  static Bound identity() { return Bound{BoundKind::Identity, 0, 0}; }
  static Bound linear(int64_t a, int64_t b) { return Bound{BoundKind::Linear, a, b}; }
  static Bound floor_sqrt() { return Bound{BoundKind::FloorSqrt, 0, 0}; }
  static Bound floor_log2() { return Bound{BoundKind::FloorLog2, 0, 0}; }

  bool operator==(const Bound&) const = default;
};

enum class Regime : uint8_t {
  Unconstrained,
  KConstrained,
  StronglyKConstrained,
  KBalanced,
  KLocallyConstrained,
  FConstrained,
};

// A reconfiguration regime plus optional topology predicates checked on
// every configuration.
struct ConstraintPolicy {
  Regime regime = Regime::Unconstrained;
  int64_t k = 1;
  Bound f;
  std::optional<int32_t> degree_bound;
  std::optional<int32_t> path_bound;

  std::string regime_string() const;

  // Grammar: unconstrained | k=K | strong=K | local=K | balanced=K | f=<bound>
  static ConstraintPolicy parse(const std::string& text);
  static ConstraintPolicy unconstrained() { return {}; }
  static ConstraintPolicy k_constrained(int64_t k);
  static ConstraintPolicy strongly_k_constrained(int64_t k);
  static ConstraintPolicy k_balanced(int64_t k);
  static ConstraintPolicy k_locally_constrained(int64_t k);
  static ConstraintPolicy f_constrained(Bound f);
};

struct CheckEntry {
  std::string name;
  bool ok = true;
  // Step index of the first violation; for topology checks the index of the
  // violating configuration (0 = initial). -1 when ok.
  int64_t first_violation = -1;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  int64_t num_comm = 0;
  int64_t num_reconf_steps = 0;
  // Total number of edge changes across all reconfiguration steps.
  int64_t total_rewired = 0;
  std::vector<CheckEntry> checks;
};

// Replays e and reports pass/fail per active constraint. Replay failures
// (alternation, disabled steps) propagate as errors; constraint failures are
// report entries. An execution with no steps passes every regime.
ValidationReport validate_execution(const Protocol& protocol, const Execution& e,
                                    const ConstraintPolicy& policy);

struct PhaseInfo {
  // Potential indices over the truncated symbol tape; phases share
  // boundaries: phase i+1 begins where phase i ends.
  int64_t begin = 0;
  int64_t end = 0;
  bool nonneg = true;
  // Repeated atomic reconfigurations owned by this phase.
  int64_t kappa = 0;
};

struct PotentialInfo {
  // values[i] = potential after i steps: +k per communication, -size per
  // reconfiguration. Length |steps|+1.
  std::vector<int64_t> values;
  // Atomic symbol tape: 'B' per communication, one 'R' per rewired edge;
  // trivial reconfigurations contribute nothing.
  std::string tape;
  // Originating step index of each tape symbol.
  std::vector<int64_t> tape_step;
  // Phase decomposition of the tape potential with the final 'B' dropped.
  std::vector<PhaseInfo> phases;
  // Total count of atomic reconfigurations immediately preceded by another.
  int64_t kappa = 0;
};

// Requires e to start and end with a communication step (NotCommBounded
// otherwise, including for empty executions).
PotentialInfo potential_sequence(const Execution& e, int64_t k);

}  // namespace rbnet
