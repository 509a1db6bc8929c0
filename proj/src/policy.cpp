#include "rbnet/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "rbnet/protocol.hpp"

namespace rbnet {

int64_t Bound::eval(int64_t n) const {
  if (n < 0) fail(ErrorCode::PreconditionViolated, "bound evaluated at negative n");
  switch (kind) {
    case BoundKind::Constant:
      return a;
    case BoundKind::Identity:
      return n;
    case BoundKind::Linear:
      return a * n + b;
    case BoundKind::FloorSqrt: {
      int64_t r = static_cast<int64_t>(std::sqrt(static_cast<double>(n)));
      while (r > 0 && r * r > n) --r;
      while ((r + 1) * (r + 1) <= n) ++r;
      return r;
    }
    case BoundKind::FloorLog2:
      if (n <= 1) return 0;
      return std::bit_width(static_cast<uint64_t>(n)) - 1;
  }
  fail(ErrorCode::InternalError, "unknown bound kind");
}

bool Bound::diverges() const {
  switch (kind) {
    case BoundKind::Constant:
      return false;
    case BoundKind::Linear:
      return a > 0;
    default:
      return true;
  }
}

std::string Bound::to_string() const {
  switch (kind) {
    case BoundKind::Constant:
      return "const:" + std::to_string(a);
    case BoundKind::Identity:
      return "identity";
    case BoundKind::Linear:
      return "linear:" + std::to_string(a) + "," + std::to_string(b);
    case BoundKind::FloorSqrt:
      return "floor_sqrt";
    case BoundKind::FloorLog2:
      return "floor_log2";
  }
  return "";
}

Bound Bound::parse(const std::string& text) {
  if (text == "identity") return identity();
  if (text == "floor_sqrt") return floor_sqrt();
  if (text == "floor_log2") return floor_log2();
  if (text.rfind("const:", 0) == 0) {
    try {
      return constant(std::stoll(text.substr(6)));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad constant bound '" + text + "'");
    }
  }
  if (text.rfind("linear:", 0) == 0) {
    auto body = text.substr(7);
    auto comma = body.find(',');
    if (comma == std::string::npos)
      fail(ErrorCode::ParseError, "linear bound needs 'linear:A,B', got '" + text + "'");
    try {
      return linear(std::stoll(body.substr(0, comma)), std::stoll(body.substr(comma + 1)));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad linear bound '" + text + "'");
    }
  }
  fail(ErrorCode::ParseError,
       "unknown bound '" + text +
           "' (expected identity | floor_sqrt | floor_log2 | const:K | linear:A,B)");
}

namespace {

ConstraintPolicy with_k(Regime regime, int64_t k) {
  if (k < 1) fail(ErrorCode::PreconditionViolated, "regime parameter k must be >= 1");
  ConstraintPolicy p;
  p.regime = regime;
  p.k = k;
  return p;
}

}  // namespace

ConstraintPolicy ConstraintPolicy::k_constrained(int64_t k) {
  return with_k(Regime::KConstrained, k);
}
ConstraintPolicy ConstraintPolicy::strongly_k_constrained(int64_t k) {
  return with_k(Regime::StronglyKConstrained, k);
}
ConstraintPolicy ConstraintPolicy::k_balanced(int64_t k) { return with_k(Regime::KBalanced, k); }
ConstraintPolicy ConstraintPolicy::k_locally_constrained(int64_t k) {
  return with_k(Regime::KLocallyConstrained, k);
}
ConstraintPolicy ConstraintPolicy::f_constrained(Bound f) {
  ConstraintPolicy p;
  p.regime = Regime::FConstrained;
  p.f = f;
  return p;
}

std::string ConstraintPolicy::regime_string() const {
  switch (regime) {
    case Regime::Unconstrained:
      return "unconstrained";
    case Regime::KConstrained:
      return "k=" + std::to_string(k);
    case Regime::StronglyKConstrained:
      return "strong=" + std::to_string(k);
    case Regime::KBalanced:
      return "balanced=" + std::to_string(k);
    case Regime::KLocallyConstrained:
      return "local=" + std::to_string(k);
    case Regime::FConstrained:
      return "f=" + f.to_string();
  }
  return "";
}

ConstraintPolicy ConstraintPolicy::parse(const std::string& text) {
  if (text == "unconstrained") return unconstrained();
  auto eq = text.find('=');
  if (eq != std::string::npos) {
    const std::string head = text.substr(0, eq);
    const std::string rest = text.substr(eq + 1);
    if (head == "f") return f_constrained(Bound::parse(rest));
    int64_t k = 0;
    try {
      k = std::stoll(rest);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad policy parameter in '" + text + "'");
    }
    if (head == "k") return k_constrained(k);
    if (head == "strong") return strongly_k_constrained(k);
    if (head == "local") return k_locally_constrained(k);
    if (head == "balanced") return k_balanced(k);
  }
  fail(ErrorCode::ParseError,
       "unknown policy '" + text +
           "' (expected unconstrained | k=K | strong=K | local=K | balanced=K | f=<bound>)");
}

namespace {

int64_t max_node_rewiring(const ReconfStep& step, int32_t num_nodes) {
  std::vector<int64_t> per_node(num_nodes, 0);
  int64_t best = 0;
  auto touch = [&](const Edge& e) {
    best = std::max(best, ++per_node[e.u]);
    best = std::max(best, ++per_node[e.v]);
  };
  for (const Edge& e : step.add) touch(e);
  for (const Edge& e : step.remove) touch(e);
  return best;
}

}  // namespace

ValidationReport validate_execution(const Protocol& protocol, const Execution& e,
                                    const ConstraintPolicy& policy) {
  const std::vector<Config> configs = replay(protocol, e);
  ValidationReport report;
  report.num_comm = e.num_comm_steps();
  report.num_reconf_steps = e.num_reconf_steps();
  for (const Step& s : e.steps)
    if (is_reconf(s)) report.total_rewired += std::get<ReconfStep>(s).size();

  CheckEntry regime_entry;
  regime_entry.name = "policy:" + policy.regime_string();
  auto flag_step = [&](int64_t index, const std::string& detail) {
    if (regime_entry.ok) {
      regime_entry.ok = false;
      regime_entry.first_violation = index;
      regime_entry.detail = detail;
    }
  };

  switch (policy.regime) {
    case Regime::Unconstrained:
      break;
    case Regime::KConstrained:
    case Regime::StronglyKConstrained:
    case Regime::FConstrained: {
      const bool exact = policy.regime == Regime::StronglyKConstrained;
      const int64_t budget = policy.regime == Regime::FConstrained
                                 ? policy.f.eval(e.initial.num_nodes())
                                 : policy.k;
      for (size_t i = 0; i < e.steps.size(); ++i) {
        if (!is_reconf(e.steps[i])) continue;
        const int64_t size = std::get<ReconfStep>(e.steps[i]).size();
        if (exact ? size != budget : size > budget)
          flag_step(static_cast<int64_t>(i),
                    "step " + std::to_string(i) + " rewires " + std::to_string(size) +
                        " edges, " + (exact ? "expected exactly " : "budget ") +
                        std::to_string(budget));
      }
      break;
    }
    case Regime::KLocallyConstrained: {
      for (size_t i = 0; i < e.steps.size(); ++i) {
        if (!is_reconf(e.steps[i])) continue;
        const int64_t worst =
            max_node_rewiring(std::get<ReconfStep>(e.steps[i]), e.initial.num_nodes());
        if (worst > policy.k)
          flag_step(static_cast<int64_t>(i),
                    "step " + std::to_string(i) + " touches a node with " + std::to_string(worst) +
                        " edge changes, budget " + std::to_string(policy.k));
      }
      break;
    }
    case Regime::KBalanced: {
      if (e.steps.empty()) break;
      if (!is_comm(e.steps.front())) {
        flag_step(0, "execution must start with a communication step");
        break;
      }
      if (!is_comm(e.steps.back())) {
        flag_step(static_cast<int64_t>(e.steps.size()) - 1,
                  "execution must end with a communication step");
        break;
      }
      const int64_t budget = policy.k * (report.num_comm - 1);
      if (report.total_rewired > budget) {
        int64_t running = 0;
        int64_t index = static_cast<int64_t>(e.steps.size()) - 1;
        for (size_t i = 0; i < e.steps.size(); ++i) {
          if (!is_reconf(e.steps[i])) continue;
          running += std::get<ReconfStep>(e.steps[i]).size();
          if (running > budget) {
            index = static_cast<int64_t>(i);
            break;
          }
        }
        flag_step(index, std::to_string(report.total_rewired) + " edges rewired, budget " +
                             std::to_string(budget) + " = k*(communications-1)");
      }
      break;
    }
  }
  report.checks.push_back(std::move(regime_entry));

  if (policy.degree_bound) {
    CheckEntry entry;
    entry.name = "degree<=" + std::to_string(*policy.degree_bound);
    for (size_t i = 0; i < configs.size(); ++i) {
      if (!satisfies_degree_bound(configs[i], *policy.degree_bound)) {
        entry.ok = false;
        entry.first_violation = static_cast<int64_t>(i);
        entry.detail = "configuration " + std::to_string(i) + " exceeds the degree bound";
        break;
      }
    }
    report.checks.push_back(std::move(entry));
  }
  if (policy.path_bound) {
    CheckEntry entry;
    entry.name = "path<=" + std::to_string(*policy.path_bound);
    for (size_t i = 0; i < configs.size(); ++i) {
      if (!satisfies_path_bound(configs[i], *policy.path_bound)) {
        entry.ok = false;
        entry.first_violation = static_cast<int64_t>(i);
        entry.detail = "configuration " + std::to_string(i) + " has a longer simple path";
        break;
      }
    }
    report.checks.push_back(std::move(entry));
  }

  for (const CheckEntry& entry : report.checks) report.ok = report.ok && entry.ok;
  return report;
}

PotentialInfo potential_sequence(const Execution& e, int64_t k) {
  if (k < 1) fail(ErrorCode::PreconditionViolated, "potential requires k >= 1");
  if (e.steps.empty() || !is_comm(e.steps.front()) || !is_comm(e.steps.back()))
    fail(ErrorCode::NotCommBounded,
         "potential requires an execution starting and ending with communication");

  PotentialInfo info;
  info.values.reserve(e.steps.size() + 1);
  info.values.push_back(0);
  for (size_t i = 0; i < e.steps.size(); ++i) {
    const Step& s = e.steps[i];
    if (is_comm(s)) {
      info.values.push_back(info.values.back() + k);
      info.tape.push_back('B');
      info.tape_step.push_back(static_cast<int64_t>(i));
    } else {
      const int64_t size = std::get<ReconfStep>(s).size();
      info.values.push_back(info.values.back() - size);
      for (int64_t r = 0; r < size; ++r) {
        info.tape.push_back('R');
        info.tape_step.push_back(static_cast<int64_t>(i));
      }
    }
  }
  for (size_t t = 1; t < info.tape.size(); ++t)
    if (info.tape[t] == 'R' && info.tape[t - 1] == 'R') ++info.kappa;

  // Phase decomposition of the tape potential, final communication dropped.
  const int64_t T = static_cast<int64_t>(info.tape.size()) - 1;
  std::vector<int64_t> q(T + 1, 0);
  for (int64_t t = 0; t < T; ++t) q[t + 1] = q[t] + (info.tape[t] == 'B' ? k : -1);
  int64_t b = 0;
  while (b < T) {
    int64_t j = b + 1;
    while (j <= T && q[j] == 0) ++j;
    const bool nonneg = j > T || q[j] > 0;
    int64_t end = std::min(j, T);
    while (end < T && (nonneg ? q[end + 1] >= 0 : q[end + 1] <= 0)) ++end;
    info.phases.push_back(PhaseInfo{b, end, nonneg, 0});
    b = end;
  }
  for (int64_t t = 1; t < T; ++t) {
    if (!(info.tape[t] == 'R' && info.tape[t - 1] == 'R')) continue;
    for (PhaseInfo& phase : info.phases)
      if (phase.begin <= t && t < phase.end) {
        ++phase.kappa;
        break;
      }
  }
  return info;
}

}  // namespace rbnet
