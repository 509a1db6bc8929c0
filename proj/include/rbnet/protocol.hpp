#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbnet/errors.hpp"

namespace rbnet {

enum class ActionKind : uint8_t { Broadcast, Receive };

struct Transition {
  int32_t source = 0;
  ActionKind kind = ActionKind::Broadcast;
  int32_t message = 0;
  int32_t target = 0;
  auto operator<=>(const Transition&) const = default;
};

// Finite-state broadcast protocol run by every node of a network.
// States and messages are interned as dense ids; names live in lookup tables.
class Protocol {
public:
  Protocol(std::vector<std::string> state_names, std::vector<std::string> message_names,
           std::vector<int32_t> initial_states, std::vector<Transition> transitions,
           std::optional<std::vector<int32_t>> target_set);

  int32_t num_states() const { return static_cast<int32_t>(state_names_.size()); }
  int32_t num_messages() const { return static_cast<int32_t>(message_names_.size()); }
  const std::string& state_name(int32_t s) const { return state_names_.at(s); }
  const std::string& message_name(int32_t m) const { return message_names_.at(m); }
  std::optional<int32_t> state_id(const std::string& name) const;
  std::optional<int32_t> message_id(const std::string& name) const;

  const std::vector<int32_t>& initial_states() const { return initial_states_; }
  bool is_initial(int32_t s) const;
  const std::optional<std::vector<int32_t>>& target_set() const { return target_set_; }
  bool is_target(int32_t s) const;

  const std::vector<Transition>& transitions() const { return transitions_; }
  // Broadcast transitions leaving `state`, sorted by (message, target).
  const std::vector<Transition>& broadcasts_from(int32_t state) const;
  // Targets of receive transitions (state, ??message, ·), sorted ascending.
  const std::vector<int32_t>& receive_targets(int32_t state, int32_t message) const;
  bool can_receive(int32_t state, int32_t message) const;
  // True when some state broadcasts `message`.
  bool message_broadcast_somewhere(int32_t message) const;

  // Protocol with every transition reversed; used for backward closures.
  Protocol reversed() const;

  static Protocol parse(const std::string& text);
  static Protocol load_file(const std::string& path);
  std::string to_dsl() const;

private:
  std::vector<std::string> state_names_;
  std::vector<std::string> message_names_;
  std::vector<int32_t> initial_states_;
  std::vector<Transition> transitions_;
  std::optional<std::vector<int32_t>> target_set_;

  std::vector<std::vector<Transition>> broadcasts_by_state_;
  // receive_targets_[state * num_messages + message] -> sorted target list
  std::vector<std::vector<int32_t>> receive_targets_;
};

}  // namespace rbnet
