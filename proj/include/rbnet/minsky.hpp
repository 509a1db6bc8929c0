#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbnet/protocol.hpp"

namespace rbnet {

// Two-counter machine instruction. Halt marks a terminal location.
struct MinskyInstruction {
  enum class Kind : uint8_t { Inc, TestDec, Halt };
  Kind kind = Kind::Halt;
  int32_t counter = 1;
  // Inc: successor. TestDec: successor after a decrement.
  std::string next;
  // TestDec: successor when the counter is zero.
  std::string next_if_zero;

  bool operator==(const MinskyInstruction&) const = default;
};

struct MinskyMachine {
  // Declaration order; instructions[i] belongs to locations[i]. The first
  // location is the initial one.
  std::vector<std::string> locations;
  std::vector<MinskyInstruction> instructions;

  const std::string& initial_location() const { return locations.front(); }
  int32_t location_index(const std::string& name) const;

  // One instruction per line:
  //   L0: inc c1 -> L1
  //   L1: testdec c2 -> L2 | L3
  //   L3: halt
  // '#' starts a comment.
  static MinskyMachine parse(const std::string& text);
  static MinskyMachine load_file(const std::string& path);
};

// Broadcast protocol simulating the machine. One control node walks the
// instruction chain; a counter value is the number of links between the
// control node and counter nodes in state one_j. Initial states are the
// control boot state, zero_1, zero_2 and the five free auxiliary states; the
// target set holds the halt locations, one_j, retired_j and done_1..done_5.
// Every undrawn reception leads to a global sink (terminal states self-loop
// instead), so every state can receive every message.
Protocol encode_minsky(const MinskyMachine& m);

}  // namespace rbnet
