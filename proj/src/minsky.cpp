#include "rbnet/minsky.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rbnet/errors.hpp"

namespace rbnet {
namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

int32_t parse_counter(const std::string& tok, int64_t line_no) {
  if (tok == "c1") return 1;
  if (tok == "c2") return 2;
  fail(ErrorCode::ParseError,
       "line " + std::to_string(line_no) + ": counter must be c1 or c2, got '" + tok + "'");
}

}  // namespace

int32_t MinskyMachine::location_index(const std::string& name) const {
  for (size_t i = 0; i < locations.size(); ++i)
    if (locations[i] == name) return static_cast<int32_t>(i);
  fail(ErrorCode::ParseError, "unknown location '" + name + "'");
}

MinskyMachine MinskyMachine::parse(const std::string& text) {
  MinskyMachine m;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int64_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (size_t hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;

    size_t colon = line.find(':');
    if (colon == std::string::npos)
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected '<location>:'");
    std::string loc = trim(line.substr(0, colon));
    if (loc.empty())
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty location name");
    if (!seen.insert(loc).second)
      fail(ErrorCode::ParseError,
           "line " + std::to_string(line_no) + ": duplicate location '" + loc + "'");

    std::vector<std::string> toks = tokens_of(line.substr(colon + 1));
    MinskyInstruction ins;
    if (toks.size() == 1 && toks[0] == "halt") {
      ins.kind = MinskyInstruction::Kind::Halt;
    } else if (toks.size() == 4 && toks[0] == "inc" && toks[2] == "->") {
      ins.kind = MinskyInstruction::Kind::Inc;
      ins.counter = parse_counter(toks[1], line_no);
      ins.next = toks[3];
    } else if (toks.size() == 6 && toks[0] == "testdec" && toks[2] == "->" && toks[4] == "|") {
      ins.kind = MinskyInstruction::Kind::TestDec;
      ins.counter = parse_counter(toks[1], line_no);
      ins.next = toks[3];
      ins.next_if_zero = toks[5];
    } else {
      fail(ErrorCode::ParseError,
           "line " + std::to_string(line_no) + ": expected 'halt', 'inc cJ -> L' or "
           "'testdec cJ -> L | L'");
    }
    m.locations.push_back(std::move(loc));
    m.instructions.push_back(std::move(ins));
  }
  if (m.locations.empty()) fail(ErrorCode::ParseError, "machine has no locations");
  for (const MinskyInstruction& ins : m.instructions) {
    if (ins.kind == MinskyInstruction::Kind::Halt) continue;
    if (!seen.count(ins.next))
      fail(ErrorCode::ParseError, "unknown location '" + ins.next + "'");
    if (ins.kind == MinskyInstruction::Kind::TestDec && !seen.count(ins.next_if_zero))
      fail(ErrorCode::ParseError, "unknown location '" + ins.next_if_zero + "'");
  }
  return m;
}

MinskyMachine MinskyMachine::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

Protocol encode_minsky(const MinskyMachine& m) {
  std::vector<std::string> states;
  std::map<std::string, int32_t> state_id;
  auto add_state = [&](const std::string& name) {
    auto [it, fresh] = state_id.emplace(name, static_cast<int32_t>(states.size()));
    if (fresh) states.push_back(name);
    return it->second;
  };

  const std::vector<std::string> message_names = {
      "start", "i-init", "i-ask_1", "i-ack_1", "i-ok_1",  "i-ask_2", "i-ack_2",
      "i-ok_2", "i-exit", "d-ask_1", "d-ack_1", "d-ok_1", "d-ask_2", "d-ack_2",
      "d-ok_2", "d-exit", "t-ask_1", "t-ack_1", "t-ok_1", "t-ask_2", "t-ack_2",
      "t-ok_2", "t-exit", "aux_1",   "aux_2",   "aux_3",  "aux_4",   "aux_5"};
  std::map<std::string, int32_t> msg_id;
  for (size_t i = 0; i < message_names.size(); ++i)
    msg_id[message_names[i]] = static_cast<int32_t>(i);
  auto msg = [&](const std::string& name) { return msg_id.at(name); };
  auto jmsg = [&](const std::string& stem, int32_t j) {
    return msg_id.at(stem + "_" + std::to_string(j));
  };

  std::vector<Transition> transitions;
  // Receive pairs already drawn, so completion only fills the gaps.
  std::set<std::pair<int32_t, int32_t>> drawn_recv;
  std::vector<bool> has_outgoing;
  auto ensure_room = [&](int32_t q) {
    if (static_cast<size_t>(q) >= has_outgoing.size()) has_outgoing.resize(q + 1, false);
  };
  auto bcast = [&](int32_t a, int32_t message, int32_t b) {
    transitions.push_back({a, ActionKind::Broadcast, message, b});
    ensure_room(a);
    has_outgoing[a] = true;
  };
  auto recv = [&](int32_t a, int32_t message, int32_t b) {
    transitions.push_back({a, ActionKind::Receive, message, b});
    ensure_room(a);
    has_outgoing[a] = true;
    drawn_recv.insert({a, message});
  };

  // Control chain: one boot state, one state per location, fresh module
  // states per instruction.
  const int32_t ctl0 = add_state("ctl0");
  for (const std::string& loc : m.locations) add_state("loc_" + loc);
  auto loc_state = [&](const std::string& loc) { return state_id.at("loc_" + loc); };
  bcast(ctl0, msg("start"), loc_state(m.initial_location()));

  for (size_t i = 0; i < m.locations.size(); ++i) {
    const std::string& loc = m.locations[i];
    const MinskyInstruction& ins = m.instructions[i];
    const int32_t at = loc_state(loc);
    const int32_t j = ins.counter;
    switch (ins.kind) {
      case MinskyInstruction::Kind::Halt:
        break;
      case MinskyInstruction::Kind::Inc: {
        std::vector<int32_t> chain;
        for (int s = 1; s <= 7; ++s)
          chain.push_back(add_state("inc" + std::to_string(s) + "_" + loc));
        const int32_t iend = add_state("iend_" + loc);
        bcast(at, msg("i-init"), chain[0]);
        recv(chain[0], msg("aux_1"), chain[1]);
        bcast(chain[1], jmsg("i-ask", j), chain[2]);
        recv(chain[2], jmsg("i-ack", j), chain[3]);
        bcast(chain[3], jmsg("i-ok", j), chain[4]);
        recv(chain[4], msg("aux_2"), chain[5]);
        recv(chain[5], msg("aux_3"), chain[6]);
        recv(chain[6], msg("aux_3"), iend);
        bcast(iend, msg("i-exit"), loc_state(ins.next));
        break;
      }
      case MinskyInstruction::Kind::TestDec: {
        std::vector<int32_t> dec;
        for (int s = 1; s <= 5; ++s)
          dec.push_back(add_state("dec" + std::to_string(s) + "_" + loc));
        const int32_t dend = add_state("dend_" + loc);
        bcast(at, jmsg("d-ask", j), dec[0]);
        recv(dec[0], jmsg("d-ack", j), dec[1]);
        bcast(dec[1], jmsg("d-ok", j), dec[2]);
        recv(dec[2], msg("aux_4"), dec[3]);
        recv(dec[3], msg("aux_5"), dec[4]);
        recv(dec[4], msg("aux_5"), dend);
        bcast(dend, msg("d-exit"), loc_state(ins.next));

        std::vector<int32_t> tst;
        for (int s = 1; s <= 4; ++s)
          tst.push_back(add_state("tst" + std::to_string(s) + "_" + loc));
        const int32_t tend = add_state("tend_" + loc);
        bcast(at, jmsg("t-ask", j), tst[0]);
        recv(tst[0], jmsg("t-ack", j), tst[1]);
        bcast(tst[1], jmsg("t-ok", j), tst[2]);
        recv(tst[2], msg("aux_5"), tst[3]);
        recv(tst[3], msg("aux_5"), tend);
        bcast(tend, msg("t-exit"), loc_state(ins.next_if_zero));
        break;
      }
    }
  }

  // Counter gadget per counter: the one_j state survives the messages of any
  // incrementation and the exit messages via explicit self-loops.
  for (int32_t j = 1; j <= 2; ++j) {
    const std::string sj = "_" + std::to_string(j);
    const int32_t zero = add_state("zero" + sj);
    const int32_t picked = add_state("picked" + sj);
    const int32_t acked = add_state("acked" + sj);
    const int32_t one = add_state("one" + sj);
    const int32_t dpicked = add_state("dpicked" + sj);
    const int32_t dacked = add_state("dacked" + sj);
    const int32_t retired = add_state("retired" + sj);
    recv(zero, jmsg("i-ask", j), picked);
    recv(picked, jmsg("i-ok", j), zero);
    bcast(picked, jmsg("i-ack", j), acked);
    recv(acked, jmsg("i-ok", j), one);
    recv(one, jmsg("d-ask", j), dpicked);
    recv(dpicked, jmsg("d-ok", j), one);
    bcast(dpicked, jmsg("d-ack", j), dacked);
    recv(dacked, jmsg("d-ok", j), retired);
    recv(one, msg("i-init"), one);
    for (int32_t jj = 1; jj <= 2; ++jj) {
      recv(one, jmsg("i-ask", jj), one);
      recv(one, jmsg("i-ok", jj), one);
    }
    recv(one, msg("i-exit"), one);
    recv(one, msg("d-exit"), one);
  }

  // Auxiliary gadgets: each free_i answers one stage of a module with one
  // aux_i broadcast and retires to done_i.
  {
    const int32_t free1 = add_state("free_1");
    const int32_t busy1 = add_state("busy_1");
    const int32_t done1 = add_state("done_1");
    recv(free1, msg("i-init"), busy1);
    bcast(busy1, msg("aux_1"), done1);

    const int32_t free2 = add_state("free_2");
    const int32_t busy2a = add_state("busy_2a");
    const int32_t busy2b = add_state("busy_2b");
    const int32_t done2 = add_state("done_2");
    for (int32_t j = 1; j <= 2; ++j) recv(free2, jmsg("i-ask", j), busy2a);
    for (int32_t j = 1; j <= 2; ++j) recv(busy2a, jmsg("i-ok", j), busy2b);
    bcast(busy2b, msg("aux_2"), done2);

    const int32_t free3 = add_state("free_3");
    const int32_t busy3 = add_state("busy_3");
    const int32_t done3 = add_state("done_3");
    for (int32_t j = 1; j <= 2; ++j) recv(free3, jmsg("i-ok", j), busy3);
    bcast(busy3, msg("aux_3"), done3);

    const int32_t free4 = add_state("free_4");
    const int32_t done4 = add_state("done_4");
    for (int32_t j = 1; j <= 2; ++j) {
      const std::string sj = std::to_string(j);
      const int32_t ta = add_state("tack" + sj + "_4");
      const int32_t tb = add_state("tsent" + sj + "_4");
      recv(free4, jmsg("t-ask", j), ta);
      bcast(ta, jmsg("t-ack", j), tb);
      recv(tb, jmsg("t-ok", j), done4);
    }
    const int32_t d4 = add_state("dwait_4");
    const int32_t db4 = add_state("dseen_4");
    for (int32_t j = 1; j <= 2; ++j) recv(free4, jmsg("d-ask", j), d4);
    for (int32_t j = 1; j <= 2; ++j) recv(d4, jmsg("d-ok", j), db4);
    bcast(db4, msg("aux_4"), done4);

    const int32_t free5 = add_state("free_5");
    const int32_t busy5 = add_state("busy_5");
    const int32_t done5 = add_state("done_5");
    for (int32_t j = 1; j <= 2; ++j) {
      recv(free5, jmsg("d-ok", j), busy5);
      recv(free5, jmsg("t-ok", j), busy5);
    }
    bcast(busy5, msg("aux_5"), done5);
  }

  const int32_t sink = add_state("sink");
  ensure_room(static_cast<int32_t>(states.size()) - 1);

  // Undrawn receptions: terminal states (no drawn outgoing transition)
  // self-loop so they never block a neighbor; everything else falls to the
  // sink. The sink itself self-loops on the whole alphabet.
  const int32_t num_states = static_cast<int32_t>(states.size());
  const int32_t num_messages = static_cast<int32_t>(message_names.size());
  for (int32_t q = 0; q < num_states; ++q) {
    const bool terminal = q == sink || !has_outgoing[q];
    for (int32_t mm = 0; mm < num_messages; ++mm)
      if (!drawn_recv.count({q, mm}))
        transitions.push_back({q, ActionKind::Receive, mm, terminal ? q : sink});
  }

  std::vector<int32_t> initial = {ctl0, state_id.at("zero_1"), state_id.at("zero_2")};
  for (int i = 1; i <= 5; ++i) initial.push_back(state_id.at("free_" + std::to_string(i)));

  std::vector<int32_t> target;
  for (size_t i = 0; i < m.locations.size(); ++i)
    if (m.instructions[i].kind == MinskyInstruction::Kind::Halt)
      target.push_back(loc_state(m.locations[i]));
  for (int32_t j = 1; j <= 2; ++j) {
    target.push_back(state_id.at("one_" + std::to_string(j)));
    target.push_back(state_id.at("retired_" + std::to_string(j)));
  }
  for (int i = 1; i <= 5; ++i) target.push_back(state_id.at("done_" + std::to_string(i)));
  std::sort(target.begin(), target.end());

  return Protocol(std::move(states), message_names, std::move(initial), std::move(transitions),
                  std::move(target));
}

}  // namespace rbnet
