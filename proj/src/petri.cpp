#include "rbnet/petri.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rbnet/errors.hpp"

namespace rbnet {
namespace {

constexpr int64_t kMaxTokenEncodable = 65535;

std::string encode_marking(const std::vector<int64_t>& m) {
  std::string s(m.size() * 2, '\0');
  for (size_t i = 0; i < m.size(); ++i) {
    s[2 * i] = static_cast<char>(m[i] & 0xff);
    s[2 * i + 1] = static_cast<char>((m[i] >> 8) & 0xff);
  }
  return s;
}

std::vector<int64_t> decode_marking(const std::string& s) {
  std::vector<int64_t> m(s.size() / 2);
  for (size_t i = 0; i < m.size(); ++i)
    m[i] = static_cast<uint8_t>(s[2 * i]) | (static_cast<int64_t>(static_cast<uint8_t>(s[2 * i + 1])) << 8);
  return m;
}

// Fires t on m into out; false when not enabled.
bool fire(const std::vector<int64_t>& m, const PetriTransition& t, std::vector<int64_t>& out) {
  out = m;
  for (int32_t p : t.pre)
    if (--out[p] < 0) return false;
  for (int32_t p : t.post) ++out[p];
  return true;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string xml_unescape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size();) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    if (s.compare(i, 5, "&amp;") == 0) {
      out.push_back('&');
      i += 5;
    } else if (s.compare(i, 4, "&lt;") == 0) {
      out.push_back('<');
      i += 4;
    } else if (s.compare(i, 4, "&gt;") == 0) {
      out.push_back('>');
      i += 4;
    } else if (s.compare(i, 6, "&quot;") == 0) {
      out.push_back('"');
      i += 6;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

// Value of attribute `name` inside one XML tag.
std::string tag_attr(const std::string& tag, const std::string& name) {
  const std::string probe = name + "=\"";
  size_t at = tag.find(probe);
  if (at == std::string::npos)
    fail(ErrorCode::ParseError, "missing attribute '" + name + "' in: " + tag);
  at += probe.size();
  size_t end = tag.find('"', at);
  if (end == std::string::npos) fail(ErrorCode::ParseError, "unterminated attribute in: " + tag);
  return xml_unescape(tag.substr(at, end - at));
}

// First integer wrapped as <wrapper><text>N</text> within the span.
int64_t span_text_value(const std::string& span, const std::string& wrapper, int64_t fallback) {
  size_t at = span.find("<" + wrapper + ">");
  if (at == std::string::npos) return fallback;
  size_t t = span.find("<text>", at);
  if (t == std::string::npos) return fallback;
  t += 6;
  size_t e = span.find("</text>", t);
  if (e == std::string::npos) fail(ErrorCode::ParseError, "unterminated <text> in " + wrapper);
  return std::stoll(span.substr(t, e - t));
}

}  // namespace

int32_t PetriNet::place_id(const std::string& name) const {
  for (size_t i = 0; i < places.size(); ++i)
    if (places[i] == name) return static_cast<int32_t>(i);
  fail(ErrorCode::ParseError, "unknown place '" + name + "'");
}

PetriNet compile_to_petri(const Protocol& protocol, int64_t k) {
  if (k < 1) fail(ErrorCode::PreconditionViolated, "k must be at least 1");
  if (!protocol.target_set())
    fail(ErrorCode::PreconditionViolated, "protocol has no target set");

  const int32_t n = protocol.num_states();
  PetriNet net;
  for (int32_t q = 0; q < n; ++q) net.places.push_back("p_" + protocol.state_name(q));
  // Unordered pair places in lexicographic index order.
  auto pair_place = [&](int32_t a, int32_t b) {
    if (a > b) std::swap(a, b);
    const int64_t start = static_cast<int64_t>(a) * n - static_cast<int64_t>(a) * (a - 1) / 2;
    return static_cast<int32_t>(n + start + (b - a));
  };
  for (int32_t a = 0; a < n; ++a)
    for (int32_t b = a; b < n; ++b)
      net.places.push_back("pp_" + std::to_string(a) + "_" + std::to_string(b));
  const int32_t pstart = static_cast<int32_t>(net.places.size());
  net.places.push_back("pstart");
  const int32_t psimul = pstart + 1;
  net.places.push_back("psimul");
  const int32_t pcheck = pstart + 2;
  net.places.push_back("pcheck");
  const int32_t pend = pstart + 3;
  net.places.push_back("pend");
  const int32_t preconf0 = pstart + 4;
  for (int64_t m = 1; m <= k; ++m) net.places.push_back("preconf_" + std::to_string(m));
  auto preconf = [&](int64_t m) {
    // Level k + 1 hands the token back to the communication phase.
    return m > k ? psimul : static_cast<int32_t>(preconf0 + m - 1);
  };
  {
    std::set<std::string> uniq(net.places.begin(), net.places.end());
    if (uniq.size() != net.places.size())
      fail(ErrorCode::InternalError, "generated place names collide");
  }

  std::map<std::string, int32_t> name_uses;
  auto add = [&](std::string name, std::vector<int32_t> pre, std::vector<int32_t> post) {
    int32_t& uses = name_uses[name];
    if (uses++ > 0) name += "_" + std::to_string(uses);
    std::sort(pre.begin(), pre.end());
    std::sort(post.begin(), post.end());
    net.transitions.push_back({std::move(name), std::move(pre), std::move(post)});
  };

  // Seeding: any number of isolated nodes and linked pairs of initial states.
  const std::vector<int32_t>& init = protocol.initial_states();
  for (int32_t q : init) add("seed_" + protocol.state_name(q), {pstart}, {pstart, q});
  for (size_t x = 0; x < init.size(); ++x)
    for (size_t y = x; y < init.size(); ++y)
      add("seed_pair_" + std::to_string(init[x]) + "_" + std::to_string(init[y]), {pstart},
          {pstart, pair_place(init[x], init[y])});
  add("begin_sim", {pstart}, {psimul});

  // Communications hand the control token to preconf_1 so a reconfiguration
  // phase (possibly empty) follows every broadcast.
  for (int32_t q = 0; q < n; ++q)
    for (const Transition& t : protocol.broadcasts_from(q))
      add("solo_" + protocol.state_name(q) + "_" + protocol.message_name(t.message), {psimul, q},
          {preconf(1), t.target});
  for (int32_t b = 0; b < n; ++b)
    for (int32_t r = 0; r < n; ++r) {
      if (r < b) continue;
      // Both role assignments; a self-pair generates each combination once.
      for (int rounds = 0; rounds < (b == r ? 1 : 2); ++rounds) {
        const int32_t bb = rounds == 0 ? b : r;
        const int32_t rr = rounds == 0 ? r : b;
        for (const Transition& t : protocol.broadcasts_from(bb))
          for (int32_t rn : protocol.receive_targets(rr, t.message))
            add("pair_" + protocol.state_name(bb) + "_" + protocol.state_name(rr) + "_" +
                    protocol.message_name(t.message),
                {psimul, pair_place(bb, rr)}, {preconf(1), pair_place(t.target, rn)});
      }
    }

  // Reconfiguration levels: each atomic link change advances the level, and
  // every level may stop early, so one phase changes between 0 and k links.
  for (int64_t m = 1; m <= k; ++m) {
    for (int32_t a = 0; a < n; ++a)
      for (int32_t b = a; b < n; ++b) {
        add("make" + std::to_string(m) + "_" + std::to_string(a) + "_" + std::to_string(b),
            {preconf(m), a, b}, {preconf(m + 1), pair_place(a, b)});
        add("cut" + std::to_string(m) + "_" + std::to_string(a) + "_" + std::to_string(b),
            {preconf(m), pair_place(a, b)}, {preconf(m + 1), a, b});
      }
    add("skip" + std::to_string(m), {preconf(m)}, {psimul});
  }

  add("to_check", {psimul}, {pcheck});
  for (int32_t q = 0; q < n; ++q)
    if (protocol.is_target(q)) add("drop_" + protocol.state_name(q), {pcheck, q}, {pcheck});
  for (int32_t a = 0; a < n; ++a)
    for (int32_t b = a; b < n; ++b)
      if (protocol.is_target(a) && protocol.is_target(b))
        add("drop_pair_" + std::to_string(a) + "_" + std::to_string(b),
            {pcheck, pair_place(a, b)}, {pcheck});
  // The construction names the final marking but no producer for pend.
  add("finish", {pcheck}, {pend});

  net.initial_marking.assign(net.places.size(), 0);
  net.initial_marking[pstart] = 1;
  net.final_marking.assign(net.places.size(), 0);
  net.final_marking[pend] = 1;
  return net;
}

PetriReachability bounded_marking_reachability(
    const PetriNet& net, int64_t token_cap, int64_t max_markings,
    const std::function<void(const std::vector<int64_t>&)>& on_marking) {
  const size_t num_places = net.places.size();
  if (net.initial_marking.size() != num_places || net.final_marking.size() != num_places)
    fail(ErrorCode::PreconditionViolated, "marking size does not match the place count");
  if (token_cap < 0 || token_cap > kMaxTokenEncodable)
    fail(ErrorCode::PreconditionViolated, "token cap out of range");
  for (int64_t v : net.final_marking)
    if (v < 0 || v > token_cap)
      fail(ErrorCode::PreconditionViolated, "final marking exceeds the token cap");
  for (int64_t v : net.initial_marking)
    if (v < 0 || v > kMaxTokenEncodable)
      fail(ErrorCode::PreconditionViolated, "initial marking out of range");

  PetriReachability result;
  if (on_marking) on_marking(net.initial_marking);
  if (net.initial_marking == net.final_marking) {
    result.status = PetriReachability::Status::Reached;
    result.explored = 1;
    return result;
  }

  const std::string final_key = encode_marking(net.final_marking);
  std::vector<std::string> keys{encode_marking(net.initial_marking)};
  std::unordered_map<std::string, int64_t> id_of{{keys[0], 0}};
  std::vector<std::pair<int64_t, int32_t>> parent{{-1, -1}};
  std::queue<int64_t> frontier;
  frontier.push(0);

  auto finish = [&](int64_t goal_id) {
    result.status = PetriReachability::Status::Reached;
    for (int64_t at = goal_id; parent[at].first >= 0; at = parent[at].first)
      result.firing.push_back(parent[at].second);
    std::reverse(result.firing.begin(), result.firing.end());
    result.explored = static_cast<int64_t>(keys.size());
    return result;
  };

  std::vector<int64_t> next;
  while (!frontier.empty()) {
    const int64_t id = frontier.front();
    frontier.pop();
    const std::vector<int64_t> marking = decode_marking(keys[id]);
    for (size_t ti = 0; ti < net.transitions.size(); ++ti) {
      if (!fire(marking, net.transitions[ti], next)) continue;
      bool over = false;
      for (int64_t v : next)
        if (v > token_cap) {
          over = true;
          break;
        }
      if (over) continue;
      std::string key = encode_marking(next);
      if (id_of.count(key)) continue;
      if (static_cast<int64_t>(keys.size()) >= max_markings) {
        result.status = PetriReachability::Status::BudgetExceeded;
        result.explored = static_cast<int64_t>(keys.size());
        return result;
      }
      const int64_t nid = static_cast<int64_t>(keys.size());
      id_of.emplace(key, nid);
      keys.push_back(std::move(key));
      parent.push_back({id, static_cast<int32_t>(ti)});
      if (on_marking) on_marking(next);
      if (keys.back() == final_key) return finish(nid);
      frontier.push(nid);
    }
  }
  result.status = PetriReachability::Status::NotReachedWithinCap;
  result.explored = static_cast<int64_t>(keys.size());
  return result;
}

std::vector<int64_t> replay_firing(const PetriNet& net, const std::vector<int32_t>& firing) {
  std::vector<int64_t> marking = net.initial_marking;
  std::vector<int64_t> next;
  for (int32_t ti : firing) {
    if (ti < 0 || static_cast<size_t>(ti) >= net.transitions.size())
      fail(ErrorCode::PreconditionViolated, "firing index out of range");
    if (!fire(marking, net.transitions[ti], next))
      fail(ErrorCode::DisabledStep,
           "transition '" + net.transitions[ti].name + "' is not enabled");
    marking = next;
  }
  return marking;
}

std::string export_net(const PetriNet& net, const std::string& format) {
  std::ostringstream out;
  if (format == "dotnet") {
    for (size_t p = 0; p < net.places.size(); ++p)
      out << "pl " << net.places[p] << " (" << net.initial_marking[p] << ")\n";
    for (const PetriTransition& t : net.transitions) {
      out << "tr " << t.name;
      for (int32_t p : t.pre) out << " " << net.places[p];
      out << " ->";
      for (int32_t p : t.post) out << " " << net.places[p];
      out << "\n";
    }
    for (size_t p = 0; p < net.places.size(); ++p)
      if (net.final_marking[p] != 0)
        out << "final " << net.places[p] << " " << net.final_marking[p] << "\n";
    return out.str();
  }
  if (format == "pnml") {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<pnml xmlns=\"http://www.pnml.org/version-2009/grammar/pnml\">\n";
    out << "<net id=\"net1\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n";
    out << "<page id=\"page1\">\n";
    for (size_t p = 0; p < net.places.size(); ++p) {
      out << "<place id=\"" << xml_escape(net.places[p]) << "\">";
      out << "<name><text>" << xml_escape(net.places[p]) << "</text></name>";
      if (net.initial_marking[p] != 0)
        out << "<initialMarking><text>" << net.initial_marking[p] << "</text></initialMarking>";
      out << "</place>\n";
    }
    for (const PetriTransition& t : net.transitions) {
      out << "<transition id=\"" << xml_escape(t.name) << "\">";
      out << "<name><text>" << xml_escape(t.name) << "</text></name>";
      out << "</transition>\n";
    }
    int64_t arc_id = 0;
    auto arcs = [&](const std::vector<int32_t>& side, const std::string& trans, bool into) {
      std::map<int32_t, int64_t> weight;
      for (int32_t p : side) ++weight[p];
      for (const auto& [p, w] : weight) {
        const std::string src = into ? xml_escape(net.places[p]) : xml_escape(trans);
        const std::string dst = into ? xml_escape(trans) : xml_escape(net.places[p]);
        out << "<arc id=\"a" << arc_id++ << "\" source=\"" << src << "\" target=\"" << dst
            << "\"";
        if (w > 1)
          out << "><inscription><text>" << w << "</text></inscription></arc>\n";
        else
          out << "/>\n";
      }
    };
    for (const PetriTransition& t : net.transitions) {
      arcs(t.pre, t.name, true);
      arcs(t.post, t.name, false);
    }
    for (size_t p = 0; p < net.places.size(); ++p)
      if (net.final_marking[p] != 0)
        out << "<!--final " << xml_escape(net.places[p]) << " " << net.final_marking[p]
            << "-->\n";
    out << "</page>\n</net>\n</pnml>\n";
    return out.str();
  }
  fail(ErrorCode::UnknownFormat, "unknown net format '" + format + "'");
}

namespace {

PetriNet import_dotnet(const std::string& text) {
  PetriNet net;
  std::map<std::string, int32_t> pid;
  std::vector<std::pair<std::string, int64_t>> finals;
  std::istringstream in(text);
  std::string raw;
  int64_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (size_t hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream line(raw);
    std::string kind;
    if (!(line >> kind)) continue;
    if (kind == "pl") {
      std::string name, count;
      if (!(line >> name >> count) || count.size() < 3 || count.front() != '(' ||
          count.back() != ')')
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad pl line");
      pid[name] = static_cast<int32_t>(net.places.size());
      net.places.push_back(name);
      net.initial_marking.push_back(std::stoll(count.substr(1, count.size() - 2)));
    } else if (kind == "tr") {
      PetriTransition t;
      if (!(line >> t.name))
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad tr line");
      std::string tok;
      bool after_arrow = false;
      while (line >> tok) {
        if (tok == "->") {
          after_arrow = true;
          continue;
        }
        auto it = pid.find(tok);
        if (it == pid.end())
          fail(ErrorCode::ParseError,
               "line " + std::to_string(line_no) + ": unknown place '" + tok + "'");
        (after_arrow ? t.post : t.pre).push_back(it->second);
      }
      if (!after_arrow)
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": tr line without ->");
      std::sort(t.pre.begin(), t.pre.end());
      std::sort(t.post.begin(), t.post.end());
      net.transitions.push_back(std::move(t));
    } else if (kind == "final") {
      std::string name;
      int64_t count = 0;
      if (!(line >> name >> count))
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad final line");
      finals.emplace_back(name, count);
    } else {
      fail(ErrorCode::ParseError,
           "line " + std::to_string(line_no) + ": unknown directive '" + kind + "'");
    }
  }
  net.final_marking.assign(net.places.size(), 0);
  for (const auto& [name, count] : finals) {
    auto it = pid.find(name);
    if (it == pid.end()) fail(ErrorCode::ParseError, "final refers to unknown place '" + name + "'");
    net.final_marking[it->second] = count;
  }
  return net;
}

PetriNet import_pnml(const std::string& text) {
  PetriNet net;
  std::map<std::string, int32_t> pid;
  std::map<std::string, int32_t> tid;
  size_t at = 0;
  while ((at = text.find('<', at)) != std::string::npos) {
    if (text.compare(at, 7, "<place ") == 0) {
      size_t close = text.find("</place>", at);
      size_t tag_end = text.find('>', at);
      if (tag_end == std::string::npos) fail(ErrorCode::ParseError, "unterminated place tag");
      const std::string tag = text.substr(at, tag_end - at + 1);
      const std::string span =
          close == std::string::npos ? tag : text.substr(at, close - at);
      const std::string name = tag_attr(tag, "id");
      pid[name] = static_cast<int32_t>(net.places.size());
      net.places.push_back(name);
      net.initial_marking.push_back(span_text_value(span, "initialMarking", 0));
      at = tag_end + 1;
    } else if (text.compare(at, 12, "<transition ") == 0) {
      size_t tag_end = text.find('>', at);
      if (tag_end == std::string::npos) fail(ErrorCode::ParseError, "unterminated transition tag");
      const std::string tag = text.substr(at, tag_end - at + 1);
      const std::string name = tag_attr(tag, "id");
      tid[name] = static_cast<int32_t>(net.transitions.size());
      net.transitions.push_back({name, {}, {}});
      at = tag_end + 1;
    } else if (text.compare(at, 5, "<arc ") == 0) {
      size_t self_close = text.find("/>", at);
      size_t full_close = text.find("</arc>", at);
      size_t end = std::min(self_close == std::string::npos ? text.size() : self_close,
                            full_close == std::string::npos ? text.size() : full_close);
      size_t tag_end = text.find('>', at);
      if (tag_end == std::string::npos) fail(ErrorCode::ParseError, "unterminated arc tag");
      const std::string tag = text.substr(at, tag_end - at + 1);
      const std::string span = text.substr(at, end - at);
      const std::string source = tag_attr(tag, "source");
      const std::string target = tag_attr(tag, "target");
      const int64_t weight = span_text_value(span, "inscription", 1);
      if (pid.count(source) && tid.count(target)) {
        PetriTransition& t = net.transitions[tid.at(target)];
        for (int64_t w = 0; w < weight; ++w) t.pre.push_back(pid.at(source));
      } else if (tid.count(source) && pid.count(target)) {
        PetriTransition& t = net.transitions[tid.at(source)];
        for (int64_t w = 0; w < weight; ++w) t.post.push_back(pid.at(target));
      } else {
        fail(ErrorCode::ParseError, "arc between unknown nodes: " + source + " -> " + target);
      }
      at = tag_end + 1;
    } else if (text.compare(at, 9, "<!--final") == 0) {
      size_t end = text.find("-->", at);
      if (end == std::string::npos) fail(ErrorCode::ParseError, "unterminated final comment");
      std::istringstream line(text.substr(at + 9, end - at - 9));
      std::string name;
      int64_t count = 0;
      if (!(line >> name >> count)) fail(ErrorCode::ParseError, "bad final comment");
      if (net.final_marking.size() != net.places.size())
        net.final_marking.assign(net.places.size(), 0);
      auto it = pid.find(xml_unescape(name));
      if (it == pid.end()) fail(ErrorCode::ParseError, "final refers to unknown place");
      net.final_marking[it->second] = count;
      at = end + 3;
    } else {
      ++at;
    }
  }
  if (net.final_marking.size() != net.places.size())
    net.final_marking.assign(net.places.size(), 0);
  for (PetriTransition& t : net.transitions) {
    std::sort(t.pre.begin(), t.pre.end());
    std::sort(t.post.begin(), t.post.end());
  }
  return net;
}

}  // namespace

PetriNet import_net(const std::string& text, const std::string& format) {
  if (format == "dotnet") return import_dotnet(text);
  if (format == "pnml") return import_pnml(text);
  fail(ErrorCode::UnknownFormat, "unknown net format '" + format + "'");
}

}  // namespace rbnet
