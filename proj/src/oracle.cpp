#include "adaclk/oracle.hpp"

#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace adaclk {

Simulator::Simulator(const Netlist& n) : nl_(&n) {
  validate(n);
  const std::size_t nn = static_cast<std::size_t>(n.n_nodes);
  gate_of_node_.assign(nn, -1);
  fanout_.assign(nn, {});
  is_output_.assign(nn, 0);
  value_.assign(nn, 0);
  pend_time_.assign(n.gates.size(), -1);
  pend_value_.assign(n.gates.size(), 0);
  pend_version_.assign(n.gates.size(), 0);
  for (int gi = 0; gi < n.gate_count(); ++gi) {
    const Gate& g = n.gates[static_cast<std::size_t>(gi)];
    gate_of_node_[static_cast<std::size_t>(g.id)] = gi;
    for (int i = 0; i < g.fanin_count; ++i)
      fanout_[static_cast<std::size_t>(g.fanin[static_cast<std::size_t>(i)])].push_back(gi);
  }
  for (int po : n.primary_outputs) is_output_[static_cast<std::size_t>(po)] = 1;
}

bool Simulator::eval(const Gate& g) const {
  const bool a = value_[static_cast<std::size_t>(g.fanin[0])] != 0;
  const bool b = g.fanin_count > 1 && value_[static_cast<std::size_t>(g.fanin[1])] != 0;
  const bool c = g.fanin_count > 2 && value_[static_cast<std::size_t>(g.fanin[2])] != 0;
  return eval_gate(g.kind, a, b, c);
}

void Simulator::steady_state(const std::vector<std::uint8_t>& inputs) {
  const Netlist& n = *nl_;
  for (std::size_t i = 0; i < n.primary_inputs.size(); ++i)
    value_[static_cast<std::size_t>(n.primary_inputs[i])] = inputs[i] ? 1 : 0;
  // gates are in topological (earlier-defined) order
  for (const Gate& g : n.gates)
    value_[static_cast<std::size_t>(g.id)] = eval(g) ? 1 : 0;
}

DelayMeasurement Simulator::settle(const std::vector<std::uint8_t>& prev_inputs,
                                   const std::vector<std::uint8_t>& new_inputs) {
  const Netlist& n = *nl_;
  if (prev_inputs.size() != n.primary_inputs.size() ||
      new_inputs.size() != n.primary_inputs.size())
    throw std::runtime_error("settle: input width mismatch");

  steady_state(prev_inputs);

  // (time, node id, version); min-heap, ties by node id for determinism
  struct Ev {
    std::int64_t time;
    int node;
    std::uint32_t version;
  };
  auto cmp = [](const Ev& a, const Ev& b) {
    return a.time != b.time ? a.time > b.time : a.node > b.node;
  };
  std::priority_queue<Ev, std::vector<Ev>, decltype(cmp)> heap(cmp);

  // Recompute a gate after one of its fanins changed at time t, applying
  // inertial-delay reconciliation with any pending event.
  auto touch = [&](int gi, std::int64_t t) {
    const Gate& g = n.gates[static_cast<std::size_t>(gi)];
    const std::uint8_t target = eval(g) ? 1 : 0;
    const std::size_t sgi = static_cast<std::size_t>(gi);
    const bool has_pending = pend_time_[sgi] >= 0;
    if (has_pending) {
      if (pend_value_[sgi] == target) return; // pending already heads there
      // contradicting event: cancel, maybe reschedule
      pend_time_[sgi] = -1;
      ++pend_version_[sgi];
    }
    if (target != value_[static_cast<std::size_t>(g.id)]) {
      pend_time_[sgi] = t + g.delay_ps;
      pend_value_[sgi] = target;
      heap.push({t + g.delay_ps, g.id, pend_version_[sgi]});
    }
  };

  // apply new inputs at t=0
  for (std::size_t i = 0; i < n.primary_inputs.size(); ++i) {
    const std::size_t node = static_cast<std::size_t>(n.primary_inputs[i]);
    const std::uint8_t nv = new_inputs[i] ? 1 : 0;
    if (value_[node] != nv) {
      value_[node] = nv;
      for (int gi : fanout_[node]) touch(gi, 0);
    }
  }

  DelayMeasurement m;
  while (!heap.empty()) {
    const Ev ev = heap.top();
    heap.pop();
    const std::size_t node = static_cast<std::size_t>(ev.node);
    const int gi = gate_of_node_[node];
    const std::size_t sgi = static_cast<std::size_t>(gi);
    if (pend_version_[sgi] != ev.version || pend_time_[sgi] != ev.time)
      continue; // cancelled
    pend_time_[sgi] = -1;
    ++pend_version_[sgi];
    value_[node] = pend_value_[sgi];
    ++m.events;
    if (is_output_[node]) m.delay_ps = ev.time;
    for (int succ : fanout_[node]) touch(succ, ev.time);
  }

  m.output_word = pack_outputs(n, value_);
  return m;
}

DelayMeasurement settle(const Netlist& n,
                        const std::vector<std::uint8_t>& prev_inputs,
                        const std::vector<std::uint8_t>& new_inputs) {
  Simulator sim(n);
  return sim.settle(prev_inputs, new_inputs);
}

std::vector<ProfileRecord> profile_trace(const ExecUnit& eu, const Trace& t) {
  if (t.instructions.empty())
    throw std::runtime_error("profile_trace: empty trace");
  Simulator sim(eu.netlist);
  std::vector<ProfileRecord> out;
  out.reserve(t.instructions.size());
  std::vector<std::uint8_t> prev = zero_stimulus(eu);
  std::uint32_t prev_op1 = 0, prev_op2 = 0, prev_output = 0;
  for (const Instruction& in : t.instructions) {
    const std::vector<std::uint8_t> cur = encode_stimulus(eu, in);
    const DelayMeasurement m = sim.settle(prev, cur);
    ProfileRecord r;
    r.instr = in;
    r.prev_op1 = prev_op1;
    r.prev_op2 = prev_op2;
    r.prev_output = prev_output;
    r.delay_ps = m.delay_ps;
    out.push_back(r);
    prev = cur;
    prev_op1 = in.op1;
    prev_op2 = in.op2;
    prev_output = static_cast<std::uint32_t>(m.output_word);
  }
  return out;
}

std::int64_t pair_delay(Simulator& sim, const ExecUnit& eu,
                        const Instruction& prev, const Instruction& cur) {
  return sim.settle(encode_stimulus(eu, prev), encode_stimulus(eu, cur)).delay_ps;
}

std::string format_profile_csv(const std::vector<ProfileRecord>& recs) {
  std::ostringstream out;
  out << "kind,subop,op1,op2,prev_op1,prev_op2,prev_output,delay_ps\n";
  char buf[160];
  for (const ProfileRecord& r : recs) {
    std::snprintf(buf, sizeof buf, "%s,%s,%08X,%08X,%08X,%08X,%08X,%lld\n",
                  to_string(r.instr.kind), to_string(r.instr.subop), r.instr.op1,
                  r.instr.op2, r.prev_op1, r.prev_op2, r.prev_output,
                  static_cast<long long>(r.delay_ps));
    out << buf;
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::uint32_t parse_hex32(const std::string& s, const std::string& ctx) {
  if (s.empty() || s.size() > 8)
    throw std::runtime_error(ctx + ": bad hex field '" + s + "'");
  std::uint32_t v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else throw std::runtime_error(ctx + ": bad hex field '" + s + "'");
    v = v * 16 + static_cast<std::uint32_t>(d);
  }
  return v;
}

} // namespace

std::vector<ProfileRecord> parse_profile_csv(const std::string& text,
                                             const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<ProfileRecord> recs;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::string ctx = origin + ":" + std::to_string(lineno);
    if (!saw_header) {
      if (line.rfind("kind,subop,op1,op2,", 0) != 0)
        throw std::runtime_error(ctx + ": bad profile CSV header");
      saw_header = true;
      continue;
    }
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 8) throw std::runtime_error(ctx + ": expected 8 fields");
    ProfileRecord r;
    r.instr.kind = op_kind_from_string(f[0]);
    r.instr.subop = sub_op_from_string(f[1]);
    r.instr.op1 = parse_hex32(f[2], ctx);
    r.instr.op2 = parse_hex32(f[3], ctx);
    r.prev_op1 = parse_hex32(f[4], ctx);
    r.prev_op2 = parse_hex32(f[5], ctx);
    r.prev_output = parse_hex32(f[6], ctx);
    r.delay_ps = std::stoll(f[7]);
    recs.push_back(r);
  }
  if (!saw_header) throw std::runtime_error(origin + ": missing profile CSV header");
  return recs;
}

void write_profile_file(const std::vector<ProfileRecord>& recs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << format_profile_csv(recs);
}

std::vector<ProfileRecord> parse_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_profile_csv(ss.str(), path);
}

} // namespace adaclk
