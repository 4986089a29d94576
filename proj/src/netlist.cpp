#include "adaclk/netlist.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace adaclk {

const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Xor: return "XOR";
    case GateKind::Not: return "NOT";
    case GateKind::Nand: return "NAND";
    case GateKind::Nor: return "NOR";
    case GateKind::Mux2: return "MUX2";
    case GateKind::Buf: return "BUF";
  }
  return "?";
}

GateKind gate_kind_from_string(const std::string& s) {
  if (s == "AND") return GateKind::And;
  if (s == "OR") return GateKind::Or;
  if (s == "XOR") return GateKind::Xor;
  if (s == "NOT") return GateKind::Not;
  if (s == "NAND") return GateKind::Nand;
  if (s == "NOR") return GateKind::Nor;
  if (s == "MUX2") return GateKind::Mux2;
  if (s == "BUF") return GateKind::Buf;
  throw std::runtime_error("unknown gate kind: " + s);
}

int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::Not:
    case GateKind::Buf:
      return 1;
    case GateKind::Mux2:
      return 3;
    default:
      return 2;
  }
}

int GateDelays::delay_of(GateKind k) const {
  switch (k) {
    case GateKind::Not: return not_ps;
    case GateKind::Buf: return buf_ps;
    case GateKind::And: return and_ps;
    case GateKind::Or: return or_ps;
    case GateKind::Nand: return nand_ps;
    case GateKind::Nor: return nor_ps;
    case GateKind::Xor: return xor_ps;
    case GateKind::Mux2: return mux2_ps;
  }
  return 1;
}

bool eval_gate(GateKind kind, bool a, bool b, bool c) {
  switch (kind) {
    case GateKind::And: return a && b;
    case GateKind::Or: return a || b;
    case GateKind::Xor: return a != b;
    case GateKind::Not: return !a;
    case GateKind::Nand: return !(a && b);
    case GateKind::Nor: return !(a || b);
    case GateKind::Mux2: return a ? c : b; // (sel, a, b)
    case GateKind::Buf: return a;
  }
  return false;
}

void validate(const Netlist& n) {
  std::vector<char> defined(static_cast<std::size_t>(n.n_nodes), 0);
  for (int pi : n.primary_inputs) {
    if (pi < 0 || pi >= n.n_nodes)
      throw std::runtime_error("primary input id out of range");
    defined[static_cast<std::size_t>(pi)] = 1;
  }
  for (const Gate& g : n.gates) {
    if (g.id < 0 || g.id >= n.n_nodes)
      throw std::runtime_error("gate id out of range");
    if (defined[static_cast<std::size_t>(g.id)])
      throw std::runtime_error("node " + std::to_string(g.id) + " defined twice");
    if (g.delay_ps < 1)
      throw std::runtime_error("gate " + std::to_string(g.id) + " delay < 1 ps");
    if (g.fanin_count != gate_arity(g.kind))
      throw std::runtime_error("gate " + std::to_string(g.id) + " bad arity");
    for (int i = 0; i < g.fanin_count; ++i) {
      const int f = g.fanin[static_cast<std::size_t>(i)];
      if (f < 0 || f >= n.n_nodes || !defined[static_cast<std::size_t>(f)])
        throw std::runtime_error("gate " + std::to_string(g.id) +
                                 " fanin references undefined node " +
                                 std::to_string(f));
    }
    defined[static_cast<std::size_t>(g.id)] = 1;
  }
  for (int po : n.primary_outputs)
    if (po < 0 || po >= n.n_nodes || !defined[static_cast<std::size_t>(po)])
      throw std::runtime_error("primary output references undefined node");
}

std::int64_t static_longest_path(const Netlist& n) {
  // Kahn topological order over gate nodes; detects cycles in netlists
  // built without the earlier-defined ordering guarantee.
  const std::size_t nn = static_cast<std::size_t>(n.n_nodes);
  std::vector<int> gate_of_node(nn, -1);
  for (int i = 0; i < n.gate_count(); ++i)
    gate_of_node[static_cast<std::size_t>(n.gates[static_cast<std::size_t>(i)].id)] = i;

  std::vector<int> indeg(n.gates.size(), 0);
  std::vector<std::vector<int>> fanout(nn); // node -> dependent gate indices
  for (int gi = 0; gi < n.gate_count(); ++gi) {
    const Gate& g = n.gates[static_cast<std::size_t>(gi)];
    for (int i = 0; i < g.fanin_count; ++i) {
      const int f = g.fanin[static_cast<std::size_t>(i)];
      fanout[static_cast<std::size_t>(f)].push_back(gi);
      if (gate_of_node[static_cast<std::size_t>(f)] >= 0)
        ++indeg[static_cast<std::size_t>(gi)];
    }
  }

  std::vector<std::int64_t> dist(nn, 0);
  std::vector<int> ready;
  for (int gi = 0; gi < n.gate_count(); ++gi)
    if (indeg[static_cast<std::size_t>(gi)] == 0) ready.push_back(gi);
  std::size_t processed = 0;
  while (!ready.empty()) {
    const int gi = ready.back();
    ready.pop_back();
    ++processed;
    const Gate& g = n.gates[static_cast<std::size_t>(gi)];
    std::int64_t d = 0;
    for (int i = 0; i < g.fanin_count; ++i)
      d = std::max(d, dist[static_cast<std::size_t>(g.fanin[static_cast<std::size_t>(i)])]);
    dist[static_cast<std::size_t>(g.id)] = d + g.delay_ps;
    for (int succ : fanout[static_cast<std::size_t>(g.id)])
      if (--indeg[static_cast<std::size_t>(succ)] == 0) ready.push_back(succ);
  }
  if (processed != n.gates.size()) {
    for (std::size_t gi = 0; gi < n.gates.size(); ++gi)
      if (indeg[gi] > 0)
        throw std::runtime_error("cycle detected through gate " +
                                 std::to_string(n.gates[gi].id));
  }

  std::int64_t best = 0;
  for (int po : n.primary_outputs)
    best = std::max(best, dist[static_cast<std::size_t>(po)]);
  return best;
}

NetlistBuilder::NetlistBuilder(std::string name, GateDelays delays)
    : delays_(delays) {
  nl_.name = std::move(name);
}

int NetlistBuilder::input(const std::string& name) {
  const int id = nl_.n_nodes++;
  nl_.primary_inputs.push_back(id);
  nl_.input_names.push_back(name);
  return id;
}

int NetlistBuilder::gate(GateKind kind, int a) {
  Gate g;
  g.id = nl_.n_nodes++;
  g.kind = kind;
  g.delay_ps = delays_.delay_of(kind);
  g.fanin[0] = a;
  g.fanin_count = 1;
  nl_.gates.push_back(g);
  return g.id;
}

int NetlistBuilder::gate(GateKind kind, int a, int b) {
  Gate g;
  g.id = nl_.n_nodes++;
  g.kind = kind;
  g.delay_ps = delays_.delay_of(kind);
  g.fanin[0] = a;
  g.fanin[1] = b;
  g.fanin_count = 2;
  nl_.gates.push_back(g);
  return g.id;
}

int NetlistBuilder::mux2(int sel, int a, int b) {
  Gate g;
  g.id = nl_.n_nodes++;
  g.kind = GateKind::Mux2;
  g.delay_ps = delays_.delay_of(GateKind::Mux2);
  g.fanin = {sel, a, b};
  g.fanin_count = 3;
  nl_.gates.push_back(g);
  return g.id;
}

void NetlistBuilder::output(int node, const std::string& name) {
  nl_.primary_outputs.push_back(node);
  nl_.output_names.push_back(name);
}

Netlist NetlistBuilder::finish() {
  validate(nl_);
  return std::move(nl_);
}

namespace {

struct FullAdderOut {
  int sum;
  int carry;
};

FullAdderOut full_adder(NetlistBuilder& b, int a, int x, int cin) {
  const int axb = b.gate(GateKind::Xor, a, x);
  const int sum = b.gate(GateKind::Xor, axb, cin);
  const int t1 = b.gate(GateKind::And, a, x);
  const int t2 = b.gate(GateKind::And, cin, axb);
  const int carry = b.gate(GateKind::Or, t1, t2);
  return {sum, carry};
}

void check_width(int width, int lo, int hi, const char* what) {
  if (width < lo || width > hi)
    throw std::runtime_error(std::string(what) + " width out of range [" +
                             std::to_string(lo) + "," + std::to_string(hi) + "]");
}

// Adder core on existing input nodes; returns sum node ids.
std::vector<int> adder_core(NetlistBuilder& b, const std::vector<int>& a,
                            const std::vector<int>& x, int sub) {
  const int width = static_cast<int>(a.size());
  std::vector<int> sums;
  sums.reserve(static_cast<std::size_t>(width));
  int carry = sub; // subtract: invert b, carry-in 1
  for (int i = 0; i < width; ++i) {
    const int bx = b.gate(GateKind::Xor, x[static_cast<std::size_t>(i)], sub);
    const FullAdderOut fa = full_adder(b, a[static_cast<std::size_t>(i)], bx, carry);
    sums.push_back(fa.sum);
    carry = fa.carry;
  }
  return sums;
}

std::vector<int> logic_core(NetlistBuilder& b, const std::vector<int>& a,
                            const std::vector<int>& x, int lsel0, int lsel1) {
  std::vector<int> outs;
  outs.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int g_and = b.gate(GateKind::And, a[i], x[i]);
    const int g_or = b.gate(GateKind::Or, a[i], x[i]);
    const int g_xor = b.gate(GateKind::Xor, a[i], x[i]);
    const int g_nor = b.gate(GateKind::Nor, a[i], x[i]);
    const int lo = b.mux2(lsel0, g_and, g_or);   // 0:AND 1:OR
    const int hi = b.mux2(lsel0, g_xor, g_nor);  // 0:XOR 1:NOR
    outs.push_back(b.mux2(lsel1, lo, hi));
  }
  return outs;
}

// Low `width` bits of the product; AND partial products reduced by
// ripple-carry rows.
std::vector<int> multiplier_core(NetlistBuilder& b, const std::vector<int>& a,
                                 const std::vector<int>& x) {
  const int width = static_cast<int>(a.size());
  // acc = partial product row 0
  std::vector<int> acc;
  acc.reserve(static_cast<std::size_t>(width));
  for (int j = 0; j < width; ++j)
    acc.push_back(b.gate(GateKind::And, a[static_cast<std::size_t>(j)],
                         x[0]));
  for (int i = 1; i < width; ++i) {
    // add pp[i][j] into acc[i+j] for i+j < width, ripple carry
    int carry = -1;
    for (int j = 0; i + j < width; ++j) {
      const int pp = b.gate(GateKind::And, a[static_cast<std::size_t>(j)],
                            x[static_cast<std::size_t>(i)]);
      const std::size_t pos = static_cast<std::size_t>(i + j);
      if (carry < 0) {
        // half adder
        const int sum = b.gate(GateKind::Xor, acc[pos], pp);
        carry = b.gate(GateKind::And, acc[pos], pp);
        acc[pos] = sum;
      } else {
        const FullAdderOut fa = full_adder(b, acc[pos], pp, carry);
        acc[pos] = fa.sum;
        carry = fa.carry;
      }
    }
  }
  return acc;
}

std::vector<int> make_bus(NetlistBuilder& b, const std::string& prefix, int width) {
  std::vector<int> ids;
  ids.reserve(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) ids.push_back(b.input(prefix + std::to_string(i)));
  return ids;
}

} // namespace

Netlist build_ripple_adder(int width, GateDelays delays) {
  check_width(width, 2, 64, "adder");
  NetlistBuilder b("ripple_adder" + std::to_string(width), delays);
  const std::vector<int> a = make_bus(b, "a", width);
  const std::vector<int> x = make_bus(b, "b", width);
  const int sub = b.input("sub");
  const std::vector<int> sums = adder_core(b, a, x, sub);
  for (int i = 0; i < width; ++i)
    b.output(sums[static_cast<std::size_t>(i)], "s" + std::to_string(i));
  return b.finish();
}

Netlist build_logic_unit(int width, GateDelays delays) {
  check_width(width, 2, 64, "logic unit");
  NetlistBuilder b("logic_unit" + std::to_string(width), delays);
  const std::vector<int> a = make_bus(b, "a", width);
  const std::vector<int> x = make_bus(b, "b", width);
  const int lsel0 = b.input("lsel0");
  const int lsel1 = b.input("lsel1");
  const std::vector<int> outs = logic_core(b, a, x, lsel0, lsel1);
  for (int i = 0; i < width; ++i)
    b.output(outs[static_cast<std::size_t>(i)], "y" + std::to_string(i));
  return b.finish();
}

Netlist build_array_multiplier(int width, GateDelays delays) {
  check_width(width, 2, 32, "multiplier");
  NetlistBuilder b("array_multiplier" + std::to_string(width), delays);
  const std::vector<int> a = make_bus(b, "a", width);
  const std::vector<int> x = make_bus(b, "b", width);
  const std::vector<int> acc = multiplier_core(b, a, x);
  for (int i = 0; i < width; ++i)
    b.output(acc[static_cast<std::size_t>(i)], "p" + std::to_string(i));
  return b.finish();
}

ExecUnit build_exec_unit(int width, int mul_width, GateDelays delays) {
  check_width(width, 2, 64, "exec unit");
  check_width(mul_width, 2, 32, "exec unit multiplier");
  if (mul_width > width) mul_width = width;

  NetlistBuilder b("exec_unit" + std::to_string(width), delays);
  const int const0 = b.input("const0");
  const std::vector<int> op1 = make_bus(b, "op1_", width);
  const std::vector<int> op2 = make_bus(b, "op2_", width);
  const int usel0 = b.input("usel0");
  const int usel1 = b.input("usel1");
  const int sub = b.input("sub");
  const int lsel0 = b.input("lsel0");
  const int lsel1 = b.input("lsel1");

  const std::vector<int> add_s = adder_core(b, op1, op2, sub);
  const std::vector<int> log_s = logic_core(b, op1, op2, lsel0, lsel1);
  const std::vector<int> mul_a(op1.begin(), op1.begin() + mul_width);
  const std::vector<int> mul_b(op2.begin(), op2.begin() + mul_width);
  const std::vector<int> mul_s = multiplier_core(b, mul_a, mul_b);

  for (int i = 0; i < width; ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    const int lo = b.mux2(usel0, add_s[si], log_s[si]); // 00 adder, 01 logic
    const int mul_bit = i < mul_width ? mul_s[si] : const0;
    const int out = b.mux2(usel1, lo, mul_bit); // 1x multiplier
    b.output(out, "y" + std::to_string(i));
  }

  ExecUnit eu;
  eu.netlist = b.finish();
  eu.width = width;
  eu.mul_width = mul_width;
  eu.delays = delays;
  return eu;
}

std::vector<std::uint8_t> encode_stimulus(const ExecUnit& eu, const Instruction& in) {
  const std::size_t n = eu.netlist.primary_inputs.size();
  std::vector<std::uint8_t> v(n, 0);
  std::size_t p = 0;
  v[p++] = 0; // const0
  for (int i = 0; i < eu.width; ++i) v[p++] = (in.op1 >> i) & 1u;
  for (int i = 0; i < eu.width; ++i) v[p++] = (in.op2 >> i) & 1u;
  std::uint8_t usel0 = 0, usel1 = 0, sub = 0, lsel0 = 0, lsel1 = 0;
  switch (in.kind) {
    case OpKind::Arith:
    case OpKind::ArithImm:
      sub = in.subop == SubOp::Sub ? 1 : 0;
      break;
    case OpKind::Logical:
      usel0 = 1;
      switch (in.subop) {
        case SubOp::And: break;
        case SubOp::Or: lsel0 = 1; break;
        case SubOp::Xor: lsel1 = 1; break;
        case SubOp::Nor: lsel0 = lsel1 = 1; break;
        default: throw std::runtime_error("bad logical subop");
      }
      break;
    case OpKind::MulDiv:
      usel1 = 1;
      break;
  }
  v[p++] = usel0;
  v[p++] = usel1;
  v[p++] = sub;
  v[p++] = lsel0;
  v[p++] = lsel1;
  return v;
}

std::vector<std::uint8_t> zero_stimulus(const ExecUnit& eu) {
  return std::vector<std::uint8_t>(eu.netlist.primary_inputs.size(), 0);
}

std::uint64_t pack_outputs(const Netlist& n, const std::vector<std::uint8_t>& node_values) {
  std::uint64_t w = 0;
  for (std::size_t i = 0; i < n.primary_outputs.size() && i < 64; ++i)
    if (node_values[static_cast<std::size_t>(n.primary_outputs[i])]) w |= 1ull << i;
  return w;
}

std::string format_netlist(const Netlist& n) {
  std::ostringstream out;
  out << "netfmt v1\n";
  out << "name " << (n.name.empty() ? "unnamed" : n.name) << "\n";
  for (std::size_t i = 0; i < n.primary_inputs.size(); ++i)
    out << "input " << n.primary_inputs[i] << " " << n.input_names[i] << "\n";
  for (const Gate& g : n.gates) {
    out << "gate " << g.id << " " << to_string(g.kind) << " " << g.delay_ps;
    for (int i = 0; i < g.fanin_count; ++i)
      out << " " << g.fanin[static_cast<std::size_t>(i)];
    out << "\n";
  }
  for (std::size_t i = 0; i < n.primary_outputs.size(); ++i)
    out << "output " << n.primary_outputs[i] << " " << n.output_names[i] << "\n";
  return out.str();
}

Netlist parse_netlist(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  Netlist n;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  int max_id = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (!saw_header) {
      std::string ver;
      if (word != "netfmt" || !(ls >> ver) || ver != "v1")
        fail("expected header 'netfmt v1'");
      saw_header = true;
      continue;
    }
    if (word == "name") {
      ls >> n.name;
    } else if (word == "input") {
      int id;
      std::string nm;
      if (!(ls >> id >> nm)) fail("expected 'input <id> <name>'");
      n.primary_inputs.push_back(id);
      n.input_names.push_back(nm);
      max_id = std::max(max_id, id);
    } else if (word == "output") {
      int id;
      std::string nm;
      if (!(ls >> id >> nm)) fail("expected 'output <id> <name>'");
      n.primary_outputs.push_back(id);
      n.output_names.push_back(nm);
      max_id = std::max(max_id, id);
    } else if (word == "gate") {
      Gate g;
      std::string kind;
      if (!(ls >> g.id >> kind >> g.delay_ps))
        fail("expected 'gate <id> <kind> <delay_ps> <fanin...>'");
      try {
        g.kind = gate_kind_from_string(kind);
      } catch (const std::exception& e) {
        fail(e.what());
      }
      int f;
      while (ls >> f) {
        if (g.fanin_count >= 3) fail("too many fanins");
        g.fanin[static_cast<std::size_t>(g.fanin_count++)] = f;
      }
      if (g.fanin_count != gate_arity(g.kind))
        fail("wrong fanin count for " + kind);
      n.gates.push_back(g);
      max_id = std::max(max_id, g.id);
    } else {
      fail("unknown directive '" + word + "'");
    }
  }
  if (!saw_header) throw std::runtime_error(origin + ": missing 'netfmt v1' header");
  n.n_nodes = max_id + 1;
  try {
    validate(n);
  } catch (const std::exception& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  return n;
}

void write_netlist_file(const Netlist& n, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << format_netlist(n);
}

Netlist parse_netlist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_netlist(ss.str(), path);
}

} // namespace adaclk
