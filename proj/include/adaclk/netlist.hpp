#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "adaclk/isa.hpp"

namespace adaclk {

enum class GateKind : int { And = 0, Or, Xor, Not, Nand, Nor, Mux2, Buf };

const char* to_string(GateKind k);
GateKind gate_kind_from_string(const std::string& s);
int gate_arity(GateKind k);

/// Per-kind propagation delays in picoseconds.
struct GateDelays {
  int not_ps = 1;
  int buf_ps = 1;
  int and_ps = 2;
  int or_ps = 2;
  int nand_ps = 2;
  int nor_ps = 2;
  int xor_ps = 3;
  int mux2_ps = 3;

  int delay_of(GateKind k) const;
};

struct Gate {
  int id = -1; // node id of the gate output
  GateKind kind = GateKind::Buf;
  int delay_ps = 1;
  std::array<int, 3> fanin{-1, -1, -1}; // MUX2: (sel, a, b) -> sel ? b : a
  int fanin_count = 0;
};

/// Combinational gate graph. Node ids cover primary inputs and gate
/// outputs in one space; gates appear in definition order and may only
/// reference primary inputs or earlier gates.
struct Netlist {
  std::string name;
  int n_nodes = 0;
  std::vector<int> primary_inputs;   // ordered
  std::vector<int> primary_outputs;  // ordered
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  std::vector<Gate> gates;

  int gate_count() const { return static_cast<int>(gates.size()); }
};

/// Evaluates a single gate given fanin values.
bool eval_gate(GateKind kind, bool a, bool b, bool c);

/// Throws if the netlist violates structural invariants (arity, delay >= 1,
/// fanin ordering / acyclicity).
void validate(const Netlist& n);

/// Max over primary outputs of the longest delay-weighted input-to-output
/// path. Throws, naming a member gate, if a cycle is present.
std::int64_t static_longest_path(const Netlist& n);

class NetlistBuilder {
public:
  explicit NetlistBuilder(std::string name, GateDelays delays = {});

  int input(const std::string& name);
  int gate(GateKind kind, int a);
  int gate(GateKind kind, int a, int b);
  int mux2(int sel, int a, int b); // sel ? b : a
  void output(int node, const std::string& name);

  const GateDelays& delays() const { return delays_; }
  Netlist finish();

private:
  Netlist nl_;
  GateDelays delays_;
};

/// 2's-complement ripple-carry adder/subtractor.
/// Inputs: a[width], b[width], sub. Outputs: s[width].
Netlist build_ripple_adder(int width, GateDelays delays = {});

/// Bitwise AND/OR/XOR/NOR selected by 2 control inputs (lsel1,lsel0):
/// 00=AND 01=OR 10=XOR 11=NOR. Depth independent of width.
Netlist build_logic_unit(int width, GateDelays delays = {});

/// Array multiplier; low `width` bits of the product.
Netlist build_array_multiplier(int width, GateDelays delays = {});

/// Execution unit: adder, logic unit and multiplier behind an output mux.
struct ExecUnit {
  Netlist netlist;
  int width = 32;     // adder / logic datapath
  int mul_width = 16; // multiplier datapath (operands truncated)
  GateDelays delays;
};

/// Primary input order: const0, op1[0..width-1], op2[0..width-1],
/// usel0, usel1, sub, lsel0, lsel1. Unit select (usel1,usel0):
/// 00=adder 01=logic 10=multiplier.
ExecUnit build_exec_unit(int width, int mul_width = 16, GateDelays delays = {});

/// Encodes an instruction as an exec-unit stimulus vector.
std::vector<std::uint8_t> encode_stimulus(const ExecUnit& eu, const Instruction& in);

/// All-zero stimulus (history for the first instruction of a trace).
std::vector<std::uint8_t> zero_stimulus(const ExecUnit& eu);

/// Packs the primary outputs (LSB first) into a word.
std::uint64_t pack_outputs(const Netlist& n, const std::vector<std::uint8_t>& node_values);

// Netlist interchange: header "netfmt v1"; lines
// "input <id> <name>", "output <id> <name>",
// "gate <id> <kind> <delay_ps> <fanin...>".
std::string format_netlist(const Netlist& n);
Netlist parse_netlist(const std::string& text, const std::string& origin = "<string>");
void write_netlist_file(const Netlist& n, const std::string& path);
Netlist parse_netlist_file(const std::string& path);

} // namespace adaclk
