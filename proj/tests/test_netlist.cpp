#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "adaclk/netlist.hpp"
#include "adaclk/oracle.hpp"
#include "adaclk/rng.hpp"

using namespace adaclk;

namespace {

// steady-state evaluation: settle from the all-zero stimulus
std::uint64_t eval(const Netlist& n, const std::vector<std::uint8_t>& inputs) {
  const std::vector<std::uint8_t> zero(inputs.size(), 0);
  return settle(n, zero, inputs).output_word;
}

std::vector<std::uint8_t> adder_stimulus(std::uint32_t a, std::uint32_t b, bool sub) {
  std::vector<std::uint8_t> v(65, 0);
  for (int i = 0; i < 32; ++i) {
    v[static_cast<std::size_t>(i)] = (a >> i) & 1u;
    v[static_cast<std::size_t>(32 + i)] = (b >> i) & 1u;
  }
  v[64] = sub;
  return v;
}

std::vector<std::uint8_t> logic_stimulus(std::uint32_t a, std::uint32_t b, int sel) {
  std::vector<std::uint8_t> v(66, 0);
  for (int i = 0; i < 32; ++i) {
    v[static_cast<std::size_t>(i)] = (a >> i) & 1u;
    v[static_cast<std::size_t>(32 + i)] = (b >> i) & 1u;
  }
  v[64] = sel & 1;
  v[65] = (sel >> 1) & 1;
  return v;
}

} // namespace

TEST_CASE("ripple adder functional identity") {
  const Netlist add = build_ripple_adder(32);
  validate(add);
  CHECK(eval(add, adder_stimulus(7, 5, false)) == 12);
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const std::uint32_t a = rng.next_u32(), b = rng.next_u32();
    CHECK(eval(add, adder_stimulus(a, b, false)) == ((a + b) & 0xFFFFFFFFu));
    CHECK(eval(add, adder_stimulus(a, b, true)) == ((a - b) & 0xFFFFFFFFu));
  }
}

TEST_CASE("minimal width-2 adder") {
  const Netlist add = build_ripple_adder(2);
  std::vector<std::uint8_t> v(5, 0);
  v[0] = 1; // a = 1
  v[2] = 1; // b = 1
  CHECK(settle(add, std::vector<std::uint8_t>(5, 0), v).output_word == 2);
  CHECK_THROWS(build_ripple_adder(1));
  CHECK_THROWS(build_ripple_adder(65));
}

TEST_CASE("logic unit") {
  const Netlist lu = build_logic_unit(32);
  validate(lu);
  CHECK(eval(lu, logic_stimulus(0xF0F0F0F0u, 0x0F0F0F0Fu, 0)) == 0); // AND
  CHECK(eval(lu, logic_stimulus(0xF0F0F0F0u, 0x0F0F0F0Fu, 1)) == 0xFFFFFFFFu); // OR
  CHECK(eval(lu, logic_stimulus(0, 0, 3)) == 0xFFFFFFFFu); // NOR
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const std::uint32_t x = rng.next_u32();
    CHECK(eval(lu, logic_stimulus(x, x, 2)) == 0); // XOR(x, x)
  }
}

TEST_CASE("array multiplier") {
  const Netlist mul = build_array_multiplier(16);
  validate(mul);
  std::vector<std::uint8_t> v(32, 0);
  auto set = [&](std::uint32_t a, std::uint32_t b) {
    for (int i = 0; i < 16; ++i) {
      v[static_cast<std::size_t>(i)] = (a >> i) & 1u;
      v[static_cast<std::size_t>(16 + i)] = (b >> i) & 1u;
    }
  };
  set(3, 5);
  CHECK(eval(mul, v) == 15);
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const std::uint32_t x = rng.next_u32() & 0xFFFFu;
    set(x, 0);
    CHECK(eval(mul, v) == 0);
    const std::uint32_t y = rng.next_u32() & 0xFFFFu;
    set(x, y);
    CHECK(eval(mul, v) == ((x * y) & 0xFFFFu));
  }
}

TEST_CASE("static longest path basics") {
  GateDelays d;
  d.buf_ps = 5;
  NetlistBuilder b5("buf5", d);
  const int in5 = b5.input("a");
  b5.output(b5.gate(GateKind::Buf, in5), "y");
  CHECK(static_longest_path(b5.finish()) == 5);

  NetlistBuilder bc("chain");
  int node = bc.input("a");
  for (int i = 0; i < 17; ++i) node = bc.gate(GateKind::Not, node);
  bc.output(node, "y");
  CHECK(static_longest_path(bc.finish()) == 17);
}

TEST_CASE("longest-path ordering across units") {
  const std::int64_t lp_add = static_longest_path(build_ripple_adder(32));
  const std::int64_t lp_logic = static_longest_path(build_logic_unit(32));
  const std::int64_t lp_mul = static_longest_path(build_array_multiplier(16));
  // operand-invert XOR, first full-adder XOR, first AND/OR carry pair,
  // AND+OR per remaining carry stage, final sum XOR
  CHECK(lp_add == 3 + 3 + 2 + 2 + 30 * 4 + 3);
  CHECK(lp_logic < lp_add);
  CHECK(lp_mul > lp_add);
}

TEST_CASE("exec unit selects the right function") {
  const ExecUnit eu = build_exec_unit(32);
  validate(eu.netlist);
  Instruction in;
  in.kind = OpKind::Arith;
  in.subop = SubOp::Add;
  in.op1 = 1;
  in.op2 = 2;
  CHECK(settle(eu.netlist, zero_stimulus(eu), encode_stimulus(eu, in)).output_word == 3);

  const std::int64_t lp_mul = static_longest_path(build_array_multiplier(16));
  const GateDelays d;
  CHECK(static_longest_path(eu.netlist) == lp_mul + d.mux2_ps);
}

TEST_CASE("cycle detection") {
  Netlist n;
  n.name = "loop";
  n.n_nodes = 3;
  n.primary_inputs = {0};
  n.input_names = {"a"};
  Gate g1{1, GateKind::And, 2, {2, 0, -1}, 2};
  Gate g2{2, GateKind::And, 2, {1, 0, -1}, 2};
  n.gates = {g1, g2};
  n.primary_outputs = {2};
  n.output_names = {"y"};
  CHECK_THROWS_WITH_AS(static_longest_path(n), doctest::Contains("cycle"),
                       std::runtime_error);
}

TEST_CASE("netlist file round trip") {
  const ExecUnit eu = build_exec_unit(8, 4);
  const std::string text = format_netlist(eu.netlist);
  const Netlist back = parse_netlist(text, "mem");
  CHECK(back.n_nodes == eu.netlist.n_nodes);
  CHECK(back.gates.size() == eu.netlist.gates.size());
  CHECK(format_netlist(back) == text);
  CHECK(static_longest_path(back) == static_longest_path(eu.netlist));
}
