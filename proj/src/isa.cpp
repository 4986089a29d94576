#include "adaclk/isa.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "adaclk/rng.hpp"

namespace adaclk {

const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::Arith: return "ARITH";
    case OpKind::ArithImm: return "ARITHIMM";
    case OpKind::Logical: return "LOGICAL";
    case OpKind::MulDiv: return "MULDIV";
  }
  return "?";
}

const char* to_string(SubOp s) {
  switch (s) {
    case SubOp::Add: return "ADD";
    case SubOp::Sub: return "SUB";
    case SubOp::And: return "AND";
    case SubOp::Or: return "OR";
    case SubOp::Xor: return "XOR";
    case SubOp::Nor: return "NOR";
    case SubOp::Mul: return "MUL";
  }
  return "?";
}

OpKind op_kind_from_string(const std::string& s) {
  if (s == "ARITH") return OpKind::Arith;
  if (s == "ARITHIMM") return OpKind::ArithImm;
  if (s == "LOGICAL") return OpKind::Logical;
  if (s == "MULDIV") return OpKind::MulDiv;
  throw std::runtime_error("unknown op kind: " + s);
}

SubOp sub_op_from_string(const std::string& s) {
  if (s == "ADD") return SubOp::Add;
  if (s == "SUB") return SubOp::Sub;
  if (s == "AND") return SubOp::And;
  if (s == "OR") return SubOp::Or;
  if (s == "XOR") return SubOp::Xor;
  if (s == "NOR") return SubOp::Nor;
  if (s == "MUL") return SubOp::Mul;
  throw std::runtime_error("unknown sub op: " + s);
}

bool sub_op_valid(OpKind k, SubOp s) {
  switch (k) {
    case OpKind::Arith:
    case OpKind::ArithImm:
      return s == SubOp::Add || s == SubOp::Sub;
    case OpKind::Logical:
      return s == SubOp::And || s == SubOp::Or || s == SubOp::Xor || s == SubOp::Nor;
    case OpKind::MulDiv:
      return s == SubOp::Mul;
  }
  return false;
}

std::uint32_t reference_output(const Instruction& in, int mul_width) {
  switch (in.subop) {
    case SubOp::Add: return in.op1 + in.op2;
    case SubOp::Sub: return in.op1 - in.op2;
    case SubOp::And: return in.op1 & in.op2;
    case SubOp::Or: return in.op1 | in.op2;
    case SubOp::Xor: return in.op1 ^ in.op2;
    case SubOp::Nor: return ~(in.op1 | in.op2);
    case SubOp::Mul: {
      const std::uint64_t mask =
          mul_width >= 32 ? 0xffffffffull : ((1ull << mul_width) - 1);
      const std::uint64_t p = (in.op1 & mask) * (in.op2 & mask);
      return static_cast<std::uint32_t>(p & mask);
    }
  }
  return 0;
}

const char* to_string(OperandDist d) {
  switch (d) {
    case OperandDist::Uniform32: return "uniform32";
    case OperandDist::SmallMagnitude: return "small-magnitude";
    case OperandDist::SparseBits: return "sparse-bits";
  }
  return "?";
}

OperandDist operand_dist_from_string(const std::string& s) {
  if (s == "uniform32") return OperandDist::Uniform32;
  if (s == "small-magnitude") return OperandDist::SmallMagnitude;
  if (s == "sparse-bits") return OperandDist::SparseBits;
  throw std::runtime_error("unknown operand distribution: " + s);
}

void validate(const WorkloadSpec& spec) {
  double sum = 0.0;
  for (double p : spec.mix) {
    if (p < 0.0) throw std::runtime_error("workload mix entry is negative");
    sum += p;
  }
  if (sum < 1.0 - 1e-9 || sum > 1.0 + 1e-9)
    throw std::runtime_error("workload mix does not sum to 1");
}

namespace {

std::uint32_t random_operand(Rng& rng, OperandDist dist) {
  switch (dist) {
    case OperandDist::Uniform32:
      return rng.next_u32();
    case OperandDist::SmallMagnitude: {
      // Magnitude log-uniform: pick a bit width, then a value below it.
      const int width = static_cast<int>(rng.below(33)); // 0..32
      if (width == 0) return 0;
      if (width == 32) return rng.next_u32();
      return static_cast<std::uint32_t>(rng.next_u32() & ((1u << width) - 1));
    }
    case OperandDist::SparseBits: {
      const int k = 1 + static_cast<int>(rng.below(6));
      std::uint32_t v = 0;
      for (int i = 0; i < k; ++i) v |= 1u << rng.below(32);
      return v;
    }
  }
  return 0;
}

SubOp random_subop(Rng& rng, OpKind kind) {
  switch (kind) {
    case OpKind::Arith:
    case OpKind::ArithImm:
      return rng.coin() ? SubOp::Add : SubOp::Sub;
    case OpKind::Logical:
      switch (rng.below(4)) {
        case 0: return SubOp::And;
        case 1: return SubOp::Or;
        case 2: return SubOp::Xor;
        default: return SubOp::Nor;
      }
    case OpKind::MulDiv:
      return SubOp::Mul;
  }
  return SubOp::Add;
}

std::uint32_t sign_extend16(std::uint32_t v) {
  return static_cast<std::uint32_t>(static_cast<std::int32_t>(
      static_cast<std::int16_t>(v & 0xffffu)));
}

} // namespace

Instruction random_instruction(Rng& rng, const std::array<double, kNumOpKinds>& mix,
                               OperandDist dist) {
  const double u = rng.real();
  double acc = 0.0;
  OpKind kind = OpKind::MulDiv;
  for (int k = 0; k < kNumOpKinds; ++k) {
    acc += mix[static_cast<std::size_t>(k)];
    if (u < acc) {
      kind = static_cast<OpKind>(k);
      break;
    }
  }
  Instruction in;
  in.kind = kind;
  in.subop = random_subop(rng, kind);
  in.op1 = random_operand(rng, dist);
  in.op2 = random_operand(rng, dist);
  if (kind == OpKind::ArithImm) in.op2 = sign_extend16(in.op2);
  return in;
}

Trace gen_random_trace(const WorkloadSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  Trace t;
  t.seed = spec.seed;
  t.instructions.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i)
    t.instructions.push_back(random_instruction(rng, spec.mix, spec.operand_dist));
  return t;
}

std::string format_trace(const Trace& t) {
  std::ostringstream out;
  out << "tracefmt v1\n";
  char buf[64];
  for (const Instruction& in : t.instructions) {
    std::snprintf(buf, sizeof buf, "%s %s %08X %08X\n", to_string(in.kind),
                  to_string(in.subop), in.op1, in.op2);
    out << buf;
  }
  return out.str();
}

Trace parse_trace(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  Trace t;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string w1;
    if (!(ls >> w1)) continue; // blank
    if (!saw_header) {
      std::string w2;
      if (w1 != "tracefmt" || !(ls >> w2) || w2 != "v1")
        fail("expected header 'tracefmt v1'");
      saw_header = true;
      continue;
    }
    std::string sub, h1, h2;
    if (!(ls >> sub >> h1 >> h2)) fail("expected 'kind subop op1_hex op2_hex'");
    Instruction ins;
    try {
      ins.kind = op_kind_from_string(w1);
      ins.subop = sub_op_from_string(sub);
    } catch (const std::exception& e) {
      fail(e.what());
    }
    if (!sub_op_valid(ins.kind, ins.subop)) fail("subop not valid for kind");
    auto parse_hex = [&](const std::string& h) -> std::uint32_t {
      if (h.empty() || h.size() > 8) fail("bad hex operand '" + h + "'");
      std::uint32_t v = 0;
      for (char c : h) {
        if (!std::isxdigit(static_cast<unsigned char>(c)))
          fail("bad hex operand '" + h + "'");
        v = v * 16 + static_cast<std::uint32_t>(
                         std::isdigit(static_cast<unsigned char>(c))
                             ? c - '0'
                             : std::tolower(c) - 'a' + 10);
      }
      return v;
    };
    ins.op1 = parse_hex(h1);
    ins.op2 = parse_hex(h2);
    t.instructions.push_back(ins);
  }
  if (!saw_header && !t.instructions.empty())
    throw std::runtime_error(origin + ": missing 'tracefmt v1' header");
  return t;
}

void write_trace_file(const Trace& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << format_trace(t);
}

Trace parse_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str(), path);
}

} // namespace adaclk
