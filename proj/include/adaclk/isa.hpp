#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace adaclk {

enum class OpKind : int { Arith = 0, ArithImm = 1, Logical = 2, MulDiv = 3 };

enum class SubOp : int {
  Add = 0,
  Sub = 1,
  And = 2,
  Or = 3,
  Xor = 4,
  Nor = 5,
  Mul = 6, // low half of the product
};

constexpr int kNumOpKinds = 4;

const char* to_string(OpKind k);
const char* to_string(SubOp s);
OpKind op_kind_from_string(const std::string& s);
SubOp sub_op_from_string(const std::string& s);

/// True if `s` is a legal sub-operation for kind `k`.
bool sub_op_valid(OpKind k, SubOp s);

struct Instruction {
  OpKind kind = OpKind::Arith;
  SubOp subop = SubOp::Add;
  std::uint32_t op1 = 0;
  std::uint32_t op2 = 0; // for ArithImm: sign-extended immediate

  bool operator==(const Instruction&) const = default;
};

/// Integer-arithmetic reference semantics of one instruction.
/// `mul_width` is the multiplier datapath width; multiply truncates both
/// operands and the result to that width.
std::uint32_t reference_output(const Instruction& in, int mul_width = 16);

struct Trace {
  std::vector<Instruction> instructions;
  std::uint64_t seed = 0; // 0 if hand-written

  bool operator==(const Trace&) const = default;
};

enum class OperandDist { Uniform32, SmallMagnitude, SparseBits };

const char* to_string(OperandDist d);
OperandDist operand_dist_from_string(const std::string& s);

struct WorkloadSpec {
  std::size_t count = 0;
  std::array<double, kNumOpKinds> mix{0.25, 0.25, 0.25, 0.25};
  OperandDist operand_dist = OperandDist::Uniform32;
  std::uint64_t seed = 1;
};

/// Validates mix entries (nonnegative, sum to 1 within 1e-9); throws on
/// violation.
void validate(const WorkloadSpec& spec);

/// Deterministic function of spec.seed.
Trace gen_random_trace(const WorkloadSpec& spec);

/// Draws a single random instruction: kind from `mix`, subop uniform over
/// the kind's legal subops, operands from `dist`.
class Rng;
Instruction random_instruction(Rng& rng, const std::array<double, kNumOpKinds>& mix,
                               OperandDist dist);

// Trace file: header "tracefmt v1"; one instruction per line
// "KIND SUBOP op1_hex op2_hex"; '#' starts a comment.
void write_trace_file(const Trace& t, const std::string& path);
Trace parse_trace_file(const std::string& path);

std::string format_trace(const Trace& t);
Trace parse_trace(const std::string& text, const std::string& origin = "<string>");

} // namespace adaclk
