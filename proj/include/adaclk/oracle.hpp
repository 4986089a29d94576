#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adaclk/isa.hpp"
#include "adaclk/netlist.hpp"

namespace adaclk {

struct DelayMeasurement {
  std::int64_t delay_ps = 0;   // time of the last primary-output change
  std::uint64_t output_word = 0;
  std::int64_t events = 0;     // applied gate output changes
};

struct ProfileRecord {
  Instruction instr;
  std::uint32_t prev_op1 = 0;
  std::uint32_t prev_op2 = 0;
  std::uint32_t prev_output = 0;
  std::int64_t delay_ps = 0;
};

/// Event-driven inertial-delay simulator over one netlist. Immutable
/// netlist is shared; each Simulator holds its own mutable node state,
/// so concurrent use requires one instance per thread.
class Simulator {
public:
  explicit Simulator(const Netlist& n);

  /// Settles the circuit under `prev_inputs`, then applies `new_inputs`
  /// at t=0 and propagates events until quiescence. Deterministic:
  /// same-time events are processed in node-id order.
  DelayMeasurement settle(const std::vector<std::uint8_t>& prev_inputs,
                          const std::vector<std::uint8_t>& new_inputs);

  const Netlist& netlist() const { return *nl_; }

private:
  void steady_state(const std::vector<std::uint8_t>& inputs);
  bool eval(const Gate& g) const;

  const Netlist* nl_;
  std::vector<int> gate_of_node_;          // node id -> gate index or -1
  std::vector<std::vector<int>> fanout_;   // node id -> dependent gate indices
  std::vector<char> is_output_;
  std::vector<std::uint8_t> value_;        // per node
  // pending event per gate
  std::vector<std::int64_t> pend_time_;
  std::vector<std::uint8_t> pend_value_;
  std::vector<std::uint32_t> pend_version_;
};

DelayMeasurement settle(const Netlist& n,
                        const std::vector<std::uint8_t>& prev_inputs,
                        const std::vector<std::uint8_t>& new_inputs);

/// Folds settle() over consecutive instructions; the first instruction
/// uses the all-zero stimulus as history.
std::vector<ProfileRecord> profile_trace(const ExecUnit& eu, const Trace& t);

/// Delay of `cur` executed after `prev`, with the circuit settled under
/// `prev`'s stimulus. Used by the balanced-dataset sampler.
std::int64_t pair_delay(Simulator& sim, const ExecUnit& eu,
                        const Instruction& prev, const Instruction& cur);

// Profile CSV: header
// "kind,subop,op1,op2,prev_op1,prev_op2,prev_output,delay_ps"; hex operands.
std::string format_profile_csv(const std::vector<ProfileRecord>& recs);
std::vector<ProfileRecord> parse_profile_csv(const std::string& text,
                                             const std::string& origin = "<string>");
void write_profile_file(const std::vector<ProfileRecord>& recs, const std::string& path);
std::vector<ProfileRecord> parse_profile_file(const std::string& path);

} // namespace adaclk
