#pragma once

#include <cstdint>
#include <vector>

#include "adaclk/ml.hpp"
#include "adaclk/netlist.hpp"

namespace adaclk {

struct FixedPointSpec {
  int total_bits = 16;
  int fraction_bits = 8;
};

void validate(const FixedPointSpec& fp);

/// Nearest representable fixed-point code; throws on overflow.
std::int32_t quantize(double x, const FixedPointSpec& fp);
double dequantize(std::int32_t q, const FixedPointSpec& fp);

/// Quantizes a feature vector, saturating at the representable range.
std::vector<std::int32_t> quantize_features(const Eigen::Ref<const Eigen::VectorXd>& fv,
                                            const FixedPointSpec& fp);
FeatureVector dequantize_features(const std::vector<std::int32_t>& q,
                                  const FixedPointSpec& fp);

struct ForestNetlist {
  Netlist netlist;
  FixedPointSpec fp;
  int n_classes = 0;
  int comparators_physical = 0; // comparator circuits instantiated
  int class_bits = 0;           // output bus width
};

/// Compiles a trained forest into a combinational netlist: one
/// fixed-point comparator per internal node, AND-combined path lines per
/// leaf, per-class summation of leaf class counts across trees, and a
/// final argmax comparator chain (ties toward the higher class).
/// Functionally equivalent to rf_predict on dequantized inputs.
ForestNetlist forest_to_netlist(const RandomForest& model, const FixedPointSpec& fp,
                                GateDelays delays = {});

/// Stimulus for the generated netlist from quantized features.
std::vector<std::uint8_t> encode_quantized(const ForestNetlist& fn,
                                           const std::vector<std::int32_t>& q);

/// Predicted class read back from the output bus.
int decode_class(const ForestNetlist& fn, std::uint64_t output_word);

} // namespace adaclk
