#include "adaclk/codegen.hpp"

#include <cmath>
#include <stdexcept>

namespace adaclk {

void validate(const FixedPointSpec& fp) {
  if (fp.total_bits < 2 || fp.total_bits > 31)
    throw std::runtime_error("fixed point: total_bits out of range [2,31]");
  if (fp.fraction_bits < 0 || fp.fraction_bits >= fp.total_bits)
    throw std::runtime_error("fixed point: fraction_bits must be < total_bits");
}

std::int32_t quantize(double x, const FixedPointSpec& fp) {
  validate(fp);
  const double scaled = x * static_cast<double>(1 << fp.fraction_bits);
  const std::int64_t q = std::llround(scaled);
  const std::int64_t lo = -(std::int64_t{1} << (fp.total_bits - 1));
  const std::int64_t hi = (std::int64_t{1} << (fp.total_bits - 1)) - 1;
  if (q < lo || q > hi)
    throw std::runtime_error("fixed point overflow quantizing " + std::to_string(x));
  return static_cast<std::int32_t>(q);
}

double dequantize(std::int32_t q, const FixedPointSpec& fp) {
  return static_cast<double>(q) / static_cast<double>(1 << fp.fraction_bits);
}

std::vector<std::int32_t> quantize_features(const Eigen::Ref<const Eigen::VectorXd>& fv,
                                            const FixedPointSpec& fp) {
  validate(fp);
  const std::int64_t lo = -(std::int64_t{1} << (fp.total_bits - 1));
  const std::int64_t hi = (std::int64_t{1} << (fp.total_bits - 1)) - 1;
  std::vector<std::int32_t> q(static_cast<std::size_t>(fv.size()));
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    const double scaled = fv(i) * static_cast<double>(1 << fp.fraction_bits);
    std::int64_t v = std::llround(scaled);
    v = std::max(lo, std::min(hi, v)); // saturate
    q[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(v);
  }
  return q;
}

FeatureVector dequantize_features(const std::vector<std::int32_t>& q,
                                  const FixedPointSpec& fp) {
  if (q.size() != kNumFeatures)
    throw std::runtime_error("dequantize_features: expected 9 values");
  FeatureVector fv;
  for (int i = 0; i < kNumFeatures; ++i)
    fv(i) = dequantize(q[static_cast<std::size_t>(i)], fp);
  return fv;
}

namespace {

struct ForestCompiler {
  const RandomForest& model;
  const FixedPointSpec& fp;
  NetlistBuilder b;
  int const0;
  int const1;
  std::vector<std::vector<int>> feature_bits; // [feature][bit]
  std::vector<int> offset_msb;                // NOT of each feature's sign bit
  int comparators = 0;

  // feature value in offset-binary (sign bit inverted), bit i
  int xbit(int feature, int i) {
    if (i == fp.total_bits - 1) return offset_msb[static_cast<std::size_t>(feature)];
    return feature_bits[static_cast<std::size_t>(feature)][static_cast<std::size_t>(i)];
  }

  // line that is high iff x[feature] > threshold (constant-folded borrow
  // chain for T' - x' in offset binary)
  int greater_than(int feature, double threshold) {
    const double scaled = std::floor(threshold * static_cast<double>(1 << fp.fraction_bits));
    const std::int64_t lo = -(std::int64_t{1} << (fp.total_bits - 1));
    const std::int64_t hi = (std::int64_t{1} << (fp.total_bits - 1)) - 1;
    if (scaled < static_cast<double>(lo) || scaled > static_cast<double>(hi))
      throw std::runtime_error("forest_to_netlist: threshold overflow under fixed point");
    const std::uint64_t toff = static_cast<std::uint64_t>(
        static_cast<std::int64_t>(scaled) + (std::int64_t{1} << (fp.total_bits - 1)));
    int borrow = const0;
    for (int i = 0; i < fp.total_bits; ++i) {
      const int x = xbit(feature, i);
      if ((toff >> i) & 1u)
        borrow = b.gate(GateKind::And, borrow, x);
      else
        borrow = b.gate(GateKind::Or, x, borrow);
    }
    ++comparators;
    return borrow;
  }

  // pairwise OR reduction; -1 encodes constant true
  int or_reduce(std::vector<int> lines) {
    if (lines.empty()) return const0;
    for (int l : lines)
      if (l < 0) return const1;
    while (lines.size() > 1) {
      std::vector<int> next;
      for (std::size_t i = 0; i + 1 < lines.size(); i += 2)
        next.push_back(b.gate(GateKind::Or, lines[i], lines[i + 1]));
      if (lines.size() % 2 == 1) next.push_back(lines.back());
      lines = std::move(next);
    }
    return lines.front();
  }

  // leaf lines of one tree: (line or -1 for constant-true, leaf node index)
  void collect_leaves(const DecisionTree& tree, int node, int reach,
                      std::vector<std::pair<int, int>>& out) {
    const TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
    if (nd.is_leaf) {
      out.emplace_back(reach, node);
      return;
    }
    const int gt = greater_than(nd.feature, nd.threshold);
    const int le = b.gate(GateKind::Not, gt);
    const int left_reach = reach < 0 ? le : b.gate(GateKind::And, reach, le);
    const int right_reach = reach < 0 ? gt : b.gate(GateKind::And, reach, gt);
    collect_leaves(tree, nd.left, left_reach, out);
    collect_leaves(tree, nd.right, right_reach, out);
  }

  // ripple add of two equal-width buses, final carry dropped
  std::vector<int> add_bus(const std::vector<int>& a, const std::vector<int>& x) {
    std::vector<int> sum;
    sum.reserve(a.size());
    int carry = const0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const int axb = b.gate(GateKind::Xor, a[i], x[i]);
      sum.push_back(b.gate(GateKind::Xor, axb, carry));
      const int t1 = b.gate(GateKind::And, a[i], x[i]);
      const int t2 = b.gate(GateKind::And, carry, axb);
      carry = b.gate(GateKind::Or, t1, t2);
    }
    return sum;
  }

  // borrow line of a - x (unsigned buses): high iff a < x
  int less_than(const std::vector<int>& a, const std::vector<int>& x) {
    int borrow = const0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const int na = b.gate(GateKind::Not, a[i]);
      const int t1 = b.gate(GateKind::And, na, x[i]);
      const int diff = b.gate(GateKind::Xor, a[i], x[i]);
      const int nd = b.gate(GateKind::Not, diff);
      const int t2 = b.gate(GateKind::And, borrow, nd);
      borrow = b.gate(GateKind::Or, t1, t2);
    }
    return borrow;
  }
};

} // namespace

ForestNetlist forest_to_netlist(const RandomForest& model, const FixedPointSpec& fp,
                                GateDelays delays) {
  validate(fp);
  if (model.trees.empty()) throw std::runtime_error("forest_to_netlist: untrained model");

  ForestCompiler fc{model, fp, NetlistBuilder("rf_stage", delays), 0, 0, {}, {}, 0};
  fc.const0 = fc.b.input("const0");
  fc.const1 = fc.b.input("const1");
  fc.feature_bits.resize(kNumFeatures);
  for (int f = 0; f < kNumFeatures; ++f)
    for (int i = 0; i < fp.total_bits; ++i)
      fc.feature_bits[static_cast<std::size_t>(f)].push_back(
          fc.b.input("f" + std::to_string(f) + "_b" + std::to_string(i)));
  for (int f = 0; f < kNumFeatures; ++f)
    fc.offset_msb.push_back(fc.b.gate(
        GateKind::Not,
        fc.feature_bits[static_cast<std::size_t>(f)][static_cast<std::size_t>(fp.total_bits - 1)]));

  // sum-bus width: enough for the sum of per-tree maximum leaf counts
  double total_max = 0.0;
  for (const DecisionTree& t : model.trees) {
    double tree_max = 0.0;
    for (const TreeNode& nd : t.nodes)
      if (nd.is_leaf) tree_max = std::max(tree_max, nd.class_counts.maxCoeff());
    total_max += tree_max;
  }
  int sum_bits = 1;
  while ((1ull << sum_bits) <= static_cast<std::uint64_t>(total_max)) ++sum_bits;

  // per-class summed counts across trees
  std::vector<std::vector<int>> class_sum(static_cast<std::size_t>(model.n_classes));
  for (const DecisionTree& tree : model.trees) {
    std::vector<std::pair<int, int>> leaves;
    fc.collect_leaves(tree, 0, -1, leaves);
    for (int c = 0; c < model.n_classes; ++c) {
      std::vector<int> bus;
      for (int k = 0; k < sum_bits; ++k) {
        std::vector<int> contributors;
        for (const auto& [line, node] : leaves) {
          const std::uint64_t count = static_cast<std::uint64_t>(
              tree.nodes[static_cast<std::size_t>(node)].class_counts(c));
          if ((count >> k) & 1ull) contributors.push_back(line);
        }
        bus.push_back(fc.or_reduce(std::move(contributors)));
      }
      std::vector<int>& acc = class_sum[static_cast<std::size_t>(c)];
      acc = acc.empty() ? bus : fc.add_bus(acc, bus);
    }
  }

  // argmax scan, ties toward the higher class
  int class_bits = 1;
  while ((1 << class_bits) < model.n_classes) ++class_bits;
  std::vector<int> best_val = class_sum[0];
  std::vector<int> best_idx(static_cast<std::size_t>(class_bits), fc.const0);
  for (int c = 1; c < model.n_classes; ++c) {
    const std::vector<int>& val = class_sum[static_cast<std::size_t>(c)];
    const int lt = fc.less_than(val, best_val);
    const int ge = fc.b.gate(GateKind::Not, lt);
    for (int k = 0; k < class_bits; ++k) {
      const int cbit = ((c >> k) & 1) ? fc.const1 : fc.const0;
      best_idx[static_cast<std::size_t>(k)] =
          fc.b.mux2(ge, best_idx[static_cast<std::size_t>(k)], cbit);
    }
    for (int k = 0; k < sum_bits; ++k)
      best_val[static_cast<std::size_t>(k)] =
          fc.b.mux2(ge, best_val[static_cast<std::size_t>(k)],
                    val[static_cast<std::size_t>(k)]);
  }

  for (int k = 0; k < class_bits; ++k)
    fc.b.output(best_idx[static_cast<std::size_t>(k)], "class" + std::to_string(k));

  ForestNetlist fn;
  fn.netlist = fc.b.finish();
  fn.fp = fp;
  fn.n_classes = model.n_classes;
  fn.comparators_physical = fc.comparators;
  fn.class_bits = class_bits;
  return fn;
}

std::vector<std::uint8_t> encode_quantized(const ForestNetlist& fn,
                                           const std::vector<std::int32_t>& q) {
  if (q.size() != kNumFeatures)
    throw std::runtime_error("encode_quantized: expected 9 values");
  std::vector<std::uint8_t> v(fn.netlist.primary_inputs.size(), 0);
  std::size_t p = 0;
  v[p++] = 0; // const0
  v[p++] = 1; // const1
  for (int f = 0; f < kNumFeatures; ++f) {
    const std::uint32_t bits = static_cast<std::uint32_t>(q[static_cast<std::size_t>(f)]);
    for (int i = 0; i < fn.fp.total_bits; ++i) v[p++] = (bits >> i) & 1u;
  }
  return v;
}

int decode_class(const ForestNetlist& fn, std::uint64_t output_word) {
  return static_cast<int>(output_word & ((1ull << fn.class_bits) - 1));
}

} // namespace adaclk
