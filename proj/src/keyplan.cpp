// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>
#include <string>
#include <vector>

#include "slotcnn/keyplan.hpp"

namespace slotcnn {

namespace {

std::size_t log2_exact(std::size_t v) {
  std::size_t l = 0;
  while ((std::size_t{1} << l) < v) {
    ++l;
  }
  return l;
}

/// Taps t = i*W + j for a k x k window, the (0,0) tap excluded; computed
/// once per layer and shared across output channels.
KeySet tap_keys(std::size_t k, std::size_t W) {
  KeySet ks;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const long t = static_cast<long>(i * W + j);
      if (t != 0) {
        ks.add(t, 1);
      }
    }
  }
  return ks;
}

/// One extraction-flavor striding invocation.
KeySet stride_v1_keys(std::size_t W, std::size_t S, std::size_t W_out) {
  KeySet ks;
  if (W_out >= 2) {
    ks.add(static_cast<long>(S * W), static_cast<long>(W_out - 1));
    if (S >= 2) {
      ks.add(static_cast<long>(S - 1),
             static_cast<long>(W_out * (W_out - 1)));
    }
    for (std::size_t a = 1; a < W_out; ++a) {
      ks.add(-static_cast<long>(a * W_out), 1);
    }
  }
  return ks;
}

/// One masked-compaction invocation over `blocks` adjacent channel blocks.
KeySet stride_v2_keys(std::size_t W, std::size_t S, std::size_t W_out,
                      std::size_t blocks) {
  KeySet ks;
  if (S >= 2) {
    const std::size_t l = log2_exact(W_out);
    for (std::size_t s = 1; s <= l; ++s) {
      ks.add(static_cast<long>((S - 1) << (s - 1)), 1);
    }
  }
  const std::size_t step_row = S * W - W_out;
  const std::size_t step_chan = W * W - S * W * (W_out - 1) - W_out;
  for (std::size_t c = 0; c < blocks; ++c) {
    for (std::size_t a = 0; a < W_out; ++a) {
      if (c == 0 && a == 0) {
        continue;
      }
      const std::size_t step = (a == 0) ? step_chan : step_row;
      if (step != 0) {
        ks.add(static_cast<long>(step), 1);
      }
    }
  }
  return ks;
}

}  // namespace

void KeySet::add(long index, long count) {
  if (index == 0) {
    throw InternalError("rotation index 0 has no key");
  }
  if (count <= 0) {
    throw InternalError("key usage counts must be positive");
  }
  usage[index] += count;
}

void KeySet::merge(const KeySet& other) { merge_scaled(other, 1); }

void KeySet::merge_scaled(const KeySet& other, long times) {
  if (times <= 0) {
    throw InternalError("key usage counts must be positive");
  }
  for (const auto& [index, count] : other.usage) {
    usage[index] += count * times;
  }
}

std::vector<long> KeySet::indices() const {
  std::vector<long> out;
  out.reserve(usage.size());
  for (const auto& [index, count] : usage) {
    out.push_back(index);
  }
  return out;
}

long KeySet::total_uses() const {
  long total = 0;
  for (const auto& [index, count] : usage) {
    total += count;
  }
  return total;
}

KeySet derive_pad_keys(std::size_t C, std::size_t W, std::size_t P) {
  KeySet ks;
  if (P == 0) {
    return ks;
  }
  const std::size_t Wp = W + 2 * P;
  const std::size_t mp = Wp * Wp;
  if (W >= 2) {
    ks.add(static_cast<long>(W), static_cast<long>(C * (W - 1)));
    ks.add(-static_cast<long>(Wp), static_cast<long>(C * (W - 1)));
  }
  if (C >= 2) {
    ks.add(static_cast<long>(W * W), static_cast<long>(C - 1));
    for (std::size_t c = 1; c < C; ++c) {
      ks.add(-static_cast<long>(c * mp), 1);
    }
  }
  ks.add(-static_cast<long>(P * (Wp + 1)), 1);
  return ks;
}

KeySet derive_stride_keys(StrideVariant variant, std::size_t W, std::size_t S,
                          std::size_t W_out, std::size_t blocks) {
  if (variant == StrideVariant::masked &&
      detail::masked_stride_applicable(W_out)) {
    return stride_v2_keys(W, S, W_out, blocks);
  }
  // The extraction flavor (and the masked flavor's fallback) runs once per
  // block; the joint form does not exist for it.
  KeySet ks;
  ks.merge_scaled(stride_v1_keys(W, S, W_out),
                  static_cast<long>(std::max<std::size_t>(blocks, 1)));
  return ks;
}

KeySet derive_conv_keys(const ConvConfig& cfg, std::size_t C, std::size_t W) {
  KeySet ks;
  const std::size_t F = cfg.out_channels;

  if (cfg.mode == ConvMode::special3x3) {
    const std::size_t m = W * W;
    ks.add(-static_cast<long>(W), 1);
    ks.add(static_cast<long>(W), 1);
    ks.add(-1, 3);
    ks.add(1, 3);
    if (C > 1) {
      ks.add(static_cast<long>(m), static_cast<long>(F * (C - 1)));
    }
    for (std::size_t f = 1; f < F; ++f) {
      ks.add(-static_cast<long>(f * m), 1);
    }
    return ks;
  }

  const std::size_t Wp = W + 2 * cfg.padding;
  const std::size_t W_out =
      conv_output_width(W, cfg.kernel, cfg.stride, cfg.padding);
  const std::size_t mo = W_out * W_out;
  ks.merge(derive_pad_keys(C, W, cfg.padding));

  if (cfg.mode == ConvMode::grouped && C > 1) {
    ks.merge(tap_keys(cfg.kernel, Wp));
    const std::size_t U = F / C;
    if (detail::masked_stride_applicable(W_out)) {
      ks.merge_scaled(stride_v2_keys(Wp, cfg.stride, W_out, C),
                      static_cast<long>(U));
      if (U > 1) {
        ks.add(-static_cast<long>(C * mo), static_cast<long>(U - 1));
      }
    } else {
      // Per-member fallback: pull each member's block to the front, stride
      // it with the extraction flavor, place it.
      const std::size_t mp = Wp * Wp;
      for (std::size_t c = 1; c < C; ++c) {
        ks.add(static_cast<long>(c * mp), static_cast<long>(U));
      }
      ks.merge_scaled(stride_v1_keys(Wp, cfg.stride, W_out),
                      static_cast<long>(F));
      for (std::size_t f = 1; f < F; ++f) {
        ks.add(-static_cast<long>(f * mo), 1);
      }
    }
    return ks;
  }

  // Generic path (also the grouped config with a single group).
  ks.merge(tap_keys(cfg.kernel, Wp));
  if (C > 1) {
    ks.add(static_cast<long>(Wp * Wp), static_cast<long>(F * (C - 1)));
  }
  if (!(cfg.stride == 1 && W_out == Wp)) {
    KeySet stride = (cfg.stride_variant == StrideVariant::masked &&
                     detail::masked_stride_applicable(W_out))
                        ? stride_v2_keys(Wp, cfg.stride, W_out, 1)
                        : stride_v1_keys(Wp, cfg.stride, W_out);
    ks.merge_scaled(stride, static_cast<long>(F));
  }
  for (std::size_t f = 1; f < F; ++f) {
    ks.add(-static_cast<long>(f * mo), 1);
  }
  return ks;
}

KeySet derive_pool_keys(const PoolConfig& cfg, std::size_t C, std::size_t W) {
  KeySet ks;
  const std::size_t m = W * W;

  if (cfg.kind == PoolKind::global || cfg.kind == PoolKind::whole_channel) {
    for (long amount : detail::block_sum_rotations(m)) {
      ks.add(amount, 1);
    }
    if (C > 1) {
      ks.add(static_cast<long>(m), static_cast<long>(C - 1));
      ks.add(-1, static_cast<long>(C - 1));
    }
    return ks;
  }

  const std::size_t W_out = conv_output_width(W, cfg.kernel, cfg.stride, 0);
  ks.merge(tap_keys(cfg.kernel, W));
  if (cfg.stride == 1 && W_out == W) {
    return ks;  // 1x1 window: the scaling product is the whole layer
  }
  if (C > 1) {
    ks.add(static_cast<long>(m), static_cast<long>(C - 1));
  }
  KeySet stride = (cfg.stride_variant == StrideVariant::masked &&
                   detail::masked_stride_applicable(W_out))
                      ? stride_v2_keys(W, cfg.stride, W_out, 1)
                      : stride_v1_keys(W, cfg.stride, W_out);
  ks.merge_scaled(stride, static_cast<long>(C));
  for (std::size_t c = 1; c < C; ++c) {
    ks.add(-static_cast<long>(c * W_out * W_out), 1);
  }
  return ks;
}

KeySet derive_fc_keys(const FcConfig& cfg) {
  KeySet ks;
  const std::size_t n = cfg.inputs, m = cfg.outputs;
  const std::size_t p2 = std::bit_ceil(n);
  for (std::size_t off = 1; off < p2; off <<= 1) {
    ks.add(static_cast<long>(off), static_cast<long>(m));
  }
  const std::size_t r = (m <= cfg.merge_budget + 1) ? m : cfg.merge_budget;
  const std::size_t T = (m + r - 1) / r;
  const std::size_t last = m - (T - 1) * r;  // size of the final group
  for (std::size_t u = 1; u < r; ++u) {
    const long uses =
        static_cast<long>(T - 1) + (last > u ? 1 : 0);
    if (uses > 0) {
      ks.add(-static_cast<long>(u), uses);
    }
  }
  if (T > 1) {
    ks.add(-static_cast<long>(r), static_cast<long>(T - 1));
  }
  return ks;
}

// --------------------------------------------------------------- planning

namespace {

BlockPlan finalize_plan(const std::vector<LayerKeys>& layers,
                        std::vector<BlockPlan::Block> blocks) {
  BlockPlan plan;
  plan.blocks = std::move(blocks);
  for (auto& block : plan.blocks) {
    for (std::size_t i = block.first_layer; i <= block.last_layer; ++i) {
      block.keys.merge(layers[i].keys);
    }
    plan.union_keys.merge(block.keys);
    plan.peak_resident_keys =
        std::max(plan.peak_resident_keys, block.keys.size());
  }
  for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
    const auto& block = plan.blocks[b];
    std::string line = (b == 0 ? "load block " : "swap to block ") +
                       std::to_string(b) + " (" +
                       std::to_string(block.keys.size()) +
                       " rotation keys) before layer " +
                       std::to_string(block.first_layer) + " (" +
                       layers[block.first_layer].name + ")";
    plan.residency_events.push_back(std::move(line));
  }
  return plan;
}

}  // namespace

std::size_t BlockPlan::block_of_layer(std::size_t layer) const {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (layer >= blocks[b].first_layer && layer <= blocks[b].last_layer) {
      return b;
    }
  }
  return npos;
}

BlockPlan plan_single_block(const std::vector<LayerKeys>& layers) {
  if (layers.empty()) {
    return {};
  }
  std::vector<BlockPlan::Block> blocks(1);
  blocks[0].first_layer = 0;
  blocks[0].last_layer = layers.size() - 1;
  return finalize_plan(layers, std::move(blocks));
}

BlockPlan plan_blocks(const std::vector<LayerKeys>& layers) {
  if (layers.empty()) {
    return {};
  }
  std::vector<BlockPlan::Block> blocks;
  std::size_t first = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const bool boundary = layers[i].ends_block && i + 1 < layers.size();
    if (boundary || i + 1 == layers.size()) {
      blocks.push_back({first, i, {}});
      first = i + 1;
    }
  }
  return finalize_plan(layers, std::move(blocks));
}

BlockPlan plan_blocks(
    const std::vector<LayerKeys>& layers,
    const std::vector<std::pair<std::size_t, std::size_t>>& ranges) {
  if (layers.empty()) {
    return {};
  }
  std::size_t expect = 0;
  std::vector<BlockPlan::Block> blocks;
  for (const auto& [first, last] : ranges) {
    if (first != expect || last < first || last >= layers.size()) {
      throw ShapeError(
          "block ranges must tile the layer list in order without gaps");
    }
    blocks.push_back({first, last, {}});
    expect = last + 1;
  }
  if (expect != layers.size()) {
    throw ShapeError("block ranges leave trailing layers unassigned");
  }
  return finalize_plan(layers, std::move(blocks));
}

TraceCheck verify_trace(const BlockPlan& plan,
                        const std::vector<TraceEvent>& events) {
  TraceCheck check;
  std::map<long, long> observed;
  std::size_t current_layer = BlockPlan::npos;

  for (std::size_t idx = 0; idx < events.size(); ++idx) {
    const TraceEvent& e = events[idx];
    if (e.kind == TraceEvent::Kind::marker) {
      // Layer boundaries carry "layer:<index>:<name>"; other markers are
      // free-form notes.
      constexpr const char* prefix = "layer:";
      if (e.label.rfind(prefix, 0) == 0) {
        const std::size_t colon = e.label.find(':', 6);
        try {
          current_layer = static_cast<std::size_t>(
              std::stoul(e.label.substr(6, colon - 6)));
        } catch (const std::exception&) {
          check.violations.push_back(
              {idx, 0, BlockPlan::npos, "unparseable layer marker: " + e.label});
        }
      }
      continue;
    }
    if (e.kind != TraceEvent::Kind::rotation) {
      continue;
    }
    ++check.rotations_checked;
    observed[e.rotation_index] += 1;
    if (current_layer == BlockPlan::npos) {
      check.violations.push_back(
          {idx, e.rotation_index, BlockPlan::npos,
           "rotation issued before any layer marker"});
      continue;
    }
    const std::size_t b = plan.block_of_layer(current_layer);
    if (b == BlockPlan::npos) {
      check.violations.push_back({idx, e.rotation_index, current_layer,
                                  "layer is not covered by any block"});
      continue;
    }
    if (!plan.blocks[b].keys.contains(e.rotation_index)) {
      check.violations.push_back(
          {idx, e.rotation_index, current_layer,
           "rotation index " + std::to_string(e.rotation_index) +
               " is not resident in block " + std::to_string(b)});
    }
  }
  for (const auto& [index, count] : plan.union_keys.usage) {
    if (observed.find(index) == observed.end()) {
      check.unused_keys.push_back(index);
    }
  }
  return check;
}

MemoryModel MemoryModel::for_context(const ContextConfig& config) {
  MemoryModel model;
  // Two ring elements per decomposition digit, (depth + 2) residue limbs
  // (the working tower plus the extension limb), 8 bytes per coefficient.
  const std::size_t limbs = static_cast<std::size_t>(config.depth_budget) + 2;
  model.bytes_per_key = 2ull * config.crypto.key_switch_digits *
                        config.ring_dimension * limbs * 8ull;
  model.fixed_overhead_bytes = 0;
  model.assumptions =
      "bytes_per_key = 2 ring elements x " +
      std::to_string(config.crypto.key_switch_digits) +
      " decomposition digits x " + std::to_string(limbs) +
      " residue limbs x " + std::to_string(config.ring_dimension) +
      " coefficients x 8 bytes";
  return model;
}

MemoryEstimate estimate_memory(const BlockPlan& plan,
                               const MemoryModel& model) {
  MemoryEstimate est;
  est.total_keys = plan.union_keys.size();
  est.resident_keys = plan.peak_resident_keys;
  est.preload_bytes =
      est.total_keys * model.bytes_per_key + model.fixed_overhead_bytes;
  est.peak_bytes =
      est.resident_keys * model.bytes_per_key + model.fixed_overhead_bytes;
  est.assumptions = model.assumptions;
  return est;
}

}  // namespace slotcnn
