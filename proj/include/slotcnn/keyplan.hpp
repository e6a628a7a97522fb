// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Rotation-key planning: predicts, per layer, exactly which rotation indices
// execution will use (and how often), groups layers into key-residency
// blocks, checks recorded traces against a plan, and turns plans into memory
// estimates.
//
// Every derive_* function mirrors its layer's implementation path by
// construction -- including striding-flavor fallbacks and skipped stages --
// so a derived set that disagrees with a probe trace is a bug, not noise.

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "slotcnn/layers.hpp"
#include "slotcnn/trace.hpp"

namespace slotcnn {

/// A multiset of rotation indices: index -> planned number of uses.
/// Index 0 never appears (rotations by zero are never issued).
struct KeySet {
  std::map<long, long> usage;

  void add(long index, long count = 1);
  void merge(const KeySet& other);
  /// Adds every entry of `other` `times` times (layer repeated per channel
  /// or per output map).
  void merge_scaled(const KeySet& other, long times);
  std::vector<long> indices() const;
  std::size_t size() const { return usage.size(); }
  bool contains(long index) const { return usage.count(index) != 0; }
  long total_uses() const;
  bool operator==(const KeySet& other) const { return usage == other.usage; }
};

// ------------------------------------------------------- per-layer derives

/// Keys of pad_input on a (C, W) tensor with padding P.
KeySet derive_pad_keys(std::size_t C, std::size_t W, std::size_t P);

/// Keys of one striding-stage invocation on a front block of edge W
/// (stride S, output edge W_out), including the masked flavor's fallback.
/// `blocks` > 1 describes the joint compaction the grouped path uses.
KeySet derive_stride_keys(StrideVariant variant, std::size_t W, std::size_t S,
                          std::size_t W_out, std::size_t blocks = 1);

/// Keys of convolution() on a (C, W) tensor: padding, taps, channel
/// accumulation, striding and placement for the configured mode.
KeySet derive_conv_keys(const ConvConfig& cfg, std::size_t C, std::size_t W);

/// Keys of the pooling layers on a (C, W) tensor.
KeySet derive_pool_keys(const PoolConfig& cfg, std::size_t C, std::size_t W);

/// Keys of fully_connected().
KeySet derive_fc_keys(const FcConfig& cfg);

// Activations, bootstrapping and flattening perform no rotations; they have
// no derive functions. Bootstrapping uses its own opaque key material that
// plans carry as a single flag, not as rotation indices.

// ----------------------------------------------------------- block planning

/// One layer's contribution to a plan.
struct LayerKeys {
  std::string name;
  KeySet keys;
  /// True when the layer shrinks the spatial grid (strided convolution or
  /// pooling, global reductions): the natural block boundary.
  bool ends_block = false;
};

struct BlockPlan {
  struct Block {
    std::size_t first_layer = 0;
    std::size_t last_layer = 0;  // inclusive
    KeySet keys;
  };
  std::vector<Block> blocks;
  KeySet union_keys;
  /// Largest per-block distinct-index count: what must be resident at once.
  std::size_t peak_resident_keys = 0;
  /// Human-readable load/unload narration, one line per residency change.
  std::vector<std::string> residency_events;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  /// Block containing the given layer index, or npos.
  std::size_t block_of_layer(std::size_t layer) const;
};

/// All layers in one block: everything resident for the whole run.
BlockPlan plan_single_block(const std::vector<LayerKeys>& layers);

/// Blocks split after every layer flagged ends_block.
BlockPlan plan_blocks(const std::vector<LayerKeys>& layers);

/// Blocks from explicit [first, last] layer-index ranges, which must tile
/// 0..n-1 in order (throws ShapeError otherwise).
BlockPlan plan_blocks(
    const std::vector<LayerKeys>& layers,
    const std::vector<std::pair<std::size_t, std::size_t>>& ranges);

// ------------------------------------------------------- trace verification

/// Result of replaying a recorded trace against a plan: every rotation event
/// must use an index resident in the block of the layer executing at that
/// point (layer boundaries come from "layer:<index>:<name>" markers).
struct TraceCheck {
  struct Violation {
    std::size_t event_index = 0;
    long rotation_index = 0;
    std::size_t layer = BlockPlan::npos;
    std::string reason;
  };
  std::vector<Violation> violations;
  /// Planned indices no rotation event ever exercised.
  std::vector<long> unused_keys;
  /// Total rotation events inspected.
  std::size_t rotations_checked = 0;
  bool ok() const { return violations.empty(); }
};

TraceCheck verify_trace(const BlockPlan& plan,
                        const std::vector<TraceEvent>& events);

// ------------------------------------------------------------------ memory

/// Size assumptions for a single rotation key, derived from the context:
/// two ring elements per decomposition digit, one residue limb per level
/// plus one, eight bytes per coefficient.
struct MemoryModel {
  std::size_t bytes_per_key = 0;
  std::size_t fixed_overhead_bytes = 0;
  std::string assumptions;
  static MemoryModel for_context(const ContextConfig& config);
};

struct MemoryEstimate {
  std::size_t total_keys = 0;     // distinct indices across the whole plan
  std::size_t resident_keys = 0;  // peak simultaneously-resident indices
  std::size_t preload_bytes = 0;  // everything resident for the whole run
  std::size_t peak_bytes = 0;     // block-at-a-time residency
  std::string assumptions;
};

MemoryEstimate estimate_memory(const BlockPlan& plan, const MemoryModel& model);

}  // namespace slotcnn
