// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Rotation-based CNN layers over packed slot vectors.
//
// Every layer is built from the backend's five primitives (rotate, add/sub,
// plaintext mult, vector mult) plus plaintext companions from the packing
// module. Each layer has a declared depth cost -- the exact number of levels
// it consumes -- which the model runtime asserts against observed levels.
//
// Convolution comes in three shapes:
//  * generic        taps rotated anywhere, channel accumulation, region
//                   cleanup, then a striding/extraction stage;
//  * special3x3     the shape-preserving 3x3 stride-1 pad-1 fast path whose
//                   boundary handling lives entirely in nine tap masks;
//  * grouped        groups == in_channels, members packed side by side and
//                   compacted jointly by the masked striding.
//
// Striding has two interchangeable realizations (identical values, different
// key sets and depth):
//  * extract  gather the kept elements slot by slot: one level, at most
//             W_out + 2 distinct rotation indices;
//  * masked   log-compaction with alignment masks: log2(W_out) + 1 levels
//             and exactly log2(W_out) + 1 distinct indices for stride >= 2.

#pragma once

#include <cstddef>

#include "slotcnn/backend.hpp"
#include "slotcnn/chebyshev.hpp"
#include "slotcnn/packing.hpp"

namespace slotcnn {

enum class ConvMode { generic, special3x3, grouped };
enum class StrideVariant { extract, masked };

struct ConvConfig {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  ConvMode mode = ConvMode::generic;
  StrideVariant stride_variant = StrideVariant::extract;
};

enum class PoolKind { average, global, whole_channel };

struct PoolConfig {
  PoolKind kind = PoolKind::average;
  std::size_t kernel = 2;
  std::size_t stride = 2;
  StrideVariant stride_variant = StrideVariant::extract;
};

struct FcConfig {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  /// Upper bound on distinct rotation indices spent merging the per-neuron
  /// results into contiguous slots (>= 1). Small budgets serialize the merge
  /// through one repeated index; large budgets use up to `outputs - 1`
  /// distinct indices. Output values are identical either way.
  std::size_t merge_budget = 1;
};

struct ReluConfig {
  /// Pre-activation range bound: inputs are scaled by 1/scale when scale > 1
  /// so the polynomial sees [-1, 1], and the approximated function carries
  /// the compensating scale. Values <= 1 mean "already in range".
  double scale = 1.0;
  /// Polynomial degree of the approximation.
  int degree = 59;
  /// Number of leading slots holding real payload; only these are scaled.
  /// Required (> 0) when scale > 1.
  std::size_t active_slots = 0;
};

/// Output edge of a square convolution/pooling: (W + 2P - k) / S + 1.
/// Throws ShapeError when the kernel overruns the (padded) input or the
/// geometry is not divisible by the stride.
std::size_t conv_output_width(std::size_t W, std::size_t k, std::size_t S,
                              std::size_t P);

/// Dispatching convolution: applies padding, picks the mode path, applies
/// the striding stage. The one entry point model execution uses.
PackedTensor convolution(const PackedTensor& x, const ConvConfig& cfg,
                         const KernelTensor& w);

/// The generic path with stride 1 and no padding (throws otherwise).
PackedTensor conv_generic(const PackedTensor& x, const ConvConfig& cfg,
                          const KernelTensor& w);

/// Shape-preserving 3x3 convolution (kernel 3, stride 1, padding 1): tap
/// validity handled by the nine masks, no separate padding or striding stage.
PackedTensor conv_special_3x3(const PackedTensor& x, const ConvConfig& cfg,
                              const KernelTensor& w);

/// Grouped convolution with groups == in_channels and joint masked striding.
/// Requires out_channels % in_channels == 0 and a power-of-two output edge
/// >= 2; weights are (out_channels, 1, k, k).
PackedTensor conv_grouped_stride(const PackedTensor& x, const ConvConfig& cfg,
                                 const KernelTensor& w);

/// Symmetric zero padding of a packed tensor, P >= 0. Consumes one level for
/// P > 0 (row masks); P == 0 returns the input untouched.
PackedTensor pad_input(const PackedTensor& x, std::size_t padding);

/// Striding stage, extraction flavor: keeps elements at (S*a, S*b) from the
/// front W x W block of a_star and packs them contiguously as a W_out x W_out
/// block at the front. One level; at most W_out + 2 distinct indices.
/// The three-argument form keeps the whole strided grid, W_out = ceil(W / S).
SlotVector stride_extract_v1(const SlotVector& a_star, std::size_t W,
                             std::size_t S);
SlotVector stride_extract_v1(const SlotVector& a_star, std::size_t W,
                             std::size_t S, std::size_t W_out);

/// Striding stage, masked log-compaction flavor. Requires a power-of-two
/// W_out >= 2 (otherwise falls back to the extraction flavor and notes the
/// fallback in the trace). For S >= 2 consumes exactly log2(W_out) + 1
/// levels using exactly log2(W_out) + 1 distinct indices.
SlotVector stride_extract_v2(const SlotVector& a_star, std::size_t W,
                             std::size_t S);
SlotVector stride_extract_v2(const SlotVector& a_star, std::size_t W,
                             std::size_t S, std::size_t W_out);

/// Average pooling (k x k window, stride S, no padding).
PackedTensor avg_pool(const PackedTensor& x, const PoolConfig& cfg);

/// Per-channel spatial mean; channel c's mean lands in slot c. One level.
SlotVector global_avg_pool(const PackedTensor& x);

/// Whole-channel average pooling with the window pinned to the full channel
/// extent (k must equal W). Same values as global_avg_pool, two levels.
SlotVector whole_channel_pool(const PackedTensor& x, std::size_t k);

/// Fully-connected layer: per-neuron plaintext row product, log-tree slot
/// sum, then a merge honoring cfg.merge_budget. Two levels.
SlotVector fully_connected(const SlotVector& x, const FcConfig& cfg,
                           const FcWeights& w);
SlotVector fully_connected(const PackedTensor& x, const FcConfig& cfg,
                           const FcWeights& w);

/// Polynomial ReLU: optional 1/scale masking (scale > 1), then the Chebyshev
/// interpolant of z -> max(0, scale * z) evaluated at the declared degree.
SlotVector secure_relu(const SlotVector& x, const ReluConfig& cfg);
PackedTensor secure_relu(const PackedTensor& x, ReluConfig cfg);

// --------------------------------------------------------- declared depth

int pad_depth_cost(std::size_t padding);
int stride_depth_cost(StrideVariant variant, std::size_t W, std::size_t S,
                      std::size_t W_out);
int conv_depth_cost(const ConvConfig& cfg, std::size_t W_in);
int pool_depth_cost(const PoolConfig& cfg, std::size_t W_in);
int fc_depth_cost(const FcConfig& cfg);
int relu_depth_cost(const ReluConfig& cfg);

namespace detail {

/// Rotation amounts used by the in-block prefix-sum that adds `span`
/// consecutive slots into every slot (shared by pooling reductions and the
/// key planner so predictions match execution exactly).
std::vector<long> block_sum_rotations(std::size_t span);

/// Sums `span` consecutive slots into every slot: out[s] = sum_{u<span} v[s+u].
SlotVector block_sum(const SlotVector& v, std::size_t span);

/// True when the masked striding flavor can run (power-of-two W_out >= 2).
bool masked_stride_applicable(std::size_t W_out);

/// Joint masked compaction over `blocks` adjacent W*W channel blocks, each
/// holding a strided grid; returns the blocks compacted to W_out*W_out each,
/// contiguous from slot 0. Exposed for the grouped convolution path.
SlotVector stride_mask_compact(const SlotVector& y, std::size_t W,
                               std::size_t S, std::size_t W_out,
                               std::size_t blocks);

int stride_mask_compact_depth(std::size_t S, std::size_t W_out);

}  // namespace detail

}  // namespace slotcnn
