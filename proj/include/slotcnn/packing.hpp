// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Packing: how a (C, W, W) tensor lives inside one slot vector, and the
// plaintext companion vectors (replicated kernel weights, binary masks) that
// the layer algorithms multiply against packed values.
//
// Layout: channel-major flattening. Channel c occupies the contiguous block
// [c*W*W, (c+1)*W*W); element (c, i, j) sits in slot c*W*W + i*W + j; slots
// past C*W*W are zero.

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "slotcnn/backend.hpp"
#include "slotcnn/tensors.hpp"

namespace slotcnn {

/// A slot vector carrying a channel-major flattened (C, W, W) tensor.
struct PackedTensor {
  SlotVector data;
  std::size_t channels = 0;
  std::size_t width = 0;

  std::size_t channel_stride() const { return width * width; }
  std::size_t used_slots() const { return channels * width * width; }
};

/// A binary (0/1) masking vector, kept at its natural layout length.
struct MaskVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool is_binary() const {
    for (double v : values) {
      if (v != 0.0 && v != 1.0) {
        return false;
      }
    }
    return true;
  }
};

/// Packs a square (C, W, W) tensor into a fresh slot vector at the full depth
/// budget. Requires H == W and C*W*W <= slot count.
PackedTensor flatten(const SlotContextPtr& ctx, const HostTensor& t);

/// Reads back the (C, W, W) tensor from the first C*W*W slots.
HostTensor unflatten(const PackedTensor& p);

/// The plaintext companion of one kernel tap: w[f][c][ti][tj] replicated over
/// every position of channel block c, zero past C*W*W. Length C*W*W.
std::vector<double> repeated_kernel_vector(const KernelTensor& w,
                                           std::size_t f, std::size_t ti,
                                           std::size_t tj, std::size_t C,
                                           std::size_t W);

/// Boundary-validity mask construction: sp leading zeros, then groups of w
/// ones separated by single zeros until the length reaches m - ep, truncated
/// or zero-filled to exactly m, with the last ep entries forced to zero; the
/// m-length pattern is then repeated t times. Total length m*t.
MaskVector build_mask(std::size_t sp, std::size_t ep, std::size_t w,
                      std::size_t m, std::size_t t);

/// The nine tap-validity masks of a 3x3 shape-preserving convolution on a
/// (C, W, W) input, indexed by tap di*3 + dj. Each has length C*m where
/// m = W*W.
std::array<MaskVector, 9> build_all_masks(std::size_t m, std::size_t C,
                                          std::size_t W);

/// Keeps the first W*W slots: W*W ones followed by zeros, length C*W*W.
MaskVector extraction_mask(std::size_t W, std::size_t C);

/// Zero-pads a mask (or any layout-length vector) to a full plaintext operand.
PlainVector to_plain(const MaskVector& mask, std::size_t slot_count);
PlainVector to_plain(const std::vector<double>& values, std::size_t slot_count);

}  // namespace slotcnn
