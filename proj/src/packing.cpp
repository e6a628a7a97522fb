// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "slotcnn/packing.hpp"

#include <string>

namespace slotcnn {

PackedTensor flatten(const SlotContextPtr& ctx, const HostTensor& t) {
  t.check_consistent();
  if (t.height != t.width) {
    throw ShapeError("packed tensors must be square; got " +
                     std::to_string(t.height) + "x" + std::to_string(t.width));
  }
  if (t.size() > ctx->slots()) {
    throw CapacityError("tensor needs " + std::to_string(t.size()) +
                        " slots but the context provides " +
                        std::to_string(ctx->slots()));
  }
  // HostTensor's row-major (c, i, j) order is exactly the channel-major slot
  // order, so the values copy over contiguously.
  PackedTensor p;
  p.data = SlotVector::encode(ctx, t.values);
  p.channels = t.channels;
  p.width = t.width;
  return p;
}

HostTensor unflatten(const PackedTensor& p) {
  if (!p.data.valid()) {
    throw InternalError("unflatten: packed tensor is not initialized");
  }
  HostTensor t(p.channels, p.width, p.width);
  const std::vector<double>& slots = p.data.slots();
  std::copy(slots.begin(), slots.begin() + static_cast<long>(t.size()),
            t.values.begin());
  return t;
}

std::vector<double> repeated_kernel_vector(const KernelTensor& w,
                                           std::size_t f, std::size_t ti,
                                           std::size_t tj, std::size_t C,
                                           std::size_t W) {
  if (f >= w.out_channels || ti >= w.kernel || tj >= w.kernel) {
    throw ShapeError("kernel tap index out of range");
  }
  if (C > w.in_channels) {
    throw ShapeError("requested " + std::to_string(C) +
                     " channel blocks from a kernel with " +
                     std::to_string(w.in_channels) + " input channels");
  }
  const std::size_t block = W * W;
  std::vector<double> out(C * block, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    const double v = w.at(f, c, ti, tj);
    std::fill(out.begin() + static_cast<long>(c * block),
              out.begin() + static_cast<long>((c + 1) * block), v);
  }
  return out;
}

MaskVector build_mask(std::size_t sp, std::size_t ep, std::size_t w,
                      std::size_t m, std::size_t t) {
  if (ep > m) {
    throw ShapeError("mask end padding exceeds the pattern length");
  }
  std::vector<double> pattern;
  pattern.reserve(m + w + 1);
  pattern.insert(pattern.end(), sp, 0.0);
  while (pattern.size() < m - ep) {
    pattern.insert(pattern.end(), w, 1.0);
    pattern.push_back(0.0);
  }
  if (pattern.size() > m) {
    pattern.resize(m);
  }
  while (pattern.size() < m) {
    pattern.push_back(0.0);
  }
  for (std::size_t i = m - ep; i < m; ++i) {
    pattern[i] = 0.0;
  }
  MaskVector mask;
  mask.values.reserve(m * t);
  for (std::size_t rep = 0; rep < t; ++rep) {
    mask.values.insert(mask.values.end(), pattern.begin(), pattern.end());
  }
  return mask;
}

std::array<MaskVector, 9> build_all_masks(std::size_t m, std::size_t C,
                                          std::size_t W) {
  // One (start-pad, end-pad, run-length) triple per tap of a 3x3 kernel with
  // unit padding; tap di*3 + dj corresponds to the input offset
  // (di - 1) * W + (dj - 1). The mask keeps exactly the outputs whose tap
  // source lies inside the channel's own W x W grid.
  return {
      build_mask(W + 1, 0, W - 1, m, C),  // (0,0): needs i >= 1, j >= 1
      build_mask(W, 0, m, m, C),          // (0,1): needs i >= 1
      build_mask(W, 0, W - 1, m, C),      // (0,2): needs i >= 1, j <= W-2
      build_mask(1, 0, W - 1, m, C),      // (1,0): needs j >= 1
      build_mask(0, 0, m, m, C),          // (1,1): always valid
      build_mask(0, 1, W - 1, m, C),      // (1,2): needs j <= W-2
      build_mask(1, W - 1, W - 1, m, C),  // (2,0): needs i <= W-2, j >= 1
      build_mask(0, W, m, m, C),          // (2,1): needs i <= W-2
      build_mask(0, W + 1, W - 1, m, C),  // (2,2): needs i <= W-2, j <= W-2
  };
}

MaskVector extraction_mask(std::size_t W, std::size_t C) {
  MaskVector mask;
  mask.values.assign(C * W * W, 0.0);
  std::fill(mask.values.begin(), mask.values.begin() + static_cast<long>(W * W),
            1.0);
  return mask;
}

PlainVector to_plain(const MaskVector& mask, std::size_t slot_count) {
  return PlainVector::from_values(slot_count, mask.values);
}

PlainVector to_plain(const std::vector<double>& values,
                     std::size_t slot_count) {
  return PlainVector::from_values(slot_count, values);
}

}  // namespace slotcnn
