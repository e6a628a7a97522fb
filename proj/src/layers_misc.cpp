// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pooling, fully-connected and polynomial-activation layers.

#include <algorithm>
#include <bit>
#include <string>
#include <vector>

#include "slotcnn/layers.hpp"

namespace slotcnn {

namespace {

PlainVector plain_of(const SlotContextPtr& ctx, const std::vector<double>& v) {
  return PlainVector::from_values(ctx->slots(), v);
}

PlainVector range_mask(const SlotContextPtr& ctx, std::size_t begin,
                       std::size_t count, double value = 1.0) {
  std::vector<double> v(begin + count, 0.0);
  std::fill(v.begin() + static_cast<long>(begin), v.end(), value);
  return plain_of(ctx, v);
}

/// Per-channel slot-0 reductions merged into contiguous slots 0..C-1: walks
/// the channels with one cumulative block advance, masks each channel's
/// reduced slot, then folds the pieces back-to-front through index -1.
SlotVector merge_channel_slots(const std::vector<SlotVector>& pieces) {
  SlotVector out = pieces.back();
  for (std::size_t c = pieces.size() - 1; c-- > 0;) {
    out = add(rotate(out, -1), pieces[c]);
  }
  return out;
}

}  // namespace

namespace detail {

std::vector<long> block_sum_rotations(std::size_t span) {
  std::vector<long> amounts;
  std::size_t p = 1;
  while (p * 2 <= span) {
    amounts.push_back(static_cast<long>(p));
    p *= 2;
  }
  // Combine the binary decomposition of span, widest run first; every set
  // bit after the first rotates by the run length accumulated so far.
  std::size_t off = 0;
  for (std::size_t bit = std::bit_width(span); bit-- > 0;) {
    if ((span >> bit) & 1u) {
      if (off != 0) {
        amounts.push_back(static_cast<long>(off));
      }
      off += std::size_t{1} << bit;
    }
  }
  std::sort(amounts.begin(), amounts.end());
  amounts.erase(std::unique(amounts.begin(), amounts.end()), amounts.end());
  return amounts;
}

SlotVector block_sum(const SlotVector& v, std::size_t span) {
  if (span == 0) {
    throw ShapeError("block sum requires a positive span");
  }
  if (span > v.context()->slots()) {
    throw CapacityError("block sum span exceeds the slot count");
  }
  if (span == 1) {
    return v;
  }
  // Power-of-two partial sums: sums[i][s] = sum of 2^i slots from s.
  std::vector<SlotVector> sums;
  sums.push_back(v);
  std::size_t p = 1;
  while (p * 2 <= span) {
    sums.push_back(add(sums.back(), rotate(sums.back(), static_cast<long>(p))));
    p *= 2;
  }
  SlotVector acc;
  std::size_t off = 0;
  for (std::size_t bit = std::bit_width(span); bit-- > 0;) {
    if (((span >> bit) & 1u) == 0) {
      continue;
    }
    const SlotVector& part = sums[bit];
    acc = (off == 0) ? part : add(acc, rotate(part, static_cast<long>(off)));
    off += std::size_t{1} << bit;
  }
  return acc;
}

}  // namespace detail

PackedTensor avg_pool(const PackedTensor& x, const PoolConfig& cfg) {
  if (cfg.kind != PoolKind::average) {
    throw ShapeError("avg_pool handles the windowed average kind only");
  }
  const std::size_t W = x.width, C = x.channels;
  const std::size_t k = cfg.kernel, S = cfg.stride;
  const SlotContextPtr& ctx = x.data.context();
  const std::size_t W_out = conv_output_width(W, k, S, 0);
  const std::size_t m = W * W;
  if (C * W_out * W_out > ctx->slots()) {
    throw CapacityError("pooling output does not fit in the slot count");
  }

  // Window sums by tap accumulation (adds are free).
  SlotVector T = x.data;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == 0 && j == 0) {
        continue;
      }
      T = add(T, rotate(x.data, static_cast<long>(i * W + j)));
    }
  }
  // Average and clean in one product: 1/k^2 over the used region, zero past
  // it, so border junk from wrapped taps dies here.
  const SlotVector T2 =
      mult_plain(T, range_mask(ctx, 0, C * m, 1.0 / static_cast<double>(k * k)));
  if (S == 1 && W_out == W) {
    return {T2, C, W};  // 1x1 window: nothing to stride
  }

  SlotVector out;
  SlotVector ccur = T2;
  for (std::size_t c = 0; c < C; ++c) {
    if (c > 0) {
      ccur = rotate(ccur, static_cast<long>(m));
    }
    const SlotVector r_c = (cfg.stride_variant == StrideVariant::masked)
                               ? stride_extract_v2(ccur, W, S, W_out)
                               : stride_extract_v1(ccur, W, S, W_out);
    out = (c == 0)
              ? r_c
              : add(out, rotate(r_c, -static_cast<long>(c * W_out * W_out)));
  }
  return {out, C, W_out};
}

SlotVector global_avg_pool(const PackedTensor& x) {
  const std::size_t W = x.width, C = x.channels;
  const std::size_t m = W * W;
  const SlotContextPtr& ctx = x.data.context();

  const SlotVector sums = detail::block_sum(x.data, m);
  // sums[c*m] now holds channel c's total; scale and isolate each, then
  // merge the per-channel slots.
  const PlainVector head =
      range_mask(ctx, 0, 1, 1.0 / static_cast<double>(m));
  std::vector<SlotVector> pieces;
  pieces.reserve(C);
  SlotVector ccur = sums;
  for (std::size_t c = 0; c < C; ++c) {
    if (c > 0) {
      ccur = rotate(ccur, static_cast<long>(m));
    }
    pieces.push_back(mult_plain(ccur, head));
  }
  return merge_channel_slots(pieces);
}

SlotVector whole_channel_pool(const PackedTensor& x, std::size_t k) {
  if (k != x.width) {
    throw ShapeError(
        "whole-channel pooling requires the window to span the full channel "
        "edge (kernel " +
        std::to_string(k) + ", edge " + std::to_string(x.width) + ")");
  }
  const std::size_t W = x.width, C = x.channels;
  const std::size_t m = W * W;
  const SlotContextPtr& ctx = x.data.context();

  // Pre-scale by 1/k^2 over the used region (also cleans the tail), then
  // reduce and isolate with binary masks: two levels total.
  const SlotVector v = mult_plain(
      x.data, range_mask(ctx, 0, C * m, 1.0 / static_cast<double>(k * k)));
  const SlotVector sums = detail::block_sum(v, m);
  const PlainVector head = range_mask(ctx, 0, 1);
  std::vector<SlotVector> pieces;
  pieces.reserve(C);
  SlotVector ccur = sums;
  for (std::size_t c = 0; c < C; ++c) {
    if (c > 0) {
      ccur = rotate(ccur, static_cast<long>(m));
    }
    pieces.push_back(mult_plain(ccur, head));
  }
  return merge_channel_slots(pieces);
}

SlotVector fully_connected(const SlotVector& x, const FcConfig& cfg,
                           const FcWeights& w) {
  const std::size_t n = cfg.inputs, m = cfg.outputs;
  const SlotContextPtr& ctx = x.context();
  if (n == 0 || m == 0) {
    throw ShapeError("fully-connected layer needs positive input/output sizes");
  }
  if (w.inputs != n || w.outputs != m) {
    throw ShapeError("weight matrix is " + std::to_string(w.outputs) + "x" +
                     std::to_string(w.inputs) + ", layer expects " +
                     std::to_string(m) + "x" + std::to_string(n));
  }
  if (n > ctx->slots() || m > ctx->slots()) {
    throw CapacityError("fully-connected layer does not fit in the slot count");
  }
  if (cfg.merge_budget == 0) {
    throw ShapeError("merge budget must be >= 1");
  }

  // Per neuron: row product (zero past n), log-tree fold so slot 0 carries
  // the dot product, then isolate slot 0.
  const std::size_t p2 = std::bit_ceil(n);
  const PlainVector head = range_mask(ctx, 0, 1);
  std::vector<SlotVector> neurons;
  neurons.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = w.at(i, j);
    }
    SlotVector y = mult_plain(x, plain_of(ctx, row));
    for (std::size_t off = 1; off < p2; off <<= 1) {
      y = add(y, rotate(y, static_cast<long>(off)));
    }
    neurons.push_back(mult_plain(y, head));
  }

  // Merge into slots 0..m-1. Group size r spends r-1 distinct indices inside
  // groups plus one repeated index across groups; a budget of B >= m - 1
  // degenerates to one group and no cross-group index.
  const std::size_t r = (m <= cfg.merge_budget + 1) ? m : cfg.merge_budget;
  const std::size_t T = (m + r - 1) / r;
  std::vector<SlotVector> groups;
  groups.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t sz = std::min(r, m - t * r);
    SlotVector g = neurons[t * r];
    for (std::size_t u = 1; u < sz; ++u) {
      g = add(g, rotate(neurons[t * r + u], -static_cast<long>(u)));
    }
    groups.push_back(g);
  }
  SlotVector out = groups[T - 1];
  for (std::size_t t = T - 1; t-- > 0;) {
    out = add(rotate(out, -static_cast<long>(r)), groups[t]);
  }
  out = add(out, SlotVector::encode(ctx, w.bias));
  return out;
}

SlotVector fully_connected(const PackedTensor& x, const FcConfig& cfg,
                           const FcWeights& w) {
  if (cfg.inputs != x.used_slots()) {
    throw ShapeError("fully-connected layer expects " +
                     std::to_string(cfg.inputs) +
                     " inputs, packed tensor provides " +
                     std::to_string(x.used_slots()));
  }
  return fully_connected(x.data, cfg, w);
}

SlotVector secure_relu(const SlotVector& x, const ReluConfig& cfg) {
  if (cfg.degree < 0) {
    throw ShapeError("activation degree must be >= 0");
  }
  const SlotContextPtr& ctx = x.context();
  const bool scaled = cfg.scale > 1.0;
  const double beta = scaled ? cfg.scale : 1.0;
  SlotVector v = x;
  if (scaled) {
    if (cfg.active_slots == 0) {
      throw ShapeError("scaled activation requires the active slot count");
    }
    if (cfg.active_slots > ctx->slots()) {
      throw CapacityError("active slot count exceeds the context");
    }
    // Bring the payload into [-1, 1]; inactive slots become exact zeros.
    v = mult_plain(x, range_mask(ctx, 0, cfg.active_slots, 1.0 / beta));
  }
  const auto f = [beta](double z) { return z < 0.0 ? 0.0 : beta * z; };
  return cheb_eval(v, cheb_coefficients(f, cfg.degree));
}

PackedTensor secure_relu(const PackedTensor& x, ReluConfig cfg) {
  if (cfg.active_slots == 0) {
    cfg.active_slots = x.used_slots();
  }
  return {secure_relu(x.data, cfg), x.channels, x.width};
}

int pool_depth_cost(const PoolConfig& cfg, std::size_t W_in) {
  switch (cfg.kind) {
    case PoolKind::global:
      return 1;
    case PoolKind::whole_channel:
      return 2;
    case PoolKind::average:
      break;
  }
  const std::size_t W_out =
      conv_output_width(W_in, cfg.kernel, cfg.stride, 0);
  const int stride_cost =
      (cfg.stride == 1 && W_out == W_in)
          ? 0
          : stride_depth_cost(cfg.stride_variant, W_in, cfg.stride, W_out);
  return 1 + stride_cost;
}

int fc_depth_cost(const FcConfig& cfg) {
  (void)cfg;
  return 2;  // row product, slot-0 isolation
}

int relu_depth_cost(const ReluConfig& cfg) {
  return (cfg.scale > 1.0 ? 1 : 0) + cheb_eval_depth(cfg.degree);
}

}  // namespace slotcnn
