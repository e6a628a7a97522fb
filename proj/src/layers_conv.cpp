// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Convolution-family layers: padding, the two striding flavors, and the
// three convolution paths. See layers.hpp for the contract summary.
//
// Slot-hygiene invariant maintained throughout: every PackedTensor produced
// here is exactly zero outside its used region, so downstream taps that pull
// wrapped slots into a block's invalid border rows always read zeros or
// values that the cleanup/striding masks discard.

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "slotcnn/layers.hpp"

namespace slotcnn {

namespace {

bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::size_t log2_exact(std::size_t v) {
  std::size_t l = 0;
  while ((std::size_t{1} << l) < v) {
    ++l;
  }
  return l;
}

PlainVector plain_of(const SlotContextPtr& ctx, const std::vector<double>& v) {
  return PlainVector::from_values(ctx->slots(), v);
}

/// Mask with `count` ones starting at `begin` (layout length kept implicit:
/// the plain vector is already full slot width).
PlainVector range_mask(const SlotContextPtr& ctx, std::size_t begin,
                       std::size_t count) {
  std::vector<double> v(begin + count, 0.0);
  std::fill(v.begin() + static_cast<long>(begin), v.end(), 1.0);
  return plain_of(ctx, v);
}

void note(const SlotContextPtr& ctx, const std::string& text) {
  if (TraceRecorder* rec = ctx->recorder()) {
    rec->mark(text);
  }
}

/// Validates stride-stage geometry shared by both flavors.
void check_stride_geometry(const SlotVector& a_star, std::size_t W,
                           std::size_t S, std::size_t W_out) {
  if (!a_star.valid()) {
    throw InternalError("striding: operand is not initialized");
  }
  if (W == 0 || S == 0 || W_out == 0) {
    throw ShapeError("striding: width, stride and output edge must be positive");
  }
  if ((W_out - 1) * S + 1 > W) {
    throw ShapeError("striding: output edge " + std::to_string(W_out) +
                     " at stride " + std::to_string(S) +
                     " overruns input edge " + std::to_string(W));
  }
  if (W * W > a_star.context()->slots()) {
    throw CapacityError("striding: block of edge " + std::to_string(W) +
                        " exceeds the slot count");
  }
}

std::size_t default_subsample_edge(std::size_t W, std::size_t S) {
  return (W + S - 1) / S;  // keep the whole strided grid
}

/// Per-output-channel bias replicated over each output block.
SlotVector bias_vector(const SlotContextPtr& ctx,
                       const std::vector<double>& bias, std::size_t block) {
  std::vector<double> v(bias.size() * block);
  for (std::size_t f = 0; f < bias.size(); ++f) {
    std::fill(v.begin() + static_cast<long>(f * block),
              v.begin() + static_cast<long>((f + 1) * block), bias[f]);
  }
  return SlotVector::encode(ctx, v);
}

/// Kernel companion for a grouped member: weights in block `c` only.
std::vector<double> member_kernel_vector(const KernelTensor& w, std::size_t f,
                                         std::size_t ti, std::size_t tj,
                                         std::size_t c, std::size_t C,
                                         std::size_t W) {
  const std::size_t block = W * W;
  std::vector<double> out(C * block, 0.0);
  const double v = w.at(f, 0, ti, tj);
  std::fill(out.begin() + static_cast<long>(c * block),
            out.begin() + static_cast<long>((c + 1) * block), v);
  return out;
}

/// Tap rotations t = i*W + j, shared across output channels. taps[0] is the
/// input itself (no zero rotation is ever issued).
std::vector<SlotVector> tap_rotations(const SlotVector& x, std::size_t k,
                                      std::size_t W) {
  std::vector<SlotVector> taps;
  taps.reserve(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const long t = static_cast<long>(i * W + j);
      taps.push_back(t == 0 ? x : rotate(x, t));
    }
  }
  return taps;
}

/// The generic convolution engine on an already-padded input; cfg.stride
/// may be anything consistent with the tensor geometry.
PackedTensor conv_core_generic(const PackedTensor& x, const ConvConfig& cfg,
                               const KernelTensor& w) {
  const std::size_t W = x.width, C = x.channels;
  const std::size_t F = cfg.out_channels, k = cfg.kernel, S = cfg.stride;
  const SlotContextPtr& ctx = x.data.context();
  if (cfg.in_channels != C) {
    throw ShapeError("convolution expects " + std::to_string(cfg.in_channels) +
                     " input channels, tensor has " + std::to_string(C));
  }
  if (w.in_channels != C || w.out_channels != F || w.kernel != k) {
    throw ShapeError("kernel tensor shape does not match the layer config");
  }
  const std::size_t W_out = conv_output_width(W, k, S, 0);
  const std::size_t m = W * W;
  if (F * W_out * W_out > ctx->slots()) {
    throw CapacityError("convolution output needs " +
                        std::to_string(F * W_out * W_out) +
                        " slots but the context provides " +
                        std::to_string(ctx->slots()));
  }

  const std::vector<SlotVector> taps = tap_rotations(x.data, k, W);
  const PlainVector cleanup = to_plain(extraction_mask(W, C), ctx->slots());

  SlotVector out;
  for (std::size_t f = 0; f < F; ++f) {
    // Weighted tap sum: block c holds channel c's contribution at every
    // position (borders included; they are cleaned below).
    SlotVector sum;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const SlotVector term = mult_plain(
            taps[i * k + j],
            plain_of(ctx, repeated_kernel_vector(w, f, i, j, C, W)));
        sum = (i == 0 && j == 0) ? term : add(sum, term);
      }
    }
    // Channel accumulation: the front block becomes the cross-channel sum.
    if (C > 1) {
      SlotVector cur = sum;
      for (std::size_t c = 1; c < C; ++c) {
        cur = rotate(cur, static_cast<long>(m));
        sum = add(sum, cur);
      }
    }
    // Cleanup: partial sums in blocks >= 1 and border junk beyond the valid
    // rows must not leak into placement.
    const SlotVector a_star = mult_plain(sum, cleanup);
    // Striding / valid-region extraction.
    SlotVector r_f;
    if (S == 1 && W_out == W) {
      r_f = a_star;
    } else if (cfg.stride_variant == StrideVariant::masked) {
      r_f = stride_extract_v2(a_star, W, S, W_out);
    } else {
      r_f = stride_extract_v1(a_star, W, S, W_out);
    }
    out = (f == 0)
              ? r_f
              : add(out, rotate(r_f, -static_cast<long>(f * W_out * W_out)));
  }
  out = add(out, bias_vector(ctx, w.bias, W_out * W_out));
  return {out, F, W_out};
}

/// Grouped fallback for non-power-of-two output edges: per-member extraction
/// striding. Two levels (member tap product, striding masks).
PackedTensor conv_grouped_fallback(const PackedTensor& x, const ConvConfig& cfg,
                                   const KernelTensor& w, std::size_t W_out) {
  const std::size_t W = x.width, g = x.channels;
  const std::size_t F = cfg.out_channels, k = cfg.kernel, S = cfg.stride;
  const SlotContextPtr& ctx = x.data.context();
  const std::size_t m = W * W;

  const std::vector<SlotVector> taps = tap_rotations(x.data, k, W);
  SlotVector out;
  for (std::size_t f = 0; f < F; ++f) {
    const std::size_t c = f % g;
    SlotVector sum;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const SlotVector term = mult_plain(
            taps[i * k + j],
            plain_of(ctx, member_kernel_vector(w, f, i, j, c, g, W)));
        sum = (i == 0 && j == 0) ? term : add(sum, term);
      }
    }
    // The member's data lives in block c (and is zero elsewhere, because the
    // kernel vector is zero elsewhere); bring it to the front.
    if (c > 0) {
      sum = rotate(sum, static_cast<long>(c * m));
    }
    const SlotVector r_f = stride_extract_v1(sum, W, S, W_out);
    out = (f == 0)
              ? r_f
              : add(out, rotate(r_f, -static_cast<long>(f * W_out * W_out)));
  }
  out = add(out, bias_vector(ctx, w.bias, W_out * W_out));
  return {out, F, W_out};
}

}  // namespace

std::size_t conv_output_width(std::size_t W, std::size_t k, std::size_t S,
                              std::size_t P) {
  if (k == 0 || S == 0) {
    throw ShapeError("kernel and stride must be positive");
  }
  const std::size_t Wp = W + 2 * P;
  if (k > Wp) {
    throw ShapeError("kernel edge " + std::to_string(k) +
                     " exceeds padded input edge " + std::to_string(Wp));
  }
  if ((Wp - k) % S != 0) {
    throw ShapeError("geometry is not divisible: (" + std::to_string(Wp) +
                     " - " + std::to_string(k) + ") is not a multiple of stride " +
                     std::to_string(S));
  }
  return (Wp - k) / S + 1;
}

PackedTensor pad_input(const PackedTensor& x, std::size_t padding) {
  if (padding == 0) {
    return x;
  }
  const std::size_t W = x.width, C = x.channels, P = padding;
  const std::size_t Wp = W + 2 * P;
  const std::size_t mp = Wp * Wp;
  const SlotContextPtr& ctx = x.data.context();
  if (C * mp > ctx->slots()) {
    throw CapacityError("padded tensor needs " + std::to_string(C * mp) +
                        " slots but the context provides " +
                        std::to_string(ctx->slots()));
  }
  const PlainVector rowmask = range_mask(ctx, 0, W);

  SlotVector out;
  SlotVector chancur;
  for (std::size_t c = 0; c < C; ++c) {
    chancur = (c == 0) ? x.data : rotate(chancur, static_cast<long>(W * W));
    // Slice the channel into rows (one level; all masks apply to rotations
    // of the input).
    std::vector<SlotVector> rows;
    rows.reserve(W);
    SlotVector rowcur = chancur;
    for (std::size_t r = 0; r < W; ++r) {
      if (r > 0) {
        rowcur = rotate(rowcur, static_cast<long>(W));
      }
      rows.push_back(mult_plain(rowcur, rowmask));
    }
    // Re-space rows W -> Wp apart by accumulating back-to-front; each step
    // shifts the tail right by one padded row and drops the next row in
    // front. Pieces are pure, so the single repeated index is safe.
    SlotVector racc = rows[W - 1];
    for (std::size_t r = W - 1; r-- > 0;) {
      racc = add(rotate(racc, -static_cast<long>(Wp)), rows[r]);
    }
    out = (c == 0) ? racc
                   : add(out, rotate(racc, -static_cast<long>(c * mp)));
  }
  // Shift the whole picture from origin (0,0) to (P,P); the wrapped slots are
  // genuine zeros because the padded layout leaves 2P(Wp+1) spare slots past
  // the last row.
  out = rotate(out, -static_cast<long>(P * (Wp + 1)));
  return {out, C, Wp};
}

SlotVector stride_extract_v1(const SlotVector& a_star, std::size_t W,
                             std::size_t S) {
  return stride_extract_v1(a_star, W, S, default_subsample_edge(W, S));
}

SlotVector stride_extract_v1(const SlotVector& a_star, std::size_t W,
                             std::size_t S, std::size_t W_out) {
  check_stride_geometry(a_star, W, S, W_out);
  const SlotContextPtr& ctx = a_star.context();

  SlotVector out;
  SlotVector vcur = a_star;
  for (std::size_t a = 0; a < W_out; ++a) {
    if (a > 0) {
      vcur = rotate(vcur, static_cast<long>(S * W));  // next kept row in front
    }
    SlotVector row;
    if (S == 1) {
      row = mult_plain(vcur, range_mask(ctx, 0, W_out));
    } else {
      // Gather kept columns: after b rotations by S-1, column S*b sits at b.
      row = mult_plain(vcur, range_mask(ctx, 0, 1));
      SlotVector hcur = vcur;
      for (std::size_t b = 1; b < W_out; ++b) {
        hcur = rotate(hcur, static_cast<long>(S - 1));
        row = add(row, mult_plain(hcur, range_mask(ctx, b, 1)));
      }
    }
    out = (a == 0) ? row
                   : add(out, rotate(row, -static_cast<long>(a * W_out)));
  }
  return out;
}

SlotVector stride_extract_v2(const SlotVector& a_star, std::size_t W,
                             std::size_t S) {
  return stride_extract_v2(a_star, W, S, default_subsample_edge(W, S));
}

SlotVector stride_extract_v2(const SlotVector& a_star, std::size_t W,
                             std::size_t S, std::size_t W_out) {
  check_stride_geometry(a_star, W, S, W_out);
  if (!detail::masked_stride_applicable(W_out)) {
    note(a_star.context(),
         "striding: masked flavor needs a power-of-two output edge >= 2, got " +
             std::to_string(W_out) + "; using the extraction flavor");
    return stride_extract_v1(a_star, W, S, W_out);
  }
  return detail::stride_mask_compact(a_star, W, S, W_out, 1);
}

namespace detail {

bool masked_stride_applicable(std::size_t W_out) {
  return W_out >= 2 && is_pow2(W_out);
}

int stride_mask_compact_depth(std::size_t S, std::size_t W_out) {
  if (S >= 2) {
    return static_cast<int>(log2_exact(W_out)) + 1;
  }
  return 2;
}

SlotVector stride_mask_compact(const SlotVector& y, std::size_t W,
                               std::size_t S, std::size_t W_out,
                               std::size_t blocks) {
  check_stride_geometry(y, W, S, W_out);
  if (!masked_stride_applicable(W_out)) {
    throw InternalError("masked compaction requires a power-of-two output edge");
  }
  const SlotContextPtr& ctx = y.context();
  const std::size_t m = W * W;
  if (blocks * m > ctx->slots() ||
      blocks * W_out * W_out > ctx->slots()) {
    throw CapacityError("masked compaction does not fit in the slot count");
  }

  // Stage 1: keep only the stride-aligned grid positions of every block.
  std::vector<double> sel(blocks * m, 0.0);
  for (std::size_t c = 0; c < blocks; ++c) {
    for (std::size_t a = 0; a < W_out; ++a) {
      for (std::size_t b = 0; b < W_out; ++b) {
        sel[c * m + (S * a) * W + S * b] = 1.0;
      }
    }
  }
  SlotVector cur = mult_plain(y, plain_of(ctx, sel));

  // Stage 2: in-row log-compaction (only needed when columns are spread out).
  if (S >= 2) {
    const std::size_t l = log2_exact(W_out);
    for (std::size_t s = 1; s < l; ++s) {
      const long amount = static_cast<long>((S - 1) << (s - 1));
      const SlotVector merged = add(cur, rotate(cur, amount));
      // After round s, groups of 2^s packed values start every S*2^s columns.
      std::vector<double> keep(blocks * m, 0.0);
      const std::size_t period = S << s;
      const std::size_t run = std::size_t{1} << s;
      for (std::size_t c = 0; c < blocks; ++c) {
        for (std::size_t a = 0; a < W_out; ++a) {
          for (std::size_t j = 0; j < W; ++j) {
            if (j % period < run) {
              keep[c * m + (S * a) * W + j] = 1.0;
            }
          }
        }
      }
      cur = mult_plain(merged, plain_of(ctx, keep));
    }
    // Final round needs no mask: the right half of each output row lands on
    // slots the previous mask zeroed.
    cur = add(cur, rotate(cur, static_cast<long>((S - 1) << (l - 1))));
  }

  // Stage 3: gather rows (and blocks) to their packed targets with one
  // cumulative cursor; all masks are applied to rotations of the same value,
  // so the whole stage costs one level.
  const std::size_t step_row = S * W - W_out;
  const std::size_t step_chan = W * W - S * W * (W_out - 1) - W_out;
  SlotVector acc;
  SlotVector cursor = cur;
  for (std::size_t c = 0; c < blocks; ++c) {
    for (std::size_t a = 0; a < W_out; ++a) {
      if (c != 0 || a != 0) {
        const std::size_t step = (a == 0) ? step_chan : step_row;
        if (step != 0) {
          cursor = rotate(cursor, static_cast<long>(step));
        }
      }
      const std::size_t dst = (c * W_out + a) * W_out;
      const SlotVector piece = mult_plain(cursor, range_mask(ctx, dst, W_out));
      acc = (c == 0 && a == 0) ? piece : add(acc, piece);
    }
  }
  return acc;
}

}  // namespace detail

PackedTensor conv_generic(const PackedTensor& x, const ConvConfig& cfg,
                          const KernelTensor& w) {
  if (cfg.stride != 1 || cfg.padding != 0) {
    throw ShapeError(
        "the generic convolution path handles stride 1 without padding; "
        "compose pad_input and a striding stage (or use convolution())");
  }
  return conv_core_generic(x, cfg, w);
}

PackedTensor conv_special_3x3(const PackedTensor& x, const ConvConfig& cfg,
                              const KernelTensor& w) {
  if (cfg.kernel != 3 || cfg.stride != 1 || cfg.padding != 1) {
    throw ShapeError(
        "the shape-preserving path requires kernel 3, stride 1, padding 1");
  }
  const std::size_t W = x.width, C = x.channels, F = cfg.out_channels;
  const SlotContextPtr& ctx = x.data.context();
  if (W < 2) {
    throw ShapeError("the shape-preserving path requires input edge >= 2");
  }
  if (cfg.in_channels != C || w.in_channels != C || w.out_channels != F ||
      w.kernel != 3) {
    throw ShapeError("kernel tensor shape does not match the layer config");
  }
  const std::size_t m = W * W;
  if (F * m > ctx->slots()) {
    throw CapacityError("convolution output does not fit in the slot count");
  }

  // Tap-aligned views: tap (di, dj) needs the input shifted by
  // (di-1)*W + (dj-1). Corner shifts reuse the row-shifted values.
  const SlotVector up = rotate(x.data, -static_cast<long>(W));
  const SlotVector down = rotate(x.data, static_cast<long>(W));
  std::vector<SlotVector> taps(9);
  taps[0] = rotate(up, -1);
  taps[1] = up;
  taps[2] = rotate(up, 1);
  taps[3] = rotate(x.data, -1);
  taps[4] = x.data;
  taps[5] = rotate(x.data, 1);
  taps[6] = rotate(down, -1);
  taps[7] = down;
  taps[8] = rotate(down, 1);

  const std::array<MaskVector, 9> masks = build_all_masks(m, C, W);
  const PlainVector cleanup = to_plain(extraction_mask(W, C), ctx->slots());

  SlotVector out;
  for (std::size_t f = 0; f < F; ++f) {
    SlotVector sum;
    for (std::size_t tap = 0; tap < 9; ++tap) {
      // Fold the boundary-validity mask into the kernel companion so the
      // pair costs a single level.
      std::vector<double> kv =
          repeated_kernel_vector(w, f, tap / 3, tap % 3, C, W);
      for (std::size_t idx = 0; idx < kv.size(); ++idx) {
        kv[idx] *= masks[tap].values[idx];
      }
      const SlotVector term = mult_plain(taps[tap], plain_of(ctx, kv));
      sum = (tap == 0) ? term : add(sum, term);
    }
    if (C > 1) {
      SlotVector cur = sum;
      for (std::size_t c = 1; c < C; ++c) {
        cur = rotate(cur, static_cast<long>(m));
        sum = add(sum, cur);
      }
    }
    // Partial channel sums in blocks >= 1 must not ride along into other
    // output channels' blocks.
    const SlotVector cleaned = mult_plain(sum, cleanup);
    out = (f == 0) ? cleaned
                   : add(out, rotate(cleaned, -static_cast<long>(f * m)));
  }
  out = add(out, bias_vector(ctx, w.bias, m));
  return {out, F, W};
}

PackedTensor conv_grouped_stride(const PackedTensor& x, const ConvConfig& cfg,
                                 const KernelTensor& w) {
  const std::size_t g = cfg.in_channels, F = cfg.out_channels;
  if (g < 2) {
    throw ShapeError(
        "grouped convolution with one group degenerates to the generic path; "
        "use convolution()");
  }
  if (x.channels != g) {
    throw ShapeError("grouped convolution expects " + std::to_string(g) +
                     " input channels, tensor has " + std::to_string(x.channels));
  }
  if (F % g != 0) {
    throw ShapeError("grouped convolution requires out_channels (" +
                     std::to_string(F) + ") divisible by groups (" +
                     std::to_string(g) + ")");
  }
  if (w.out_channels != F || w.in_channels != 1 || w.kernel != cfg.kernel) {
    throw ShapeError(
        "grouped kernel tensor must be (out_channels, 1, k, k) matching the "
        "layer config");
  }

  const PackedTensor xp =
      cfg.padding > 0 ? pad_input(x, cfg.padding) : x;
  const std::size_t W = xp.width, k = cfg.kernel, S = cfg.stride;
  const SlotContextPtr& ctx = xp.data.context();
  const std::size_t W_out = conv_output_width(W, k, S, 0);
  if (F * W_out * W_out > ctx->slots()) {
    throw CapacityError("convolution output does not fit in the slot count");
  }

  if (!detail::masked_stride_applicable(W_out)) {
    note(ctx,
         "grouped striding needs a power-of-two output edge >= 2, got " +
             std::to_string(W_out) + "; using per-member extraction");
    return conv_grouped_fallback(xp, cfg, w, W_out);
  }

  const std::vector<SlotVector> taps = tap_rotations(xp.data, k, W);
  const std::size_t groups = F / g;

  std::vector<SlotVector> packed_groups;
  packed_groups.reserve(groups);
  for (std::size_t u = 0; u < groups; ++u) {
    // Member u*g + c reads channel c; its tap products are exactly zero
    // outside block c, so the members concatenate by plain addition.
    SlotVector joint;
    for (std::size_t c = 0; c < g; ++c) {
      const std::size_t f = u * g + c;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const SlotVector term = mult_plain(
              taps[i * k + j],
              plain_of(ctx, member_kernel_vector(w, f, i, j, c, g, W)));
          joint = (c == 0 && i == 0 && j == 0) ? term : add(joint, term);
        }
      }
    }
    packed_groups.push_back(detail::stride_mask_compact(joint, W, S, W_out, g));
  }

  // Concatenate the groups back-to-front with one repeated index; each group
  // result is pure within its g * W_out^2 slots.
  SlotVector out = packed_groups[groups - 1];
  for (std::size_t u = groups - 1; u-- > 0;) {
    out = add(rotate(out, -static_cast<long>(g * W_out * W_out)),
              packed_groups[u]);
  }
  out = add(out, bias_vector(ctx, w.bias, W_out * W_out));
  return {out, F, W_out};
}

PackedTensor convolution(const PackedTensor& x, const ConvConfig& cfg,
                         const KernelTensor& w) {
  switch (cfg.mode) {
    case ConvMode::special3x3:
      return conv_special_3x3(x, cfg, w);
    case ConvMode::grouped:
      if (cfg.in_channels == 1) {
        break;  // one group == the generic path; weights are (F,1,k,k) anyway
      }
      return conv_grouped_stride(x, cfg, w);
    case ConvMode::generic:
      break;
  }
  const PackedTensor xp = cfg.padding > 0 ? pad_input(x, cfg.padding) : x;
  ConvConfig inner = cfg;
  inner.padding = 0;
  return conv_core_generic(xp, inner, w);
}

int pad_depth_cost(std::size_t padding) { return padding > 0 ? 1 : 0; }

int stride_depth_cost(StrideVariant variant, std::size_t W, std::size_t S,
                      std::size_t W_out) {
  (void)W;
  if (variant == StrideVariant::masked &&
      detail::masked_stride_applicable(W_out)) {
    return detail::stride_mask_compact_depth(S, W_out);
  }
  return 1;
}

int conv_depth_cost(const ConvConfig& cfg, std::size_t W_in) {
  if (cfg.mode == ConvMode::special3x3) {
    return 2;  // masked tap products, cleanup
  }
  const std::size_t Wp = W_in + 2 * cfg.padding;
  const std::size_t W_out =
      conv_output_width(W_in, cfg.kernel, cfg.stride, cfg.padding);
  const int pad = pad_depth_cost(cfg.padding);
  if (cfg.mode == ConvMode::grouped && cfg.in_channels > 1) {
    if (detail::masked_stride_applicable(W_out)) {
      return pad + 1 +
             detail::stride_mask_compact_depth(cfg.stride, W_out);
    }
    return pad + 2;  // member tap products, extraction striding
  }
  const int stride_cost =
      (cfg.stride == 1 && W_out == Wp)
          ? 0
          : stride_depth_cost(cfg.stride_variant, Wp, cfg.stride, W_out);
  return pad + 2 + stride_cost;  // tap products, cleanup, striding
}

}  // namespace slotcnn
