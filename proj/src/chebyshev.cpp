// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "slotcnn/chebyshev.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace slotcnn {

namespace {

int ceil_log2(int d) {
  // d >= 2
  return static_cast<int>(std::bit_width(static_cast<unsigned>(d - 1)));
}

}  // namespace

std::vector<double> cheb_nodes(int degree) {
  if (degree < 0) {
    throw ShapeError("polynomial degree must be non-negative");
  }
  const int n = degree + 1;
  std::vector<double> nodes(n);
  for (int j = 0; j < n; ++j) {
    nodes[j] = std::cos(std::numbers::pi * (2.0 * j + 1.0) / (2.0 * n));
  }
  return nodes;
}

std::vector<double> cheb_coefficients(const std::function<double(double)>& f,
                                      int degree) {
  const std::vector<double> nodes = cheb_nodes(degree);
  const int n = degree + 1;
  std::vector<double> fx(n);
  for (int j = 0; j < n; ++j) {
    fx[j] = f(nodes[j]);
  }
  std::vector<double> coeffs(n, 0.0);
  for (int d = 0; d < n; ++d) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += fx[j] * std::cos(d * std::numbers::pi * (2.0 * j + 1.0) / (2.0 * n));
    }
    coeffs[d] = (d == 0 ? 1.0 : 2.0) * acc / n;
  }
  return coeffs;
}

int cheb_eval_depth(int degree) {
  if (degree <= 0) {
    return 0;
  }
  if (degree == 1) {
    return 1;
  }
  return ceil_log2(degree) + 1;
}

SlotVector cheb_eval(const SlotVector& x, const std::vector<double>& coeffs) {
  if (!x.valid()) {
    throw InternalError("cheb_eval: operand is not initialized");
  }
  if (coeffs.empty()) {
    throw ShapeError("cheb_eval: empty coefficient list");
  }
  const SlotContextPtr& ctx = x.context();
  const std::size_t S = ctx->slots();
  const int D = static_cast<int>(coeffs.size()) - 1;

  if (D == 0) {
    // A constant series; no slot operation, no depth consumed.
    return SlotVector(ctx, std::vector<double>(S, coeffs[0]), x.level());
  }

  // Basis polynomials T_1..T_D via the balanced splitting; each T_d costs one
  // vector-vector product and sits ceil(log2(d)) products below x.
  std::vector<SlotVector> T(static_cast<std::size_t>(D) + 1);
  T[1] = x;
  SlotVector ones;
  if (D >= 2) {
    ones = SlotVector(ctx, std::vector<double>(S, 1.0), ctx->depth_budget());
  }
  for (int d = 2; d <= D; ++d) {
    const int a = (d + 1) / 2;
    const int b = d / 2;
    const SlotVector prod = mult_cipher(T[a], T[b]);
    const SlotVector doubled = add(prod, prod);
    T[d] = sub(doubled, (d % 2 == 0) ? ones : T[1]);  // minus T_{a-b}
  }

  // Plaintext combination: one more level, shared by every term.
  SlotVector acc;
  for (int d = 1; d <= D; ++d) {
    const PlainVector cd{std::vector<double>(S, coeffs[d])};
    const SlotVector term = mult_plain(T[d], cd);
    acc = (d == 1) ? term : add(acc, term);
  }
  const SlotVector c0(ctx, std::vector<double>(S, coeffs[0]),
                      ctx->depth_budget());
  return add(acc, c0);
}

double cheb_eval_scalar(double x, const std::vector<double>& coeffs) {
  if (coeffs.empty()) {
    return 0.0;
  }
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t d = coeffs.size(); d-- > 1;) {
    const double b0 = coeffs[d] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs[0] + x * b1 - b2;
}

}  // namespace slotcnn
