// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Chebyshev interpolation and its slot-vector evaluator. Coefficients come
// from interpolation at the Chebyshev nodes of the second kind's companion
// (the classic cos(pi*(2j+1)/(2N)) roots grid); evaluation on packed values
// uses a depth-balanced product tree over the basis polynomials so that a
// degree-D series consumes only ceil(log2(D)) + 1 levels instead of the D
// levels a naive Horner/recurrence scheme would burn.

#pragma once

#include <functional>
#include <vector>

#include "slotcnn/backend.hpp"

namespace slotcnn {

/// The D+1 interpolation nodes used by cheb_coefficients, in [-1, 1].
std::vector<double> cheb_nodes(int degree);

/// Coefficients c_0..c_D of the interpolant p(x) = sum_d c_d T_d(x) matching
/// f at the nodes. `degree` must be >= 0.
std::vector<double> cheb_coefficients(const std::function<double(double)>& f,
                                      int degree);

/// Evaluates sum_d c_d T_d(x) on every slot. Levels consumed are exactly
/// cheb_eval_depth(coeffs.size() - 1).
///
/// The basis is materialized with the splitting T_{a+b} = 2 T_a T_b - T_{a-b}
/// (a = ceil(d/2), b = floor(d/2)), so T_d sits ceil(log2(d)) products deep;
/// the final plaintext combination adds one more level.
SlotVector cheb_eval(const SlotVector& x, const std::vector<double>& coeffs);

/// Exact multiplicative depth of cheb_eval for a given series degree:
/// 0 for degree <= 0, 1 for degree 1, ceil(log2(degree)) + 1 otherwise.
int cheb_eval_depth(int degree);

/// Clenshaw's recurrence on one scalar; the numeric cross-check for
/// cheb_eval and the evaluator behind the accuracy-profiling tool.
double cheb_eval_scalar(double x, const std::vector<double>& coeffs);

}  // namespace slotcnn
