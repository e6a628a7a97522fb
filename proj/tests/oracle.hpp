// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used to check the packed engine.
// Everything here is written as direct loops over host tensors, deliberately
// sharing no code with the slot-vector layer algorithms it validates.

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "slotcnn/tensors.hpp"

namespace slotcnn::oracle {

/// Direct dense 2-D cross-correlation (the usual CNN "convolution") with
/// stride and symmetric zero padding. Adds the per-output-channel bias.
HostTensor conv2d_ref(const HostTensor& x, const KernelTensor& w,
                      std::size_t stride, std::size_t padding);

/// Grouped convolution with groups == in_channels (each input channel is its
/// own group; output channel f reads input channel f % C).
HostTensor conv2d_grouped_ref(const HostTensor& x, const KernelTensor& w,
                              std::size_t stride, std::size_t padding);

/// Average pooling with a k x k window and the given stride (no padding).
HostTensor avg_pool_ref(const HostTensor& x, std::size_t k,
                        std::size_t stride);

/// Per-channel mean over the full spatial extent.
std::vector<double> global_avg_pool_ref(const HostTensor& x);

/// Dense matrix-vector product plus bias.
std::vector<double> fc_ref(const std::vector<double>& x, const FcWeights& w);

/// Symmetric zero padding of every channel.
HostTensor pad_ref(const HostTensor& x, std::size_t padding);

/// Keeps elements at positions (stride*a, stride*b); the output edge is
/// ceil(extent / stride) when `out_width` is zero, else exactly `out_width`.
HostTensor subsample_ref(const HostTensor& x, std::size_t stride,
                         std::size_t out_width = 0);

/// Elementwise max(0, v).
std::vector<double> relu_ref(const std::vector<double>& v);
HostTensor relu_ref(const HostTensor& x);

/// Inference-time batch normalization applied per channel.
HostTensor batchnorm_ref(const HostTensor& x, const BatchNormParams& bn);

/// Clenshaw's recurrence for a Chebyshev series sum_d c[d] * T_d(x).
/// Used as the independent evaluator for polynomial-approximation checks.
double clenshaw_ref(double x, const std::vector<double>& coeffs);

/// Least-squares-free direct check value: evaluates f on a uniform grid and
/// returns the maximum |f - p| where p is the Clenshaw evaluation of coeffs.
/// `skip` lets callers exclude a region (returns true to skip a grid point).
double max_abs_error_on_grid(const std::function<double(double)>& f,
                             const std::vector<double>& coeffs, double lo,
                             double hi, std::size_t points,
                             const std::function<bool(double)>& skip = {});

}  // namespace slotcnn::oracle
