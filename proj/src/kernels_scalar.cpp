// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstring>

#include "slotcnn/kernels.hpp"

namespace slotcnn::kernels::scalar {

namespace {

void add_impl(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a[i] + b[i];
  }
}

void sub_impl(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a[i] - b[i];
  }
}

void mul_impl(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a[i] * b[i];
  }
}

void mul_scalar_impl(const double* a, double s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a[i] * s;
  }
}

void rotate_impl(const double* in, double* out, std::size_t n, std::size_t t) {
  // out[j] = in[(j + t) mod n]; two contiguous copies.
  std::memcpy(out, in + t, (n - t) * sizeof(double));
  std::memcpy(out + (n - t), in, t * sizeof(double));
}

}  // namespace

const Ops ops = {"scalar", add_impl, sub_impl, mul_impl, mul_scalar_impl,
                 rotate_impl};

}  // namespace slotcnn::kernels::scalar
