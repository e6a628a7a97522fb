// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Elementwise slot kernels behind the vector backend. A scalar reference
// implementation always exists; an AVX2 variant is selected at runtime when
// the CPU supports it. Both variants are pure elementwise IEEE operations and
// therefore produce bit-identical results, which the test suite asserts.
//
// The SLOTCNN_KERNELS environment variable ("scalar" or "avx2") overrides the
// automatic choice; requesting "avx2" on an unsupported build or CPU falls
// back to scalar.

#pragma once

#include <cstddef>

namespace slotcnn::kernels {

/// Function table for one kernel implementation.
struct Ops {
  const char* name;
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul_scalar)(const double* a, double s, double* out, std::size_t n);
  /// out[j] = in[(j + t) mod n] with 0 <= t < n (left rotation).
  void (*rotate)(const double* in, double* out, std::size_t n, std::size_t t);
};

namespace scalar {
extern const Ops ops;
}

#if defined(SLOTCNN_AVX2_COMPILED)
namespace avx2 {
extern const Ops ops;
}
#endif

/// The implementation chosen for this process (resolved once, thread-safe).
const Ops& active();

/// True when the AVX2 variant was compiled in and the CPU supports it.
bool avx2_available();

}  // namespace slotcnn::kernels
