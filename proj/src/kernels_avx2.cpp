// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// AVX2 variants of the slot kernels: 4-wide double lanes with a scalar
// remainder loop. Deliberately avoids FMA so results stay bit-identical to
// the scalar reference implementation.

#include "slotcnn/kernels.hpp"

#if defined(SLOTCNN_AVX2_COMPILED)

#include <immintrin.h>

#include <cstring>

namespace slotcnn::kernels::avx2 {

namespace {

void add_impl(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(out + i, _mm256_add_pd(va, vb));
  }
  for (; i < n; ++i) {
    out[i] = a[i] + b[i];
  }
}

void sub_impl(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(out + i, _mm256_sub_pd(va, vb));
  }
  for (; i < n; ++i) {
    out[i] = a[i] - b[i];
  }
}

void mul_impl(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(va, vb));
  }
  for (; i < n; ++i) {
    out[i] = a[i] * b[i];
  }
}

void mul_scalar_impl(const double* a, double s, double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
  }
  for (; i < n; ++i) {
    out[i] = a[i] * s;
  }
}

void rotate_impl(const double* in, double* out, std::size_t n, std::size_t t) {
  // Pure data movement; memcpy is already vectorized.
  std::memcpy(out, in + t, (n - t) * sizeof(double));
  std::memcpy(out + (n - t), in, t * sizeof(double));
}

}  // namespace

const Ops ops = {"avx2", add_impl, sub_impl, mul_impl, mul_scalar_impl,
                 rotate_impl};

}  // namespace slotcnn::kernels::avx2

#endif  // SLOTCNN_AVX2_COMPILED
