// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <cstring>

#include "slotcnn/kernels.hpp"

namespace slotcnn::kernels {

bool avx2_available() {
#if defined(SLOTCNN_AVX2_COMPILED) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

namespace {

const Ops& resolve() {
  const char* forced = std::getenv("SLOTCNN_KERNELS");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
    return scalar::ops;
  }
#if defined(SLOTCNN_AVX2_COMPILED)
  if (avx2_available()) {
    return avx2::ops;
  }
#endif
  return scalar::ops;
}

}  // namespace

const Ops& active() {
  static const Ops& chosen = resolve();
  return chosen;
}

}  // namespace slotcnn::kernels
