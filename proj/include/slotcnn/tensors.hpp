// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Host-side tensor containers. These are plain data holders shared by the
// packed engine, the plaintext reference path, and the test oracles; they
// carry no packing or encryption semantics of their own.

#pragma once

#include <cstddef>
#include <vector>

#include "slotcnn/errors.hpp"

namespace slotcnn {

/// A (channels, height, width) tensor in row-major layout:
/// values[c*H*W + i*W + j]. The packed engine requires H == W; the plaintext
/// reference path accepts rectangles.
struct HostTensor {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  HostTensor() = default;
  HostTensor(std::size_t c, std::size_t h, std::size_t w)
      : channels(c), height(h), width(w), values(c * h * w, 0.0) {}

  static HostTensor zeros(std::size_t c, std::size_t h, std::size_t w) {
    return HostTensor(c, h, w);
  }

  std::size_t size() const { return channels * height * width; }

  double at(std::size_t c, std::size_t i, std::size_t j) const {
    return values[(c * height + i) * width + j];
  }
  double& at(std::size_t c, std::size_t i, std::size_t j) {
    return values[(c * height + i) * width + j];
  }

  void check_consistent() const {
    if (values.size() != size()) {
      throw ShapeError("tensor value count does not match its declared shape");
    }
  }
};

/// Convolution weights in (out_channels, in_channels, kernel, kernel) layout
/// with a per-output-channel bias.
struct KernelTensor {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::size_t kernel = 0;
  std::vector<double> weights;  // f*C*k*k + c*k*k + i*k + j
  std::vector<double> bias;     // length out_channels

  KernelTensor() = default;
  KernelTensor(std::size_t f, std::size_t c, std::size_t k)
      : out_channels(f),
        in_channels(c),
        kernel(k),
        weights(f * c * k * k, 0.0),
        bias(f, 0.0) {}

  double at(std::size_t f, std::size_t c, std::size_t i, std::size_t j) const {
    return weights[((f * in_channels + c) * kernel + i) * kernel + j];
  }
  double& at(std::size_t f, std::size_t c, std::size_t i, std::size_t j) {
    return weights[((f * in_channels + c) * kernel + i) * kernel + j];
  }

  void check_consistent() const {
    if (weights.size() != out_channels * in_channels * kernel * kernel) {
      throw ShapeError("kernel weight count does not match its declared shape");
    }
    if (bias.size() != out_channels) {
      throw ShapeError("kernel bias length does not match out_channels");
    }
  }
};

/// Fully-connected weights in (outputs, inputs) row-major layout with a
/// per-output bias.
struct FcWeights {
  std::size_t outputs = 0;
  std::size_t inputs = 0;
  std::vector<double> weights;  // r*inputs + c
  std::vector<double> bias;     // length outputs

  FcWeights() = default;
  FcWeights(std::size_t m, std::size_t n)
      : outputs(m), inputs(n), weights(m * n, 0.0), bias(m, 0.0) {}

  double at(std::size_t r, std::size_t c) const {
    return weights[r * inputs + c];
  }
  double& at(std::size_t r, std::size_t c) { return weights[r * inputs + c]; }

  void check_consistent() const {
    if (weights.size() != outputs * inputs) {
      throw ShapeError("fc weight count does not match its declared shape");
    }
    if (bias.size() != outputs) {
      throw ShapeError("fc bias length does not match outputs");
    }
  }
};

/// Inference-time batch-normalization parameters, one entry per channel.
struct BatchNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double epsilon = 1e-5;

  std::size_t channels() const { return gamma.size(); }

  void check_consistent() const {
    const std::size_t c = gamma.size();
    if (beta.size() != c || running_mean.size() != c ||
        running_var.size() != c) {
      throw ShapeError("batchnorm parameter vectors have mismatched lengths");
    }
  }
};

}  // namespace slotcnn
