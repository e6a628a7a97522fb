// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// The slot-vector backend: a cleartext stand-in for a leveled, packed
// homomorphic vector scheme. A SlotVector holds S real-valued slots plus the
// remaining multiplicative depth ("level"); the free-function ops implement
// the cyclic-rotation / elementwise algebra that the layer algorithms build
// on, with the same level-accounting rules a real scheme would impose:
//
//   rotate      level preserved          cyclic left shift by t, |t| < S
//   add / sub   level = min(levels)      elementwise, no depth cost
//   mult_plain  level - 1                vector-plaintext product
//   mult_cipher min(levels) - 1          vector-vector product
//   bootstrap   level := depth budget    optional Gaussian perturbation
//
// Any multiplication at level 0 throws DepthExhaustedError naming the
// operation. Values are immutable; each op returns a fresh SlotVector.

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "slotcnn/errors.hpp"
#include "slotcnn/trace.hpp"

namespace slotcnn {

/// Parameters a real scheme would need that the simulator only carries as
/// metadata (they shape reports, not arithmetic).
struct CryptoMetadata {
  int first_modulus_bits = 50;
  int rescale_bits = 46;
  int key_switch_digits = 4;
  std::string rescaling_strategy = "flexibleauto";
};

struct ContextConfig {
  std::size_t ring_dimension = 16384;
  std::size_t slot_count = 8192;
  int depth_budget = 25;
  CryptoMetadata crypto{};
  /// Standard deviation of the zero-mean Gaussian added to every slot by
  /// bootstrap(); 0 (the default) keeps bootstrapping exact.
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 1;

  /// Throws on inconsistent parameters (slot count must be a power of two no
  /// larger than half the ring dimension; the depth budget must be positive).
  void validate() const;

  /// Named parameter sets: "lenet5" (ring 16384, 8192 slots) and "large"
  /// (ring 32768, 16384 slots), both with a depth budget of 25.
  static ContextConfig preset(const std::string& name);
  static bool is_preset(const std::string& name);
};

class SlotContext;
using SlotContextPtr = std::shared_ptr<SlotContext>;

/// Shared evaluation state: the configuration, an optional trace recorder,
/// and the deterministic noise source used by bootstrap().
class SlotContext : public std::enable_shared_from_this<SlotContext> {
 public:
  static SlotContextPtr create(ContextConfig config);

  const ContextConfig& config() const { return config_; }
  std::size_t slots() const { return config_.slot_count; }
  int depth_budget() const { return config_.depth_budget; }

  /// Creates, attaches, and returns a recorder observing this context.
  std::shared_ptr<TraceRecorder> attach_recorder();
  void attach_recorder(std::shared_ptr<TraceRecorder> recorder);
  void detach_recorder();
  TraceRecorder* recorder() const { return recorder_.get(); }

  /// One draw from N(0, noise_sigma); deterministic given noise_seed.
  double sample_noise();

  std::uint64_t next_id() { return ++id_counter_; }

 private:
  explicit SlotContext(ContextConfig config);

  ContextConfig config_;
  std::shared_ptr<TraceRecorder> recorder_;
  std::mt19937_64 noise_rng_;
  std::normal_distribution<double> noise_dist_;
  std::uint64_t id_counter_ = 0;
};

/// An unencrypted plaintext operand: S slots multiplied or added elementwise
/// into a SlotVector.
struct PlainVector {
  std::vector<double> slots;

  static PlainVector zeros(std::size_t n) { return {std::vector<double>(n, 0.0)}; }
  /// Copies `values` into the first slots and zero-fills the rest; rejects
  /// values longer than n.
  static PlainVector from_values(std::size_t n, const std::vector<double>& values);
};

/// The simulated packed ciphertext. Slot payload is shared and immutable;
/// copying a SlotVector is cheap.
class SlotVector {
 public:
  SlotVector() = default;

  SlotVector(SlotContextPtr ctx, std::vector<double> slots, int level);

  /// Packs `values` into the first slots (zero-filling the rest) at the full
  /// depth budget. Rejects values longer than the slot count.
  static SlotVector encode(const SlotContextPtr& ctx,
                           const std::vector<double>& values);

  bool valid() const { return static_cast<bool>(ctx_); }
  const SlotContextPtr& context() const { return ctx_; }
  const std::vector<double>& slots() const { return *slots_; }
  std::size_t size() const { return slots_->size(); }
  double at(std::size_t i) const { return (*slots_)[i]; }
  int level() const { return level_; }
  std::uint64_t id() const { return id_; }

 private:
  SlotContextPtr ctx_;
  std::shared_ptr<const std::vector<double>> slots_;
  int level_ = 0;
  std::uint64_t id_ = 0;
};

/// Cyclic left rotation by t (negative t rotates right). Level preserved.
/// Throws InvalidRotationError when |t| >= slot count.
SlotVector rotate(const SlotVector& v, long t);

/// Elementwise sum; result level is the minimum of the operand levels.
SlotVector add(const SlotVector& a, const SlotVector& b);

/// Elementwise difference; result level is the minimum of the operand levels.
SlotVector sub(const SlotVector& a, const SlotVector& b);

/// Elementwise vector-plaintext product; consumes one level. Throws
/// DepthExhaustedError at level 0, naming the operation.
SlotVector mult_plain(const SlotVector& v, const PlainVector& p);

/// Elementwise vector-vector product; result level is min(levels) - 1.
SlotVector mult_cipher(const SlotVector& a, const SlotVector& b);

/// Restores the level to the context's depth budget without changing slot
/// values, except for optional zero-mean Gaussian noise of width noise_sigma.
SlotVector bootstrap(const SlotVector& v);

}  // namespace slotcnn
