// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "slotcnn/backend.hpp"

#include <utility>

#include "slotcnn/kernels.hpp"

namespace slotcnn {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_same_context(const SlotVector& a, const SlotVector& b,
                          const char* op) {
  if (!a.valid() || !b.valid()) {
    throw InternalError(std::string(op) + ": operand is not initialized");
  }
  if (a.context() != b.context()) {
    throw InternalError(std::string(op) +
                        ": operands belong to different contexts");
  }
}

void require_depth(const SlotVector& v, int min_level, const char* op) {
  if (v.level() < min_level) {
    throw DepthExhaustedError(std::string(op) + ": no multiplicative depth left (level " +
                              std::to_string(v.level()) + ")");
  }
}

}  // namespace

// ------------------------------------------------------------- ContextConfig

void ContextConfig::validate() const {
  if (!is_power_of_two(slot_count)) {
    throw ShapeError("slot count must be a power of two, got " +
                     std::to_string(slot_count));
  }
  if (!is_power_of_two(ring_dimension)) {
    throw ShapeError("ring dimension must be a power of two, got " +
                     std::to_string(ring_dimension));
  }
  if (slot_count * 2 > ring_dimension) {
    throw ShapeError("slot count " + std::to_string(slot_count) +
                     " exceeds half the ring dimension " +
                     std::to_string(ring_dimension));
  }
  if (depth_budget < 1) {
    throw ShapeError("depth budget must be positive, got " +
                     std::to_string(depth_budget));
  }
  if (noise_sigma < 0.0) {
    throw ShapeError("noise sigma must be non-negative");
  }
}

ContextConfig ContextConfig::preset(const std::string& name) {
  ContextConfig cfg;
  if (name == "lenet5") {
    cfg.ring_dimension = 16384;
    cfg.slot_count = 8192;
  } else if (name == "large") {
    cfg.ring_dimension = 32768;
    cfg.slot_count = 16384;
  } else {
    throw ModelError("unknown context preset \"" + name +
                     "\" (expected \"lenet5\" or \"large\")");
  }
  cfg.depth_budget = 25;
  cfg.crypto = CryptoMetadata{};
  return cfg;
}

bool ContextConfig::is_preset(const std::string& name) {
  return name == "lenet5" || name == "large";
}

// --------------------------------------------------------------- SlotContext

SlotContext::SlotContext(ContextConfig config)
    : config_(std::move(config)),
      noise_rng_(config_.noise_seed),
      noise_dist_(0.0, config_.noise_sigma > 0.0 ? config_.noise_sigma : 1.0) {}

SlotContextPtr SlotContext::create(ContextConfig config) {
  config.validate();
  return SlotContextPtr(new SlotContext(std::move(config)));
}

std::shared_ptr<TraceRecorder> SlotContext::attach_recorder() {
  recorder_ = std::make_shared<TraceRecorder>();
  return recorder_;
}

void SlotContext::attach_recorder(std::shared_ptr<TraceRecorder> recorder) {
  recorder_ = std::move(recorder);
}

void SlotContext::detach_recorder() { recorder_.reset(); }

double SlotContext::sample_noise() {
  if (config_.noise_sigma <= 0.0) {
    return 0.0;
  }
  return noise_dist_(noise_rng_);
}

// --------------------------------------------------------------- PlainVector

PlainVector PlainVector::from_values(std::size_t n,
                                     const std::vector<double>& values) {
  if (values.size() > n) {
    throw CapacityError("plain vector payload of " +
                        std::to_string(values.size()) +
                        " values does not fit in " + std::to_string(n) +
                        " slots");
  }
  PlainVector p = zeros(n);
  std::copy(values.begin(), values.end(), p.slots.begin());
  return p;
}

// ---------------------------------------------------------------- SlotVector

SlotVector::SlotVector(SlotContextPtr ctx, std::vector<double> slots, int level)
    : ctx_(std::move(ctx)),
      slots_(std::make_shared<const std::vector<double>>(std::move(slots))),
      level_(level) {
  if (!ctx_) {
    throw InternalError("SlotVector requires a context");
  }
  if (slots_->size() != ctx_->slots()) {
    throw ShapeError("slot payload length " + std::to_string(slots_->size()) +
                     " does not match context slot count " +
                     std::to_string(ctx_->slots()));
  }
  if (level_ < 0 || level_ > ctx_->depth_budget()) {
    throw InternalError("SlotVector level " + std::to_string(level_) +
                        " outside [0, depth budget]");
  }
  id_ = ctx_->next_id();
}

SlotVector SlotVector::encode(const SlotContextPtr& ctx,
                              const std::vector<double>& values) {
  if (!ctx) {
    throw InternalError("encode requires a context");
  }
  if (values.size() > ctx->slots()) {
    throw CapacityError("payload of " + std::to_string(values.size()) +
                        " values does not fit in " +
                        std::to_string(ctx->slots()) + " slots");
  }
  std::vector<double> slots(ctx->slots(), 0.0);
  std::copy(values.begin(), values.end(), slots.begin());
  return SlotVector(ctx, std::move(slots), ctx->depth_budget());
}

// ----------------------------------------------------------------------- ops

SlotVector rotate(const SlotVector& v, long t) {
  if (!v.valid()) {
    throw InternalError("rotate: operand is not initialized");
  }
  const long n = static_cast<long>(v.size());
  if (t <= -n || t >= n) {
    throw InvalidRotationError("rotation amount " + std::to_string(t) +
                               " out of range for " + std::to_string(n) +
                               " slots");
  }
  const std::size_t shift = static_cast<std::size_t>(t >= 0 ? t : t + n);
  std::vector<double> out(v.size());
  kernels::active().rotate(v.slots().data(), out.data(), v.size(), shift);
  if (TraceRecorder* rec = v.context()->recorder()) {
    rec->record_rotation(t);
  }
  return SlotVector(v.context(), std::move(out), v.level());
}

SlotVector add(const SlotVector& a, const SlotVector& b) {
  require_same_context(a, b, "add");
  std::vector<double> out(a.size());
  kernels::active().add(a.slots().data(), b.slots().data(), out.data(),
                        a.size());
  return SlotVector(a.context(), std::move(out), std::min(a.level(), b.level()));
}

SlotVector sub(const SlotVector& a, const SlotVector& b) {
  require_same_context(a, b, "sub");
  std::vector<double> out(a.size());
  kernels::active().sub(a.slots().data(), b.slots().data(), out.data(),
                        a.size());
  return SlotVector(a.context(), std::move(out), std::min(a.level(), b.level()));
}

SlotVector mult_plain(const SlotVector& v, const PlainVector& p) {
  if (!v.valid()) {
    throw InternalError("mult_plain: operand is not initialized");
  }
  if (p.slots.size() != v.size()) {
    throw ShapeError("mult_plain: plaintext length " +
                     std::to_string(p.slots.size()) +
                     " does not match slot count " + std::to_string(v.size()));
  }
  require_depth(v, 1, "mult_plain");
  std::vector<double> out(v.size());
  kernels::active().mul(v.slots().data(), p.slots.data(), out.data(), v.size());
  const int level = v.level() - 1;
  if (TraceRecorder* rec = v.context()->recorder()) {
    rec->record_mult_plain(level);
  }
  return SlotVector(v.context(), std::move(out), level);
}

SlotVector mult_cipher(const SlotVector& a, const SlotVector& b) {
  require_same_context(a, b, "mult_cipher");
  require_depth(a, 1, "mult_cipher");
  require_depth(b, 1, "mult_cipher");
  std::vector<double> out(a.size());
  kernels::active().mul(a.slots().data(), b.slots().data(), out.data(),
                        a.size());
  const int level = std::min(a.level(), b.level()) - 1;
  if (TraceRecorder* rec = a.context()->recorder()) {
    rec->record_mult_cipher(level);
  }
  return SlotVector(a.context(), std::move(out), level);
}

SlotVector bootstrap(const SlotVector& v) {
  if (!v.valid()) {
    throw InternalError("bootstrap: operand is not initialized");
  }
  SlotContext& ctx = *v.context();
  std::vector<double> out = v.slots();
  if (ctx.config().noise_sigma > 0.0) {
    for (double& s : out) {
      s += ctx.sample_noise();
    }
  }
  const int level = ctx.depth_budget();
  if (TraceRecorder* rec = ctx.recorder()) {
    rec->record_bootstrap(level);
  }
  return SlotVector(v.context(), std::move(out), level);
}

}  // namespace slotcnn
