// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Model runtime: JSON model specs, CSV weight loading, build-time shape and
// level-budget validation, bootstrap placement, execution with per-layer
// level assertions, a cleartext float reference path, activation-range
// calibration, and run reports.

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "slotcnn/keyplan.hpp"
#include "slotcnn/layers.hpp"
#include "slotcnn/tensors.hpp"

namespace slotcnn {

enum class LayerType {
  conv,
  avg_pool,
  global_avg_pool,
  whole_channel_pool,
  fc,
  relu,
  bootstrap,
  batchnorm,
  residual,
};

std::string layer_type_name(LayerType type);

/// How bootstrap layers get into the executed sequence: `automatic` applies
/// the built-in placement (before every activation past the second one,
/// before the second pooling layer, before global reductions) and then
/// repairs any remaining budget violation by inserting a bootstrap directly
/// before the first layer that would run out of levels; `explicit_markers`
/// runs exactly the bootstraps the spec lists and fails the build when the
/// budget does not hold.
enum class BootstrapPolicy { automatic, explicit_markers };

/// preload: all weights parsed at build. lazy: weight files are parsed
/// layer by layer during inference and dropped afterwards.
enum class WeightMode { preload, lazy };

/// preload: every rotation key resident for the whole run. block: keys
/// resident one residency block at a time (see plan_blocks).
enum class KeyMode { preload, block };

/// One layer of a model spec (a parsed JSON entry; see models/ for the
/// schema by example). Residual entries carry a nested body and an optional
/// single-conv projection for the skip path.
struct LayerSpecEntry {
  LayerType type = LayerType::conv;
  std::string name;

  ConvConfig conv;   // in_channels is derived from the running shape
  PoolConfig pool;
  FcConfig fc;       // inputs derived from the running shape
  ReluConfig relu;   // active_slots derived from the running shape

  std::string weights_file;  // conv / fc
  std::string bias_file;     // optional; absent means zero bias

  // Batch normalization: inline values or per-vector CSV files.
  std::vector<double> bn_gamma, bn_beta, bn_mean, bn_var;
  std::string bn_gamma_file, bn_beta_file, bn_mean_file, bn_var_file;
  double bn_epsilon = 1e-5;

  std::vector<LayerSpecEntry> body;        // residual only
  std::vector<LayerSpecEntry> downsample;  // residual only; 0 or 1 conv
};

struct ModelSpec {
  std::string name;
  ContextConfig context;
  WeightMode weight_mode = WeightMode::preload;
  BootstrapPolicy bootstrap_policy = BootstrapPolicy::automatic;
  std::size_t input_channels = 0;
  std::size_t input_width = 0;
  std::vector<LayerSpecEntry> layers;
  /// Directory weight paths resolve against (the spec file's directory).
  std::filesystem::path base_dir;

  static ModelSpec from_json_file(const std::filesystem::path& file);
  static ModelSpec from_json_text(const std::string& text,
                                  const std::filesystem::path& base_dir);
};

/// Parses a standalone context description: either a preset name (as bare
/// text or a JSON string) or a JSON object with the same fields a model
/// spec's "context" entry accepts. Throws ModelError on malformed input.
ContextConfig context_from_json_text(const std::string& text);

/// The value shape flowing between layers: a packed (channels, width) tensor
/// or, after a global reduction or fully-connected layer, a flat prefix of
/// `count` slots.
struct FlowShape {
  bool packed = true;
  std::size_t channels = 0;
  std::size_t width = 0;
  std::size_t count = 0;
  std::size_t active_slots() const {
    return packed ? channels * width * width : count;
  }
  std::string describe() const;
};

/// A validated, shape-resolved, (optionally) weight-loaded layer.
struct BuiltLayer {
  LayerType type = LayerType::conv;
  std::string name;

  ConvConfig conv;
  PoolConfig pool;
  FcConfig fc;
  ReluConfig relu;

  KernelTensor conv_w;  // empty when weights are lazy or skipped
  FcWeights fc_w;
  bool has_weights = false;  // true when conv_w / fc_w hold parsed values
  std::string weights_file;  // resolved path (lazy loading / reporting)
  std::string bias_file;
  bool has_bn = false;
  BatchNormParams bn;  // folded into the conv weights at parse time

  FlowShape in_shape, out_shape;
  /// Exact levels this layer consumes; asserted against observation.
  int depth_cost = 0;
  /// Natural residency-block boundary (the layer shrinks the grid).
  bool ends_block = false;

  std::vector<BuiltLayer> body;        // residual
  std::vector<BuiltLayer> downsample;  // residual skip projection
};

struct BuildOptions {
  /// false: skip weight files entirely (key planning needs shapes only).
  bool load_weights = true;
};

struct BuiltModel {
  std::string name;
  ContextConfig context;
  WeightMode weight_mode = WeightMode::preload;
  BootstrapPolicy bootstrap_policy = BootstrapPolicy::automatic;
  std::filesystem::path base_dir;
  std::vector<BuiltLayer> layers;
  FlowShape input_shape, output_shape;
  /// Bootstrap insertions and other build decisions, human-readable.
  std::vector<std::string> notes;

  /// Per-top-level-layer key derivations (residual units contribute the
  /// union over their nested layers).
  std::vector<LayerKeys> layer_keys() const;
};

/// Validates shapes, capacities and the level ledger; applies the bootstrap
/// policy; loads weights (unless skipped). Throws ModelError with the layer
/// name on any violation.
BuiltModel build_model(const ModelSpec& spec, const BuildOptions& options = {});

// ----------------------------------------------------------------- running

struct InferOptions {
  KeyMode key_mode = KeyMode::preload;
};

struct LedgerRow {
  std::string name;
  int declared = 0;
  int level_in = 0;
  int level_out = 0;
  bool bootstrap = false;
};

struct InferResult {
  std::vector<double> logits;
  std::vector<LedgerRow> ledger;
  std::shared_ptr<TraceRecorder> trace;
  BlockPlan plan;
  TraceCheck trace_check;
  std::size_t rotation_count = 0;
  double wall_ms = 0.0;
};

/// Runs the packed pipeline. Asserts, per top-level layer, that the observed
/// level drop equals the declared depth cost (InternalError naming the layer
/// otherwise).
InferResult infer(const BuiltModel& model, const HostTensor& input,
                  const InferOptions& options = {});

/// Exact float forward pass (true max(0, x) activation, dense arithmetic,
/// no packing): the accuracy yardstick for the packed pipeline.
std::vector<double> plaintext_reference(const BuiltModel& model,
                                        const HostTensor& input);

/// Sets each activation's range bound to safety * max |pre-activation| seen
/// across the batch on the reference path (at least 1), then re-validates
/// the level ledger, inserting further bootstraps when the policy allows.
void calibrate_relu_scales(BuiltModel& model,
                           const std::vector<HostTensor>& batch,
                           double safety = 1.25);

// ----------------------------------------------------------------- reports

struct RunReport {
  std::string model_name;
  std::string kernels;  // active elementwise-kernel variant
  std::vector<double> logits;
  std::vector<double> reference_logits;
  /// Per-logit |packed - reference| deviations.
  std::vector<double> deltas;
  double max_abs_delta = 0.0;
  std::size_t argmax = 0;
  std::size_t reference_argmax = 0;
  bool argmax_match = false;
  std::vector<LedgerRow> ledger;
  BlockPlan plan;
  TraceCheck trace_check;
  MemoryEstimate memory;
  std::size_t rotation_count = 0;
  double wall_ms = 0.0;
  std::vector<std::string> notes;

  std::string to_json() const;
};

RunReport run_with_report(const BuiltModel& model, const HostTensor& input,
                          const InferOptions& options = {});

/// Recomputes every declared depth cost and replays the level ledger,
/// inserting further bootstraps when the policy is `automatic` (throwing
/// ModelError when it is `explicit_markers` and the budget fails). Called by
/// calibrate_relu_scales after activation ranges change.
void revalidate_model(BuiltModel& model);

// ------------------------------------------------------------ weight files

/// Parses a CSV of doubles (rows of comma-separated values; blank lines
/// ignored). Throws ModelError naming the file, the 1-based row/column of
/// the first bad cell, or the expected-vs-found value count.
std::vector<double> load_csv_values(const std::filesystem::path& file,
                                    std::size_t expected_count,
                                    const std::string& what);

namespace detail {

/// Loads (and batch-norm-folds) a conv layer's weights from its recorded
/// files; the preload, lazy and reference paths all funnel through here, so
/// the parsed values are identical by construction.
KernelTensor load_conv_weights(const BuiltLayer& layer,
                               const std::filesystem::path& base_dir);
FcWeights load_fc_weights(const BuiltLayer& layer,
                          const std::filesystem::path& base_dir);

}  // namespace detail

}  // namespace slotcnn
