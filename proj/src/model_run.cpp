// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Model execution (packed pipeline with per-layer level assertions), the
// cleartext float reference path, activation-range calibration, and reports.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "slotcnn/kernels.hpp"
#include "slotcnn/model.hpp"

namespace slotcnn {

namespace {

// ------------------------------------------------------------ packed flow

struct FlowValue {
  bool packed = true;
  PackedTensor pt;
  SlotVector sv;
};

int flow_level(const FlowValue& v) {
  return v.packed ? v.pt.data.level() : v.sv.level();
}

FlowValue run_layer(const BuiltModel& model, const BuiltLayer& L,
                    FlowValue v) {
  switch (L.type) {
    case LayerType::conv: {
      const KernelTensor w = L.has_weights
                                 ? L.conv_w
                                 : detail::load_conv_weights(L, model.base_dir);
      v.pt = convolution(v.pt, L.conv, w);
      return v;
    }
    case LayerType::avg_pool:
      v.pt = avg_pool(v.pt, L.pool);
      return v;
    case LayerType::global_avg_pool:
      v.sv = global_avg_pool(v.pt);
      v.packed = false;
      return v;
    case LayerType::whole_channel_pool:
      v.sv = whole_channel_pool(v.pt, L.pool.kernel);
      v.packed = false;
      return v;
    case LayerType::fc: {
      const FcWeights w = L.has_weights
                              ? L.fc_w
                              : detail::load_fc_weights(L, model.base_dir);
      v.sv = v.packed ? fully_connected(v.pt, L.fc, w)
                      : fully_connected(v.sv, L.fc, w);
      v.packed = false;
      return v;
    }
    case LayerType::relu:
      if (v.packed) {
        v.pt = secure_relu(v.pt, L.relu);
      } else {
        v.sv = secure_relu(v.sv, L.relu);
      }
      return v;
    case LayerType::bootstrap:
      if (v.packed) {
        v.pt.data = bootstrap(v.pt.data);
      } else {
        v.sv = bootstrap(v.sv);
      }
      return v;
    case LayerType::residual: {
      FlowValue skip = v;
      FlowValue body = v;
      for (const BuiltLayer& b : L.body) {
        body = run_layer(model, b, body);
      }
      if (!L.downsample.empty()) {
        skip = run_layer(model, L.downsample[0], skip);
      }
      // Both branches carry the same packed shape (checked at build), so the
      // skip connection is a plain slot-wise addition: no alignment
      // rotations, no level cost.
      body.pt.data = add(body.pt.data, skip.pt.data);
      return body;
    }
    case LayerType::batchnorm:
      break;
  }
  throw InternalError("unexecutable layer type " + layer_type_name(L.type));
}

}  // namespace

InferResult infer(const BuiltModel& model, const HostTensor& input,
                  const InferOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (input.channels != model.input_shape.channels ||
      input.height != model.input_shape.width ||
      input.width != model.input_shape.width) {
    throw ShapeError("input tensor is " + std::to_string(input.channels) + "x" +
                     std::to_string(input.height) + "x" +
                     std::to_string(input.width) + ", the model expects " +
                     model.input_shape.describe());
  }
  const SlotContextPtr ctx = SlotContext::create(model.context);
  const std::shared_ptr<TraceRecorder> rec = ctx->attach_recorder();

  FlowValue v;
  v.packed = true;
  v.pt = flatten(ctx, input);

  InferResult res;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const BuiltLayer& L = model.layers[i];
    rec->mark("layer:" + std::to_string(i) + ":" + L.name);
    const int level_in = flow_level(v);
    v = run_layer(model, L, v);
    const int level_out = flow_level(v);
    res.ledger.push_back(
        {L.name, L.depth_cost, level_in, level_out,
         L.type == LayerType::bootstrap});
    if (L.type == LayerType::bootstrap) {
      if (level_out != model.context.depth_budget) {
        throw InternalError("bootstrap '" + L.name +
                            "' did not restore the depth budget");
      }
    } else if (level_in - level_out != L.depth_cost) {
      throw InternalError(
          "layer '" + L.name + "' declared " + std::to_string(L.depth_cost) +
          " levels but consumed " + std::to_string(level_in - level_out) +
          " (entered at " + std::to_string(level_in) + ", left at " +
          std::to_string(level_out) + ")");
    }
  }

  const std::size_t n_logits = v.packed ? v.pt.used_slots()
                                        : model.output_shape.count;
  const std::vector<double>& slots = v.packed ? v.pt.data.slots()
                                              : v.sv.slots();
  res.logits.assign(slots.begin(),
                    slots.begin() + static_cast<long>(n_logits));

  const std::vector<LayerKeys> keys = model.layer_keys();
  res.plan = (options.key_mode == KeyMode::block) ? plan_blocks(keys)
                                                  : plan_single_block(keys);
  res.trace = rec;
  res.trace_check = verify_trace(res.plan, rec->snapshot());
  res.rotation_count = res.trace_check.rotations_checked;
  res.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return res;
}

// -------------------------------------------------------- float reference

namespace {

struct RefValue {
  bool packed = true;
  HostTensor t;
  std::vector<double> flat;
};

HostTensor ref_conv(const HostTensor& x, const KernelTensor& w,
                    const ConvConfig& cfg) {
  const std::size_t W = x.width, P = cfg.padding, S = cfg.stride,
                    k = cfg.kernel;
  const std::size_t W_out = (W + 2 * P - k) / S + 1;
  HostTensor y(cfg.out_channels, W_out, W_out);
  const auto sample = [&](std::size_t c, long i, long j) -> double {
    const long ii = i - static_cast<long>(P);
    const long jj = j - static_cast<long>(P);
    if (ii < 0 || jj < 0 || ii >= static_cast<long>(x.height) ||
        jj >= static_cast<long>(x.width)) {
      return 0.0;
    }
    return x.at(c, static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
  };
  const bool grouped_layout = (cfg.mode == ConvMode::grouped);
  for (std::size_t f = 0; f < cfg.out_channels; ++f) {
    for (std::size_t a = 0; a < W_out; ++a) {
      for (std::size_t b = 0; b < W_out; ++b) {
        double acc = w.bias[f];
        if (grouped_layout) {
          const std::size_t c = f % cfg.in_channels;
          for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
              acc += w.at(f, 0, i, j) *
                     sample(c, static_cast<long>(a * S + i),
                            static_cast<long>(b * S + j));
            }
          }
        } else {
          for (std::size_t c = 0; c < cfg.in_channels; ++c) {
            for (std::size_t i = 0; i < k; ++i) {
              for (std::size_t j = 0; j < k; ++j) {
                acc += w.at(f, c, i, j) *
                       sample(c, static_cast<long>(a * S + i),
                              static_cast<long>(b * S + j));
              }
            }
          }
        }
        y.at(f, a, b) = acc;
      }
    }
  }
  return y;
}

HostTensor ref_avg_pool(const HostTensor& x, std::size_t k, std::size_t S) {
  const std::size_t W_out = (x.width - k) / S + 1;
  HostTensor y(x.channels, W_out, W_out);
  for (std::size_t c = 0; c < x.channels; ++c) {
    for (std::size_t a = 0; a < W_out; ++a) {
      for (std::size_t b = 0; b < W_out; ++b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = 0; j < k; ++j) {
            acc += x.at(c, a * S + i, b * S + j);
          }
        }
        y.at(c, a, b) = acc / static_cast<double>(k * k);
      }
    }
  }
  return y;
}

std::vector<double> ref_global_pool(const HostTensor& x) {
  std::vector<double> out(x.channels, 0.0);
  for (std::size_t c = 0; c < x.channels; ++c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.height; ++i) {
      for (std::size_t j = 0; j < x.width; ++j) {
        acc += x.at(c, i, j);
      }
    }
    out[c] = acc / static_cast<double>(x.height * x.width);
  }
  return out;
}

std::vector<double> ref_fc(const std::vector<double>& x, const FcWeights& w) {
  std::vector<double> out(w.outputs, 0.0);
  for (std::size_t r = 0; r < w.outputs; ++r) {
    double acc = w.bias[r];
    for (std::size_t c = 0; c < w.inputs; ++c) {
      acc += w.at(r, c) * x[c];
    }
    out[r] = acc;
  }
  return out;
}

double ref_max_abs(const RefValue& v) {
  const std::vector<double>& vals = v.packed ? v.t.values : v.flat;
  double m = 0.0;
  for (double x : vals) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

/// Walks the reference path. When `maxima` is given, records the largest
/// |pre-activation| per activation site (cursor counts sites in execution
/// order, nested bodies included).
RefValue ref_layer(const BuiltModel& model, const BuiltLayer& L, RefValue v,
                   std::vector<double>* maxima, std::size_t* cursor) {
  switch (L.type) {
    case LayerType::conv: {
      const KernelTensor w = L.has_weights
                                 ? L.conv_w
                                 : detail::load_conv_weights(L, model.base_dir);
      v.t = ref_conv(v.t, w, L.conv);
      return v;
    }
    case LayerType::avg_pool:
      v.t = ref_avg_pool(v.t, L.pool.kernel, L.pool.stride);
      return v;
    case LayerType::global_avg_pool:
    case LayerType::whole_channel_pool:
      v.flat = ref_global_pool(v.t);
      v.packed = false;
      return v;
    case LayerType::fc: {
      const FcWeights w = L.has_weights
                              ? L.fc_w
                              : detail::load_fc_weights(L, model.base_dir);
      v.flat = ref_fc(v.packed ? v.t.values : v.flat, w);
      v.packed = false;
      return v;
    }
    case LayerType::relu: {
      if (maxima != nullptr) {
        if (maxima->size() <= *cursor) {
          maxima->resize(*cursor + 1, 0.0);
        }
        (*maxima)[*cursor] = std::max((*maxima)[*cursor], ref_max_abs(v));
        ++*cursor;
      }
      auto relu = [](double z) { return z < 0.0 ? 0.0 : z; };
      if (v.packed) {
        for (double& z : v.t.values) z = relu(z);
      } else {
        for (double& z : v.flat) z = relu(z);
      }
      return v;
    }
    case LayerType::bootstrap:
      return v;
    case LayerType::residual: {
      RefValue skip = v;
      RefValue body = v;
      for (const BuiltLayer& b : L.body) {
        body = ref_layer(model, b, body, maxima, cursor);
      }
      if (!L.downsample.empty()) {
        skip = ref_layer(model, L.downsample[0], skip, maxima, cursor);
      }
      for (std::size_t idx = 0; idx < body.t.values.size(); ++idx) {
        body.t.values[idx] += skip.t.values[idx];
      }
      return body;
    }
    case LayerType::batchnorm:
      break;
  }
  throw InternalError("unexecutable layer type " + layer_type_name(L.type));
}

std::vector<double> ref_forward(const BuiltModel& model,
                                const HostTensor& input,
                                std::vector<double>* maxima,
                                std::size_t* cursor) {
  RefValue v;
  v.packed = true;
  v.t = input;
  for (const BuiltLayer& L : model.layers) {
    v = ref_layer(model, L, v, maxima, cursor);
  }
  return v.packed ? v.t.values : v.flat;
}

}  // namespace

std::vector<double> plaintext_reference(const BuiltModel& model,
                                        const HostTensor& input) {
  input.check_consistent();
  return ref_forward(model, input, nullptr, nullptr);
}

// ------------------------------------------------------------ calibration

namespace {

void assign_relu_scales(std::vector<BuiltLayer>& layers,
                        const std::vector<double>& maxima, std::size_t* cursor,
                        double safety) {
  for (BuiltLayer& L : layers) {
    if (L.type == LayerType::relu) {
      const double bound = safety * maxima.at(*cursor);
      L.relu.scale = std::max(1.0, bound);
      ++*cursor;
    } else if (L.type == LayerType::residual) {
      assign_relu_scales(L.body, maxima, cursor, safety);
      // Downsample projections contain no activations.
    }
  }
}

}  // namespace

void calibrate_relu_scales(BuiltModel& model,
                           const std::vector<HostTensor>& batch,
                           double safety) {
  if (batch.empty()) {
    throw ShapeError("calibration needs at least one input");
  }
  std::vector<double> maxima;
  for (const HostTensor& input : batch) {
    std::size_t cursor = 0;
    ref_forward(model, input, &maxima, &cursor);
  }
  std::size_t cursor = 0;
  assign_relu_scales(model.layers, maxima, &cursor, safety);
  if (cursor != maxima.size()) {
    throw InternalError("calibration visited " + std::to_string(cursor) +
                        " activation sites but recorded " +
                        std::to_string(maxima.size()));
  }
  model.notes.push_back("calibrated " + std::to_string(maxima.size()) +
                        " activation range bounds (safety factor " +
                        std::to_string(safety) + ")");
  revalidate_model(model);
}

// ----------------------------------------------------------------- report

RunReport run_with_report(const BuiltModel& model, const HostTensor& input,
                          const InferOptions& options) {
  RunReport rep;
  rep.model_name = model.name;
  rep.kernels = kernels::active().name;
  InferResult r = infer(model, input, options);
  rep.logits = std::move(r.logits);
  rep.reference_logits = plaintext_reference(model, input);
  rep.max_abs_delta = 0.0;
  const std::size_t n = std::min(rep.logits.size(), rep.reference_logits.size());
  rep.deltas.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.deltas.push_back(std::abs(rep.logits[i] - rep.reference_logits[i]));
    rep.max_abs_delta = std::max(rep.max_abs_delta, rep.deltas.back());
  }
  const auto argmax_of = [](const std::vector<double>& v) -> std::size_t {
    return static_cast<std::size_t>(
        std::max_element(v.begin(), v.end()) - v.begin());
  };
  rep.argmax = rep.logits.empty() ? 0 : argmax_of(rep.logits);
  rep.reference_argmax =
      rep.reference_logits.empty() ? 0 : argmax_of(rep.reference_logits);
  rep.argmax_match = rep.argmax == rep.reference_argmax;
  rep.ledger = std::move(r.ledger);
  rep.plan = std::move(r.plan);
  rep.trace_check = std::move(r.trace_check);
  rep.memory = estimate_memory(rep.plan, MemoryModel::for_context(model.context));
  rep.rotation_count = r.rotation_count;
  rep.wall_ms = r.wall_ms;
  rep.notes = model.notes;
  return rep;
}

std::string RunReport::to_json() const {
  nlohmann::json j;
  j["model"] = model_name;
  j["kernels"] = kernels;
  j["logits"] = logits;
  j["reference_logits"] = reference_logits;
  j["deltas"] = deltas;
  j["max_abs_delta"] = max_abs_delta;
  j["argmax"] = argmax;
  j["reference_argmax"] = reference_argmax;
  j["argmax_match"] = argmax_match;
  j["rotations"] = rotation_count;
  j["wall_ms"] = wall_ms;

  nlohmann::json ledger_json = nlohmann::json::array();
  for (const LedgerRow& row : ledger) {
    ledger_json.push_back({{"layer", row.name},
                           {"declared_levels", row.declared},
                           {"level_in", row.level_in},
                           {"level_out", row.level_out},
                           {"bootstrap", row.bootstrap}});
  }
  j["ledger"] = ledger_json;

  nlohmann::json blocks_json = nlohmann::json::array();
  for (const BlockPlan::Block& b : plan.blocks) {
    blocks_json.push_back({{"first_layer", b.first_layer},
                           {"last_layer", b.last_layer},
                           {"keys", b.keys.size()}});
  }
  j["plan"] = {{"blocks", blocks_json},
               {"total_keys", plan.union_keys.size()},
               {"peak_resident_keys", plan.peak_resident_keys},
               {"residency", plan.residency_events}};

  nlohmann::json violations_json = nlohmann::json::array();
  for (const TraceCheck::Violation& v : trace_check.violations) {
    violations_json.push_back({{"event", v.event_index},
                               {"rotation_index", v.rotation_index},
                               {"reason", v.reason}});
  }
  j["trace_check"] = {{"ok", trace_check.ok()},
                      {"violations", violations_json},
                      {"unused_keys", trace_check.unused_keys}};

  j["memory"] = {{"total_keys", memory.total_keys},
                 {"resident_keys", memory.resident_keys},
                 {"preload_bytes", memory.preload_bytes},
                 {"peak_bytes", memory.peak_bytes},
                 {"assumptions", memory.assumptions}};
  j["notes"] = notes;
  return j.dump(2);
}

}  // namespace slotcnn
