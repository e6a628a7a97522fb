// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: inference runs with reference comparison, rotation
// key-plan reports, mask dumps, and activation-approximation error profiles.
//
// Exit codes: 0 success, 1 usage error, 2 model/data error, 3 internal
// invariant violation (mirroring slotcnn::ErrorCategory).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slotcnn/chebyshev.hpp"
#include "slotcnn/model.hpp"
#include "slotcnn/packing.hpp"

namespace {

using nlohmann::json;

void write_output(const std::string& out_path, const std::string& text) {
  const bool needs_newline = text.empty() || text.back() != '\n';
  if (out_path.empty()) {
    std::cout << text;
    if (needs_newline) std::cout << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) {
    throw slotcnn::ModelError("cannot open output file " + out_path);
  }
  out << text;
  if (needs_newline) out << '\n';
}

slotcnn::ContextConfig load_context_arg(const std::string& arg) {
  if (slotcnn::ContextConfig::is_preset(arg)) {
    return slotcnn::ContextConfig::preset(arg);
  }
  std::ifstream in(arg);
  if (!in) {
    throw slotcnn::ModelError("--context value '" + arg +
                              "' is neither a preset name nor a readable file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return slotcnn::context_from_json_text(buf.str());
}

void override_stride_variant(std::vector<slotcnn::LayerSpecEntry>& layers,
                             slotcnn::StrideVariant v) {
  for (slotcnn::LayerSpecEntry& L : layers) {
    L.conv.stride_variant = v;
    L.pool.stride_variant = v;
    override_stride_variant(L.body, v);
    override_stride_variant(L.downsample, v);
  }
}

struct CommonFlags {
  std::string context_arg;
  std::string keys_arg = "preload";
  std::string weights_arg;
  std::string variant_arg;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 1;
  std::string out_path;
};

void add_model_flags(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--context", f->context_arg,
                  "context preset name or JSON parameter file");
  cmd->add_option("--stride-variant", f->variant_arg,
                  "force one downsampling flavor on every layer")
      ->check(CLI::IsMember({"extract", "masked"}));
  cmd->add_option("--out", f->out_path, "write the report here (default stdout)");
}

/// True when the (possibly unregistered) flag was given on this subcommand.
bool flag_given(CLI::App* cmd, const std::string& name) {
  const CLI::Option* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

slotcnn::ModelSpec load_spec(const std::string& model_path, CLI::App* cmd,
                             const CommonFlags& f) {
  slotcnn::ModelSpec spec = slotcnn::ModelSpec::from_json_file(model_path);
  if (flag_given(cmd, "--context")) {
    spec.context = load_context_arg(f.context_arg);
  }
  if (flag_given(cmd, "--noise-sigma")) {
    spec.context.noise_sigma = f.noise_sigma;
  }
  if (flag_given(cmd, "--seed")) {
    spec.context.noise_seed = f.noise_seed;
  }
  if (flag_given(cmd, "--weights")) {
    spec.weight_mode = (f.weights_arg == "lazy") ? slotcnn::WeightMode::lazy
                                                 : slotcnn::WeightMode::preload;
  }
  if (flag_given(cmd, "--stride-variant")) {
    override_stride_variant(spec.layers,
                            f.variant_arg == "masked"
                                ? slotcnn::StrideVariant::masked
                                : slotcnn::StrideVariant::extract);
  }
  return spec;
}

// --------------------------------------------------------------------- infer

int run_infer(const std::string& model_path, const std::string& input_path,
              CLI::App* cmd, const CommonFlags& f) {
  const slotcnn::ModelSpec spec = load_spec(model_path, cmd, f);
  const slotcnn::BuiltModel model = slotcnn::build_model(spec);

  const std::size_t n = model.input_shape.channels * model.input_shape.width *
                        model.input_shape.width;
  slotcnn::HostTensor input(model.input_shape.channels,
                            model.input_shape.width, model.input_shape.width);
  input.values = slotcnn::load_csv_values(input_path, n, "input tensor");

  slotcnn::InferOptions opts;
  opts.key_mode = (f.keys_arg == "block") ? slotcnn::KeyMode::block
                                          : slotcnn::KeyMode::preload;
  const slotcnn::RunReport rep = slotcnn::run_with_report(model, input, opts);
  write_output(f.out_path, rep.to_json());
  if (!rep.trace_check.ok()) {
    std::cerr << "error: the rotation trace violates the key plan ("
              << rep.trace_check.violations.size() << " violations)\n";
    return 3;
  }
  return 0;
}

// ------------------------------------------------------------------- keyplan

int run_keyplan(const std::string& model_path, CLI::App* cmd,
                const CommonFlags& f) {
  const slotcnn::ModelSpec spec = load_spec(model_path, cmd, f);
  slotcnn::BuildOptions bo;
  bo.load_weights = false;
  const slotcnn::BuiltModel model = slotcnn::build_model(spec, bo);

  const std::vector<slotcnn::LayerKeys> keys = model.layer_keys();
  const slotcnn::BlockPlan single = slotcnn::plan_single_block(keys);
  const slotcnn::BlockPlan blocks = slotcnn::plan_blocks(keys);
  const slotcnn::MemoryModel mm = slotcnn::MemoryModel::for_context(model.context);
  const slotcnn::MemoryEstimate mem_single = slotcnn::estimate_memory(single, mm);
  const slotcnn::MemoryEstimate mem_blocks = slotcnn::estimate_memory(blocks, mm);

  json j;
  j["model"] = model.name;
  json layers_json = json::array();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    layers_json.push_back({{"index", i},
                           {"layer", keys[i].name},
                           {"rotation_indices", keys[i].keys.indices()},
                           {"distinct", keys[i].keys.size()},
                           {"uses", keys[i].keys.total_uses()},
                           {"ends_block", keys[i].ends_block}});
  }
  j["layers"] = layers_json;
  j["union"] = {{"rotation_indices", single.union_keys.indices()},
                {"distinct", single.union_keys.size()},
                {"uses", single.union_keys.total_uses()}};
  j["preload"] = {{"resident_keys", mem_single.resident_keys},
                  {"bytes", mem_single.peak_bytes}};
  json blocks_json = json::array();
  for (const slotcnn::BlockPlan::Block& b : blocks.blocks) {
    blocks_json.push_back({{"first_layer", b.first_layer},
                           {"last_layer", b.last_layer},
                           {"keys", b.keys.size()}});
  }
  j["blocks"] = {{"count", blocks.blocks.size()},
                 {"blocks", blocks_json},
                 {"peak_resident_keys", blocks.peak_resident_keys},
                 {"residency", blocks.residency_events},
                 {"bytes", mem_blocks.peak_bytes}};
  j["memory_assumptions"] = mm.assumptions;
  write_output(f.out_path, j.dump(2));
  return 0;
}

// --------------------------------------------------------------------- masks

std::string csv_row(const std::vector<double>& values) {
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) row += ',';
    row += std::to_string(static_cast<long>(values[i]));
  }
  return row;
}

int run_masks(std::size_t width, std::size_t channels,
              const std::vector<std::size_t>& build_args,
              const std::string& out_path) {
  std::string text;
  if (!build_args.empty()) {
    const slotcnn::MaskVector m =
        slotcnn::build_mask(build_args[0], build_args[1], build_args[2],
                            build_args[3], build_args[4]);
    text = csv_row(m.values) + "\n";
  } else {
    if (width == 0) {
      throw slotcnn::Error(slotcnn::ErrorCategory::usage,
                           "masks needs --width (or an explicit --build)");
    }
    const auto masks =
        slotcnn::build_all_masks(width * width, channels, width);
    for (const slotcnn::MaskVector& m : masks) {
      text += csv_row(m.values) + "\n";
    }
  }
  write_output(out_path, text);
  return 0;
}

// -------------------------------------------------------------- relu-profile

int run_relu_profile(const std::vector<int>& degrees, double beta,
                     std::size_t grid, double deadzone,
                     const std::string& out_path) {
  if (beta <= 0.0) {
    throw slotcnn::Error(slotcnn::ErrorCategory::usage,
                         "--beta must be positive");
  }
  if (grid < 2) {
    throw slotcnn::Error(slotcnn::ErrorCategory::usage,
                         "--grid needs at least 2 points");
  }
  std::ostringstream out;
  out << "degree,max_abs_error,mean_abs_error,max_abs_error_outside_deadzone\n";
  const auto target = [beta](double z) { return z < 0.0 ? 0.0 : beta * z; };
  for (int degree : degrees) {
    const std::vector<double> coeffs =
        slotcnn::cheb_coefficients(target, degree);
    double max_err = 0.0, sum_err = 0.0, max_outside = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
      const double z =
          -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid - 1);
      const double err = std::abs(slotcnn::cheb_eval_scalar(z, coeffs) - target(z));
      max_err = std::max(max_err, err);
      sum_err += err;
      if (std::abs(z) >= deadzone) {
        max_outside = std::max(max_outside, err);
      }
    }
    out.precision(17);
    out << degree << ',' << max_err << ',' << sum_err / static_cast<double>(grid)
        << ',' << max_outside << '\n';
  }
  write_output(out_path, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"packed CNN inference on a leveled slot-vector backend"};
  app.require_subcommand(1);

  // infer
  std::string infer_model, infer_input;
  CommonFlags infer_flags;
  CLI::App* infer_cmd = app.add_subcommand(
      "infer", "run a model and compare against the float reference");
  infer_cmd->add_option("model", infer_model, "model spec JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  infer_cmd->add_option("input", infer_input, "input tensor CSV (C*W*W values)")
      ->required()
      ->check(CLI::ExistingFile);
  add_model_flags(infer_cmd, &infer_flags);
  infer_cmd->add_option("--keys", infer_flags.keys_arg,
                        "rotation-key residency strategy")
      ->check(CLI::IsMember({"preload", "block"}));
  infer_cmd->add_option("--weights", infer_flags.weights_arg,
                        "weight loading strategy")
      ->check(CLI::IsMember({"preload", "lazy"}));
  infer_cmd->add_option("--noise-sigma", infer_flags.noise_sigma,
                        "bootstrap noise standard deviation");
  infer_cmd->add_option("--seed", infer_flags.noise_seed,
                        "bootstrap noise seed");

  // keyplan
  std::string keyplan_model;
  CommonFlags keyplan_flags;
  CLI::App* keyplan_cmd = app.add_subcommand(
      "keyplan", "report rotation indices, residency blocks, and memory");
  keyplan_cmd->add_option("model", keyplan_model, "model spec JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  add_model_flags(keyplan_cmd, &keyplan_flags);

  // masks
  std::size_t masks_width = 0, masks_channels = 1;
  std::vector<std::size_t> masks_build;
  std::string masks_out;
  CLI::App* masks_cmd = app.add_subcommand(
      "masks", "dump boundary-validity masks as CSV rows of 0/1");
  masks_cmd->add_option("--width", masks_width, "input edge length W");
  masks_cmd->add_option("--channels", masks_channels, "channel count C");
  masks_cmd
      ->add_option("--build", masks_build,
                   "dump one raw mask: start-pad end-pad run-length "
                   "pattern-length repeats")
      ->expected(5);
  masks_cmd->add_option("--out", masks_out, "write CSV here (default stdout)");

  // relu-profile
  std::vector<int> profile_degrees{3, 7, 15, 27, 59};
  double profile_beta = 1.0, profile_deadzone = 0.05;
  std::size_t profile_grid = 100001;
  std::string profile_out;
  CLI::App* profile_cmd = app.add_subcommand(
      "relu-profile",
      "CSV error profile of the polynomial activation across degrees");
  profile_cmd->add_option("--degrees", profile_degrees,
                          "interpolation degrees to sweep");
  profile_cmd->add_option("--beta", profile_beta, "activation range bound");
  profile_cmd->add_option("--grid", profile_grid, "grid points on [-1, 1]");
  profile_cmd->add_option("--deadzone", profile_deadzone,
                          "half-width of the excluded band around 0");
  profile_cmd->add_option("--out", profile_out, "write CSV here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (infer_cmd->parsed()) {
      return run_infer(infer_model, infer_input, infer_cmd, infer_flags);
    }
    if (keyplan_cmd->parsed()) {
      return run_keyplan(keyplan_model, keyplan_cmd, keyplan_flags);
    }
    if (masks_cmd->parsed()) {
      return run_masks(masks_width, masks_channels, masks_build, masks_out);
    }
    if (profile_cmd->parsed()) {
      return run_relu_profile(profile_degrees, profile_beta, profile_grid,
                              profile_deadzone, profile_out);
    }
  } catch (const slotcnn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
