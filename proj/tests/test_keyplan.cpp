// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// The planner's central promise: derived rotation-key multisets equal the
// recorded traces of the layers they describe, index for index and count for
// count. Plus block planning, trace verification, and the memory model.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "slotcnn/keyplan.hpp"
#include "slotcnn/packing.hpp"
#include "test_util.hpp"

using namespace slotcnn;

namespace {

SlotContextPtr make_ctx(std::size_t slots = 1024, int depth = 20) {
  ContextConfig cfg;
  cfg.ring_dimension = slots * 2;
  cfg.slot_count = slots;
  cfg.depth_budget = depth;
  return SlotContext::create(cfg);
}

/// Runs `op` on a fresh context with a recorder and returns index -> uses.
template <typename Op>
std::map<long, long> probe(std::size_t C, std::size_t W, Op&& op,
                           std::size_t slots = 1024) {
  const SlotContextPtr ctx = make_ctx(slots);
  const auto rec = ctx->attach_recorder();
  std::mt19937& gen = testutil::rng();
  const HostTensor x = testutil::random_tensor(gen, C, W, W);
  const PackedTensor in = flatten(ctx, x);
  rec->clear();
  op(in);
  return rec->rotation_usage();
}

}  // namespace

TEST_CASE("KeySet bookkeeping") {
  KeySet s;
  s.add(3);
  s.add(3, 2);
  s.add(-7);
  CHECK(s.size() == 2);
  CHECK(s.total_uses() == 4);
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(4));
  CHECK(s.indices() == std::vector<long>{-7, 3});

  KeySet t;
  t.add(3);
  t.add(11, 5);
  s.merge(t);
  CHECK(s.usage.at(3) == 4);
  CHECK(s.usage.at(11) == 5);

  KeySet u;
  u.add(2, 2);
  s.merge_scaled(u, 3);
  CHECK(s.usage.at(2) == 6);

  CHECK_THROWS_AS(s.add(0), InternalError);
  CHECK_THROWS_AS(s.add(5, 0), InternalError);
}

TEST_CASE("derived padding keys equal the probe trace") {
  for (std::size_t C : {1u, 2u, 3u, 5u, 8u}) {
    for (std::size_t W : {2u, 3u, 4u, 7u}) {
      for (std::size_t P : {1u, 2u, 3u}) {
        if (C * (W + 2 * P) * (W + 2 * P) > 1024) {
          continue;
        }
        const auto got = probe(C, W, [&](const PackedTensor& in) {
          pad_input(in, P);
        });
        const KeySet want = derive_pad_keys(C, W, P);
        CAPTURE(C);
        CAPTURE(W);
        CAPTURE(P);
        CHECK(got == want.usage);
        if (C >= 2 && W >= 2) {
          CHECK(want.size() == C + 3);
        }
      }
    }
  }
}

TEST_CASE("derived striding keys equal the probe trace") {
  for (std::size_t W : {4u, 6u, 8u, 9u, 12u, 16u}) {
    for (std::size_t S : {1u, 2u, 3u, 4u}) {
      if (S > W) {
        continue;
      }
      const std::size_t W_out = (W + S - 1) / S;
      for (StrideVariant v : {StrideVariant::extract, StrideVariant::masked}) {
        const auto got = probe(1, W, [&](const PackedTensor& in) {
          if (v == StrideVariant::extract) {
            stride_extract_v1(in.data, W, S);
          } else {
            stride_extract_v2(in.data, W, S);
          }
        });
        const KeySet want = derive_stride_keys(v, W, S, W_out);
        CAPTURE(W);
        CAPTURE(S);
        CAPTURE(static_cast<int>(v));
        CHECK(got == want.usage);
      }
    }
  }
}

TEST_CASE("derived convolution keys equal the probe trace") {
  std::mt19937& gen = testutil::rng(601);
  struct Case {
    std::size_t W, C, F, k, S, P;
    ConvMode mode;
    StrideVariant variant;
  };
  const Case cases[] = {
      {6, 1, 1, 3, 1, 0, ConvMode::generic, StrideVariant::extract},
      {8, 2, 3, 3, 1, 1, ConvMode::generic, StrideVariant::extract},
      {8, 1, 2, 2, 2, 0, ConvMode::generic, StrideVariant::extract},
      {9, 2, 2, 3, 2, 0, ConvMode::generic, StrideVariant::masked},
      {8, 2, 2, 2, 2, 1, ConvMode::generic, StrideVariant::masked},  // fallback
      {28, 1, 2, 5, 1, 0, ConvMode::generic, StrideVariant::extract},
      {4, 1, 2, 3, 1, 1, ConvMode::special3x3, StrideVariant::extract},
      {7, 3, 2, 3, 1, 1, ConvMode::special3x3, StrideVariant::extract},
      {9, 2, 4, 3, 2, 0, ConvMode::grouped, StrideVariant::masked},
      {6, 3, 6, 3, 1, 0, ConvMode::grouped, StrideVariant::masked},
      {7, 2, 4, 2, 1, 0, ConvMode::grouped, StrideVariant::masked},  // fallback
      {8, 2, 2, 3, 1, 1, ConvMode::grouped, StrideVariant::extract},
  };
  for (const Case& c : cases) {
    ConvConfig cfg;
    cfg.in_channels = c.C;
    cfg.out_channels = c.F;
    cfg.kernel = c.k;
    cfg.stride = c.S;
    cfg.padding = c.P;
    cfg.mode = c.mode;
    cfg.stride_variant = c.variant;
    const KernelTensor w = testutil::random_kernel(
        gen, c.F, c.mode == ConvMode::grouped ? 1 : c.C, c.k);

    const auto got = probe(
        c.C, c.W, [&](const PackedTensor& in) { convolution(in, cfg, w); },
        2048);
    const KeySet want = derive_conv_keys(cfg, c.C, c.W);
    CAPTURE(c.W);
    CAPTURE(c.C);
    CAPTURE(c.F);
    CAPTURE(c.k);
    CAPTURE(c.S);
    CAPTURE(c.P);
    CAPTURE(static_cast<int>(c.mode));
    CHECK(got == want.usage);
  }
}

TEST_CASE("derived pooling keys equal the probe trace") {
  struct Case {
    std::size_t W, C, k, S;
    PoolKind kind;
    StrideVariant variant;
  };
  const Case cases[] = {
      {4, 1, 2, 2, PoolKind::average, StrideVariant::extract},
      {8, 3, 2, 2, PoolKind::average, StrideVariant::masked},
      {6, 2, 3, 3, PoolKind::average, StrideVariant::extract},
      {8, 2, 3, 1, PoolKind::average, StrideVariant::extract},
      {5, 2, 1, 1, PoolKind::average, StrideVariant::extract},
      {4, 4, 0, 0, PoolKind::global, StrideVariant::extract},
      {7, 3, 0, 0, PoolKind::global, StrideVariant::extract},
      {4, 2, 4, 0, PoolKind::whole_channel, StrideVariant::extract},
      {6, 5, 6, 0, PoolKind::whole_channel, StrideVariant::extract},
  };
  for (const Case& c : cases) {
    PoolConfig cfg;
    cfg.kind = c.kind;
    cfg.kernel = c.k;
    cfg.stride = c.S;
    cfg.stride_variant = c.variant;
    const auto got = probe(c.C, c.W, [&](const PackedTensor& in) {
      switch (c.kind) {
        case PoolKind::average:
          avg_pool(in, cfg);
          break;
        case PoolKind::global:
          global_avg_pool(in);
          break;
        case PoolKind::whole_channel:
          whole_channel_pool(in, c.k);
          break;
      }
    });
    const KeySet want = derive_pool_keys(cfg, c.C, c.W);
    CAPTURE(c.W);
    CAPTURE(c.C);
    CAPTURE(static_cast<int>(c.kind));
    CHECK(got == want.usage);
  }
}

TEST_CASE("derived fully-connected keys equal the probe trace") {
  std::mt19937& gen = testutil::rng(602);
  struct Case {
    std::size_t inputs, outputs, budget;
  };
  for (const Case& c : {Case{4, 3, 1}, Case{10, 10, 1}, Case{10, 10, 2},
                        Case{10, 10, 10}, Case{16, 5, 3}, Case{37, 12, 4},
                        Case{256, 120, 1}}) {
    FcConfig cfg;
    cfg.inputs = c.inputs;
    cfg.outputs = c.outputs;
    cfg.merge_budget = c.budget;
    const FcWeights w = testutil::random_fc(gen, c.outputs, c.inputs);

    const SlotContextPtr ctx = make_ctx();
    const auto rec = ctx->attach_recorder();
    std::vector<double> xs(c.inputs);
    for (double& v : xs) {
      v = testutil::uniform(testutil::rng());
    }
    const SlotVector in = SlotVector::encode(ctx, xs);
    rec->clear();
    fully_connected(in, cfg, w);
    const KeySet want = derive_fc_keys(cfg);
    CAPTURE(c.inputs);
    CAPTURE(c.outputs);
    CAPTURE(c.budget);
    CHECK(rec->rotation_usage() == want.usage);
  }
}

namespace {

LayerKeys lk(const std::string& name, std::initializer_list<long> indices,
             bool ends_block = false) {
  LayerKeys out;
  out.name = name;
  for (long i : indices) {
    out.keys.add(i);
  }
  out.ends_block = ends_block;
  return out;
}

}  // namespace

TEST_CASE("single-block plans pool every key") {
  const std::vector<LayerKeys> layers{
      lk("a", {1, 2}), lk("b", {2, 3}, true), lk("c", {4})};
  const BlockPlan plan = plan_single_block(layers);
  REQUIRE(plan.blocks.size() == 1);
  CHECK(plan.blocks[0].first_layer == 0);
  CHECK(plan.blocks[0].last_layer == 2);
  CHECK(plan.union_keys.indices() == std::vector<long>{1, 2, 3, 4});
  CHECK(plan.peak_resident_keys == 4);
  CHECK(plan.block_of_layer(0) == 0);
  CHECK(plan.block_of_layer(2) == 0);
  CHECK(plan.block_of_layer(3) == BlockPlan::npos);
}

TEST_CASE("block plans split after shrinking layers") {
  const std::vector<LayerKeys> layers{
      lk("conv1", {1, 2, 3}), lk("pool1", {4, 5}, true),
      lk("conv2", {1, 6}),    lk("pool2", {4}, true),
      lk("fc", {7, 8})};
  const BlockPlan plan = plan_blocks(layers);
  REQUIRE(plan.blocks.size() == 3);
  CHECK(plan.blocks[0].first_layer == 0);
  CHECK(plan.blocks[0].last_layer == 1);
  CHECK(plan.blocks[1].first_layer == 2);
  CHECK(plan.blocks[1].last_layer == 3);
  CHECK(plan.blocks[2].first_layer == 4);
  CHECK(plan.blocks[2].last_layer == 4);
  CHECK(plan.blocks[0].keys.indices() == std::vector<long>{1, 2, 3, 4, 5});
  CHECK(plan.blocks[1].keys.indices() == std::vector<long>{1, 4, 6});
  CHECK(plan.peak_resident_keys == 5);
  CHECK(plan.union_keys.size() == 8);
  CHECK(plan.block_of_layer(2) == 1);
  CHECK(plan.block_of_layer(4) == 2);
  CHECK_FALSE(plan.residency_events.empty());

  // A trailing ends_block leaves no dangling empty block.
  const std::vector<LayerKeys> trailing{lk("a", {1}), lk("b", {2}, true)};
  const BlockPlan tp = plan_blocks(trailing);
  CHECK(tp.blocks.size() == 1);
}

TEST_CASE("explicit ranges must tile the layer list") {
  const std::vector<LayerKeys> layers{lk("a", {1}), lk("b", {2}),
                                      lk("c", {3})};
  const BlockPlan plan = plan_blocks(layers, {{0, 1}, {2, 2}});
  REQUIRE(plan.blocks.size() == 2);
  CHECK(plan.blocks[0].keys.indices() == std::vector<long>{1, 2});

  CHECK_THROWS_AS(plan_blocks(layers, {{0, 0}, {2, 2}}), ShapeError);  // gap
  CHECK_THROWS_AS(plan_blocks(layers, {{0, 2}, {1, 2}}), ShapeError);  // overlap
  CHECK_THROWS_AS(plan_blocks(layers, {{0, 1}}), ShapeError);  // short
}

TEST_CASE("trace verification flags stray and early rotations") {
  const std::vector<LayerKeys> layers{lk("a", {2, -3}), lk("b", {5}, true),
                                      lk("c", {7})};
  const BlockPlan plan = plan_blocks(layers);

  const auto rec = std::make_shared<TraceRecorder>();
  rec->record_rotation(2);  // before any layer marker: violation
  rec->mark("layer:0:a");
  rec->record_rotation(2);
  rec->record_rotation(-3);
  rec->mark("layer:1:b");
  rec->record_rotation(5);
  rec->record_rotation(7);  // resident only in the next block: violation
  rec->mark("layer:2:c");
  rec->record_rotation(7);

  const TraceCheck check = verify_trace(plan, rec->snapshot());
  CHECK(check.rotations_checked == 6);
  REQUIRE(check.violations.size() == 2);
  CHECK(check.violations[0].rotation_index == 2);
  CHECK(check.violations[0].layer == BlockPlan::npos);
  CHECK(check.violations[1].rotation_index == 7);
  CHECK(check.violations[1].layer == 1);
  CHECK(check.unused_keys.empty());
  CHECK_FALSE(check.ok());
}

TEST_CASE("trace verification reports planned-but-unused keys") {
  const std::vector<LayerKeys> layers{lk("a", {2, 4, 6})};
  const BlockPlan plan = plan_single_block(layers);

  const auto rec = std::make_shared<TraceRecorder>();
  rec->mark("layer:0:a");
  rec->record_rotation(2);

  const TraceCheck check = verify_trace(plan, rec->snapshot());
  CHECK(check.ok());
  CHECK(check.unused_keys == std::vector<long>{4, 6});
}

TEST_CASE("a real layer trace verifies cleanly against its derived plan") {
  std::mt19937& gen = testutil::rng(603);
  const std::size_t C = 2, W = 8;
  ConvConfig cfg;
  cfg.in_channels = C;
  cfg.out_channels = 3;
  cfg.kernel = 3;
  cfg.padding = 1;
  const KernelTensor w = testutil::random_kernel(gen, 3, C, 3);

  LayerKeys layer;
  layer.name = "conv";
  layer.keys = derive_conv_keys(cfg, C, W);
  const BlockPlan plan = plan_single_block({layer});

  const SlotContextPtr ctx = make_ctx();
  const auto rec = ctx->attach_recorder();
  const HostTensor x = testutil::random_tensor(gen, C, W, W);
  const PackedTensor in = flatten(ctx, x);
  rec->clear();
  rec->mark("layer:0:conv");
  convolution(in, cfg, w);

  const TraceCheck check = verify_trace(plan, rec->snapshot());
  CHECK(check.ok());
  CHECK(check.unused_keys.empty());
  CHECK(check.rotations_checked == layer.keys.total_uses());
}

TEST_CASE("memory model spells out the per-key size") {
  const ContextConfig cfg = ContextConfig::preset("lenet5");
  const MemoryModel model = MemoryModel::for_context(cfg);
  // 2 ring elements * digits * ring dimension * (budget + 2) limbs * 8 bytes
  const std::size_t want =
      2ull * 4 * 16384 * (25 + 2) * 8;
  CHECK(model.bytes_per_key == want);
  CHECK_FALSE(model.assumptions.empty());

  const std::vector<LayerKeys> layers{lk("a", {1, 2}, true), lk("b", {1, 3})};
  const MemoryEstimate est = estimate_memory(plan_blocks(layers), model);
  CHECK(est.total_keys == 3);
  CHECK(est.resident_keys == 2);
  CHECK(est.preload_bytes == 3 * model.bytes_per_key + model.fixed_overhead_bytes);
  CHECK(est.peak_bytes == 2 * model.bytes_per_key + model.fixed_overhead_bytes);
  CHECK(est.assumptions == model.assumptions);
}
