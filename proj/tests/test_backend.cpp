// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Semantics of the slot-vector backend: rotation direction and range, level
// accounting of every op, bootstrap noise determinism, presets, tracing.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "slotcnn/backend.hpp"

using namespace slotcnn;

namespace {

ContextConfig tiny_config(std::size_t slots = 16, int depth = 6) {
  ContextConfig cfg;
  cfg.ring_dimension = slots * 2;
  cfg.slot_count = slots;
  cfg.depth_budget = depth;
  return cfg;
}

}  // namespace

TEST_CASE("presets carry the pinned parameter sets") {
  const ContextConfig a = ContextConfig::preset("lenet5");
  CHECK(a.ring_dimension == 16384);
  CHECK(a.slot_count == 8192);
  CHECK(a.depth_budget == 25);
  CHECK(a.crypto.first_modulus_bits == 50);
  CHECK(a.crypto.rescale_bits == 46);
  CHECK(a.crypto.key_switch_digits == 4);
  CHECK(a.crypto.rescaling_strategy == "flexibleauto");

  const ContextConfig b = ContextConfig::preset("large");
  CHECK(b.ring_dimension == 32768);
  CHECK(b.slot_count == 16384);
  CHECK(b.depth_budget == 25);

  CHECK(ContextConfig::is_preset("lenet5"));
  CHECK(ContextConfig::is_preset("large"));
  CHECK_FALSE(ContextConfig::is_preset("resnet"));
  CHECK_THROWS_AS(ContextConfig::preset("resnet"), ModelError);
}

TEST_CASE("config validation") {
  ContextConfig cfg = tiny_config();
  CHECK_NOTHROW(cfg.validate());

  ContextConfig bad = cfg;
  bad.slot_count = 12;  // not a power of two
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = cfg;
  bad.slot_count = bad.ring_dimension;  // > ring/2
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = cfg;
  bad.depth_budget = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("encode pads with zeros at the full budget") {
  const SlotContextPtr ctx = SlotContext::create(tiny_config());
  const SlotVector v = SlotVector::encode(ctx, {1.0, 2.0, 3.0});
  CHECK(v.valid());
  CHECK(v.level() == 6);
  CHECK(v.size() == 16);
  CHECK(v.at(0) == 1.0);
  CHECK(v.at(2) == 3.0);
  CHECK(v.at(3) == 0.0);
  CHECK(v.at(15) == 0.0);

  CHECK_THROWS_AS(SlotVector::encode(ctx, std::vector<double>(17, 1.0)),
                  CapacityError);
}

TEST_CASE("rotate: positive is left, negative is right, level preserved") {
  const SlotContextPtr ctx = SlotContext::create(tiny_config(8));
  const SlotVector v =
      SlotVector::encode(ctx, {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0});

  const SlotVector left = rotate(v, 3);
  CHECK(left.at(0) == 3.0);
  CHECK(left.at(4) == 7.0);
  CHECK(left.at(5) == 0.0);
  CHECK(left.level() == v.level());

  const SlotVector right = rotate(v, -2);
  CHECK(right.at(0) == 6.0);
  CHECK(right.at(2) == 0.0);
  CHECK(right.at(7) == 5.0);

  CHECK_THROWS_AS(rotate(v, 8), InvalidRotationError);
  CHECK_THROWS_AS(rotate(v, -8), InvalidRotationError);
  CHECK_NOTHROW(rotate(v, 7));
  CHECK_NOTHROW(rotate(v, -7));
}

TEST_CASE("add/sub are free; mults consume one level from the minimum") {
  const SlotContextPtr ctx = SlotContext::create(tiny_config(8, 10));
  const SlotVector a = SlotVector::encode(ctx, {1.0, 2.0});
  const SlotVector b = SlotVector::encode(ctx, {10.0, 20.0});

  const SlotVector s = add(a, b);
  CHECK(s.at(0) == 11.0);
  CHECK(s.at(1) == 22.0);
  CHECK(s.level() == 10);

  const SlotVector d = sub(b, a);
  CHECK(d.at(0) == 9.0);
  CHECK(d.level() == 10);

  const PlainVector p = PlainVector::from_values(8, {2.0, 3.0});
  const SlotVector mp = mult_plain(a, p);
  CHECK(mp.at(0) == 2.0);
  CHECK(mp.at(1) == 6.0);
  CHECK(mp.level() == 9);

  const SlotVector mc = mult_cipher(mp, b);
  CHECK(mc.at(0) == 20.0);
  CHECK(mc.at(1) == 120.0);
  CHECK(mc.level() == 8);  // min(9, 10) - 1

  // Mixed levels: add takes the min without consuming anything.
  const SlotVector mixed = add(mc, a);
  CHECK(mixed.level() == 8);
}

TEST_CASE("multiplying at level zero throws DepthExhaustedError") {
  const SlotContextPtr ctx = SlotContext::create(tiny_config(8, 1));
  const SlotVector a = SlotVector::encode(ctx, {1.0});
  const PlainVector p = PlainVector::from_values(8, {1.0});
  const SlotVector once = mult_plain(a, p);  // level 0 now
  CHECK(once.level() == 0);
  CHECK_THROWS_AS(mult_plain(once, p), DepthExhaustedError);
  CHECK_THROWS_AS(mult_cipher(once, a), DepthExhaustedError);
}

TEST_CASE("bootstrap restores the budget; noise is seed-deterministic") {
  ContextConfig cfg = tiny_config(8, 5);

  SUBCASE("noise off keeps values exact") {
    const SlotContextPtr ctx = SlotContext::create(cfg);
    const PlainVector p = PlainVector::from_values(8, {1.0, 1.0});
    SlotVector v = SlotVector::encode(ctx, {0.5, -0.25});
    v = mult_plain(v, p);
    v = mult_plain(v, p);
    CHECK(v.level() == 3);
    const SlotVector fresh = bootstrap(v);
    CHECK(fresh.level() == 5);
    CHECK(fresh.at(0) == 0.5);
    CHECK(fresh.at(1) == -0.25);
  }

  SUBCASE("same seed gives the same perturbation, different seed differs") {
    cfg.noise_sigma = 0.01;
    cfg.noise_seed = 42;
    const SlotContextPtr c1 = SlotContext::create(cfg);
    const SlotContextPtr c2 = SlotContext::create(cfg);
    cfg.noise_seed = 43;
    const SlotContextPtr c3 = SlotContext::create(cfg);

    const std::vector<double> payload{0.5, -0.25, 0.125};
    const SlotVector b1 = bootstrap(SlotVector::encode(c1, payload));
    const SlotVector b2 = bootstrap(SlotVector::encode(c2, payload));
    const SlotVector b3 = bootstrap(SlotVector::encode(c3, payload));

    CHECK(b1.slots() == b2.slots());
    CHECK(b1.slots() != b3.slots());
    CHECK(b1.at(0) != 0.5);  // sigma > 0 actually perturbs
  }
}

TEST_CASE("operations refuse operands from different contexts") {
  const SlotContextPtr c1 = SlotContext::create(tiny_config());
  const SlotContextPtr c2 = SlotContext::create(tiny_config());
  const SlotVector a = SlotVector::encode(c1, {1.0});
  const SlotVector b = SlotVector::encode(c2, {1.0});
  CHECK_THROWS_AS(add(a, b), Error);
}

TEST_CASE("trace recorder observes rotations, mults, bootstraps, markers") {
  const SlotContextPtr ctx = SlotContext::create(tiny_config(8, 5));
  const std::shared_ptr<TraceRecorder> rec = ctx->attach_recorder();
  const PlainVector p = PlainVector::from_values(8, {1.0});

  SlotVector v = SlotVector::encode(ctx, {1.0, 2.0});
  rec->mark("layer:0:probe");
  v = rotate(v, 2);
  v = rotate(v, -3);
  v = rotate(v, 2);
  v = mult_plain(v, p);
  v = mult_cipher(v, v);
  v = bootstrap(v);

  const std::vector<TraceEvent> events = rec->snapshot();
  REQUIRE(events.size() == 7);
  CHECK(events[0].kind == TraceEvent::Kind::marker);
  CHECK(events[0].label == "layer:0:probe");
  CHECK(events[1].kind == TraceEvent::Kind::rotation);
  CHECK(events[1].rotation_index == 2);
  CHECK(events[2].rotation_index == -3);
  CHECK(events[4].kind == TraceEvent::Kind::mult_plain);
  CHECK(events[4].level_after == 4);
  CHECK(events[5].kind == TraceEvent::Kind::mult_cipher);
  CHECK(events[5].level_after == 3);
  CHECK(events[6].kind == TraceEvent::Kind::bootstrap);
  CHECK(events[6].level_after == 5);

  const std::map<long, long> usage = rec->rotation_usage();
  CHECK(usage.size() == 2);
  CHECK(usage.at(2) == 2);
  CHECK(usage.at(-3) == 1);

  rec->clear();
  CHECK(rec->size() == 0);
}
