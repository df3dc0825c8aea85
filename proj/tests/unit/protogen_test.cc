#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <functional>
#include <set>

#include "dtsim/error.h"
#include "dtsim/protogen.h"
#include "dtsim/runtime.h"

namespace dtsim {
namespace {

GenConfig full_scale(std::uint64_t seed) {
  GenConfig c;
  c.seed = seed;
  return c;
}

struct Counts {
  std::map<PartyId, std::size_t> secrets, flips, outputs;
  std::size_t sends = 0, oblivious = 0, local = 0;
};

Counts count(const Program& p) {
  Counts c;
  for (const Stmt& s : p.body) {
    if (const auto* a = std::get_if<Assign>(&s.node)) {
      if (const auto* f = std::get_if<FlipRhs>(&a->rhs)) ++c.flips[f->party];
      else if (const auto* x = std::get_if<SecretRhs>(&a->rhs)) ++c.secrets[x->party];
      else if (std::holds_alternative<ObliviousRhs>(a->rhs)) ++c.oblivious;
      else ++c.local;
    } else if (std::holds_alternative<Send>(s.node)) {
      ++c.sends;
    } else if (const auto* o = std::get_if<Output>(&s.node)) {
      ++c.outputs[o->party.value_or("")];
    }
  }
  return c;
}

TEST(Generate, FullScaleProgramsRun) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Program p = generate(full_scale(seed));
    ASSERT_TRUE(validate(p).ok());
    const Program reparsed = load_program(print_program(p));
    EXPECT_EQ(reparsed.body, p.body);
    const Counts c = count(p);
    const std::size_t outputs = 32;
    EXPECT_EQ(p.body.size(), 32 + 500 + outputs);
    for (const char* party : {"P1", "P2"}) {
      EXPECT_EQ(c.secrets.at(party), 16u);
      EXPECT_LE(c.flips.count(party) ? c.flips.at(party) : 0, 48u);
      EXPECT_EQ(c.outputs.at(party), 16u);
    }
    const Executable exe(p);
    EXPECT_NO_THROW(exe.run(TapeSet::uniform(exe.shape(), 64, seed), 64));
    EXPECT_LE(exe.shape().random_width[0], 48u);
  }
}

TEST(Generate, Deterministic) {
  EXPECT_EQ(generate(full_scale(4)), generate(full_scale(4)));
  EXPECT_NE(generate(full_scale(4)), generate(full_scale(5)));
}

TEST(Generate, EmptyBodyOutputsOwnSecrets) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenConfig c;
    c.secret_bits = 1;
    c.output_bits = 1;
    c.body_len = 0;
    c.seed = seed;
    const Program p = generate(c);
    ASSERT_EQ(p.body.size(), 4u);
    const Locations loc = validate_or_throw(p);
    for (const Stmt& s : p.body) {
      if (const auto* o = std::get_if<Output>(&s.node)) {
        EXPECT_EQ(loc.owner_list(o->var), std::vector<PartyId>{*o->party});
      }
    }
  }
}

TEST(Generate, EveryKindAppearsAndOnlyCrossesParties) {
  const Program p = generate(full_scale(11));
  const Counts c = count(p);
  EXPECT_GT(c.sends, 0u);
  EXPECT_GT(c.oblivious, 0u);
  EXPECT_GT(c.local, 0u);
  // Validation rejects sends to a holder and same-party transfers.
  EXPECT_TRUE(validate(p).ok());
  for (const Stmt& s : p.body) {
    if (const auto* a = std::get_if<Assign>(&s.node)) {
      if (const auto* o = std::get_if<ObliviousRhs>(&a->rhs)) EXPECT_EQ(o->table.depth(), 1);
    }
  }
}

TEST(Generate, NothingHeldMeansConstantOutput) {
  GenConfig c;
  c.secret_bits = 0;
  c.random_bits = 0;
  c.output_bits = 2;
  c.body_len = 5;
  const Program p = generate(c);
  EXPECT_TRUE(validate(p).ok());
  EXPECT_EQ(count(p).outputs.at("P1"), 2u);
  const Executable exe(p);
  const ExecutionBatch b = exe.run(TapeSet(exe.shape(), 1), 1);
  EXPECT_EQ(b.record(0).parties[0].outputs.size(), 2u);
}

TEST(Generate, FlipBudgetIsRespected) {
  GenConfig c;
  c.random_bits = 3;
  c.weights = {0, 0, 0, 1};
  c.body_len = 50;
  const Program p = generate(c);
  const Counts k = count(p);
  EXPECT_EQ(k.flips.at("P1"), 3u);
  EXPECT_EQ(k.flips.at("P2"), 3u);
  EXPECT_EQ(p.body.size(), 32 + 50 + 32u);
}

TEST(Generate, WeightsSteerKinds) {
  GenConfig c = full_scale(3);
  c.weights = {1, 0, 0, 0};
  const Counts only_local = count(generate(c));
  EXPECT_EQ(only_local.sends + only_local.oblivious, 0u);
  EXPECT_TRUE(only_local.flips.empty());
  c.weights = {0, 1, 0, 0};
  EXPECT_GT(count(generate(c)).sends, 0u);
}

TEST(Generate, BadConfig) {
  GenConfig c;
  c.weights = {0, 0, 0, 0};
  EXPECT_THROW(generate(c), Error);
  c = GenConfig{};
  c.max_width = 0;
  EXPECT_THROW(generate(c), Error);
  c = GenConfig{};
  c.parties = 0;
  EXPECT_THROW(generate(c), Error);
}

struct UseStats {
  double mean_wait = 0;  // statements from creation to first use
  std::size_t used = 0;
  std::size_t created = 0;
};

UseStats use_stats(bool usage_bias) {
  UseStats out;
  double total_wait = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GenConfig c = full_scale(seed);
    c.usage_bias = usage_bias;
    const Program p = generate(c);
    std::map<std::string, std::size_t> born;
    std::set<std::string> used;
    auto use = [&](const std::string& v, std::size_t at) {
      if (born.count(v) && used.insert(v).second) total_wait += static_cast<double>(at - born[v]);
    };
    std::function<void(const Expr&, std::size_t)> walk = [&](const Expr& e, std::size_t at) {
      if (e.kind == Expr::Kind::kVar) use(e.name, at);
      for (const Expr& a : e.args) walk(a, at);
    };
    for (std::size_t i = 0; i < p.body.size(); ++i) {
      const Stmt& s = p.body[i];
      if (const auto* a = std::get_if<Assign>(&s.node)) {
        if (const auto* e = std::get_if<ExprRhs>(&a->rhs)) walk(e->expr, i);
        if (const auto* o = std::get_if<ObliviousRhs>(&a->rhs)) {
          use(o->table.selector, i);
          use(o->table.branches[0].leaf, i);
          use(o->table.branches[1].leaf, i);
        }
        born[a->target] = i;
      } else if (const auto* snd = std::get_if<Send>(&s.node)) {
        use(snd->var, i);
      } else if (const auto* o = std::get_if<Output>(&s.node)) {
        use(o->var, i);
      }
    }
    out.used += used.size();
    out.created += born.size();
  }
  out.mean_wait = total_wait / static_cast<double>(out.used);
  return out;
}

// Inverse-use weighting steers draws toward values not yet used, so new
// values are picked up sooner and fewer are left dangling than under
// uniform draws.
TEST(Generate, UsageLedgerShortensWaits) {
  const UseStats biased = use_stats(true);
  const UseStats uniform = use_stats(false);
  EXPECT_LT(biased.mean_wait, 0.85 * uniform.mean_wait);
  EXPECT_GT(biased.used, uniform.used);
  EXPECT_EQ(biased.created, uniform.created);
}

FilterOptions quick_filter(std::size_t keep) {
  FilterOptions o;
  o.keep = keep;
  o.test.seed = 1;
  return o;
}

TEST(Filter, CleartextLeakIsDropped) {
  const Program leak = load_program("x = SECRET @P1\ny = SECRET @P2\nSEND x TO P2\nOUTPUT y @P2");
  FilterOptions o = quick_filter(1);
  o.max_attempts = 20;
  try {
    filter_stream([&](std::size_t) { return leak; }, o);
    FAIL() << "expected Timeout";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTimeout);
  }
}

TEST(Filter, VacuousProtocolIsKept) {
  const Program quiet =
      load_program("x = SECRET @P1\ny = SECRET @P2\na = ~x\nb = ~y\nOUTPUT a @P1\nOUTPUT b @P2");
  const FilterResult r = filter_stream([&](std::size_t) { return quiet; }, quick_filter(10));
  EXPECT_EQ(r.kept.size(), 10u);
  EXPECT_EQ(r.rejected, 0u);
  for (const FilterCandidate& c : r.candidates) EXPECT_EQ(c.p_value, 1.0);
}

TEST(Filter, KeepsExactlyAskedAndCountsAttrition) {
  GenConfig g;
  g.secret_bits = 4;
  g.random_bits = 8;
  g.output_bits = 4;
  g.body_len = 40;
  g.seed = 6;
  FilterOptions o = quick_filter(10);
  o.max_attempts = 400;
  const FilterResult r = filter_stream(g, o);
  EXPECT_EQ(r.kept.size(), 10u);
  EXPECT_EQ(r.attempts, r.candidates.size());
  EXPECT_EQ(r.attempts, 10 + r.rejected);
  EXPECT_EQ(r.candidates.back().verdict, Verdict::kMaybeSecure);
  std::size_t kept = 0;
  for (const FilterCandidate& c : r.candidates) {
    EXPECT_EQ(c.seed, candidate_seed(6, c.index));
    if (c.verdict == Verdict::kMaybeSecure) {
      GenConfig again = g;
      again.seed = c.seed;
      EXPECT_EQ(generate(again), r.kept[kept++]);
    }
  }

  o.threads = 4;
  const FilterResult parallel = filter_stream(g, o);
  EXPECT_EQ(parallel.kept, r.kept);
  EXPECT_EQ(parallel.attempts, r.attempts);
}

}  // namespace
}  // namespace dtsim
