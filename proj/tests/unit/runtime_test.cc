#include <gtest/gtest.h>

#include <random>

#include "dtsim/runtime.h"
#include "test_util.h"

namespace dtsim {
namespace {

using testing::read_source;

Program two_bit_less_than() { return load_program(read_source("programs/two_bit_less_than.cho")); }

TEST(Run, FlipPassesTapeThrough) {
  const Executable exe(load_program("a = FLIP @P1\nOUTPUT a"));
  TapeSet tapes(exe.shape(), 2);
  tapes.set_random(0, 0, 0, true);
  const ExecutionBatch b = exe.run(tapes, 2);
  EXPECT_EQ(b.record(0).parties[0].outputs, std::vector<std::uint8_t>{1});
  EXPECT_EQ(b.record(1).parties[0].outputs, std::vector<std::uint8_t>{0});
  EXPECT_EQ(b.record(0).parties[0].random, std::vector<std::uint8_t>{1});
}

TEST(Run, ObliviousSelectsOneLeaf) {
  const Program p = with_party_order(
      load_program(
          "a = SECRET @P2\nb = SECRET @P2\ns = SECRET @P1\nr = OBLIVIOUSLY [a, b]?s FOR P1\nOUTPUT r"),
      {"P1", "P2"});
  const Executable exe(p);
  TapeSet tapes(exe.shape(), 4);
  for (std::size_t run = 0; run < 4; ++run) {
    tapes.set_secret(1, 0, run, run & 1);   // a
    tapes.set_secret(1, 1, run, run >> 1);  // b
    tapes.set_secret(0, 0, run, run == 3);  // s
  }
  const ExecutionBatch batch = exe.run(tapes, 4);
  for (std::size_t run = 0; run < 4; ++run) {
    const ExecutionRecord rec = batch.record(run);
    const bool a = run & 1;
    const bool b = run >> 1;
    const bool s = run == 3;
    ASSERT_EQ(rec.parties[0].messages.size(), 1u);
    EXPECT_EQ(rec.parties[0].messages[0], s ? b : a);
    EXPECT_EQ(rec.parties[0].message_senders[0], PartyMask{2});
    EXPECT_TRUE(rec.parties[1].messages.empty());
  }
}

TEST(Run, DeepObliviousTable) {
  const Program p = load_program(
      "a = SECRET @S\nb = SECRET @S\nc = SECRET @S\nd = SECRET @S\n"
      "u = SECRET @R\nv = SECRET @R\n"
      "r = OBLIVIOUSLY [[a, b]?v, [c, d]?v]?u FOR R\nOUTPUT r");
  const Executable exe(p);
  TapeSet tapes(exe.shape(), 64);
  for (std::size_t run = 0; run < 64; ++run) {
    for (std::size_t i = 0; i < 4; ++i) tapes.set_secret(0, i, run, run >> i & 1);
    tapes.set_secret(1, 0, run, run >> 4 & 1);
    tapes.set_secret(1, 1, run, run >> 5 & 1);
  }
  const ExecutionBatch batch = exe.run(tapes, 64);
  for (std::size_t run = 0; run < 64; ++run) {
    const std::size_t idx = 2 * (run >> 4 & 1) + (run >> 5 & 1);
    EXPECT_EQ(batch.record(run).parties[1].outputs[0], run >> idx & 1) << run;
  }
}

// Value of a party's two MSB-first input bits.
unsigned value2(const TapeSet& t, std::size_t party, std::size_t run) {
  return 2u * t.secret(party, 0, run) + t.secret(party, 1, run);
}

TEST(Run, TwoBitLessThanIsExhaustivelyCorrect) {
  const Executable exe(two_bit_less_than());
  ASSERT_EQ(exe.shape().secret_width, (std::vector<std::size_t>{2, 2}));
  const std::size_t tapes_per_input = 32;
  const std::size_t runs = 16 * tapes_per_input;
  TapeSet tapes = TapeSet::uniform(exe.shape(), runs, 7);
  for (std::size_t run = 0; run < runs; ++run) {
    const std::size_t in = run % 16;
    tapes.set_secret(0, 0, run, in >> 3 & 1);
    tapes.set_secret(0, 1, run, in >> 2 & 1);
    tapes.set_secret(1, 0, run, in >> 1 & 1);
    tapes.set_secret(1, 1, run, in & 1);
  }
  const ExecutionBatch batch = exe.run(tapes, runs);
  for (std::size_t run = 0; run < runs; ++run) {
    const ExecutionRecord rec = batch.record(run);
    const std::uint8_t want = value2(tapes, 1, run) < value2(tapes, 0, run) ? 1 : 0;
    ASSERT_EQ(rec.parties[0].outputs, std::vector<std::uint8_t>{want}) << run;
    ASSERT_EQ(rec.parties[1].outputs, std::vector<std::uint8_t>{want}) << run;
  }
}

TEST(Run, TwoBitLessThanWorkedExample) {
  const Executable exe(two_bit_less_than());
  TapeSet tapes = TapeSet::uniform(exe.shape(), 1, 3);
  // P1 reads x0 = 1 then x1 = 0; P2 reads y2 = 0 then y3 = 1.
  tapes.set_secret(0, 0, 0, true);
  tapes.set_secret(0, 1, 0, false);
  tapes.set_secret(1, 0, 0, false);
  tapes.set_secret(1, 1, 0, true);
  const ExecutionRecord rec = exe.run(tapes, 1).record(0);
  EXPECT_EQ(rec.parties[0].outputs[0], 1);
  EXPECT_EQ(rec.parties[1].outputs[0], 1);
}

TEST(Run, SecretSharesReconstruct) {
  const Executable exe(two_bit_less_than());
  const TapeSet tapes = TapeSet::uniform(exe.shape(), 300, 11);
  const ExecutionBatch batch = exe.run(tapes, 300);
  // P1 shares x0 with mask x0_1 (its first flip) and sends x0_2 first.
  for (std::size_t run = 0; run < 300; ++run) {
    const ExecutionRecord rec = batch.record(run);
    EXPECT_EQ(rec.parties[0].random[0] ^ rec.parties[1].messages[0], rec.parties[0].inputs[0]);
    EXPECT_EQ(rec.parties[0].random[1] ^ rec.parties[1].messages[1], rec.parties[0].inputs[1]);
  }
}

TEST(Run, LaneIndependence) {
  const Executable exe(two_bit_less_than());
  for (std::size_t runs : {64u, 100u, 1u}) {
    const TapeSet tapes = TapeSet::uniform(exe.shape(), runs, 5 + runs);
    const ExecutionBatch whole = exe.run(tapes, runs);
    for (std::size_t r = 0; r < runs; ++r) {
      const ExecutionBatch one = exe.run(tapes.slice(r, 1), 1);
      ASSERT_EQ(one.record(0), whole.record(r)) << r;
    }
  }
}

TEST(Run, Deterministic) {
  const Executable exe(two_bit_less_than());
  const TapeSet tapes = TapeSet::uniform(exe.shape(), 200, 9);
  EXPECT_EQ(extract_views(exe.run(tapes, 200), {"P2"}),
            extract_views(run_batch(two_bit_less_than(), tapes, 200), {"P2"}));
  EXPECT_EQ(emit_csv(extract_views(exe.run(TapeSet::uniform(exe.shape(), 70, 4), 70), {"P1"})),
            emit_csv(extract_views(exe.run(TapeSet::uniform(exe.shape(), 70, 4), 70), {"P1"})));
}

TEST(Run, TapeExhausted) {
  const Executable exe(load_program("a = FLIP @P1\nb = FLIP @P1\nOUTPUT b"));
  TapeSet narrow(TapeShape{{0}, {1}}, 10);
  EXPECT_THROW(exe.run(narrow, 10), Error);
  TapeSet few(exe.shape(), 10);
  try {
    exe.run(few, 11);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTapeExhausted);
  }
}

TEST(Run, MessageLogMatchesDeliveries) {
  const Program p = two_bit_less_than();
  const Executable exe(p);
  std::vector<std::size_t> deliveries(2, 0);
  for (const Stmt& s : p.body) {
    if (const auto* send = std::get_if<Send>(&s.node)) deliveries[send->to == "P1" ? 0 : 1]++;
    if (const auto* a = std::get_if<Assign>(&s.node)) {
      if (const auto* o = std::get_if<ObliviousRhs>(&a->rhs)) deliveries[o->receiver == "P1" ? 0 : 1]++;
    }
  }
  const ExecutionRecord rec = exe.run(TapeSet::uniform(exe.shape(), 1, 1), 1).record(0);
  EXPECT_EQ(rec.parties[0].messages.size(), deliveries[0]);
  EXPECT_EQ(rec.parties[1].messages.size(), deliveries[1]);
}

TEST(Views, LayoutForTwoBitLessThan) {
  const Program p = two_bit_less_than();
  // Independent static scan of the expanded program.
  std::size_t p2_flips = 0;
  std::size_t to_p2 = 0;
  std::size_t p1_secrets = 0;
  std::size_t p2_secrets = 0;
  for (const Stmt& s : p.body) {
    if (const auto* send = std::get_if<Send>(&s.node)) to_p2 += send->to == "P2";
    if (const auto* a = std::get_if<Assign>(&s.node)) {
      if (const auto* f = std::get_if<FlipRhs>(&a->rhs)) p2_flips += f->party == "P2";
      if (const auto* o = std::get_if<ObliviousRhs>(&a->rhs)) to_p2 += o->receiver == "P2";
      if (const auto* sec = std::get_if<SecretRhs>(&a->rhs)) {
        (sec->party == "P1" ? p1_secrets : p2_secrets)++;
      }
    }
  }
  EXPECT_EQ(p2_flips, 2u + 5u);
  EXPECT_EQ(to_p2, 2u + 1u);
  const Executable exe(p);
  const ViewTable v = extract_views(exe.run(TapeSet::uniform(exe.shape(), 10, 2), 10), {"P2"});
  EXPECT_EQ(v.rows(), 10u);
  EXPECT_EQ(v.labels.cols(), p1_secrets);
  EXPECT_EQ(v.ideal.cols(), p2_secrets + 1);
  EXPECT_EQ(v.real_only.cols(), p2_flips + to_p2);
  const ViewLayout layout = describe_views(exe, {"P2"});
  EXPECT_EQ(layout.real_only.size(), v.real_only.cols());
  EXPECT_EQ(layout.labels[0], "P1:secret:x0");
  EXPECT_EQ(layout.ideal.back(), "P2:output:r0");
}

TEST(Views, ColumnContents) {
  const Program p = load_program(
      "a = SECRET @P1\nb = SECRET @P2\nr = FLIP @P2\nSEND a TO P2\nz = a ^ b\n"
      "OUTPUT z @P2\nOUTPUT a");
  const Executable exe(p);
  const TapeSet tapes = TapeSet::uniform(exe.shape(), 130, 1);
  const ViewTable v = extract_views(exe.run(tapes, 130), {"P2"});
  ASSERT_EQ(v.labels.cols(), 1u);
  ASSERT_EQ(v.ideal.cols(), 2u);
  ASSERT_EQ(v.real_only.cols(), 2u);
  for (std::size_t r = 0; r < 130; ++r) {
    const bool a = tapes.secret(0, 0, r);
    const bool b = tapes.secret(1, 0, r);
    EXPECT_EQ(v.labels.at(r, 0), a);
    EXPECT_EQ(v.ideal.at(r, 0), b);
    EXPECT_EQ(v.ideal.at(r, 1), a && b);
    EXPECT_EQ(v.real_only.at(r, 0), tapes.random(1, 0, r));
    EXPECT_EQ(v.real_only.at(r, 1), a);
  }
}

TEST(Views, IntraCorruptMessagesExcluded) {
  const Program p = load_program(
      "a = SECRET @P1\nd = FLIP @D\nSEND d TO P2\nSEND a TO P2\nb = SECRET @P2\nOUTPUT b");
  const Executable exe(p);
  const ExecutionBatch batch = exe.run(TapeSet::uniform(exe.shape(), 8, 1), 8);
  const ViewTable both = extract_views(batch, {"P2", "D"});
  EXPECT_EQ(both.real_only.cols(), 1u + 1u);  // D's flip, then a
  const ViewTable alone = extract_views(batch, {"P2"});
  EXPECT_EQ(alone.real_only.cols(), 2u);  // d, then a
  EXPECT_EQ(alone.labels.cols(), 1u);
}

TEST(Views, BadCorruptionSet) {
  const Executable exe(two_bit_less_than());
  const ExecutionBatch batch = exe.run(TapeSet::uniform(exe.shape(), 1, 1), 1);
  for (const auto& c : std::vector<std::vector<PartyId>>{{}, {"P1", "P2"}, {"P3"}}) {
    try {
      extract_views(batch, c);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kBadCorruptionSet);
    }
  }
}

ViewTable make_table(std::size_t rows, std::size_t l, std::size_t i, std::size_t r,
                     std::uint64_t seed) {
  std::mt19937_64 g(seed);
  ViewTable t{BitMatrix(rows, l), BitMatrix(rows, i), BitMatrix(rows, r)};
  for (BitMatrix* m : {&t.labels, &t.ideal, &t.real_only}) {
    for (std::size_t a = 0; a < m->rows(); ++a) {
      for (std::size_t b = 0; b < m->cols(); ++b) m->set(a, b, g() & 1);
    }
  }
  return t;
}

TEST(Csv, Format) {
  ViewTable t{BitMatrix(1, 1), BitMatrix(1, 2), BitMatrix(1, 1)};
  t.labels.set(0, 0, true);
  t.ideal.set(0, 1, true);
  t.real_only.set(0, 0, true);
  EXPECT_EQ(emit_csv(t), "L0,I0,I1,R0\n1,0,1,1\n");
}

TEST(Csv, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ViewTable t = make_table(seed % 7, 1 + seed % 3, seed % 4, (seed * 7) % 5, seed);
    EXPECT_EQ(parse_csv_text(emit_csv(t)), t) << seed;
  }
}

TEST(Csv, ColumnsRegroupedByPrefix) {
  const ViewTable t = parse_csv_text("R0,L1,I0,L0\n1,0,1,1\n0,1,0,0\n");
  EXPECT_EQ(emit_csv(t), "L0,L1,I0,R0\n1,0,1,1\n0,1,0,0\n");
  EXPECT_EQ(parse_csv_text("L0,R0,I0\n1,0,1\n").ideal.at(0, 0), 1);
}

TEST(Csv, Errors) {
  auto kind = [](const std::string& text) {
    try {
      parse_csv_text(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kIo;
  };
  EXPECT_EQ(kind(""), ErrorKind::kHeaderMismatch);
  EXPECT_EQ(kind("L0,X0\n1,0\n"), ErrorKind::kHeaderMismatch);
  EXPECT_EQ(kind("L0,L0\n1,0\n"), ErrorKind::kHeaderMismatch);
  EXPECT_EQ(kind("L0,L2\n1,0\n"), ErrorKind::kHeaderMismatch);
  EXPECT_EQ(kind("L0,I\n1,0\n"), ErrorKind::kHeaderMismatch);
  EXPECT_EQ(kind("L0,I0\n1,2\n"), ErrorKind::kNonBitValue);
  EXPECT_EQ(kind("L0,I0\n1, 0\n"), ErrorKind::kNonBitValue);
  EXPECT_EQ(kind("L0,I0\n1\n"), ErrorKind::kRaggedRow);
  EXPECT_EQ(kind("L0,I0\n1,0,1\n"), ErrorKind::kRaggedRow);
}

TEST(Csv, SliceRows) {
  const ViewTable t = make_table(10, 2, 2, 2, 3);
  const ViewTable s = t.slice_rows(4, 3);
  EXPECT_EQ(s.rows(), 3u);
  EXPECT_EQ(s.ideal.at(0, 1), t.ideal.at(4, 1));
  EXPECT_THROW(t.slice_rows(8, 3), Error);
}

}  // namespace
}  // namespace dtsim
