#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dtsim/bit_matrix.h"
#include "dtsim/runtime.h"
#include "dtsim/syntax.h"

namespace dtsim {

// Binary classification tree over 0/1 features.
struct DTree {
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    std::uint32_t child0 = 0;   // taken when the feature is 0
    std::uint32_t child1 = 0;
    std::uint8_t label = 0;
    friend bool operator==(const Node&, const Node&) = default;
  };

  std::size_t features = 0;
  std::vector<Node> nodes;  // nodes[0] is the root

  std::uint8_t predict(std::span<const std::uint8_t> row) const;
  std::size_t depth() const;
  std::size_t leaves() const;

  friend bool operator==(const DTree&, const DTree&) = default;
};

// Greedy CART with Gini impurity, grown until a node is pure, has fewer than
// two rows, or no feature separates its rows. Ties go to the lowest feature
// index; an impure leaf predicts its majority label, 0 on a tie.
DTree train_tree(const BitMatrix& features, std::span<const std::uint8_t> labels);

// One tree per label column.
struct Forest {
  std::size_t features = 0;
  std::vector<DTree> trees;
};

Forest train_forest(const BitMatrix& features, const BitMatrix& labels);

inline constexpr double kScoreEpsilon = 1e-10;

// Mispredicted label bits over all rows, plus kScoreEpsilon.
double score(const Forest& model, const BitMatrix& features, const BitMatrix& labels);

struct ScorePair {
  double real = kScoreEpsilon;
  double ideal = kScoreEpsilon;
  friend bool operator==(const ScorePair&, const ScorePair&) = default;
};

// One-sided Wilcoxon signed-rank test of "real scores are lower than ideal
// scores" on the paired differences ideal - real. Zero differences are
// dropped and tied magnitudes share their average rank. Exact null
// distribution for up to kWilcoxonExactLimit retained pairs, otherwise the
// normal approximation with tie and continuity correction. No nonzero
// difference gives p = 1.
inline constexpr std::size_t kWilcoxonExactLimit = 25;
double wilcoxon_less(std::span<const ScorePair> pairs);
double wilcoxon_exact(std::span<const ScorePair> pairs);
double wilcoxon_normal(std::span<const ScorePair> pairs);

enum class Phase { kTrain, kTest };

struct DrawSlot {
  std::uint64_t seed;
  std::size_t iteration;
  Phase phase;
  std::size_t train_n;
  std::size_t test_n;

  std::size_t rows() const { return phase == Phase::kTrain ? train_n : test_n; }
};

// Supplies view rows. Every (iteration, phase) slot must get rows no other
// slot sees. draw may be called concurrently.
class ViewSource {
 public:
  virtual ~ViewSource() = default;
  virtual ViewTable draw(const DrawSlot& slot) const = 0;
  // Upper bound on rows across all slots.
  virtual std::size_t capacity() const { return std::numeric_limits<std::size_t>::max(); }
};

// Fresh executions per slot, with tapes seeded by
// derive_seed(seed, {kTagTape, iteration, kTagTrain or kTagTest}).
class ProgramViewSource : public ViewSource {
 public:
  ProgramViewSource(const Program& program, std::vector<PartyId> corrupt);
  ViewTable draw(const DrawSlot& slot) const override;
  const Executable& executable() const { return exe_; }

 private:
  Executable exe_;
  std::vector<PartyId> corrupt_;
};

// Consecutive row blocks of a fixed table: iteration i trains on rows
// [i*(T+E), i*(T+E)+T) and tests on the following E rows.
class TableViewSource : public ViewSource {
 public:
  explicit TableViewSource(ViewTable table) : table_(std::move(table)) {}
  ViewTable draw(const DrawSlot& slot) const override;
  std::size_t capacity() const override { return table_.rows(); }

 private:
  ViewTable table_;
};

struct TestConfig {
  std::size_t iters = 100;
  std::size_t train_n = 1024;
  std::size_t test_n = 256;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::size_t threads = 1;  // 0: hardware concurrency

  // Throws InvalidConfig: iters >= 6, train_n and test_n >= 1, 0 < alpha < 1.
  void check() const;
};

enum class Verdict { kInsecure, kMaybeSecure };
const char* to_string(Verdict v);

// p-values below this count as negligible.
inline constexpr double kNegligibleP = 1.25e-4;

struct TestReport {
  double p_value = 1;
  Verdict verdict = Verdict::kMaybeSecure;
  std::vector<ScorePair> pairs;
  TestConfig config;
  std::size_t label_width = 0;
  std::size_t ideal_width = 0;
  std::size_t real_only_width = 0;
  double wall_seconds = 0;

  bool negligible() const { return p_value < kNegligibleP; }
};

// Per iteration: train the real model on I and R columns and the ideal model
// on I only, both predicting L; score each on fresh test rows. The verdict is
// INSECURE iff the signed-rank p-value is at most alpha.
TestReport run_test(const ViewSource& source, const TestConfig& cfg);

// {pValue, verdict, alpha, iters, trainN, testN, seed, pairs, negligible,
// widths, wallSeconds}; `wall_time` false writes wallSeconds as 0.
std::string report_json(const TestReport& report, bool wall_time = true);

}  // namespace dtsim
