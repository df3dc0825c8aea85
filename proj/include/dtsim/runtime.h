#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dtsim/bit_matrix.h"
#include "dtsim/syntax.h"

namespace dtsim {

// Lanes per machine word; one protocol run per lane.
inline constexpr std::size_t kLanes = 64;
using BatchWord = std::uint64_t;

inline std::size_t blocks_for(std::size_t runs) { return (runs + kLanes - 1) / kLanes; }

// Per-party tape lengths a program consumes.
struct TapeShape {
  std::vector<std::size_t> secret_width;
  std::vector<std::size_t> random_width;
  friend bool operator==(const TapeShape&, const TapeShape&) = default;
};

// Read-only secret and random tapes for every party and every run. Bit
// (party, position, run) is stored lane-packed: one BatchWord holds 64 runs.
class TapeSet {
 public:
  TapeSet() = default;
  TapeSet(const TapeShape& shape, std::size_t runs);

  // Every bit independently uniform, drawn from mt19937_64(seed) in the order
  // party, secret positions then random positions, block.
  static TapeSet uniform(const TapeShape& shape, std::size_t runs, std::uint64_t seed);

  const TapeShape& shape() const { return shape_; }
  std::size_t runs() const { return runs_; }
  std::size_t parties() const { return shape_.secret_width.size(); }

  bool secret(std::size_t party, std::size_t pos, std::size_t run) const;
  bool random(std::size_t party, std::size_t pos, std::size_t run) const;
  void set_secret(std::size_t party, std::size_t pos, std::size_t run, bool v);
  void set_random(std::size_t party, std::size_t pos, std::size_t run, bool v);

  BatchWord secret_word(std::size_t party, std::size_t pos, std::size_t block) const;
  BatchWord random_word(std::size_t party, std::size_t pos, std::size_t block) const;
  void set_secret_word(std::size_t party, std::size_t pos, std::size_t block, BatchWord w);
  void set_random_word(std::size_t party, std::size_t pos, std::size_t block, BatchWord w);

  // Runs [first, first + count) as a standalone tape set.
  TapeSet slice(std::size_t first, std::size_t count) const;

 private:
  std::size_t index(std::size_t pos, std::size_t block) const { return pos * blocks_ + block; }

  TapeShape shape_;
  std::size_t runs_ = 0;
  std::size_t blocks_ = 0;
  std::vector<std::vector<BatchWord>> secret_;  // [party][pos * blocks + block]
  std::vector<std::vector<BatchWord>> random_;
};

// One observable event of an execution, in program order.
struct Observation {
  enum class Kind { kInput, kRandom, kMessage, kOutput };
  Kind kind;
  int party;             // reader / flipper / receiver / writer
  PartyMask senders = 0;  // kMessage: parties that held the value beforehand
  std::size_t statement;  // index into the program body
  std::string var;
};

// Everything one run showed to one party.
struct PartyRecord {
  std::vector<std::uint8_t> inputs;
  std::vector<std::uint8_t> random;
  std::vector<std::uint8_t> messages;
  std::vector<PartyMask> message_senders;
  std::vector<std::uint8_t> outputs;
  friend bool operator==(const PartyRecord&, const PartyRecord&) = default;
};

struct ExecutionRecord {
  std::vector<PartyRecord> parties;
  friend bool operator==(const ExecutionRecord&, const ExecutionRecord&) = default;
};

// The records of `runs` executions, stored lane-packed per observation.
class ExecutionBatch {
 public:
  ExecutionBatch(std::vector<PartyId> parties,
                 std::shared_ptr<const std::vector<Observation>> observations, std::size_t runs);

  std::size_t runs() const { return runs_; }
  const std::vector<PartyId>& parties() const { return parties_; }
  const std::vector<Observation>& observations() const { return *observations_; }

  bool bit(std::size_t observation, std::size_t run) const;
  const std::vector<BatchWord>& column(std::size_t observation) const {
    return columns_[observation];
  }
  std::vector<BatchWord>& column(std::size_t observation) { return columns_[observation]; }

  ExecutionRecord record(std::size_t run) const;
  std::vector<ExecutionRecord> records() const;

 private:
  std::vector<PartyId> parties_;
  std::shared_ptr<const std::vector<Observation>> observations_;
  std::size_t runs_;
  std::vector<std::vector<BatchWord>> columns_;
};

// A validated program lowered to straight-line word operations.
class Executable {
 public:
  explicit Executable(const Program& program);

  const std::vector<PartyId>& parties() const { return parties_; }
  const TapeShape& shape() const { return shape_; }
  const std::vector<Observation>& observations() const { return *observations_; }

  // Throws TapeExhausted if `tapes` are narrower than shape() or hold fewer
  // than `runs` runs.
  ExecutionBatch run(const TapeSet& tapes, std::size_t runs) const;

 private:
  enum class Op : std::uint8_t { kSecret, kFlip, kCopy, kNot, kAnd, kXor, kMux };
  struct Instr {
    Op op;
    std::uint32_t dst;
    std::uint32_t a;  // kSecret/kFlip: party
    std::uint32_t b;  // kSecret/kFlip: tape position
    std::uint32_t c;  // kMux: selector; result = sel ? b : a
  };

  std::vector<PartyId> parties_;
  TapeShape shape_;
  std::vector<Instr> code_;
  std::size_t slots_ = 0;
  std::shared_ptr<std::vector<Observation>> observations_;
  std::vector<std::uint32_t> observation_slots_;

  friend class Lowering;
};

ExecutionBatch run_batch(const Program& program, const TapeSet& tapes, std::size_t runs);

// Honest-secret labels (L), ideal-world view (I) and real-only view (R) for
// one corruption set, one row per run.
struct ViewTable {
  BitMatrix labels;
  BitMatrix ideal;
  BitMatrix real_only;

  std::size_t rows() const { return labels.rows(); }
  ViewTable slice_rows(std::size_t first, std::size_t count) const;
  friend bool operator==(const ViewTable&, const ViewTable&) = default;
};

// L = honest inputs (party order); I = corrupt inputs, then corrupt outputs;
// R = corrupt random bits, then messages delivered to a corrupt party whose
// value no corrupt party held before, in program order.
ViewTable extract_views(const ExecutionBatch& batch, const std::vector<PartyId>& corrupt);

// Human-readable column descriptions matching extract_views' layout.
struct ViewLayout {
  std::vector<std::string> labels;
  std::vector<std::string> ideal;
  std::vector<std::string> real_only;
};
ViewLayout describe_views(const Executable& exe, const std::vector<PartyId>& corrupt);

// Header `L<i>,...,I<i>,...,R<i>,...`, then one 0/1 row per run, LF endings.
void emit_csv(const ViewTable& table, std::ostream& out);
std::string emit_csv(const ViewTable& table);
// Accepts the columns in any order; they are regrouped by prefix and index.
ViewTable parse_csv(std::istream& in);
ViewTable parse_csv_text(const std::string& text);

}  // namespace dtsim
