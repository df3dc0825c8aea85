#include <map>
#include <random>

#include "dtsim/runtime.h"

namespace dtsim {

TapeSet::TapeSet(const TapeShape& shape, std::size_t runs)
    : shape_(shape), runs_(runs), blocks_(blocks_for(runs)) {
  if (shape.secret_width.size() != shape.random_width.size()) {
    throw Error(ErrorKind::kInvalidConfig, "tape shape has mismatched party counts");
  }
  for (std::size_t p = 0; p < shape.secret_width.size(); ++p) {
    secret_.emplace_back(shape.secret_width[p] * blocks_, 0);
    random_.emplace_back(shape.random_width[p] * blocks_, 0);
  }
}

TapeSet TapeSet::uniform(const TapeShape& shape, std::size_t runs, std::uint64_t seed) {
  TapeSet t(shape, runs);
  std::mt19937_64 gen(seed);
  const BatchWord tail = runs % kLanes == 0 ? ~BatchWord{0} : (BatchWord{1} << (runs % kLanes)) - 1;
  auto fill = [&](std::vector<BatchWord>& words) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      words[i] = gen();
      if ((i + 1) % t.blocks_ == 0) words[i] &= tail;
    }
  };
  for (std::size_t p = 0; p < t.parties(); ++p) {
    fill(t.secret_[p]);
    fill(t.random_[p]);
  }
  return t;
}

bool TapeSet::secret(std::size_t party, std::size_t pos, std::size_t run) const {
  return secret_[party][index(pos, run / kLanes)] >> (run % kLanes) & 1;
}

bool TapeSet::random(std::size_t party, std::size_t pos, std::size_t run) const {
  return random_[party][index(pos, run / kLanes)] >> (run % kLanes) & 1;
}

void TapeSet::set_secret(std::size_t party, std::size_t pos, std::size_t run, bool v) {
  BatchWord& w = secret_.at(party).at(index(pos, run / kLanes));
  const BatchWord m = BatchWord{1} << (run % kLanes);
  w = v ? (w | m) : (w & ~m);
}

void TapeSet::set_random(std::size_t party, std::size_t pos, std::size_t run, bool v) {
  BatchWord& w = random_.at(party).at(index(pos, run / kLanes));
  const BatchWord m = BatchWord{1} << (run % kLanes);
  w = v ? (w | m) : (w & ~m);
}

BatchWord TapeSet::secret_word(std::size_t party, std::size_t pos, std::size_t block) const {
  return secret_[party][index(pos, block)];
}

BatchWord TapeSet::random_word(std::size_t party, std::size_t pos, std::size_t block) const {
  return random_[party][index(pos, block)];
}

void TapeSet::set_secret_word(std::size_t party, std::size_t pos, std::size_t block, BatchWord w) {
  secret_.at(party).at(index(pos, block)) = w;
}

void TapeSet::set_random_word(std::size_t party, std::size_t pos, std::size_t block, BatchWord w) {
  random_.at(party).at(index(pos, block)) = w;
}

TapeSet TapeSet::slice(std::size_t first, std::size_t count) const {
  if (first + count > runs_) throw Error(ErrorKind::kTapeExhausted, "tape slice past last run");
  TapeSet out(shape_, count);
  for (std::size_t p = 0; p < parties(); ++p) {
    for (std::size_t i = 0; i < shape_.secret_width[p]; ++i) {
      for (std::size_t r = 0; r < count; ++r) out.set_secret(p, i, r, secret(p, i, first + r));
    }
    for (std::size_t i = 0; i < shape_.random_width[p]; ++i) {
      for (std::size_t r = 0; r < count; ++r) out.set_random(p, i, r, random(p, i, first + r));
    }
  }
  return out;
}

ExecutionBatch::ExecutionBatch(std::vector<PartyId> parties,
                               std::shared_ptr<const std::vector<Observation>> observations,
                               std::size_t runs)
    : parties_(std::move(parties)),
      observations_(std::move(observations)),
      runs_(runs),
      columns_(observations_->size(), std::vector<BatchWord>(blocks_for(runs), 0)) {}

bool ExecutionBatch::bit(std::size_t observation, std::size_t run) const {
  return columns_[observation][run / kLanes] >> (run % kLanes) & 1;
}

ExecutionRecord ExecutionBatch::record(std::size_t run) const {
  ExecutionRecord rec;
  rec.parties.resize(parties_.size());
  const auto& obs = *observations_;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    PartyRecord& pr = rec.parties[static_cast<std::size_t>(obs[i].party)];
    const std::uint8_t b = bit(i, run) ? 1 : 0;
    switch (obs[i].kind) {
      case Observation::Kind::kInput: pr.inputs.push_back(b); break;
      case Observation::Kind::kRandom: pr.random.push_back(b); break;
      case Observation::Kind::kMessage:
        pr.messages.push_back(b);
        pr.message_senders.push_back(obs[i].senders);
        break;
      case Observation::Kind::kOutput: pr.outputs.push_back(b); break;
    }
  }
  return rec;
}

std::vector<ExecutionRecord> ExecutionBatch::records() const {
  std::vector<ExecutionRecord> out;
  out.reserve(runs_);
  for (std::size_t r = 0; r < runs_; ++r) out.push_back(record(r));
  return out;
}

class Lowering {
 public:
  Lowering(const Program& program, Executable& exe) : program_(program), exe_(exe) {}

  void run() {
    const Locations loc = validate_or_throw(program_);
    exe_.parties_ = program_.parties;
    const std::size_t n = exe_.parties_.size();
    exe_.shape_.secret_width.assign(n, 0);
    exe_.shape_.random_width.assign(n, 0);
    exe_.observations_ = std::make_shared<std::vector<Observation>>();
    exe_.slots_ = 2;  // 0: all-zero, 1: all-one

    for (std::size_t i = 0; i < program_.body.size(); ++i) {
      const Stmt& s = program_.body[i];
      if (const auto* a = std::get_if<Assign>(&s.node)) {
        assign(*a, i, loc);
      } else if (const auto* send = std::get_if<Send>(&s.node)) {
        const int to = loc.party_index(send->to);
        observe(Observation::Kind::kMessage, to, known_.at(send->var), i, send->var,
                slot_.at(send->var));
        known_[send->var] |= PartyMask{1} << to;
      } else {
        const auto& out = std::get<Output>(s.node);
        const std::uint32_t slot = slot_.at(out.var);
        if (out.party) {
          observe(Observation::Kind::kOutput, loc.party_index(*out.party), 0, i, out.var, slot);
        } else {
          const PartyMask owners = loc.owners.at(out.var);
          for (std::size_t p = 0; p < n; ++p) {
            if (owners >> p & 1) {
              observe(Observation::Kind::kOutput, static_cast<int>(p), 0, i, out.var, slot);
            }
          }
        }
      }
    }
  }

 private:
  std::uint32_t fresh() { return static_cast<std::uint32_t>(exe_.slots_++); }

  std::uint32_t emit(Executable::Op op, std::uint32_t a, std::uint32_t b = 0,
                     std::uint32_t c = 0) {
    const std::uint32_t dst = fresh();
    exe_.code_.push_back({op, dst, a, b, c});
    return dst;
  }

  void observe(Observation::Kind kind, int party, PartyMask senders, std::size_t stmt,
               const std::string& var, std::uint32_t slot) {
    exe_.observations_->push_back({kind, party, senders, stmt, var});
    exe_.observation_slots_.push_back(slot);
  }

  std::uint32_t lower(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::kConst: return e.value ? 1 : 0;
      case Expr::Kind::kVar: return slot_.at(e.name);
      case Expr::Kind::kNot: return emit(Executable::Op::kNot, lower(e.args[0]));
      case Expr::Kind::kAnd: {
        const std::uint32_t a = lower(e.args[0]);
        return emit(Executable::Op::kAnd, a, lower(e.args[1]));
      }
      case Expr::Kind::kXor: {
        const std::uint32_t a = lower(e.args[0]);
        return emit(Executable::Op::kXor, a, lower(e.args[1]));
      }
    }
    return 0;
  }

  std::uint32_t lower(const SelectTree& t) {
    if (t.is_leaf()) return slot_.at(t.leaf);
    const std::uint32_t if0 = lower(t.branches[0]);
    const std::uint32_t if1 = lower(t.branches[1]);
    return emit(Executable::Op::kMux, if0, if1, slot_.at(t.selector));
  }

  static void leaves(const SelectTree& t, std::vector<std::string>& out) {
    if (t.is_leaf()) {
      out.push_back(t.leaf);
      return;
    }
    for (const SelectTree& b : t.branches) leaves(b, out);
  }

  void assign(const Assign& a, std::size_t stmt, const Locations& loc) {
    std::uint32_t slot = 0;
    if (const auto* f = std::get_if<FlipRhs>(&a.rhs)) {
      const auto p = static_cast<std::uint32_t>(loc.party_index(f->party));
      const auto pos = static_cast<std::uint32_t>(exe_.shape_.random_width[p]++);
      slot = emit(Executable::Op::kFlip, p, pos);
      observe(Observation::Kind::kRandom, static_cast<int>(p), 0, stmt, a.target, slot);
    } else if (const auto* s = std::get_if<SecretRhs>(&a.rhs)) {
      const auto p = static_cast<std::uint32_t>(loc.party_index(s->party));
      const auto pos = static_cast<std::uint32_t>(exe_.shape_.secret_width[p]++);
      slot = emit(Executable::Op::kSecret, p, pos);
      observe(Observation::Kind::kInput, static_cast<int>(p), 0, stmt, a.target, slot);
    } else if (const auto* e = std::get_if<ExprRhs>(&a.rhs)) {
      slot = lower(e->expr);
    } else {
      const auto& o = std::get<ObliviousRhs>(a.rhs);
      const int receiver = loc.party_index(o.receiver);
      std::vector<std::string> ls;
      leaves(o.table, ls);
      PartyMask senders = ~(PartyMask{1} << receiver);
      for (const std::string& l : ls) senders &= known_.at(l);
      slot = lower(o.table);
      observe(Observation::Kind::kMessage, receiver, senders, stmt, a.target, slot);
    }
    slot_[a.target] = slot;
    known_[a.target] = loc.owners.at(a.target);
  }

  const Program& program_;
  Executable& exe_;
  std::map<std::string, std::uint32_t> slot_;
  std::map<std::string, PartyMask> known_;
};

Executable::Executable(const Program& program) {
  Lowering(program, *this).run();
}

ExecutionBatch Executable::run(const TapeSet& tapes, std::size_t runs) const {
  if (tapes.parties() != parties_.size()) {
    throw Error(ErrorKind::kTapeExhausted,
                "tape set covers " + std::to_string(tapes.parties()) + " parties, program has " +
                    std::to_string(parties_.size()));
  }
  for (std::size_t p = 0; p < parties_.size(); ++p) {
    if (tapes.shape().secret_width[p] < shape_.secret_width[p] ||
        tapes.shape().random_width[p] < shape_.random_width[p]) {
      throw Error(ErrorKind::kTapeExhausted, "tapes of party " + parties_[p] +
                                                 " are shorter than the program reads");
    }
  }
  if (tapes.runs() < runs) {
    throw Error(ErrorKind::kTapeExhausted, "tapes hold " + std::to_string(tapes.runs()) +
                                               " runs, " + std::to_string(runs) + " requested");
  }

  ExecutionBatch batch(parties_, observations_, runs);
  std::vector<BatchWord> v(slots_, 0);
  v[1] = ~BatchWord{0};
  const std::size_t blocks = blocks_for(runs);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    for (const Instr& in : code_) {
      BatchWord r = 0;
      switch (in.op) {
        case Op::kSecret: r = tapes.secret_word(in.a, in.b, blk); break;
        case Op::kFlip: r = tapes.random_word(in.a, in.b, blk); break;
        case Op::kCopy: r = v[in.a]; break;
        case Op::kNot: r = ~v[in.a]; break;
        case Op::kAnd: r = v[in.a] & v[in.b]; break;
        case Op::kXor: r = v[in.a] ^ v[in.b]; break;
        case Op::kMux: r = (v[in.c] & v[in.b]) | (~v[in.c] & v[in.a]); break;
      }
      v[in.dst] = r;
    }
    const std::size_t lanes = std::min(kLanes, runs - blk * kLanes);
    const BatchWord mask = lanes == kLanes ? ~BatchWord{0} : (BatchWord{1} << lanes) - 1;
    for (std::size_t o = 0; o < observation_slots_.size(); ++o) {
      batch.column(o)[blk] = v[observation_slots_[o]] & mask;
    }
  }
  return batch;
}

ExecutionBatch run_batch(const Program& program, const TapeSet& tapes, std::size_t runs) {
  return Executable(program).run(tapes, runs);
}

}  // namespace dtsim
