#include <istream>
#include <ostream>
#include <sstream>

#include "dtsim/runtime.h"

namespace dtsim {
namespace {

struct ColumnPlan {
  std::vector<std::size_t> labels;
  std::vector<std::size_t> ideal;
  std::vector<std::size_t> real_only;
};

PartyMask corruption_mask(const std::vector<PartyId>& parties,
                          const std::vector<PartyId>& corrupt) {
  PartyMask mask = 0;
  for (const PartyId& c : corrupt) {
    bool found = false;
    for (std::size_t p = 0; p < parties.size(); ++p) {
      if (parties[p] == c) {
        mask |= PartyMask{1} << p;
        found = true;
      }
    }
    if (!found) throw Error(ErrorKind::kBadCorruptionSet, "unknown party '" + c + "'");
  }
  const PartyMask all = parties.size() >= kMaxParties ? ~PartyMask{0}
                                                      : (PartyMask{1} << parties.size()) - 1;
  if (mask == 0) throw Error(ErrorKind::kBadCorruptionSet, "corruption set is empty");
  if (mask == all) throw Error(ErrorKind::kBadCorruptionSet, "every party is corrupt");
  return mask;
}

ColumnPlan plan_columns(const std::vector<Observation>& obs, const std::vector<PartyId>& parties,
                        const std::vector<PartyId>& corrupt) {
  const PartyMask bad = corruption_mask(parties, corrupt);
  auto is_bad = [&](int p) { return (bad >> p & 1) != 0; };
  auto by_party = [&](Observation::Kind kind, bool corrupt_side, std::vector<std::size_t>& out) {
    for (std::size_t p = 0; p < parties.size(); ++p) {
      if (is_bad(static_cast<int>(p)) != corrupt_side) continue;
      for (std::size_t i = 0; i < obs.size(); ++i) {
        if (obs[i].kind == kind && obs[i].party == static_cast<int>(p)) out.push_back(i);
      }
    }
  };
  ColumnPlan plan;
  by_party(Observation::Kind::kInput, false, plan.labels);
  by_party(Observation::Kind::kInput, true, plan.ideal);
  by_party(Observation::Kind::kOutput, true, plan.ideal);
  by_party(Observation::Kind::kRandom, true, plan.real_only);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs[i].kind == Observation::Kind::kMessage && is_bad(obs[i].party) &&
        (obs[i].senders & bad) == 0) {
      plan.real_only.push_back(i);
    }
  }
  return plan;
}

BitMatrix gather(const ExecutionBatch& batch, const std::vector<std::size_t>& cols) {
  BitMatrix m(batch.runs(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto& words = batch.column(cols[c]);
    for (std::size_t r = 0; r < batch.runs(); ++r) {
      m.set(r, c, (words[r / kLanes] >> (r % kLanes) & 1) != 0);
    }
  }
  return m;
}

std::string describe(const Observation& o, const std::vector<PartyId>& parties) {
  const char* what = "";
  switch (o.kind) {
    case Observation::Kind::kInput: what = "secret"; break;
    case Observation::Kind::kRandom: what = "flip"; break;
    case Observation::Kind::kMessage: what = "recv"; break;
    case Observation::Kind::kOutput: what = "output"; break;
  }
  return parties[static_cast<std::size_t>(o.party)] + ":" + what + ":" + o.var;
}

}  // namespace

ViewTable ViewTable::slice_rows(std::size_t first, std::size_t count) const {
  return {labels.slice_rows(first, count), ideal.slice_rows(first, count),
          real_only.slice_rows(first, count)};
}

ViewTable extract_views(const ExecutionBatch& batch, const std::vector<PartyId>& corrupt) {
  const ColumnPlan plan = plan_columns(batch.observations(), batch.parties(), corrupt);
  return {gather(batch, plan.labels), gather(batch, plan.ideal), gather(batch, plan.real_only)};
}

ViewLayout describe_views(const Executable& exe, const std::vector<PartyId>& corrupt) {
  const ColumnPlan plan = plan_columns(exe.observations(), exe.parties(), corrupt);
  ViewLayout out;
  for (std::size_t i : plan.labels) out.labels.push_back(describe(exe.observations()[i], exe.parties()));
  for (std::size_t i : plan.ideal) out.ideal.push_back(describe(exe.observations()[i], exe.parties()));
  for (std::size_t i : plan.real_only) {
    out.real_only.push_back(describe(exe.observations()[i], exe.parties()));
  }
  return out;
}

void emit_csv(const ViewTable& table, std::ostream& out) {
  const BitMatrix* parts[] = {&table.labels, &table.ideal, &table.real_only};
  const char prefix[] = {'L', 'I', 'R'};
  std::string line;
  for (int k = 0; k < 3; ++k) {
    for (std::size_t c = 0; c < parts[k]->cols(); ++c) {
      if (!line.empty()) line += ',';
      line += prefix[k];
      line += std::to_string(c);
    }
  }
  out << line << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    line.clear();
    for (const BitMatrix* m : parts) {
      for (std::uint8_t b : m->row(r)) {
        if (!line.empty()) line += ',';
        line += b ? '1' : '0';
      }
    }
    out << line << '\n';
  }
}

std::string emit_csv(const ViewTable& table) {
  std::ostringstream out;
  emit_csv(table, out);
  return out.str();
}

ViewTable parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kHeaderMismatch, "missing header", 1, 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.empty()) throw Error(ErrorKind::kHeaderMismatch, "empty header", 1, 1);

  // Each header column maps to (group, index within group).
  std::vector<std::pair<int, std::size_t>> where;
  std::vector<std::vector<bool>> seen(3);
  {
    std::size_t start = 0;
    while (true) {
      const std::size_t end = line.find(',', start);
      const std::string tok = line.substr(start, end == std::string::npos ? end : end - start);
      const int col = static_cast<int>(start) + 1;
      int group = -1;
      if (!tok.empty()) group = tok[0] == 'L' ? 0 : tok[0] == 'I' ? 1 : tok[0] == 'R' ? 2 : -1;
      bool digits = tok.size() > 1 && tok.size() < 12 && !(tok.size() > 2 && tok[1] == '0');
      for (std::size_t i = 1; digits && i < tok.size(); ++i) {
        digits = tok[i] >= '0' && tok[i] <= '9';
      }
      if (group < 0 || !digits) {
        throw Error(ErrorKind::kHeaderMismatch, "bad column name '" + tok + "'", 1, col);
      }
      const auto idx = static_cast<std::size_t>(std::stoull(tok.substr(1)));
      auto& s = seen[static_cast<std::size_t>(group)];
      if (idx >= s.size()) s.resize(idx + 1, false);
      if (s[idx]) throw Error(ErrorKind::kHeaderMismatch, "duplicate column '" + tok + "'", 1, col);
      s[idx] = true;
      where.emplace_back(group, idx);
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  for (const auto& s : seen) {
    for (bool b : s) {
      if (!b) throw Error(ErrorKind::kHeaderMismatch, "column indices are not dense", 1, 1);
    }
  }

  std::vector<std::vector<std::uint8_t>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    std::vector<std::uint8_t> row;
    row.reserve(where.size());
    std::size_t start = 0;
    while (true) {
      const std::size_t end = line.find(',', start);
      const std::string tok = line.substr(start, end == std::string::npos ? end : end - start);
      if (tok != "0" && tok != "1") {
        throw Error(ErrorKind::kNonBitValue, "expected 0 or 1, got '" + tok + "'", lineno,
                    static_cast<int>(start) + 1);
      }
      row.push_back(tok == "1" ? 1 : 0);
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (row.size() != where.size()) {
      throw Error(ErrorKind::kRaggedRow,
                  "row has " + std::to_string(row.size()) + " fields, header has " +
                      std::to_string(where.size()),
                  lineno, 1);
    }
    rows.push_back(std::move(row));
  }

  BitMatrix* parts[3];
  ViewTable t{BitMatrix(rows.size(), seen[0].size()), BitMatrix(rows.size(), seen[1].size()),
              BitMatrix(rows.size(), seen[2].size())};
  parts[0] = &t.labels;
  parts[1] = &t.ideal;
  parts[2] = &t.real_only;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < where.size(); ++c) {
      parts[where[c].first]->set(r, where[c].second, rows[r][c] != 0);
    }
  }
  return t;
}

ViewTable parse_csv_text(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

}  // namespace dtsim
