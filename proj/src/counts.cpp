#include "counts.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace depkit {

namespace {

const char* kReductionNames[] = {
    nullptr,
    "tri_tag_1", "tri_tag_2", "tri_tag_3",
    "tri_word_1",
    "tri_cap_1", "tri_cap_2",
    "child_tag_1", "child_tag_2a", "child_tag_2b", "child_tag_3",
    "child_word_1", "child_word_2", "child_word_3",
    "child_cap_1", "child_cap_2",
    "par_tag_1", "par_tag_2",
    "par_word_1",
    "par_cap_1", "par_cap_2",
    "par_dir_1", "par_dir_2",
    "link_1", "link_2a", "link_2b", "link_2c", "link_3", "link_4",
    "linkd_1", "linkd_2a", "linkd_2b", "linkd_2c", "linkd_3a", "linkd_3b", "linkd_4", "linkd_5",
    "dist_1", "dist_2",
};

}  // namespace

const char* reduction_name(ReductionId id) {
  if (id >= kReductionIdEnd) return "?";
  return kReductionNames[id];
}

std::optional<ReductionId> reduction_from_name(std::string_view name) {
  for (Atom i = 1; i < kReductionIdEnd; ++i)
    if (name == kReductionNames[i]) return static_cast<ReductionId>(i);
  return std::nullopt;
}

void CountTable::observe(const Query& q) {
  for (int l = 0; l < q.nlevels; ++l) {
    const Level& level = q.levels[l];
    for (int d = 0; d < level.ndisjuncts; ++d) {
      const Key& cond = level.cond[d];
      ++conds_[cond];
      Key ev = cond;
      ev.push(q.outcome);
      ++events_[ev];
    }
  }
}

uint64_t CountTable::condition_count(const Key& cond) const {
  auto it = conds_.find(cond);
  return it == conds_.end() ? 0 : it->second;
}

uint64_t CountTable::event_count(const Key& cond, Atom outcome) const {
  Key ev = cond;
  ev.push(outcome);
  auto it = events_.find(ev);
  return it == events_.end() ? 0 : it->second;
}

double CountTable::estimate(const Query& q, const SmoothingConfig& cfg) const {
  double p = 0.0;
  // walk levels from most to least severe so each level can fold in the
  // coarser estimate below it
  for (int l = q.nlevels - 1; l >= 0; --l) {
    const Level& level = q.levels[l];
    uint64_t num = 0, den = 0;
    for (int d = 0; d < level.ndisjuncts; ++d) {
      num += event_count(level.cond[d], q.outcome);
      den += condition_count(level.cond[d]);
    }
    if (l == q.nlevels - 1) {
      p = (static_cast<double>(num) + cfg.base_add_num) /
          (static_cast<double>(den) + cfg.base_add_den);
    } else if (cfg.skip_enabled() && den >= cfg.skip_threshold) {
      p = static_cast<double>(num) / static_cast<double>(den);
    } else {
      p = (static_cast<double>(num) + cfg.backoff_weight * p) /
          (static_cast<double>(den) + cfg.backoff_weight);
    }
  }
  return p;
}

uint64_t CountTable::total_for_reduction(ReductionId id) const {
  uint64_t total = 0;
  for (const auto& [k, c] : events_)
    if (k.v[0] == id) total += c;
  return total;
}

void CountTable::dump(std::ostream& out) const {
  auto render = [](char prefix, const std::unordered_map<Key, uint64_t, KeyHash>& map) {
    std::vector<std::string> lines;
    lines.reserve(map.size());
    for (const auto& [k, c] : map) {
      std::ostringstream ss;
      ss << prefix << ' ' << reduction_name(static_cast<ReductionId>(k.v[0])) << ' '
         << int(k.n - 1);
      for (int i = 1; i < k.n; ++i) ss << ' ' << k.v[i];
      ss << ' ' << c;
      lines.push_back(ss.str());
    }
    std::sort(lines.begin(), lines.end());
    return lines;
  };
  out << "conds " << conds_.size() << "\n";
  for (const auto& l : render('c', conds_)) out << l << "\n";
  out << "events " << events_.size() << "\n";
  for (const auto& l : render('e', events_)) out << l << "\n";
}

namespace {

Key parse_key_line(std::istringstream& ss, int lineno) {
  std::string red;
  int arity = 0;
  if (!(ss >> red >> arity))
    throw Error(ErrorKind::kData, "model line " + std::to_string(lineno) + ": bad count line");
  auto id = reduction_from_name(red);
  if (!id)
    throw Error(ErrorKind::kData,
                "model line " + std::to_string(lineno) + ": unknown reduction '" + red + "'");
  Key k;
  k.push(*id);
  for (int i = 0; i < arity; ++i) {
    Atom a = 0;
    if (!(ss >> a))
      throw Error(ErrorKind::kData, "model line " + std::to_string(lineno) + ": truncated key");
    k.push(a);
  }
  return k;
}

}  // namespace

void CountTable::load(std::istream& in, int& lineno) {
  std::string line, word;
  size_t nconds = 0, nevents = 0;

  auto read_header = [&](const char* tag, size_t& n) {
    if (!std::getline(in, line))
      throw Error(ErrorKind::kData, "model file truncated before " + std::string(tag));
    ++lineno;
    std::istringstream ss(line);
    if (!(ss >> word >> n) || word != tag)
      throw Error(ErrorKind::kData,
                  "model line " + std::to_string(lineno) + ": expected '" + tag + " <n>'");
  };

  read_header("conds", nconds);
  for (size_t i = 0; i < nconds; ++i) {
    if (!std::getline(in, line)) throw Error(ErrorKind::kData, "model file truncated in conds");
    ++lineno;
    std::istringstream ss(line);
    ss >> word;  // "c"
    Key k = parse_key_line(ss, lineno);
    uint64_t c = 0;
    if (!(ss >> c)) throw Error(ErrorKind::kData, "model line " + std::to_string(lineno) + ": missing count");
    conds_[k] = c;
  }
  read_header("events", nevents);
  for (size_t i = 0; i < nevents; ++i) {
    if (!std::getline(in, line)) throw Error(ErrorKind::kData, "model file truncated in events");
    ++lineno;
    std::istringstream ss(line);
    ss >> word;  // "e"
    Key k = parse_key_line(ss, lineno);
    uint64_t c = 0;
    if (!(ss >> c)) throw Error(ErrorKind::kData, "model line " + std::to_string(lineno) + ": missing count");
    events_[k] = c;
  }
}

}  // namespace depkit
