#include "corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace depkit {

namespace {

const char* kSpecialNames[kNumSpecialTags] = {"BOS", "EOS", "BOKIDS", "EOKIDS"};

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }

char ascii_upper(char c) { return is_ascii_lower(c) ? static_cast<char>(c - 'a' + 'A') : c; }
char ascii_lower(char c) { return is_ascii_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

bool reserved_name(std::string_view name) {
  for (const char* s : kSpecialNames)
    if (name == s) return true;
  return name.rfind("MORPH-", 0) == 0;
}

// Case-insensitive MORPH- prefix: surfaces of attenuated tokens keep their
// cap class in the letter case of the rendered symbol.
bool morph_surface(std::string_view s) {
  static constexpr std::string_view kPrefix = "MORPH-";
  if (s.size() <= kPrefix.size()) return false;
  for (size_t i = 0; i < kPrefix.size(); ++i)
    if (ascii_upper(s[i]) != kPrefix[i]) return false;
  return true;
}

[[noreturn]] void data_error(int line, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ": " << msg;
  throw Error(ErrorKind::kData, os.str());
}

}  // namespace

const char* cap_name(CapClass c) {
  switch (c) {
    case CapClass::kDown: return "DOWN";
    case CapClass::kUp: return "UP";
    case CapClass::kInit: return "INIT";
    case CapClass::kCap: return "CAP";
  }
  return "?";
}

const char* tiny_name(TinyClass t) {
  switch (t) {
    case TinyClass::kNoun: return "Noun";
    case TinyClass::kVerb: return "Verb";
    case TinyClass::kNounModifier: return "NounModifier";
    case TinyClass::kAdverb: return "Adverb";
    case TinyClass::kPreposition: return "Preposition";
    case TinyClass::kWhWord: return "WhWord";
    case TinyClass::kPunctuation: return "Punctuation";
  }
  return "?";
}

std::optional<TinyClass> tiny_from_name(std::string_view name) {
  for (int i = 0; i < kNumTinyClasses; ++i) {
    TinyClass t = static_cast<TinyClass>(i);
    if (name == tiny_name(t)) return t;
  }
  return std::nullopt;
}

const char* dist_name(DistBucket b) {
  switch (b) {
    case DistBucket::k1: return "1";
    case DistBucket::k2: return "2";
    case DistBucket::k3to6: return "3-6";
    case DistBucket::k7up: return "7-inf";
    case DistBucket::kNone: return "none";
  }
  return "?";
}

// --- TagSet ----------------------------------------------------------------

void TagSet::add(const std::string& tag, const std::string& short_tag, TinyClass tiny) {
  if (tag.empty() || short_tag.empty())
    throw Error(ErrorKind::kData, "empty tag or short tag");
  if (reserved_name(tag) || reserved_name(short_tag))
    throw Error(ErrorKind::kData, "tag name '" + tag + "' is reserved");
  if (index_.count(tag))
    throw Error(ErrorKind::kData, "duplicate tag '" + tag + "'");

  TagId id = static_cast<TagId>(names_.size() + kTagFirst);
  index_[tag] = id;
  names_.push_back(tag);
  shorts_.push_back(short_tag);
  tiny_of_.push_back(tiny);
  auto it = short_index_.find(short_tag);
  if (it == short_index_.end()) {
    uint16_t sid = static_cast<uint16_t>(short_names_.size() + kNumSpecialTags);
    short_index_[short_tag] = sid;
    short_names_.push_back(short_tag);
    short_of_.push_back(sid);
  } else {
    short_of_.push_back(it->second);
  }
}

std::optional<TagId> TagSet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TagId TagSet::require(std::string_view name) const {
  auto t = find(name);
  if (!t) throw Error(ErrorKind::kData, "unknown tag '" + std::string(name) + "'");
  return *t;
}

const std::string& TagSet::name(TagId t) const {
  static const std::string specials[kNumSpecialTags] = {"BOS", "EOS", "BOKIDS", "EOKIDS"};
  if (t < kTagFirst) return specials[t];
  return names_.at(t - kTagFirst);
}

uint16_t TagSet::short_id(TagId t) const {
  if (t < kTagFirst) return t;
  return short_of_.at(t - kTagFirst);
}

uint16_t TagSet::tiny_id(TagId t) const {
  if (t < kTagFirst) return t;
  return static_cast<uint16_t>(static_cast<int>(tiny_of_.at(t - kTagFirst)) + kNumSpecialTags);
}

TinyClass TagSet::tiny(TagId t) const {
  if (t < kTagFirst) throw Error(ErrorKind::kInternal, "tiny() on special tag");
  return tiny_of_.at(t - kTagFirst);
}

const std::string& TagSet::short_name(TagId t) const {
  if (t < kTagFirst) return name(t);
  return shorts_.at(t - kTagFirst);
}

bool TagSet::operator==(const TagSet& other) const {
  return names_ == other.names_ && shorts_ == other.shorts_ && tiny_of_ == other.tiny_of_;
}

int Corpus::sentence_count() const {
  int n = 0;
  for (const auto& sec : sections) n += static_cast<int>(sec.sentences.size());
  return n;
}

// --- feature functions -----------------------------------------------------

CapClass cap_class(std::string_view form, bool is_first_nonpunct) {
  int letters = 0, uppers = 0, lowers = 0;
  bool first_letter_upper = false, rest_lower = true;
  for (char c : form) {
    if (!is_ascii_letter(c)) continue;
    if (letters == 0) first_letter_upper = is_ascii_upper(c);
    else if (is_ascii_upper(c)) rest_lower = false;
    ++letters;
    if (is_ascii_upper(c)) ++uppers;
    else ++lowers;
  }
  if (uppers == 0) return CapClass::kDown;  // includes letterless forms
  if (letters >= 2 && lowers == 0) return CapClass::kUp;
  if (is_first_nonpunct && first_letter_upper && rest_lower) return CapClass::kInit;
  return CapClass::kCap;
}

DistBucket dist_bucket(int i, int j) {
  if (i == j) throw Error(ErrorKind::kInternal, "dist_bucket(i, i) is undefined");
  int d = i > j ? i - j : j - i;
  if (d == 1) return DistBucket::k1;
  if (d == 2) return DistBucket::k2;
  if (d <= 6) return DistBucket::k3to6;
  return DistBucket::k7up;
}

bool is_attenuation_symbol(std::string_view form) {
  return form.size() > 6 && form.rfind("MORPH-", 0) == 0;
}

std::string attenuate_token(std::string_view form) {
  if (form.empty()) throw Error(ErrorKind::kInternal, "attenuate_token on empty form");
  if (is_attenuation_symbol(form)) return std::string(form);
  if (is_ascii_digit(form.back())) return "MORPH-NUM";
  if (form.size() >= 6) {
    std::string out = "MORPH-";
    out += ascii_upper(form[form.size() - 2]);
    out += ascii_upper(form[form.size() - 1]);
    return out;
  }
  return "MORPH-SHORT";
}

// --- structure helpers ------------------------------------------------------

Validity validate_structure(std::span<const int> parents) {
  int n = static_cast<int>(parents.size());
  for (int i = 1; i <= n; ++i) {
    int p = parents[i - 1];
    if (p < 1 || p > n + 1) return {false, "parent out of range at position " + std::to_string(i)};
    if (p == i) return {false, "self-parent at position " + std::to_string(i)};
  }
  int roots = 0;
  for (int i = 1; i <= n; ++i)
    if (parents[i - 1] == n + 1) ++roots;
  if (roots != 1)
    return {false, "multi-root: expected exactly one EOS child, found " + std::to_string(roots)};

  // crossing: some link's endpoint strictly inside another link's interval,
  // with the other endpoint outside
  for (int i = 1; i <= n; ++i) {
    int a = std::min(i, parents[i - 1]), b = std::max(i, parents[i - 1]);
    for (int j = i + 1; j <= n; ++j) {
      int c = std::min(j, parents[j - 1]), d = std::max(j, parents[j - 1]);
      int lo1 = a, hi1 = b, lo2 = c, hi2 = d;
      if (lo2 < lo1) { std::swap(lo1, lo2); std::swap(hi1, hi2); }
      if (lo1 < lo2 && lo2 < hi1 && hi1 < hi2)
        return {false, "crossing links " + std::to_string(i) + "-" + std::to_string(parents[i - 1]) +
                           " and " + std::to_string(j) + "-" + std::to_string(parents[j - 1])};
    }
  }

  // cycles: follow parent chains; safe positions are memoized
  std::vector<uint8_t> state(n + 2, 0);  // 0 unseen, 1 on path, 2 safe
  state[n + 1] = 2;
  std::vector<int> path;
  for (int i = 1; i <= n; ++i) {
    if (state[i] == 2) continue;
    path.clear();
    int cur = i;
    while (state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = parents[cur - 1];
    }
    if (state[cur] == 1) return {false, "cycle through position " + std::to_string(cur)};
    for (int p : path) state[p] = 2;
  }
  return {true, ""};
}

Validity validate_structure(const DependencyStructure& d) {
  if (d.parents.size() != d.words.size())
    return {false, "parents/words length mismatch"};
  return validate_structure(std::span<const int>(d.parents));
}

ChildLists::ChildLists(std::span<const int> parents) {
  int n = static_cast<int>(parents.size());
  left.assign(n + 2, {});
  right.assign(n + 2, {});
  for (int i = 1; i <= n; ++i) {
    int p = parents[i - 1];
    if (i < p) left[p].push_back(i);
    else right[p].push_back(i);
  }
  for (int k = 1; k <= n + 1; ++k) {
    std::sort(left[k].begin(), left[k].end(), std::greater<int>());  // nearest first
    std::sort(right[k].begin(), right[k].end());
  }
}

std::string canonical_form(std::string_view surface) {
  if (morph_surface(surface)) {
    std::string out(surface);
    for (char& c : out) c = ascii_upper(c);
    return out;
  }
  std::string out(surface);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

std::vector<CapClass> cap_classes(const std::vector<std::string>& surfaces) {
  std::vector<CapClass> caps;
  caps.reserve(surfaces.size());
  bool seen_nonpunct = false;
  for (const auto& s : surfaces) {
    bool has_letter = std::any_of(s.begin(), s.end(), is_ascii_letter);
    bool first = !seen_nonpunct && has_letter;
    if (morph_surface(s)) {
      // cap encoded in the case pattern of the rendered symbol
      if (std::all_of(s.begin(), s.end(), [](char c) { return !is_ascii_letter(c) || is_ascii_lower(c); }))
        caps.push_back(CapClass::kDown);
      else if (std::all_of(s.begin(), s.end(), [](char c) { return !is_ascii_letter(c) || is_ascii_upper(c); }))
        caps.push_back(CapClass::kUp);
      else if (is_ascii_upper(s[0]))
        caps.push_back(CapClass::kInit);
      else
        caps.push_back(CapClass::kCap);
    } else {
      caps.push_back(cap_class(s, first));
    }
    if (has_letter) seen_nonpunct = true;
  }
  return caps;
}

DependencyStructure gold_structure(const Sentence& s) {
  if (!s.gold_tags || !s.gold_parents)
    throw Error(ErrorKind::kData, "sentence lacks gold tags or parents");
  DependencyStructure d;
  d.parents = *s.gold_parents;
  auto caps = cap_classes(s.surfaces);
  d.words.reserve(s.surfaces.size());
  for (int i = 0; i < s.size(); ++i)
    d.words.push_back({canonical_form(s.surfaces[i]), (*s.gold_tags)[i], caps[i]});
  return d;
}

// --- corpus file I/O ---------------------------------------------------------

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == '\t' || line[i] == ' ')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != '\t' && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

struct PendingSentence {
  std::vector<std::string> surfaces;
  std::vector<std::string> tags;
  std::vector<std::string> parents;
  int first_line = 0;
};

Sentence finish_sentence(const TagSet& tagset, PendingSentence& p, bool strict) {
  Sentence s;
  s.surfaces = std::move(p.surfaces);
  int n = s.size();

  int tagged = 0, parsed = 0;
  for (const auto& t : p.tags) tagged += (t != "_");
  for (const auto& q : p.parents) parsed += (q != "_");
  if (tagged != 0 && tagged != n)
    data_error(p.first_line, "sentence mixes tagged and untagged tokens");
  if (parsed != 0 && parsed != n)
    data_error(p.first_line, "sentence mixes parsed and unparsed tokens");

  if (tagged == n) {
    std::vector<TagId> tags;
    tags.reserve(n);
    for (int i = 0; i < n; ++i) {
      auto t = tagset.find(p.tags[i]);
      if (!t) data_error(p.first_line + i, "unknown tag '" + p.tags[i] + "'");
      tags.push_back(*t);
    }
    s.gold_tags = std::move(tags);
  }
  if (parsed == n) {
    std::vector<int> parents;
    parents.reserve(n);
    for (int i = 0; i < n; ++i) {
      int v = 0;
      try {
        size_t pos = 0;
        v = std::stoi(p.parents[i], &pos);
        if (pos != p.parents[i].size()) throw std::invalid_argument("");
      } catch (...) {
        data_error(p.first_line + i, "bad parent field '" + p.parents[i] + "'");
      }
      if (v < 0 || v > n) data_error(p.first_line + i, "parent out of range");
      parents.push_back(v == 0 ? n + 1 : v);
    }
    if (strict) {
      Validity v = validate_structure(std::span<const int>(parents));
      if (!v.ok) data_error(p.first_line, "ill-formed structure: " + v.reason);
    }
    s.gold_parents = std::move(parents);
  }
  return s;
}

}  // namespace

Corpus read_corpus(std::istream& in, bool strict) {
  Corpus corpus;
  std::string line;
  int lineno = 0;

  // header block
  bool in_tagset = false, tagset_done = false;
  std::unordered_set<std::string> section_ids;
  Section* cur_section = nullptr;
  PendingSentence pending;

  auto flush_sentence = [&]() {
    if (pending.surfaces.empty()) return;
    if (!cur_section) data_error(pending.first_line, "token outside any #SECTION");
    cur_section->sentences.push_back(finish_sentence(corpus.tagset, pending, strict));
    pending = PendingSentence{};
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    if (line.rfind("#TAGSET", 0) == 0) {
      if (tagset_done) data_error(lineno, "second #TAGSET block");
      in_tagset = true;
      continue;
    }
    if (line.rfind("#END", 0) == 0) {
      if (!in_tagset) data_error(lineno, "#END outside #TAGSET");
      in_tagset = false;
      tagset_done = true;
      continue;
    }
    if (in_tagset) {
      if (line.empty()) continue;
      auto f = split_fields(line);
      if (f.size() != 3) data_error(lineno, "tagset line needs tag, short, tiny");
      auto tiny = tiny_from_name(f[2]);
      if (!tiny) data_error(lineno, "unknown tiny class '" + f[2] + "'");
      try {
        corpus.tagset.add(f[0], f[1], *tiny);
      } catch (const Error& e) {
        data_error(lineno, e.what());
      }
      continue;
    }
    if (line.rfind("#SECTION", 0) == 0) {
      if (!tagset_done) data_error(lineno, "#SECTION before #TAGSET block");
      flush_sentence();
      auto f = split_fields(line);
      if (f.size() != 2) data_error(lineno, "#SECTION needs an id");
      if (!section_ids.insert(f[1]).second) data_error(lineno, "duplicate section id '" + f[1] + "'");
      corpus.sections.push_back(Section{f[1], {}});
      cur_section = &corpus.sections.back();
      continue;
    }
    if (line.empty()) {
      flush_sentence();
      continue;
    }

    auto f = split_fields(line);
    if (f.size() != 4) data_error(lineno, "token line needs index, form, tag, parent");
    if (pending.surfaces.empty()) pending.first_line = lineno;
    int expect = static_cast<int>(pending.surfaces.size()) + 1;
    if (f[0] != std::to_string(expect))
      data_error(lineno, "expected token index " + std::to_string(expect) + ", got '" + f[0] + "'");
    pending.surfaces.push_back(f[1]);
    pending.tags.push_back(f[2]);
    pending.parents.push_back(f[3]);
  }
  flush_sentence();

  if (!tagset_done) throw Error(ErrorKind::kData, "corpus has no #TAGSET block");
  for (const auto& sec : corpus.sections)
    if (sec.sentences.empty())
      throw Error(ErrorKind::kData, "section '" + sec.id + "' is empty");
  return corpus;
}

Corpus read_corpus_file(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kData, "cannot open corpus file '" + path + "'");
  try {
    return read_corpus(in, strict);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_corpus(const Corpus& c, std::ostream& out) {
  out << "#TAGSET\n";
  for (int i = 0; i < c.tagset.size(); ++i) {
    TagId t = c.tagset.tag_at(i);
    out << c.tagset.name(t) << '\t' << c.tagset.short_name(t) << '\t'
        << tiny_name(c.tagset.tiny(t)) << '\n';
  }
  out << "#END\n";
  for (const auto& sec : c.sections) {
    out << "#SECTION " << sec.id << '\n';
    for (const auto& s : sec.sentences) {
      int n = s.size();
      for (int i = 1; i <= n; ++i) {
        out << i << '\t' << s.surfaces[i - 1] << '\t';
        if (s.gold_tags) out << c.tagset.name((*s.gold_tags)[i - 1]);
        else out << '_';
        out << '\t';
        if (s.gold_parents) {
          int p = (*s.gold_parents)[i - 1];
          out << (p == n + 1 ? 0 : p);
        } else {
          out << '_';
        }
        out << '\n';
      }
      out << '\n';
    }
  }
}

void write_corpus_file(const Corpus& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kData, "cannot write corpus file '" + path + "'");
  write_corpus(c, out);
}

// --- attenuation --------------------------------------------------------------

namespace {

// Render an attenuation symbol as a surface carrying the original token's
// cap class in its case pattern.
std::string render_morph(const std::string& symbol, CapClass cap) {
  std::string out = symbol;
  switch (cap) {
    case CapClass::kDown:
      for (char& c : out) c = ascii_lower(c);
      break;
    case CapClass::kUp:
      break;  // canonical symbols are already uppercase
    case CapClass::kInit:
      for (size_t i = 1; i < out.size(); ++i) out[i] = ascii_lower(out[i]);
      break;
    case CapClass::kCap:
      out[0] = ascii_lower(out[0]);
      break;
  }
  return out;
}

}  // namespace

Corpus attenuate_training_corpus(const Corpus& train,
                                 const std::unordered_set<std::string>& protected_vocab) {
  // first section index per word type
  std::unordered_map<std::string, int> first_section;
  for (int si = 0; si < static_cast<int>(train.sections.size()); ++si)
    for (const auto& s : train.sections[si].sentences)
      for (const auto& w : s.surfaces)
        first_section.emplace(canonical_form(w), si);

  Corpus out = train;
  for (int si = 0; si < static_cast<int>(out.sections.size()); ++si) {
    for (auto& s : out.sections[si].sentences) {
      auto caps = cap_classes(s.surfaces);
      for (int i = 0; i < s.size(); ++i) {
        std::string form = canonical_form(s.surfaces[i]);
        if (protected_vocab.count(form)) continue;
        auto it = first_section.find(form);
        if (it == first_section.end() || it->second != si) continue;
        s.surfaces[i] = render_morph(attenuate_token(form), caps[i]);
      }
    }
  }
  return out;
}

std::unordered_set<std::string> corpus_vocabulary(const Corpus& c) {
  std::unordered_set<std::string> vocab;
  for (const auto& sec : c.sections)
    for (const auto& s : sec.sentences)
      for (const auto& w : s.surfaces) vocab.insert(canonical_form(w));
  return vocab;
}

}  // namespace depkit
