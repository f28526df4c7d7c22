#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

// Data model for tagged words, sentences and bare-bones dependency
// structures. Word positions are 1-based; position n+1 is the EOS mark
// just past the end of the string, and a parent value of n+1 marks the
// sentence head.

namespace depkit {

using TagId = uint16_t;

// The four sequence delimiters share the tag id space with ordinary tags,
// which start at kTagFirst.
inline constexpr TagId kTagBos = 0;
inline constexpr TagId kTagEos = 1;
inline constexpr TagId kTagBokids = 2;
inline constexpr TagId kTagEokids = 3;
inline constexpr TagId kTagFirst = 4;
inline constexpr int kNumSpecialTags = 4;

enum class CapClass : uint8_t { kDown = 0, kUp = 1, kInit = 2, kCap = 3 };

enum class TinyClass : uint8_t {
  kNoun = 0,
  kVerb = 1,
  kNounModifier = 2,
  kAdverb = 3,
  kPreposition = 4,
  kWhWord = 5,
  kPunctuation = 6,
};
inline constexpr int kNumTinyClasses = 7;

enum class Dir : uint8_t { kLeft = 0, kRight = 1 };

// |i - j| bucketed into the four ranges 1, 2, 3-6 and 7-up. kNone is a
// placeholder used where a distance slot exists but no position does
// (stop events).
enum class DistBucket : uint8_t { k1 = 0, k2 = 1, k3to6 = 2, k7up = 3, kNone = 4 };

enum class ErrorKind { kUsage = 1, kData = 2, kInternal = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

const char* cap_name(CapClass c);
const char* tiny_name(TinyClass t);
std::optional<TinyClass> tiny_from_name(std::string_view name);
const char* dist_name(DistBucket b);

// A declared inventory of tags with their shortened and tiny projections.
// Contents come from the corpus file, not from code. Shortened tags get
// their own id space; both maps are total, and the special symbols map to
// themselves (short ids 0..3 mirror the special tag ids).
class TagSet {
 public:
  TagSet() = default;

  // Declares one tag. Throws Error(kData) on duplicates or reserved names.
  void add(const std::string& tag, const std::string& short_tag, TinyClass tiny);

  int size() const { return static_cast<int>(names_.size()); }
  int short_count() const { return static_cast<int>(short_names_.size()) + kNumSpecialTags; }

  std::optional<TagId> find(std::string_view name) const;
  TagId require(std::string_view name) const;  // Error(kData) if absent

  const std::string& name(TagId t) const;
  uint16_t short_id(TagId t) const;       // specials map to their own ids
  uint16_t tiny_id(TagId t) const;        // specials 0..3, classes from 4
  TinyClass tiny(TagId t) const;          // ordinary tags only
  const std::string& short_name(TagId t) const;

  bool operator==(const TagSet& other) const;

  // Ordinary tags in declaration order, offset by kTagFirst.
  TagId tag_at(int index) const { return static_cast<TagId>(index + kTagFirst); }

 private:
  std::vector<std::string> names_;        // ordinary tags, declaration order
  std::vector<std::string> shorts_;       // per ordinary tag: its short name
  std::vector<uint16_t> short_of_;        // per ordinary tag: short id (from 4)
  std::vector<TinyClass> tiny_of_;
  std::vector<std::string> short_names_;  // unique short names in first-use order
  std::unordered_map<std::string, TagId> index_;
  std::unordered_map<std::string, uint16_t> short_index_;
};

// A word form paired with a tag and a capitalization class. The form is
// stored lowercased, except for attenuation symbols (MORPH-*), which are
// stored verbatim.
struct TaggedWord {
  std::string form;
  TagId tag = kTagBos;
  CapClass cap = CapClass::kDown;
};

struct Sentence {
  std::vector<std::string> surfaces;                // original spellings, 1..n
  std::optional<std::vector<TagId>> gold_tags;      // length n when present
  std::optional<std::vector<int>> gold_parents;     // values in 1..n+1

  int size() const { return static_cast<int>(surfaces.size()); }
};

struct Section {
  std::string id;
  std::vector<Sentence> sentences;
};

struct Corpus {
  TagSet tagset;
  std::vector<Section> sections;

  int sentence_count() const;
};

// A tagged sentence plus a parent index per word.
struct DependencyStructure {
  std::vector<TaggedWord> words;  // positions 1..n at indices 0..n-1
  std::vector<int> parents;       // values in 1..n+1

  int size() const { return static_cast<int>(words.size()); }
};

struct Validity {
  bool ok = true;
  std::string reason;
};

// --- feature functions ---------------------------------------------------

// Capitalization class of a surface form. Only ASCII letters count as
// letters; a form with none is kDown.
CapClass cap_class(std::string_view form, bool is_first_nonpunct);

// Distance bucket for |i - j|. i == j is a contract violation.
DistBucket dist_bucket(int i, int j);

bool is_attenuation_symbol(std::string_view form);

// Morphological class symbol for a form: MORPH-NUM if it ends in a digit,
// MORPH-XX (uppercased last two characters) if 6+ characters, MORPH-SHORT
// otherwise. Idempotent on its own outputs.
std::string attenuate_token(std::string_view form);

// --- structure helpers ----------------------------------------------------

// Accepts iff exactly one parent is n+1, no two links cross, and the
// parent relation is acyclic. Entries outside 1..n+1 or self-parents are
// rejected too.
Validity validate_structure(std::span<const int> parents);
Validity validate_structure(const DependencyStructure& d);

// Children of each position 1..n+1, nearest-first on each side.
struct ChildLists {
  std::vector<std::vector<int>> left;   // left[k]: children < k, descending
  std::vector<std::vector<int>> right;  // right[k]: children > k, ascending

  explicit ChildLists(std::span<const int> parents);
};

// Lowercase a surface form (ASCII); attenuation symbols pass through.
std::string canonical_form(std::string_view surface);

// Builds the tagged-word structure for a fully annotated sentence.
// Capitalization is recomputed from the surfaces.
DependencyStructure gold_structure(const Sentence& s);

// Per-position cap classes for a sentence's surfaces.
std::vector<CapClass> cap_classes(const std::vector<std::string>& surfaces);

// --- corpus file I/O -------------------------------------------------------
//
// Line-oriented text format:
//   #TAGSET            header block; lines are `tag<TAB>short<TAB>tiny`
//   #END
//   #SECTION <id>
//   index<TAB>form<TAB>tag<TAB>parent     one token per line; parent 0 = EOS
//                                         `_` marks missing tag/parent
//   (blank line terminates a sentence)
//
// When `strict` is set, annotated sentences must carry well-formed
// structures; parsers may emit ill-formed ones (the baseline does), so
// evaluation inputs are read with strict=false.

Corpus read_corpus(std::istream& in, bool strict = true);
Corpus read_corpus_file(const std::string& path, bool strict = true);
void write_corpus(const Corpus& c, std::ostream& out);
void write_corpus_file(const Corpus& c, const std::string& path);

// Replaces, for every word type not in protected_vocab, all of its tokens
// in the first section where the type occurs with the type's attenuation
// symbol. Later sections are untouched. protected_vocab holds canonical
// (lowercased) forms.
Corpus attenuate_training_corpus(const Corpus& train,
                                 const std::unordered_set<std::string>& protected_vocab);

// All canonical forms occurring in a corpus.
std::unordered_set<std::string> corpus_vocabulary(const Corpus& c);

}  // namespace depkit
