#include "synth.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace depkit {

namespace {

struct Node {
  TW tw;
  std::vector<Node> left;   // nearest first
  std::vector<Node> right;
};

struct Sampler {
  const TrainedModel& m;
  FactorConfig fc;
  std::mt19937_64 rng;
  std::map<TagId, std::vector<WordId>> forms_by_tag;
  std::vector<TagId> tags_with_forms;
  int budget = 0;

  Sampler(const TrainedModel& model, uint64_t seed) : m(model), fc(model.factor_config()), rng(seed) {
    std::map<TagId, std::set<WordId>> by_tag;
    for (const auto& [wid, tags] : m.tag_dict)
      for (TagId t : tags) by_tag[t].insert(wid);
    for (const auto& [t, wids] : by_tag) {
      forms_by_tag[t] = std::vector<WordId>(wids.begin(), wids.end());
      tags_with_forms.push_back(t);
    }
    if (tags_with_forms.empty())
      throw Error(ErrorKind::kData, "model has an empty tag dictionary; nothing to sample");
  }

  double uniform() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

  size_t draw(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

  // samples one child of `parent`, or nullopt for EOKIDS
  std::optional<TW> sample_child(TW parent, SibSig sib, Dir dir, bool allow_stop) {
    Query qs[3];

    std::vector<double> tw_weights;
    std::vector<TagId> tag_of;
    for (TagId t : tags_with_forms) {
      child_queries(fc, parent, sib, dir, TW{kWordUnseen, t, CapClass::kDown}, qs);
      tw_weights.push_back(m.table->estimate(qs[0], m.smoothing));
      tag_of.push_back(t);
    }
    if (allow_stop) {
      child_queries(fc, parent, sib, dir, std::nullopt, qs);
      tw_weights.push_back(m.table->estimate(qs[0], m.smoothing));
      tag_of.push_back(kTagEokids);
    }
    TagId tag = tag_of[draw(tw_weights)];
    if (tag == kTagEokids) return std::nullopt;

    const auto& forms = forms_by_tag[tag];
    std::vector<double> w_weights;
    for (WordId w : forms) {
      int nq = child_queries(fc, parent, sib, dir, TW{w, tag, CapClass::kDown}, qs);
      (void)nq;
      w_weights.push_back(m.table->estimate(qs[1], m.smoothing));
    }
    WordId word = forms[draw(w_weights)];

    std::vector<double> c_weights;
    for (int c = 0; c < 4; ++c) {
      child_queries(fc, parent, sib, dir, TW{word, tag, static_cast<CapClass>(c)}, qs);
      c_weights.push_back(m.table->estimate(qs[2], m.smoothing));
    }
    CapClass cap = static_cast<CapClass>(draw(c_weights));
    return TW{word, tag, cap};
  }

  // fills in nd's children recursively; false when the length budget runs out
  bool generate(Node& nd) {
    for (Dir dir : {Dir::kLeft, Dir::kRight}) {
      auto& kids = dir == Dir::kLeft ? nd.left : nd.right;
      SibSig sib = sib_bokids();
      for (;;) {
        auto child = sample_child(nd.tw, sib, dir, true);
        if (!child) break;
        if (--budget < 0) return false;
        kids.push_back(Node{*child, {}, {}});
        sib = m.sib_of(child->t);
        if (!generate(kids.back())) return false;
      }
    }
    return true;
  }

  // one whole sentence tree rooted under EOS, or nullopt when the cap hit
  std::optional<Node> sample_sentence(int length_cap) {
    budget = length_cap;
    auto head = sample_child(tw_eos(), sib_bokids(), Dir::kLeft, false);
    --budget;
    Node root{*head, {}, {}};
    if (!generate(root)) return std::nullopt;
    return root;
  }
};

std::string render_surface(const TrainedModel& m, TW tw) {
  std::string form = m.vocab.name(tw.w);
  auto upper = [](char c) { return c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c; };
  auto lower = [](char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; };
  switch (tw.c) {
    case CapClass::kDown:
      break;
    case CapClass::kUp:
      for (char& c : form) c = upper(c);
      break;
    case CapClass::kInit:
      if (!form.empty()) form[0] = upper(form[0]);
      break;
    case CapClass::kCap:
      if (form.size() >= 2) {
        form[0] = lower(form[0]);
        for (size_t i = 1; i < form.size(); ++i) form[i] = upper(form[i]);
      }
      break;
  }
  return form;
}

void linearize(const Node& nd, std::vector<const Node*>& order) {
  for (auto it = nd.left.rbegin(); it != nd.left.rend(); ++it) linearize(*it, order);
  order.push_back(&nd);
  for (const auto& c : nd.right) linearize(c, order);
}

Sentence to_sentence(const TrainedModel& m, const Node& root) {
  std::vector<const Node*> order;
  linearize(root, order);
  int n = static_cast<int>(order.size());
  std::map<const Node*, int> pos;
  for (int i = 0; i < n; ++i) pos[order[i]] = i + 1;

  Sentence s;
  std::vector<TagId> tags;
  std::vector<int> parents(n, n + 1);
  for (int i = 0; i < n; ++i) {
    s.surfaces.push_back(render_surface(m, order[i]->tw));
    tags.push_back(order[i]->tw.t);
  }
  // parents from the tree edges
  std::function<void(const Node&)> walk_edges = [&](const Node& nd) {
    for (const auto& c : nd.left) {
      parents[pos[&c] - 1] = pos[&nd];
      walk_edges(c);
    }
    for (const auto& c : nd.right) {
      parents[pos[&c] - 1] = pos[&nd];
      walk_edges(c);
    }
  };
  walk_edges(root);
  s.gold_tags = std::move(tags);
  s.gold_parents = std::move(parents);
  return s;
}

}  // namespace

Corpus synthesize(const TrainedModel& m, long sentences, int length_cap, uint64_t seed,
                  int section_size) {
  if (sentences < 1) throw Error(ErrorKind::kUsage, "need at least one sentence");
  if (length_cap < 1) throw Error(ErrorKind::kUsage, "length cap must be >= 1");
  if (section_size < 1) section_size = 100;

  Sampler sampler(m, seed);
  Corpus out;
  out.tagset = m.tagset;

  long made = 0, attempts = 0;
  const long max_attempts = sentences * 1000 + 1000;
  while (made < sentences) {
    if (++attempts > max_attempts)
      throw Error(ErrorKind::kInternal, "sampler kept exceeding the length cap");
    auto root = sampler.sample_sentence(length_cap);
    if (!root) continue;
    if (made % section_size == 0)
      out.sections.push_back(Section{"g" + std::to_string(made / section_size), {}});
    out.sections.back().sentences.push_back(to_sentence(m, *root));
    ++made;
  }
  return out;
}

}  // namespace depkit
