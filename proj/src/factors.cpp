#include "factors.hpp"

namespace depkit {

WordId Vocab::intern(const std::string& form) {
  auto it = index_.find(form);
  if (it != index_.end()) return it->second;
  WordId id = static_cast<WordId>(forms_.size() + kWordFirst);
  index_[form] = id;
  forms_.push_back(form);
  return id;
}

WordId Vocab::find(const std::string& form) const {
  auto it = index_.find(form);
  return it == index_.end() ? kWordUnseen : it->second;
}

const std::string& Vocab::name(WordId w) const {
  static const std::string specials[kWordFirst] = {"<unseen>", "BOS", "EOS", "BOKIDS", "EOKIDS"};
  if (w < kWordFirst) return specials[w];
  return forms_.at(w - kWordFirst);
}

const char* family_name(Family f) {
  switch (f) {
    case Family::kTrigram: return "trigram";
    case Family::kChild: return "child";
    case Family::kDist: return "distance";
    case Family::kParent: return "parent";
    case Family::kLink: return "link";
  }
  return "?";
}

int trigram_queries(const FactorConfig& fc, TW prev2, TW prev, TW next, Query out[3]) {
  const TagSet& ts = *fc.tagset;
  int n = 0;

  Query& qt = out[n++];
  qt.reset(next.t);
  Key& t1 = qt.add_level().add(kTriTag1);
  t1.push(prev.t), t1.push(prev2.t);
  qt.add_level().add(kTriTag2).push(prev.t);
  qt.add_level().add(kTriTag3).push(ts.short_id(prev.t));

  if (next.special()) return n;  // EOS ends the string with the tag choice alone

  Query& qw = out[n++];
  qw.reset(next.w);
  qw.add_level().add(kTriWord1).push(next.t);

  Query& qc = out[n++];
  qc.reset(static_cast<Atom>(next.c));
  Key& c1 = qc.add_level().add(kTriCap1);
  c1.push(next.w), c1.push(next.t);
  qc.add_level().add(kTriCap2).push(next.t);
  return n;
}

int child_queries(const FactorConfig& fc, TW parent, SibSig sib, Dir dir,
                  const std::optional<TW>& child, Query out[3]) {
  const TagSet& ts = *fc.tagset;
  Atom d = static_cast<Atom>(dir);
  int n = 0;

  Query& qt = out[n++];
  qt.reset(child ? child->t : kTagEokids);
  Key& t1 = qt.add_level().add(kChildTag1);
  t1.push(parent.w), t1.push(parent.t), t1.push(sib.shrt), t1.push(d);
  Level& t2 = qt.add_level();
  Key& t2a = t2.add(kChildTag2a);
  t2a.push(parent.w), t2a.push(parent.t), t2a.push(d);
  Key& t2b = t2.add(kChildTag2b);
  t2b.push(parent.t), t2b.push(sib.shrt), t2b.push(d);
  Key& t3 = qt.add_level().add(kChildTag3);
  t3.push(ts.short_id(parent.t)), t3.push(d);

  if (!child) return n;

  Query& qw = out[n++];
  qw.reset(child->w);
  if (fc.lexical_child_words) {
    Key& w1 = qw.add_level().add(kChildWord1);
    w1.push(child->t), w1.push(parent.w), w1.push(parent.t), w1.push(d);
    Key& w2 = qw.add_level().add(kChildWord2);
    w2.push(child->t), w2.push(parent.t), w2.push(d);
  }
  qw.add_level().add(kChildWord3).push(child->t);

  Query& qc = out[n++];
  qc.reset(static_cast<Atom>(child->c));
  Key& c1 = qc.add_level().add(kChildCap1);
  c1.push(child->w), c1.push(child->t);
  qc.add_level().add(kChildCap2).push(child->t);
  return n;
}

int dist_queries(const FactorConfig&, TW child, TagId parent_tag, DistBucket b, Query out[1]) {
  Query& q = out[0];
  q.reset(static_cast<Atom>(b));
  Key& d1 = q.add_level().add(kDist1);
  d1.push(child.w), d1.push(child.t), d1.push(parent_tag);
  Key& d2 = q.add_level().add(kDist2);
  d2.push(child.t), d2.push(parent_tag);
  return 1;
}

int parent_queries(const FactorConfig& fc, TW child, const std::optional<TW>& parent,
                   std::optional<Dir> parent_dir, Query out[4]) {
  const TagSet& ts = *fc.tagset;
  int n = 0;

  Query& qt = out[n++];
  qt.reset(parent ? parent->t : kTagEos);
  qt.add_level().add(kParTag1).push(child.t);
  qt.add_level().add(kParTag2).push(ts.short_id(child.t));

  if (parent) {
    Query& qw = out[n++];
    qw.reset(parent->w);
    qw.add_level().add(kParWord1).push(parent->t);

    Query& qc = out[n++];
    qc.reset(static_cast<Atom>(parent->c));
    Key& c1 = qc.add_level().add(kParCap1);
    c1.push(parent->w), c1.push(parent->t);
    qc.add_level().add(kParCap2).push(parent->t);
  }

  if (parent_dir) {
    TagId pt = parent ? parent->t : kTagEos;
    Query& qd = out[n++];
    qd.reset(static_cast<Atom>(*parent_dir));
    Key& d1 = qd.add_level().add(kParDir1);
    d1.push(child.t), d1.push(pt);
    Key& d2 = qd.add_level().add(kParDir2);
    d2.push(ts.short_id(child.t)), d2.push(ts.tiny_id(pt));
  }
  return n;
}

int link_queries(const FactorConfig& fc, const std::optional<TW>& candidate, TW head, SibSig sib,
                 bool yes, DistBucket b, Query out[1]) {
  TW cand = candidate ? *candidate : TW{kWordEokids, kTagEokids, CapClass::kDown};
  Atom bb = static_cast<Atom>(b);
  Query& q = out[0];
  q.reset(yes ? kAtomYes : kAtomNo);

  if (!fc.link_distance) {
    Key& l1 = q.add_level().add(kLink1);
    l1.push(cand.w), l1.push(cand.t), l1.push(head.w), l1.push(head.t), l1.push(sib.shrt);
    Level& l2 = q.add_level();
    Key& a = l2.add(kLink2a);
    a.push(cand.t), a.push(head.w), a.push(head.t), a.push(sib.shrt);
    Key& bq = l2.add(kLink2b);
    bq.push(cand.w), bq.push(cand.t), bq.push(head.t), bq.push(sib.shrt);
    Key& c = l2.add(kLink2c);
    c.push(cand.w), c.push(cand.t), c.push(head.w), c.push(head.t);
    Key& l3 = q.add_level().add(kLink3);
    l3.push(cand.t), l3.push(head.t), l3.push(sib.shrt);
    Key& l4 = q.add_level().add(kLink4);
    l4.push(cand.t), l4.push(head.t), l4.push(sib.tiny);
  } else {
    Key& l1 = q.add_level().add(kLinkD1);
    l1.push(bb), l1.push(cand.w), l1.push(cand.t), l1.push(head.w), l1.push(head.t), l1.push(sib.shrt);
    Level& l2 = q.add_level();
    Key& a = l2.add(kLinkD2a);
    a.push(bb), a.push(cand.t), a.push(head.w), a.push(head.t), a.push(sib.shrt);
    Key& bq = l2.add(kLinkD2b);
    bq.push(bb), bq.push(cand.w), bq.push(cand.t), bq.push(head.t), bq.push(sib.shrt);
    Key& c = l2.add(kLinkD2c);
    c.push(bb), c.push(cand.w), c.push(cand.t), c.push(head.w), c.push(head.t);
    Level& l3 = q.add_level();
    Key& d3a = l3.add(kLinkD3a);
    d3a.push(cand.t), d3a.push(head.w), d3a.push(head.t);
    Key& d3b = l3.add(kLinkD3b);
    d3b.push(cand.w), d3b.push(cand.t), d3b.push(head.t);
    Key& l4 = q.add_level().add(kLinkD4);
    l4.push(bb), l4.push(cand.t), l4.push(head.t), l4.push(sib.shrt);
    Key& l5 = q.add_level().add(kLinkD5);
    l5.push(bb), l5.push(cand.t), l5.push(head.t), l5.push(sib.tiny);
  }
  return 1;
}

}  // namespace depkit
