#include "depkit.h"

#include <atomic>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "eval.hpp"
#include "synth.hpp"

using namespace depkit;

struct dk_corpus {
  Corpus c;
};
struct dk_model {
  TrainedModel m;
  std::string summary;
};
struct dk_report {
  std::string text;
  std::unordered_map<std::string, double> values;
};

namespace {

thread_local std::string g_last_error;

int code_of(const Error& e) { return static_cast<int>(e.kind()); }

template <typename Fn>
int guard(Fn&& fn) {
  try {
    fn();
    return DK_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return code_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DK_EINTERNAL;
  }
}

template <typename T, typename Fn>
T* guard_ptr(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    g_last_error = e.what();
    return nullptr;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

std::vector<std::pair<int, int>> sentence_index(const Corpus& c) {
  std::vector<std::pair<int, int>> out;
  for (int si = 0; si < static_cast<int>(c.sections.size()); ++si)
    for (int k = 0; k < static_cast<int>(c.sections[si].sentences.size()); ++k)
      out.emplace_back(si, k);
  return out;
}

}  // namespace

extern "C" {

const char* dk_version(void) { return "depkit 1.0.0"; }

const char* dk_last_error(void) { return g_last_error.c_str(); }

dk_corpus* dk_corpus_read(const char* path, int strict) {
  return guard_ptr<dk_corpus>([&] {
    if (!path) throw Error(ErrorKind::kUsage, "null path");
    return new dk_corpus{read_corpus_file(path, strict != 0)};
  });
}

int dk_corpus_write(const dk_corpus* c, const char* path) {
  return guard([&] {
    if (!c || !path) throw Error(ErrorKind::kUsage, "null argument");
    write_corpus_file(c->c, path);
  });
}

void dk_corpus_free(dk_corpus* c) { delete c; }

int dk_corpus_sections(const dk_corpus* c) {
  return c ? static_cast<int>(c->c.sections.size()) : 0;
}

int dk_corpus_sentences(const dk_corpus* c) { return c ? c->c.sentence_count() : 0; }

dk_corpus* dk_corpus_attenuate(const dk_corpus* train, const dk_corpus* protect) {
  return guard_ptr<dk_corpus>([&] {
    if (!train) throw Error(ErrorKind::kUsage, "null corpus");
    std::unordered_set<std::string> vocab;
    if (protect) vocab = corpus_vocabulary(protect->c);
    return new dk_corpus{attenuate_training_corpus(train->c, vocab)};
  });
}

dk_model* dk_model_train(const dk_corpus* train, const char* model_name, int use_distance,
                         uint64_t skip_threshold) {
  return guard_ptr<dk_model>([&]() -> dk_model* {
    if (!train || !model_name) throw Error(ErrorKind::kUsage, "null argument");
    auto kind = model_from_name(model_name);
    if (!kind) throw Error(ErrorKind::kUsage, std::string("unknown model '") + model_name + "'");
    SmoothingConfig cfg;
    cfg.skip_threshold = skip_threshold;
    ModelFlags flags{use_distance != 0};
    return new dk_model{depkit::train(*kind, flags, train->c, cfg), {}};
  });
}

dk_model* dk_model_load(const char* path) {
  return guard_ptr<dk_model>([&] {
    if (!path) throw Error(ErrorKind::kUsage, "null path");
    return new dk_model{load_model(path), {}};
  });
}

int dk_model_save(const dk_model* m, const char* path) {
  return guard([&] {
    if (!m || !path) throw Error(ErrorKind::kUsage, "null argument");
    save_model(m->m, path);
  });
}

void dk_model_free(dk_model* m) { delete m; }

const char* dk_model_name(const dk_model* m) { return m ? model_name(m->m.kind) : ""; }

dk_model* dk_model_as(const dk_model* m, const char* model_name_str, int use_distance) {
  return guard_ptr<dk_model>([&]() -> dk_model* {
    if (!m || !model_name_str) throw Error(ErrorKind::kUsage, "null argument");
    auto kind = model_from_name(model_name_str);
    if (!kind)
      throw Error(ErrorKind::kUsage, std::string("unknown model '") + model_name_str + "'");
    return new dk_model{reinterpret_model(m->m, *kind, ModelFlags{use_distance != 0}), {}};
  });
}

const char* dk_model_summary(dk_model* m) {
  if (!m) return "";
  if (m->summary.empty()) {
    std::ostringstream ss;
    for (const auto& [family, count] : event_summary(m->m)) ss << family << "=" << count << "\n";
    m->summary = ss.str();
  }
  return m->summary.c_str();
}

int dk_model_score(const dk_model* m, const dk_corpus* gold, int section, int sentence,
                   double* log_score) {
  return guard([&] {
    if (!m || !gold || !log_score) throw Error(ErrorKind::kUsage, "null argument");
    if (section < 0 || section >= static_cast<int>(gold->c.sections.size()))
      throw Error(ErrorKind::kUsage, "section index out of range");
    const auto& sec = gold->c.sections[section];
    if (sentence < 0 || sentence >= static_cast<int>(sec.sentences.size()))
      throw Error(ErrorKind::kUsage, "sentence index out of range");
    DependencyStructure d = gold_structure(sec.sentences[sentence]);
    *log_score = score_structure(m->m, attenuate_for_model(m->m, d));
  });
}

dk_corpus* dk_parse(const dk_model* model, const dk_corpus* input, int beam_width,
                    const dk_corpus* true_tags, int oracle_check_max, int workers,
                    dk_parse_stats* stats) {
  return guard_ptr<dk_corpus>([&]() -> dk_corpus* {
    if (!model || !input) throw Error(ErrorKind::kUsage, "null argument");
    const TrainedModel& m = model->m;
    const Corpus& in = input->c;
    if (!(m.tagset == in.tagset))
      throw Error(ErrorKind::kData, "model and corpus tag sets differ");
    if (true_tags && !(true_tags->c.tagset == in.tagset))
      throw Error(ErrorKind::kData, "true-tags corpus tag set differs");

    auto idx = sentence_index(in);
    std::vector<const Sentence*> tt_sentences;
    if (true_tags) {
      for (const auto& sec : true_tags->c.sections)
        for (const auto& s : sec.sentences) tt_sentences.push_back(&s);
      if (tt_sentences.size() != idx.size())
        throw Error(ErrorKind::kData, "true-tags corpus is misaligned");
    }

    struct Result {
      std::vector<TagId> tags;
      std::vector<int> parents;
      bool pruned = false;
      bool oracle_checked = false;
      bool oracle_mismatch = false;
    };
    std::vector<Result> results(idx.size());
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::string fail_msg;
    std::mutex fail_mutex;

    auto work = [&]() {
      for (;;) {
        size_t at = next.fetch_add(1);
        if (at >= idx.size() || failed.load()) break;
        try {
          const Sentence& s = in.sections[idx[at].first].sentences[idx[at].second];
          Result& r = results[at];
          if (m.kind == ModelKind::kBaseline) {
            auto [tags, parents] = baseline_parse(m, s);
            r.tags = std::move(tags);
            r.parents = std::move(parents);
            continue;
          }
          std::optional<std::vector<TagId>> tt;
          if (true_tags) {
            const Sentence* t = tt_sentences[at];
            if (t->size() != s.size() || !t->gold_tags)
              throw Error(ErrorKind::kData, "true-tags sentence " + std::to_string(at + 1) +
                                                " is misaligned or untagged");
            tt = t->gold_tags;
          }
          DecodeInput din = make_decode_input(m, s, tt);
          SearchSettings settings;
          settings.beam = beam_width;
          ParseOutput out = m.kind == ModelKind::kA ? brute_force_parse(m, din, settings)
                                                    : dp_parse(m, din, settings);
          r.tags = out.tags;
          r.parents = out.parents;
          r.pruned = out.pruned;
          if (oracle_check_max > 0 && m.kind != ModelKind::kA && s.size() <= oracle_check_max) {
            uint64_t taggings = 1;
            bool feasible = true;
            for (int i = 1; i <= din.n; ++i) {
              taggings *= din.lattice.cands[i].size();
              if (taggings > settings.bf_max_taggings) {
                feasible = false;
                break;
              }
            }
            if (feasible && din.n <= settings.bf_max_n) {
              SearchSettings exact = settings;
              exact.beam = 0;
              ParseOutput ours = beam_width == 0 ? out : dp_parse(m, din, exact);
              ParseOutput ref = brute_force_parse(m, din, exact);
              r.oracle_checked = true;
              if (std::abs(ours.log_score - ref.log_score) > kScoreTieEps ||
                  ours.parents != ref.parents || ours.tags != ref.tags)
                r.oracle_mismatch = true;
            }
          }
        } catch (const Error& e) {
          std::lock_guard<std::mutex> lock(fail_mutex);
          failed.store(true);
          if (fail_msg.empty()) fail_msg = e.what();
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(fail_mutex);
          failed.store(true);
          if (fail_msg.empty()) fail_msg = e.what();
        }
      }
    };

    int nworkers = workers > 1 ? workers : 1;
    if (nworkers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < nworkers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (failed.load()) throw Error(ErrorKind::kData, fail_msg);

    auto out = std::make_unique<dk_corpus>();
    out->c.tagset = in.tagset;
    out->c.sections.reserve(in.sections.size());
    for (const auto& sec : in.sections) out->c.sections.push_back(Section{sec.id, {}});
    dk_parse_stats st{};
    st.sentences = static_cast<long>(idx.size());
    for (size_t at = 0; at < idx.size(); ++at) {
      const Sentence& s = in.sections[idx[at].first].sentences[idx[at].second];
      Sentence ns;
      ns.surfaces = s.surfaces;
      ns.gold_tags = results[at].tags;
      ns.gold_parents = results[at].parents;
      out->c.sections[idx[at].first].sentences.push_back(std::move(ns));
      st.pruned_sentences += results[at].pruned;
      st.oracle_checked += results[at].oracle_checked;
      st.oracle_mismatches += results[at].oracle_mismatch;
    }
    if (stats) *stats = st;
    return out.release();
  });
}

dk_report* dk_evaluate(const dk_corpus* gold, const dk_corpus* system, const dk_model* model) {
  return guard_ptr<dk_report>([&]() -> dk_report* {
    if (!gold || !system) throw Error(ErrorKind::kUsage, "null argument");
    auto results = score_sentences(gold->c, system->c, model ? &model->m : nullptr);
    EvalReport rep = aggregate(results);
    auto r = std::make_unique<dk_report>();
    r->text = render_report(rep);
    std::istringstream ss(r->text);
    std::string line;
    while (std::getline(ss, line)) {
      if (line.rfind("#kv ", 0) != 0) continue;
      std::istringstream ls(line.substr(4));
      std::string key;
      double value = 0;
      if (ls >> key >> value) r->values[key] = value;
    }
    return r.release();
  });
}

const char* dk_report_text(const dk_report* r) { return r ? r->text.c_str() : ""; }

int dk_report_value(const dk_report* r, const char* key, double* value) {
  return guard([&] {
    if (!r || !key || !value) throw Error(ErrorKind::kUsage, "null argument");
    auto it = r->values.find(key);
    if (it == r->values.end())
      throw Error(ErrorKind::kData, std::string("no report value '") + key + "'");
    *value = it->second;
  });
}

void dk_report_free(dk_report* r) { delete r; }

int dk_compare(const dk_corpus* gold, const dk_corpus* system_a, const dk_corpus* system_b,
               long iterations, uint64_t seed, dk_significance* out) {
  return guard([&] {
    if (!gold || !system_a || !system_b || !out) throw Error(ErrorKind::kUsage, "null argument");
    auto ra = score_sentences(gold->c, system_a->c, nullptr);
    auto rb = score_sentences(gold->c, system_b->c, nullptr);
    auto res = monte_carlo_compare(attachment_errors(ra), attachment_errors(rb), scored_words(ra),
                                   iterations, seed);
    out->mu = res.mu;
    out->p_value = res.p_value;
    out->iterations = res.iterations;
    out->seed = res.seed;
  });
}

dk_corpus* dk_synthesize(const dk_model* m, long sentences, int length_cap, uint64_t seed) {
  return guard_ptr<dk_corpus>([&] {
    if (!m) throw Error(ErrorKind::kUsage, "null model");
    return new dk_corpus{synthesize(m->m, sentences, length_cap, seed)};
  });
}

}  // extern "C"
