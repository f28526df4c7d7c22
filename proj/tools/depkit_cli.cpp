// Command-line driver for the depkit shared library: training, parsing,
// evaluation, model comparison, and corpus synthesis.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "depkit.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

[[noreturn]] void die(int code, const std::string& msg) {
  std::cerr << "depkit: " << msg << std::endl;
  std::exit(code);
}

[[noreturn]] void die_api(int code) {
  std::cerr << "depkit: " << dk_last_error() << std::endl;
  std::exit(code == DK_OK ? kExitInternal : code);
}

struct CorpusPtr {
  dk_corpus* p = nullptr;
  ~CorpusPtr() { dk_corpus_free(p); }
};
struct ModelPtr {
  dk_model* p = nullptr;
  ~ModelPtr() { dk_model_free(p); }
};
struct ReportPtr {
  dk_report* p = nullptr;
  ~ReportPtr() { dk_report_free(p); }
};

dk_corpus* read_or_die(const std::string& path, bool strict) {
  dk_corpus* c = dk_corpus_read(path.c_str(), strict ? 1 : 0);
  if (!c) die_api(DK_EDATA);
  return c;
}

dk_model* load_or_die(const std::string& path) {
  dk_model* m = dk_model_load(path.c_str());
  if (!m) die_api(DK_EDATA);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depkit — statistical dependency parsing toolkit"};
  app.require_subcommand(0, 1);
  app.set_config("--config", "", "read defaults from a TOML-style config file");
  bool show_config = false;
  app.add_flag("--show-config", show_config, "print effective defaults and exit");

  // train
  auto* train = app.add_subcommand("train", "train a model on an annotated corpus");
  std::string t_model = "C", t_in, t_out, t_protect;
  bool t_distance = false;
  uint64_t t_skip = 0;
  train->add_option("--model", t_model, "A, B1, B2, B3, C, C_nolex, C_dist, D, X or BASELINE");
  train->add_flag("--distance", t_distance, "distance-augmented link reductions (A, D)");
  train->add_option("--skip-threshold", t_skip,
                    "bypass backoff when a condition count reaches this (0 = never)");
  train->add_option("--in", t_in, "training corpus")->required();
  train->add_option("--out", t_out, "model file to write")->required();
  train->add_option("--protect", t_protect,
                    "corpus whose word forms are exempt from attenuation (the test input)");

  // parse
  auto* parse = app.add_subcommand("parse", "tag and parse a corpus");
  std::string p_model, p_in, p_out, p_true_tags, p_as;
  int p_beam = 0, p_oracle = 0, p_workers = 1;
  bool p_exact = false;
  parse->add_option("--model-file", p_model, "trained model")->required();
  parse->add_option("--in", p_in, "input corpus (tags/parents may be _)")->required();
  parse->add_option("--out", p_out, "parsed corpus to write")->required();
  parse->add_flag("--exact", p_exact, "exact search (the default)");
  parse->add_option("--beam", p_beam, "beam width per chart cell (0 = exact)");
  parse->add_option("--true-tags", p_true_tags, "corpus supplying coarse tags per word");
  parse->add_option("--oracle-check", p_oracle,
                    "re-parse sentences up to this length by brute force and verify");
  parse->add_option("--workers", p_workers, "parallel sentence workers");
  parse->add_option("--as", p_as, "score with the file's tables under another model id");

  // eval
  auto* eval = app.add_subcommand("eval", "score a parsed corpus against gold");
  std::string e_gold, e_system, e_model, e_report;
  eval->add_option("--gold", e_gold, "gold corpus")->required();
  eval->add_option("--system", e_system, "system output")->required();
  eval->add_option("--model-file", e_model, "model for unknown-word and search-error columns");
  eval->add_option("--report", e_report, "write the report here instead of stdout");

  // compare
  auto* compare = app.add_subcommand("compare", "Monte Carlo significance test of two outputs");
  std::string c_gold, c_a, c_b;
  long c_iterations = 10000;
  uint64_t c_seed = 1;
  compare->add_option("--gold", c_gold)->required();
  compare->add_option("--system-a", c_a)->required();
  compare->add_option("--system-b", c_b)->required();
  compare->add_option("--iterations", c_iterations, "random coloring passes");
  compare->add_option("--seed", c_seed, "random seed");

  // synth
  auto* synth = app.add_subcommand("synth", "sample a corpus from a generative model");
  std::string s_model, s_out;
  long s_sentences = 100;
  int s_cap = 10;
  uint64_t s_seed = 1;
  synth->add_option("--model-file", s_model)->required();
  synth->add_option("--sentences", s_sentences, "number of sentences");
  synth->add_option("--length-cap", s_cap, "redraw sentences longer than this");
  synth->add_option("--seed", s_seed, "random seed");
  synth->add_option("--out", s_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (show_config) {
    std::cout << dk_version() << "\n"
              << "train: model=C distance=0 skip-threshold=0\n"
              << "parse: exact (beam=0) oracle-check=0 workers=1\n"
              << "compare: iterations=10000 seed=1\n"
              << "synth: sentences=100 length-cap=10 seed=1\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  if (*train) {
    CorpusPtr in{read_or_die(t_in, true)};
    CorpusPtr attenuated;
    if (!t_protect.empty()) {
      CorpusPtr protect{read_or_die(t_protect, false)};
      attenuated.p = dk_corpus_attenuate(in.p, protect.p);
    } else {
      attenuated.p = dk_corpus_attenuate(in.p, nullptr);
    }
    if (!attenuated.p) die_api(DK_EDATA);
    ModelPtr m{dk_model_train(attenuated.p, t_model.c_str(), t_distance ? 1 : 0, t_skip)};
    if (!m.p) die_api(DK_EDATA);
    if (int rc = dk_model_save(m.p, t_out.c_str()); rc != DK_OK) die_api(rc);
    std::cout << "trained " << dk_model_name(m.p) << " on " << dk_corpus_sentences(in.p)
              << " sentences\n";
    std::cout << dk_model_summary(m.p);
    return 0;
  }

  if (*parse) {
    ModelPtr m{load_or_die(p_model)};
    if (!p_as.empty()) {
      dk_model* as = dk_model_as(m.p, p_as.c_str(), 0);
      if (!as) die_api(DK_EUSAGE);
      dk_model_free(m.p);
      m.p = as;
    }
    CorpusPtr in{read_or_die(p_in, false)};
    CorpusPtr tt;
    if (!p_true_tags.empty()) tt.p = read_or_die(p_true_tags, false);
    if (p_exact) p_beam = 0;
    dk_parse_stats stats{};
    CorpusPtr out;
    out.p = dk_parse(m.p, in.p, p_beam, tt.p, p_oracle, p_workers, &stats);
    if (!out.p) die_api(DK_EDATA);
    if (int rc = dk_corpus_write(out.p, p_out.c_str()); rc != DK_OK) die_api(rc);
    std::cout << "parsed " << stats.sentences << " sentences";
    if (p_beam > 0) std::cout << ", pruning occurred in " << stats.pruned_sentences;
    if (p_oracle > 0)
      std::cout << ", oracle-checked " << stats.oracle_checked << " (mismatches "
                << stats.oracle_mismatches << ")";
    std::cout << "\n";
    if (stats.oracle_mismatches > 0)
      die(kExitInternal, "oracle check failed: chart and brute force disagree");
    return 0;
  }

  if (*eval) {
    CorpusPtr gold{read_or_die(e_gold, true)};
    CorpusPtr system{read_or_die(e_system, false)};
    ModelPtr m;
    if (!e_model.empty()) m.p = load_or_die(e_model);
    ReportPtr rep;
    rep.p = dk_evaluate(gold.p, system.p, m.p);
    if (!rep.p) die_api(DK_EDATA);
    if (e_report.empty()) {
      std::cout << dk_report_text(rep.p);
    } else {
      std::ofstream out(e_report);
      if (!out) die(kExitData, "cannot write report to " + e_report);
      out << dk_report_text(rep.p);
    }
    return 0;
  }

  if (*compare) {
    CorpusPtr gold{read_or_die(c_gold, true)};
    CorpusPtr a{read_or_die(c_a, false)};
    CorpusPtr b{read_or_die(c_b, false)};
    dk_significance sig{};
    if (int rc = dk_compare(gold.p, a.p, b.p, c_iterations, c_seed, &sig); rc != DK_OK)
      die_api(rc);
    std::printf("mu %.6f\np %.6f\niterations %ld\nseed %llu\n", sig.mu, sig.p_value,
                sig.iterations, static_cast<unsigned long long>(sig.seed));
    return 0;
  }

  if (*synth) {
    ModelPtr m{load_or_die(s_model)};
    CorpusPtr out;
    out.p = dk_synthesize(m.p, s_sentences, s_cap, s_seed);
    if (!out.p) die_api(DK_EDATA);
    if (int rc = dk_corpus_write(out.p, s_out.c_str()); rc != DK_OK) die_api(rc);
    std::cout << "sampled " << dk_corpus_sentences(out.p) << " sentences\n";
    return 0;
  }

  return kExitUsage;
}
