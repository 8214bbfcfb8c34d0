// DocAMR command line: build document-level AMR graphs from sentence AMRs
// plus coreference annotations, inject text-based coreference predictions,
// and score document graph pairs with provenance-constrained Smatch.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "docamr/builder.hpp"
#include "docamr/document.hpp"
#include "docamr/errors.hpp"
#include "docamr/injector.hpp"
#include "docamr/penman.hpp"
#include "docamr/smatch.hpp"
#include "docamr/synthetic.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

using namespace docamr;

struct GlobalOpts {
  bool json = false;
  bool quiet = false;
  bool timing = false;
  int threads = 0;  // 0 = hardware concurrency
  std::string data_dir;
};

std::string fmt4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string jesc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write file: " + path);
  out << content;
}

struct Manifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::string mode;
  std::uint64_t seed = 0;
  bool has_seed = false;
  long long elapsed_ms = 0;
};

std::string manifest_json(const Manifest& m, int indent) {
  std::string pad(indent, ' ');
  std::string inner(indent + 2, ' ');
  std::string out = "{\n";
  out += inner + "\"tool\": \"docamr\",\n";
  out += inner + "\"version\": \"" + std::string(kVersion) + "\",\n";
  out += inner + "\"schema_version\": " + std::to_string(kSchemaVersion) +
         ",\n";
  out += inner + "\"subcommand\": \"" + jesc(m.subcommand) + "\",\n";
  out += inner + "\"inputs\": {";
  for (size_t i = 0; i < m.inputs.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + jesc(m.inputs[i].first) + "\": \"" +
           jesc(m.inputs[i].second) + "\"";
  }
  out += "},\n";
  if (!m.mode.empty()) out += inner + "\"mode\": \"" + m.mode + "\",\n";
  if (m.has_seed) out += inner + "\"seed\": " + std::to_string(m.seed) + ",\n";
  out += inner + "\"elapsed_ms\": " + std::to_string(m.elapsed_ms) + "\n";
  out += pad + "}";
  return out;
}

PronounLexicon load_lexicon(const GlobalOpts& g) {
  std::string dir = g.data_dir;
  if (dir.empty()) {
    const char* env = std::getenv("DOCAMR_DATA");
    if (env) dir = env;
  }
  if (dir.empty()) return PronounLexicon::builtin();
  return PronounLexicon::load(dir + "/pronouns.tsv");
}

EntityTypeOntology load_ontology(const GlobalOpts& g) {
  std::string dir = g.data_dir;
  if (dir.empty()) {
    const char* env = std::getenv("DOCAMR_DATA");
    if (env) dir = env;
  }
  if (dir.empty()) return EntityTypeOntology::builtin();
  return EntityTypeOntology::load(dir + "/entity-types.tsv");
}

Document load_doc(const std::string& amr_path, const std::string& coref_path) {
  if (coref_path.empty()) return load_document_no_annotation(amr_path);
  return load_document(amr_path, coref_path);
}

std::vector<DocGraph> load_doc_graphs(const std::string& path) {
  std::vector<DocGraph> out;
  for (const AmrGraph& g : parse_penman_file(path))
    out.push_back(doc_graph_from_penman(g));
  return out;
}

// --------------------------------------------------------------------------
// evaluate

std::string score_block(const SmatchResult& r, int indent) {
  std::string pad(indent, ' ');
  std::string out;
  out += pad + "\"precision\": " + fmt4(r.precision()) + ",\n";
  out += pad + "\"recall\": " + fmt4(r.recall()) + ",\n";
  out += pad + "\"f1\": " + fmt4(r.f1()) + ",\n";
  out += pad + "\"coref\": {\"precision\": " + fmt4(r.coref_precision()) +
         ", \"recall\": " + fmt4(r.coref_recall()) +
         ", \"f1\": " + fmt4(r.coref_f1()) + "}";
  return out;
}

std::string evaluate_report_json(const CorpusResult& res,
                                 const SearchConfig& cfg, const Manifest& man,
                                 bool timing) {
  std::string out = "{\n";
  out += score_block(res.total, 2) + ",\n";
  out += "  \"per_doc\": [\n";
  for (size_t i = 0; i < res.per_doc.size(); ++i) {
    out += "    {\"id\": \"" + jesc(res.per_doc[i].id) + "\",\n";
    out += score_block(res.per_doc[i].result, 5) + "}";
    out += i + 1 < res.per_doc.size() ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"seed\": " + std::to_string(cfg.seed) + ",\n";
  out += "  \"restarts\": " + std::to_string(cfg.restarts) + ",\n";
  long long elapsed =
      timing ? static_cast<long long>(res.total.elapsed_ms + 0.5) : 0;
  out += "  \"elapsed_ms\": " + std::to_string(elapsed) + ",\n";
  out += "  \"manifest\": " + manifest_json(man, 2) + "\n";
  out += "}\n";
  return out;
}

void print_evaluate_text(const CorpusResult& res, const SearchConfig& cfg) {
  const SmatchResult& t = res.total;
  std::cout << "smatch  precision " << fmt4(t.precision()) << "  recall "
            << fmt4(t.recall()) << "  f1 " << fmt4(t.f1()) << "\n";
  std::cout << "coref   precision " << fmt4(t.coref_precision())
            << "  recall " << fmt4(t.coref_recall()) << "  f1 "
            << fmt4(t.coref_f1()) << "\n";
  std::cout << "docs " << res.per_doc.size() << "  seed " << cfg.seed
            << "  restarts " << cfg.restarts
            << (cfg.constrained ? "  constrained" : "") << "\n";
}

struct EvaluateArgs {
  std::string gold, pred;
  bool constrained = false;
  int restarts = 4;
  std::uint64_t seed = 0;
  int exact_max = 0;  // 0 = always hill climb
};

CorpusResult run_evaluate(const EvaluateArgs& args, const GlobalOpts& g) {
  std::vector<DocGraph> gold = load_doc_graphs(args.gold);
  std::vector<DocGraph> pred = load_doc_graphs(args.pred);
  SearchConfig cfg;
  cfg.restarts = args.restarts;
  cfg.seed = args.seed;
  cfg.constrained = args.constrained;
  if (args.exact_max > 0) {
    // Exact scoring where feasible; sized for test-scale graphs.
    cfg.max_exact_nodes = args.exact_max;
    if (gold.size() != pred.size())
      throw UsageError("corpus size mismatch between gold and pred");
    CorpusResult out;
    for (size_t i = 0; i < gold.size(); ++i) {
      if (gold[i].graph.id != pred[i].graph.id)
        throw UsageError("document id mismatch at position " +
                         std::to_string(i));
      TripleSet gold_ts = extract_triples(gold[i]);
      TripleSet pred_ts = extract_triples(pred[i]);
      auto [mapping, res] = exact_match(pred_ts, gold_ts, cfg);
      out.per_doc.push_back({gold[i].graph.id, res});
      out.total.matched += res.matched;
      out.total.source_triples += res.source_triples;
      out.total.target_triples += res.target_triples;
      out.total.coref_correct += res.coref_correct;
      out.total.coref_source += res.coref_source;
      out.total.coref_target += res.coref_target;
      out.total.elapsed_ms += res.elapsed_ms;
    }
    return out;
  }
  return score_corpus(gold, pred, cfg, g.threads);
}

// --------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::vector<int> sizes = {2, 10, 30};
  int docs_per_size = 2;
  std::uint64_t seed = 7;
  int restarts = 4;
  std::string gold, pred;  // optional user-supplied corpus
};

int run_bench(const BenchArgs& args, const GlobalOpts& g) {
  struct Row {
    std::string id;
    int sentences;
    double t_constrained;
    double t_unconstrained;
    double f1_constrained;
    double f1_unconstrained;
  };
  std::vector<Row> rows;

  auto bench_pair = [&](const DocGraph& gold, const DocGraph& pred,
                        int sentences) {
    TripleSet gold_ts = extract_triples(gold);
    TripleSet pred_ts = extract_triples(pred);
    SearchConfig cfg;
    cfg.restarts = args.restarts;
    cfg.seed = args.seed;
    cfg.constrained = false;
    auto [m_u, res_u] = hill_climb(pred_ts, gold_ts, cfg);
    cfg.constrained = true;
    auto [m_c, res_c] = hill_climb(pred_ts, gold_ts, cfg);
    rows.push_back({gold.graph.id, sentences, res_c.elapsed_ms,
                    res_u.elapsed_ms, res_c.f1(), res_u.f1()});
  };

  if (!args.gold.empty()) {
    std::vector<DocGraph> gold = load_doc_graphs(args.gold);
    std::vector<DocGraph> pred = load_doc_graphs(args.pred);
    if (gold.size() != pred.size())
      throw UsageError("bench corpus size mismatch");
    for (size_t i = 0; i < gold.size(); ++i)
      bench_pair(gold[i], pred[i], gold[i].num_sentences);
  } else {
    Rng rng{args.seed};
    for (int size : args.sizes) {
      for (int d = 0; d < args.docs_per_size; ++d) {
        GenOptions opts;
        opts.min_sentences = size;
        opts.max_sentences = size;
        opts.min_nodes = 4;
        opts.max_nodes = 7;
        opts.max_chains = std::max(1, size / 3);
        Document doc = random_document(
            rng, opts,
            "bench." + std::to_string(size) + "." + std::to_string(d));
        DocGraph gold = build(doc, BuildMode::kDocamr);
        PerturbOptions popts;
        DocGraph pred = perturb_doc_graph(gold, rng, popts);
        bench_pair(gold, pred, size);
      }
    }
  }

  bool parity_ok = true;
  for (const Row& r : rows)
    if (r.f1_constrained < r.f1_unconstrained - 1e-9) parity_ok = false;

  if (g.json) {
    std::string out = "{\n  \"rows\": [\n";
    for (size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      out += "    {\"id\": \"" + jesc(r.id) + "\", \"sentences\": " +
             std::to_string(r.sentences) +
             ", \"constrained_ms\": " + fmt4(r.t_constrained) +
             ", \"unconstrained_ms\": " + fmt4(r.t_unconstrained) +
             ", \"speedup\": " +
             fmt4(r.t_constrained > 0 ? r.t_unconstrained / r.t_constrained
                                      : 0.0) +
             ", \"f1_constrained\": " + fmt4(r.f1_constrained) +
             ", \"f1_unconstrained\": " + fmt4(r.f1_unconstrained) + "}";
      out += i + 1 < rows.size() ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += std::string("  \"parity\": ") + (parity_ok ? "true" : "false") +
           ",\n";
    out += "  \"seed\": " + std::to_string(args.seed) + "\n}\n";
    std::cout << out;
  } else {
    std::printf("%-14s %5s %14s %16s %8s %8s %8s\n", "doc", "sents",
                "constrained/ms", "unconstrained/ms", "speedup", "f1(c)",
                "f1(u)");
    for (const Row& r : rows)
      std::printf("%-14s %5d %14.2f %16.2f %7.2fx %8s %8s\n", r.id.c_str(),
                  r.sentences, r.t_constrained, r.t_unconstrained,
                  r.t_constrained > 0 ? r.t_unconstrained / r.t_constrained
                                      : 0.0,
                  fmt4(r.f1_constrained).c_str(),
                  fmt4(r.f1_unconstrained).c_str());
  }
  if (!parity_ok) {
    std::cerr << "docamr: error: benchmark: constrained f1 fell below "
                 "unconstrained f1\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DocAMR: document-level AMR construction and evaluation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_flag("--json", g.json, "emit machine-readable JSON output");
  app.add_flag("--quiet", g.quiet, "suppress warnings");
  app.add_flag("--timing", g.timing,
               "include measured elapsed_ms in JSON reports");
  app.add_option("--threads", g.threads, "worker threads (0 = auto)");
  app.add_option("--data-dir", g.data_dir,
                 "directory with pronouns.tsv and entity-types.tsv "
                 "(overrides DOCAMR_DATA)");

  // build
  auto* cmd_build = app.add_subcommand(
      "build", "build a document-level graph from sentence AMRs");
  std::string amr_path, coref_path, out_path = "-", mode_name = "docamr";
  cmd_build->add_option("--amr", amr_path, "sentence AMR PENMAN file")
      ->required();
  cmd_build->add_option("--coref", coref_path,
                        "annotation JSON (chains, implicit roles, bridging)");
  cmd_build->add_option("--mode", mode_name,
                        "docamr | merge-all | no-coref | no-merge");
  cmd_build->add_option("--out", out_path, "output file ('-' for stdout)");

  // stats
  auto* cmd_stats = app.add_subcommand(
      "stats", "merge-operation counters for a docamr build");
  std::string stats_amr, stats_coref;
  cmd_stats->add_option("--amr", stats_amr, "sentence AMR PENMAN file")
      ->required();
  cmd_stats->add_option("--coref", stats_coref, "annotation JSON")->required();

  // evaluate
  auto* cmd_eval =
      app.add_subcommand("evaluate", "score predicted vs gold document graphs");
  EvaluateArgs eval_args;
  cmd_eval->add_option("--gold", eval_args.gold, "gold document PENMAN file")
      ->required();
  cmd_eval->add_option("--pred", eval_args.pred,
                       "predicted document PENMAN file")
      ->required();
  cmd_eval->add_flag("--constrained", eval_args.constrained,
                     "restrict candidates by sentence provenance");
  cmd_eval->add_option("--restarts", eval_args.restarts,
                       "hill-climbing restarts (default 4)");
  cmd_eval->add_option("--seed", eval_args.seed, "random seed");
  cmd_eval->add_option("--exact-max", eval_args.exact_max,
                       "use the exact solver for documents whose smaller "
                       "side has at most N nodes (0 = never)");

  // inject-coref
  auto* cmd_inject = app.add_subcommand(
      "inject-coref",
      "project text mention clusters onto AMR nodes via span alignment");
  std::string inj_amr, inj_mentions, inj_out = "-";
  cmd_inject->add_option("--amr", inj_amr, "sentence AMR PENMAN file")
      ->required();
  cmd_inject->add_option("--mentions", inj_mentions, "mention clusters JSON")
      ->required();
  cmd_inject->add_option("--out", inj_out, "annotation JSON output");

  // pipeline
  auto* cmd_pipe = app.add_subcommand(
      "pipeline", "inject-coref + build docamr + evaluate in one run");
  std::string pipe_amr, pipe_mentions, pipe_gold;
  EvaluateArgs pipe_eval;
  cmd_pipe->add_option("--amr", pipe_amr, "sentence AMR PENMAN file")
      ->required();
  cmd_pipe->add_option("--mentions", pipe_mentions, "mention clusters JSON")
      ->required();
  cmd_pipe->add_option("--gold", pipe_gold, "gold document PENMAN file")
      ->required();
  cmd_pipe->add_flag("--constrained", pipe_eval.constrained,
                     "restrict candidates by sentence provenance");
  cmd_pipe->add_option("--restarts", pipe_eval.restarts, "restarts");
  cmd_pipe->add_option("--seed", pipe_eval.seed, "random seed");

  // bench
  auto* cmd_bench = app.add_subcommand(
      "bench", "constrained vs unconstrained scoring wall-times");
  BenchArgs bench_args;
  cmd_bench->add_option("--sizes", bench_args.sizes,
                        "sentence counts for synthetic documents")
      ->delimiter(',');
  cmd_bench->add_option("--docs-per-size", bench_args.docs_per_size,
                        "documents per size");
  cmd_bench->add_option("--seed", bench_args.seed, "generator seed");
  cmd_bench->add_option("--restarts", bench_args.restarts, "restarts");
  cmd_bench->add_option("--gold", bench_args.gold,
                        "user-supplied gold corpus (optional)");
  cmd_bench->add_option("--pred", bench_args.pred,
                        "user-supplied predicted corpus (optional)");

  CLI11_PARSE(app, argc, argv);

  auto t0 = std::chrono::steady_clock::now();
  auto elapsed_now = [&]() {
    return static_cast<long long>(
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count() +
        0.5);
  };

  try {
    if (cmd_build->parsed()) {
      Document doc = load_doc(amr_path, coref_path);
      BuildMode mode = parse_build_mode(mode_name);
      DocGraph dg = build(doc, mode, load_lexicon(g), load_ontology(g));
      write_file(out_path, print_penman(dg.graph));
      if (g.json) {
        Manifest man{"build",
                     {{"amr", amr_path},
                      {"coref", coref_path},
                      {"out", out_path}},
                     build_mode_name(mode)};
        man.elapsed_ms = g.timing ? elapsed_now() : 0;
        std::cout << "{\n  \"manifest\": " << manifest_json(man, 2)
                  << "\n}\n";
      }
      return 0;
    }

    if (cmd_stats->parsed()) {
      Document doc = load_doc(stats_amr, stats_coref);
      DocGraph dg =
          build(doc, BuildMode::kDocamr, load_lexicon(g), load_ontology(g));
      StatsReport report = chain_statistics(doc, dg);
      if (g.json) {
        const BuildStats& s = report.stats;
        std::string out = "{\n";
        out += "  \"doc_id\": \"" + jesc(report.doc_id) + "\",\n";
        out += "  \"nodes_in_chains\": " + std::to_string(s.nodes_in_chains) +
               ",\n";
        out += "  \"pronouns_in_chains\": " +
               std::to_string(s.pronouns_in_chains) + ",\n";
        out += "  \"pronouns_merged_into\": {\"pronoun\": " +
               std::to_string(s.pronouns_into_pronoun) +
               ", \"interlocutor_entity\": " +
               std::to_string(s.pronouns_into_interlocutor) +
               ", \"other_node\": " +
               std::to_string(s.pronouns_into_other_node) +
               ", \"coref_entity\": " +
               std::to_string(s.pronouns_into_coref_entity) + "},\n";
        out += "  \"nes_in_chains\": " + std::to_string(s.nes_in_chains) +
               ",\n";
        out += "  \"nes_after_merge\": " + std::to_string(s.nes_after_merge) +
               ",\n";
        Manifest man{"stats",
                     {{"amr", stats_amr}, {"coref", stats_coref}},
                     "docamr"};
        man.elapsed_ms = g.timing ? elapsed_now() : 0;
        out += "  \"manifest\": " + manifest_json(man, 2) + "\n}\n";
        std::cout << out;
      } else {
        std::cout << stats_report_json(report);
      }
      return 0;
    }

    if (cmd_eval->parsed()) {
      CorpusResult res = run_evaluate(eval_args, g);
      SearchConfig cfg;
      cfg.restarts = eval_args.restarts;
      cfg.seed = eval_args.seed;
      cfg.constrained = eval_args.constrained;
      if (g.json) {
        Manifest man{"evaluate",
                     {{"gold", eval_args.gold}, {"pred", eval_args.pred}},
                     eval_args.constrained ? "constrained" : "unconstrained"};
        man.seed = cfg.seed;
        man.has_seed = true;
        man.elapsed_ms = g.timing ? elapsed_now() : 0;
        std::cout << evaluate_report_json(res, cfg, man, g.timing);
      } else {
        print_evaluate_text(res, cfg);
      }
      return 0;
    }

    if (cmd_inject->parsed()) {
      std::vector<AmrGraph> sentences = parse_penman_file(inj_amr);
      MentionFile mentions = parse_mentions_json(read_file(inj_mentions));
      InjectResult result = assign_mentions(
          sentences, mentions.clusters,
          mentions.doc_id.empty() ? "doc" : mentions.doc_id);
      if (!g.quiet)
        for (const std::string& w : result.warnings)
          std::cerr << "docamr: warning: " << w << "\n";
      write_file(inj_out, serialize_annotation_json(result.annotation));
      if (g.json) {
        Manifest man{"inject-coref",
                     {{"amr", inj_amr},
                      {"mentions", inj_mentions},
                      {"out", inj_out}},
                     ""};
        man.elapsed_ms = g.timing ? elapsed_now() : 0;
        std::cout << "{\n  \"total_mentions\": " << result.total_mentions
                  << ",\n  \"assigned_mentions\": "
                  << result.assigned_mentions
                  << ",\n  \"dropped_mentions\": " << result.dropped_mentions
                  << ",\n  \"chains\": " << result.annotation.chains.size()
                  << ",\n  \"manifest\": " << manifest_json(man, 2)
                  << "\n}\n";
      }
      return 0;
    }

    if (cmd_pipe->parsed()) {
      std::vector<AmrGraph> sentences;
      InjectResult injected;
      try {
        sentences = parse_penman_file(pipe_amr);
        MentionFile mentions = parse_mentions_json(read_file(pipe_mentions));
        injected = assign_mentions(
            sentences, mentions.clusters,
            mentions.doc_id.empty() ? "doc" : mentions.doc_id);
        if (!g.quiet)
          for (const std::string& w : injected.warnings)
            std::cerr << "docamr: warning: " << w << "\n";
      } catch (const std::exception& e) {
        throw UsageError(std::string("inject-coref stage: ") + e.what());
      }

      DocGraph pred;
      try {
        Document doc = make_document(std::move(sentences),
                                     std::move(injected.annotation));
        pred = build(doc, BuildMode::kDocamr, load_lexicon(g),
                     load_ontology(g));
      } catch (const std::exception& e) {
        throw UsageError(std::string("build stage: ") + e.what());
      }

      try {
        std::vector<DocGraph> gold = load_doc_graphs(pipe_gold);
        if (gold.size() != 1)
          throw UsageError("pipeline expects exactly one gold document");
        pred.graph.id = gold[0].graph.id;  // id-align the single pair
        SearchConfig cfg;
        cfg.restarts = pipe_eval.restarts;
        cfg.seed = pipe_eval.seed;
        cfg.constrained = pipe_eval.constrained;
        CorpusResult res = score_corpus({gold[0]}, {pred}, cfg, g.threads);
        if (g.json) {
          Manifest man{"pipeline",
                       {{"amr", pipe_amr},
                        {"mentions", pipe_mentions},
                        {"gold", pipe_gold}},
                       pipe_eval.constrained ? "constrained"
                                             : "unconstrained"};
          man.seed = cfg.seed;
          man.has_seed = true;
          man.elapsed_ms = g.timing ? elapsed_now() : 0;
          std::cout << evaluate_report_json(res, cfg, man, g.timing);
        } else {
          print_evaluate_text(res, cfg);
        }
      } catch (const UsageError&) {
        throw;
      } catch (const std::exception& e) {
        throw UsageError(std::string("evaluate stage: ") + e.what());
      }
      return 0;
    }

    if (cmd_bench->parsed()) return run_bench(bench_args, g);
  } catch (const UsageError& e) {
    std::cerr << "docamr: error: usage: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "docamr: error: parse: " << e.what() << "\n";
    return 1;
  } catch (const GraphError& e) {
    std::cerr << "docamr: error: graph: " << e.what() << "\n";
    return 1;
  } catch (const IngestError& e) {
    std::cerr << "docamr: error: ingest: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "docamr: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
