#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "legalner/corpus.hpp"
#include "legalner/cross_validation.hpp"
#include "legalner/electra.hpp"
#include "legalner/error.hpp"
#include "legalner/labels.hpp"
#include "legalner/noise.hpp"
#include "legalner/partition.hpp"
#include "legalner/reports.hpp"
#include "legalner/rng.hpp"
#include "legalner/segment.hpp"
#include "legalner/taggers.hpp"
#include "legalner/tokens.hpp"
#include "legalner/transliterate.hpp"
#include "legalner/unicode.hpp"
#include "legalner/wordpiece.hpp"

namespace fs = std::filesystem;
using namespace legalner;
using ojson = nlohmann::ordered_json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kParseFailure = 2,
  kValidationFailure = 3,
  kParameterFailure = 4,
  kFoldFailure = 5,
  kNoDocuments = 6,
};

struct NoDocuments : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

struct Globals {
  std::uint64_t seed = 0;
  std::string scheme = "BIO";
  std::size_t k = 5;
  int p = 1;
  std::size_t jobs = 1;
  std::string config;
};

TagScheme scheme_of(const Globals& g) {
  auto s = parse_scheme(g.scheme);
  if (!s) throw ParameterError("unknown tagging scheme '" + g.scheme + "'");
  return *s;
}

Corpus load_nonempty(const std::string& path, const ParseOptions& options = {}) {
  const std::string text = read_file(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw NoDocuments("'" + path + "' is empty");
  Corpus c = parse_corpus(text, options);
  if (c.documents.empty()) throw NoDocuments("'" + path + "' contains no documents");
  return c;
}

ojson corpus_stats(const Corpus& corpus, TagScheme scheme) {
  std::array<std::size_t, kEntityTypeCount> per_type{};
  std::size_t spans = 0;
  for (const Document& d : corpus.documents)
    for (const Sentence& s : d.sentences)
      for (const CharSpan& sp : s.spans) {
        ++per_type[index_of(sp.entity)];
        ++spans;
      }
  ojson j;
  j["documents"] = corpus.documents.size();
  j["sentences"] = corpus.sentence_count();
  j["spans"] = spans;
  j["per_type"] = ojson::object();
  for (EntityType t : kEntityTypes) j["per_type"][std::string(display_name(t))] = per_type[index_of(t)];
  const auto inventory = label_inventory(corpus, scheme);
  j["scheme"] = scheme_name(scheme);
  j["label_inventory_size"] = inventory.size();
  j["labels"] = ojson::array();
  for (const Label& l : inventory) j["labels"].push_back(l.str());
  return j;
}

std::vector<std::string> split_command(const std::string& command) {
  std::istringstream in(command);
  std::vector<std::string> argv;
  for (std::string part; in >> part;) argv.push_back(part);
  return argv;
}

struct TaggerArgs {
  std::string kind = "dictionary";
  std::size_t epochs = 10;
  std::string adapter;
  bool adapter_gold = false;
  long long timeout_ms = 30000;

  TaggerSpec spec(TagScheme scheme) const {
    TaggerSpec t;
    if (kind == "dictionary") t.kind = TaggerKind::Dictionary;
    else if (kind == "linear") t.kind = TaggerKind::Linear;
    else if (kind == "external") t.kind = TaggerKind::External;
    else throw ParameterError("unknown tagger '" + kind + "'");
    t.epochs = epochs;
    if (t.kind == TaggerKind::External) {
      t.external.command = split_command(adapter);
      if (t.external.command.empty()) throw ParameterError("--tagger external needs --adapter");
      t.external.send_gold = adapter_gold;
      t.external.timeout = std::chrono::milliseconds(timeout_ms);
      t.external.scheme = scheme;
    }
    return t;
  }
};

void add_tagger_options(CLI::App* cmd, TaggerArgs& t) {
  cmd->add_option("--tagger", t.kind, "dictionary, linear or external")->check(CLI::IsMember({"dictionary", "linear", "external"}));
  cmd->add_option("--epochs", t.epochs, "perceptron epochs");
  cmd->add_option("--adapter", t.adapter, "external tagger command line");
  cmd->add_flag("--adapter-gold", t.adapter_gold, "send gold spans to the adapter");
  cmd->add_option("--adapter-timeout-ms", t.timeout_ms, "per-sentence adapter timeout");
}

// Config keys fill options that were not given on the command line.
void apply_config(CLI::App& app, const std::string& path) {
  const auto config = nlohmann::json::parse(read_file(path));
  if (!config.is_object()) throw ParseError("config: expected a JSON object");
  auto fill = [&](CLI::App* scope, const nlohmann::json& obj) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) continue;
      CLI::Option* opt = nullptr;
      try {
        opt = scope->get_option("--" + key);
      } catch (const CLI::OptionNotFound&) {
        std::string dashed = key;
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        try {
          opt = scope->get_option("--" + dashed);
        } catch (const CLI::OptionNotFound&) {
          continue;
        }
      }
      if (opt->count() > 0) continue;
      std::vector<std::string> results;
      if (value.is_string()) results.push_back(value.get<std::string>());
      else if (value.is_boolean()) results.push_back(value.get<bool>() ? "true" : "false");
      else results.push_back(value.dump());
      opt->clear();
      opt->add_result(results);
      opt->run_callback();
    }
  };
  fill(&app, config);
  for (CLI::App* sub : app.get_subcommands()) {
    fill(sub, config);
    if (config.contains(sub->get_name()) && config[sub->get_name()].is_object()) fill(sub, config[sub->get_name()]);
  }
}

Partition load_or_build_partition(const std::string& path, const Corpus& corpus, const Globals& g) {
  if (!path.empty()) {
    Partition p = partition_from_json(read_file(path));
    check_partition(p, corpus);
    return p;
  }
  PartitionOptions opts;
  opts.k = g.k;
  opts.p = g.p;
  opts.seed = derive_seed(g.seed, "partition");
  return stratified_partition(corpus, opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus preparation and evaluation toolkit for legal-domain NER"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--scheme", g.scheme, "tagging scheme: IO, BIO, IOE, IOBES, BIES, IE");
  app.add_option("--k", g.k, "number of partition subsets");
  app.add_option("--p", g.p, "distance norm for clustering (1 or 2)");
  app.add_option("--jobs", g.jobs, "worker threads");
  app.add_option("--config", g.config, "JSON config file; flags win");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate, transliterate and segment an annotation file");
  std::string ingest_in, ingest_out, ingest_stats, ingest_text;
  bool keep_unannotated = false, no_resegment = false;
  ingest->add_option("input", ingest_in, "annotation JSON")->required();
  ingest->add_option("--out", ingest_out, "normalized corpus output");
  ingest->add_option("--stats", ingest_stats, "statistics JSON output (default: stdout)");
  ingest->add_option("--text", ingest_text, "plain text output, one sentence per line");
  ingest->add_flag("--keep-unannotated", keep_unannotated, "keep sentences without spans");
  ingest->add_flag("--no-resegment", no_resegment, "keep the input sentence boundaries");

  // partition
  auto* part = app.add_subcommand("partition", "stratified K-subset document partition");
  std::string part_in, part_out = "-", part_balance;
  part->add_option("corpus", part_in)->required();
  part->add_option("--out", part_out, "partition JSON");
  part->add_option("--balance", part_balance, "per-subset category counts CSV");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "K-fold cross-validation of a tagger");
  std::string eval_in, eval_partition, eval_grid, eval_out = "results";
  bool no_dedup = false;
  TaggerArgs eval_tagger;
  eval->add_option("corpus", eval_in)->required();
  eval->add_option("--partition", eval_partition, "partition JSON (default: build one)");
  eval->add_option("--noise-grid", eval_grid, "noise grid JSON for a robustness table");
  eval->add_option("--out-dir", eval_out, "output directory");
  eval->add_flag("--no-dedup", no_dedup, "keep duplicate sentences inside subsets");
  add_tagger_options(eval, eval_tagger);

  // train
  auto* train = app.add_subcommand("train", "train a tagger on a whole corpus and save it");
  std::string train_in, train_out;
  TaggerArgs train_tagger_args;
  train->add_option("corpus", train_in)->required();
  train->add_option("--out", train_out, "model file")->required();
  add_tagger_options(train, train_tagger_args);

  // robustness
  auto* robust = app.add_subcommand("robustness", "clean vs noisy entity F1");
  std::string robust_in, robust_model, robust_grid, robust_out = "-";
  TaggerArgs robust_tagger;
  robust->add_option("corpus", robust_in)->required();
  robust->add_option("--model", robust_model, "saved model (default: train on the corpus)");
  robust->add_option("--noise-grid", robust_grid, "noise grid JSON")->required();
  robust->add_option("--out", robust_out, "degradation CSV");
  add_tagger_options(robust, robust_tagger);

  // losses
  auto* losses = app.add_subcommand("losses", "replaced-token-detection losses for a batch");
  std::string losses_in;
  losses->add_option("batch", losses_in, "batch JSON")->required();

  // export-conll
  auto* conll = app.add_subcommand("export-conll", "CoNLL TSV export, word or WordPiece level");
  std::string conll_in, conll_vocab, conll_out = "-", conll_build;
  conll->add_option("corpus", conll_in)->required();
  conll->add_option("--vocab", conll_vocab, "WordPiece vocabulary (one piece per line)");
  conll->add_option("--build-vocab", conll_build, "build a vocabulary from the corpus and write it here");
  conll->add_option("--out", conll_out, "output file");

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "macro averages of a per-class metrics table");
  std::string agg_in;
  bool recompute = false;
  agg->add_option("table", agg_in, "CSV with Class,Recall,Precision,Accuracy,F1")->required();
  agg->add_flag("--recompute-f1", recompute, "rebuild each F1 from its precision and recall");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParameterFailure;
  }

  try {
    if (!g.config.empty()) apply_config(app, g.config);
    const TagScheme scheme = scheme_of(g);
    if (g.k < 2) throw ParameterError("--k must be at least 2");
    if (g.jobs < 1) throw ParameterError("--jobs must be at least 1");

    if (*ingest) {
      ParseOptions po;
      po.allow_multiline = true;
      Corpus corpus = transliterate(load_nonempty(ingest_in, po));
      if (!no_resegment) {
        for (Document& d : corpus.documents) d = segment_document(d);
      } else {
        for (const Document& d : corpus.documents)
          for (const Sentence& s : d.sentences)
            for (char32_t c : unicode::decode(s.text))
              if (unicode::is_line_break(c))
                throw ValidationError("document '" + d.id + "': line break in sentence (drop --no-resegment)");
      }
      std::size_t dropped = keep_unannotated ? 0 : drop_unannotated(corpus);
      ojson stats = corpus_stats(corpus, scheme);
      stats["unannotated_dropped"] = dropped;
      if (!ingest_out.empty()) save_corpus(corpus, ingest_out);
      if (!ingest_text.empty()) write_file(ingest_text, to_plain_text(corpus));
      write_file(ingest_stats.empty() ? "-" : ingest_stats, stats.dump(2) + "\n");
      return kOk;
    }

    if (*part) {
      const Corpus corpus = load_nonempty(part_in);
      const Partition p = load_or_build_partition("", corpus, g);
      write_file(part_out, partition_to_json(p));
      if (!part_balance.empty()) write_file(part_balance, balance_csv(balance_report(p, corpus)));
      return kOk;
    }

    if (*eval) {
      const Corpus corpus = load_nonempty(eval_in);
      const Partition p = load_or_build_partition(eval_partition, corpus, g);
      const TaggerSpec spec = eval_tagger.spec(scheme);
      CrossValidationOptions cv;
      cv.scheme = scheme;
      cv.seed = derive_seed(g.seed, "cross-validation");
      cv.jobs = g.jobs;
      cv.deduplicate = !no_dedup;
      const CrossValidationReport report = cross_validate(corpus, p, spec, cv);
      fs::create_directories(eval_out);
      const fs::path dir(eval_out);
      write_file((dir / "partition.json").string(), partition_to_json(p));
      write_file((dir / "report.json").string(), report_to_json(report));
      write_file((dir / "metrics.csv").string(), metrics_table_csv(report.pooled));
      write_file((dir / "confusion.csv").string(), confusion_csv(report.pooled_confusion.compact()));
      for (const FoldReport& f : report.folds)
        if (!f.ok) std::cerr << "fold " << f.fold + 1 << " failed: " << f.error << "\n";

      if (!eval_grid.empty()) {
        // robustness on the first fold: trained on the other subsets, tested on subset 1
        const auto grid = parse_noise_grid(read_file(eval_grid));
        const auto subsets = deduplicate_subsets(p, corpus);
        std::vector<Sentence> train_sentences;
        for (std::size_t j = 1; j < subsets.size(); ++j)
          for (const Document& d : subsets[j].documents)
            train_sentences.insert(train_sentences.end(), d.sentences.begin(), d.sentences.end());
        auto model = train_tagger(spec, train_sentences, {}, scheme, derive_seed(g.seed, "robustness/tagger"));
        const auto rows = robustness_eval(*model, subsets[0], grid);
        write_file((dir / "robustness.csv").string(), robustness_csv(rows));
      }

      ojson summary;
      summary["pooled_macro_f1"] = report.pooled.macro.f1;
      summary["pooled_entity_f1"] = report.pooled_entities.overall().f1();
      summary["failed_folds"] = 0;
      for (const FoldReport& f : report.folds) summary["failed_folds"] = summary["failed_folds"].get<int>() + (f.ok ? 0 : 1);
      std::cout << summary.dump(2) << "\n";
      return report.all_ok() ? kOk : kFoldFailure;
    }

    if (*train) {
      const Corpus corpus = load_nonempty(train_in);
      std::vector<Sentence> sentences;
      for (const Document& d : corpus.documents) sentences.insert(sentences.end(), d.sentences.begin(), d.sentences.end());
      auto model = train_tagger(train_tagger_args.spec(scheme), sentences, {}, scheme, derive_seed(g.seed, "train"));
      save_model(*model, train_out);
      return kOk;
    }

    if (*robust) {
      const Corpus corpus = load_nonempty(robust_in);
      std::unique_ptr<TaggerModel> model;
      if (!robust_model.empty()) {
        model = load_model(robust_model);
      } else {
        std::vector<Sentence> sentences;
        for (const Document& d : corpus.documents) sentences.insert(sentences.end(), d.sentences.begin(), d.sentences.end());
        model = train_tagger(robust_tagger.spec(scheme), sentences, {}, scheme, derive_seed(g.seed, "train"));
      }
      auto grid = parse_noise_grid(read_file(robust_grid));
      write_file(robust_out, robustness_csv(robustness_eval(*model, corpus, grid)));
      return kOk;
    }

    if (*losses) {
      const ElectraBatch batch = parse_electra_batch(read_file(losses_in));
      const LossValue lg = generator_loss(batch);
      ojson j;
      j["generator"] = lg.value;
      j["discriminator"] = discriminator_loss(batch);
      j["combined"] = combined_loss(batch);
      j["unmarked_masked_position"] = lg.unmarked_masked_position;
      if (lg.unmarked_masked_position) std::cerr << "warning: a masked position has y = 0\n";
      std::cout << j.dump(2) << "\n";
      return kOk;
    }

    if (*conll) {
      const Corpus corpus = load_nonempty(conll_in);
      if (!conll_build.empty()) write_file(conll_build, build_vocab(corpus).serialize());
      if (conll_vocab.empty() && conll_build.empty()) {
        write_file(conll_out, to_conll(corpus, scheme));
        return kOk;
      }
      const Vocab vocab = conll_vocab.empty() ? build_vocab(corpus) : Vocab::load(conll_vocab);
      std::string out;
      for (const Document& d : corpus.documents)
        for (const Sentence& s : d.sentences)
          for (const auto& chunk : chunk_sequences(align_labels_to_tokens(wordpiece_tokenize(s.text, vocab), s.spans, scheme), vocab))
            out += to_conll(chunk);
      write_file(conll_out, out);
      return kOk;
    }

    if (*agg) {
      const auto rows = parse_metrics_table(read_file(agg_in));
      const Averages a = aggregate_rows(rows, recompute);
      std::cout << "Class,Recall,Precision,Accuracy,F1\n"
                << "Average," << format_fixed(a.recall, 2) << ',' << format_fixed(a.precision, 2) << ','
                << format_fixed(a.accuracy, 2) << ',' << format_fixed(a.f1, 2) << '\n';
      std::cerr << "unrounded: recall " << format_fixed(a.recall, 4) << ", precision " << format_fixed(a.precision, 4)
                << ", accuracy " << format_fixed(a.accuracy, 4) << ", f1 " << format_fixed(a.f1, 4) << "\n";
      return kOk;
    }
  } catch (const NoDocuments& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoDocuments;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const ModelFormatError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kParameterFailure;
  } catch (const AlignmentError& e) {
    std::cerr << "alignment error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kOk;
}
