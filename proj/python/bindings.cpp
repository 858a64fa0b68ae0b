#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "legalner/corpus.hpp"
#include "legalner/cross_validation.hpp"
#include "legalner/electra.hpp"
#include "legalner/error.hpp"
#include "legalner/kmeans.hpp"
#include "legalner/labels.hpp"
#include "legalner/metrics.hpp"
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

namespace py = pybind11;
using namespace legalner;

namespace {

using PySpan = std::tuple<std::size_t, std::size_t, std::string>;
using PyToken = std::pair<std::size_t, std::size_t>;

TagScheme to_scheme(const std::string& name) {
  auto s = parse_scheme(name);
  if (!s) throw ParameterError("unknown tagging scheme '" + name + "'");
  return *s;
}

std::vector<CharSpan> to_spans(const std::vector<PySpan>& spans) {
  std::vector<CharSpan> out;
  for (const auto& [start, end, type] : spans) {
    auto t = parse_entity_type(type);
    if (!t) throw ParameterError("unknown entity type '" + type + "'");
    out.push_back({start, end, *t});
  }
  return out;
}

std::vector<PySpan> from_spans(const std::vector<CharSpan>& spans) {
  std::vector<PySpan> out;
  for (const auto& s : spans) out.emplace_back(s.start, s.end, std::string(wire_name(s.entity)));
  return out;
}

std::vector<TokenOffsets> to_tokens(const std::vector<PyToken>& tokens) {
  std::vector<TokenOffsets> out;
  for (const auto& [a, b] : tokens) out.push_back({a, b});
  return out;
}

std::vector<PyToken> from_tokens(const std::vector<TokenOffsets>& tokens) {
  std::vector<PyToken> out;
  for (const auto& t : tokens) out.emplace_back(t.start, t.end);
  return out;
}

std::vector<Label> to_labels(const std::vector<std::string>& labels) {
  std::vector<Label> out;
  for (const auto& s : labels) {
    auto l = parse_label(s);
    if (!l) throw ParameterError("unknown label '" + s + "'");
    out.push_back(*l);
  }
  return out;
}

std::vector<std::string> from_labels(const std::vector<Label>& labels) {
  std::vector<std::string> out;
  for (const auto& l : labels) out.push_back(l.str());
  return out;
}

py::dict averages_dict(const Averages& a) {
  py::dict d;
  d["recall"] = a.recall;
  d["precision"] = a.precision;
  d["accuracy"] = a.accuracy;
  d["f1"] = a.f1;
  return d;
}

py::dict report_dict(const MetricsReport& r) {
  py::list rows;
  for (const auto& c : r.per_class) {
    py::dict d;
    d["class"] = c.name;
    d["recall"] = c.recall;
    d["precision"] = c.precision;
    d["accuracy"] = c.accuracy;
    d["f1"] = c.f1;
    d["tp"] = c.tp;
    d["fp"] = c.fp;
    d["fn"] = c.fn;
    d["tn"] = c.tn;
    rows.append(d);
  }
  py::dict out;
  out["per_class"] = rows;
  out["macro"] = averages_dict(r.macro);
  out["micro"] = averages_dict(r.micro);
  return out;
}

}  // namespace

PYBIND11_MODULE(_legalner, m) {
  m.doc() = "Corpus preparation and evaluation toolkit for legal-domain NER";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<AlignmentError>(m, "AlignmentError", PyExc_ValueError);
  py::register_exception<ModelFormatError>(m, "ModelFormatError", base.ptr());
  py::register_exception<AdapterError>(m, "AdapterError", base.ptr());

  py::class_<Corpus>(m, "Corpus")
      .def_static("parse", [](const std::string& json, bool allow_multiline) {
        ParseOptions o;
        o.allow_multiline = allow_multiline;
        return parse_corpus(json, o);
      }, py::arg("json"), py::arg("allow_multiline") = false)
      .def_static("load", [](const std::string& path) { return load_corpus(path); })
      .def("to_json", &serialize_corpus)
      .def("transliterated", [](const Corpus& c) { return transliterate(c); })
      .def("segmented", [](const Corpus& c) {
        Corpus out = c;
        for (auto& d : out.documents) d = segment_document(d);
        return out;
      })
      .def_property_readonly("document_ids", [](const Corpus& c) {
        std::vector<std::string> ids;
        for (const auto& d : c.documents) ids.push_back(d.id);
        return ids;
      })
      .def_property_readonly("sentence_count", &Corpus::sentence_count)
      .def("__len__", [](const Corpus& c) { return c.documents.size(); })
      .def("label_inventory", [](const Corpus& c, const std::string& scheme) {
        return from_labels(label_inventory(c, to_scheme(scheme)));
      }, py::arg("scheme") = "BIO");

  m.def("transliterate", [](const std::string& text) { return transliterate(text); });
  m.def("segment_sentences", [](const std::string& text) { return segment_sentences(text); });
  m.def("word_tokenize", [](const std::string& text) { return from_tokens(word_tokenize(unicode::decode(text))); });
  m.def("nfc", &unicode::nfc);

  m.def("encode_labels", [](const std::vector<PyToken>& tokens, const std::vector<PySpan>& spans, const std::string& scheme) {
    return from_labels(encode_labels(to_tokens(tokens), to_spans(spans), to_scheme(scheme)));
  }, py::arg("tokens"), py::arg("spans"), py::arg("scheme") = "BIO");
  m.def("decode_labels", [](const std::vector<std::string>& labels, const std::vector<PyToken>& tokens,
                            const std::string& scheme, bool strict) {
    DecodeOptions o;
    o.mode = strict ? DecodeMode::Strict : DecodeMode::Repair;
    return from_spans(decode_labels(to_labels(labels), to_tokens(tokens), to_scheme(scheme), o));
  }, py::arg("labels"), py::arg("tokens"), py::arg("scheme") = "BIO", py::arg("strict") = false);
  m.def("convert_scheme", [](const std::vector<std::string>& labels, const std::string& from, const std::string& to) {
    return from_labels(convert_scheme(to_labels(labels), to_scheme(from), to_scheme(to)));
  });
  m.def("is_valid", [](const std::vector<std::string>& labels, const std::string& scheme) {
    return is_valid(to_labels(labels), to_scheme(scheme));
  });

  py::class_<Vocab>(m, "Vocab")
      .def(py::init([](std::vector<std::string> pieces) { return Vocab(std::move(pieces)); }))
      .def_static("load", [](const std::string& path) { return Vocab::load(path); })
      .def("__len__", &Vocab::size)
      .def("__contains__", &Vocab::contains);
  m.def("wordpiece_tokenize", [](const std::string& text, const Vocab& vocab) {
    const auto t = wordpiece_tokenize(text, vocab);
    return py::make_tuple(t.pieces, from_tokens(t.offsets));
  });

  m.def("kmeans", [](const std::vector<std::vector<double>>& points, std::size_t k, int p, std::uint64_t seed) {
    KMeansOptions o;
    o.k = k;
    o.p = p;
    o.seed = seed;
    const auto r = kmeans_lp(points, o);
    py::dict d;
    d["assignment"] = r.assignment;
    d["centroids"] = r.centroids;
    d["objective_history"] = r.objective_history;
    d["converged"] = r.converged;
    return d;
  }, py::arg("points"), py::arg("k"), py::arg("p") = 1, py::arg("seed") = 0);

  m.def("stratified_partition", [](const Corpus& corpus, std::size_t k, int p, std::uint64_t seed) {
    PartitionOptions o;
    o.k = k;
    o.p = p;
    o.seed = seed;
    return stratified_partition(corpus, o).subsets;
  }, py::arg("corpus"), py::arg("k") = 5, py::arg("p") = 1, py::arg("seed") = 0);

  m.def("metrics", [](const std::vector<std::string>& gold, const std::vector<std::string>& predicted) {
    const auto g = to_labels(gold), p = to_labels(predicted);
    std::vector<Label> classes(g);
    classes.insert(classes.end(), p.begin(), p.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return report_dict(metrics_report(token_confusion(g, p, classes)));
  });
  m.def("f1_score", &f1_score);
  m.def("aggregate_table", [](const std::string& csv, bool recompute_f1) {
    const auto rows = parse_metrics_table(csv);
    return averages_dict(aggregate_rows(rows, recompute_f1));
  }, py::arg("csv"), py::arg("recompute_f1") = false);

  m.def("electra_losses", [](const std::string& batch_json) {
    const auto b = parse_electra_batch(batch_json);
    const auto g = generator_loss(b);
    py::dict d;
    d["generator"] = g.value;
    d["discriminator"] = discriminator_loss(b);
    d["combined"] = combined_loss(b);
    d["unmarked_masked_position"] = g.unmarked_masked_position;
    return d;
  });

  m.def("inject_noise", [](const std::string& text, const std::vector<PySpan>& spans, double rate,
                           const std::string& operations, std::uint64_t seed, bool protect_entities) {
    NoiseSpec spec;
    spec.rate = rate;
    spec.operations = parse_noise_operations(operations);
    spec.seed = seed;
    spec.protect_entities = protect_entities;
    const auto noisy = inject_noise(Sentence{text, to_spans(spans)}, spec);
    return py::make_tuple(noisy.sentence.text, from_spans(noisy.sentence.spans));
  }, py::arg("text"), py::arg("spans"), py::arg("rate"), py::arg("operations") = "all", py::arg("seed") = 0,
     py::arg("protect_entities") = false);

  m.def("cross_validate", [](const Corpus& corpus, const std::string& tagger, std::size_t k, std::uint64_t seed,
                             const std::string& scheme, std::size_t epochs) {
    PartitionOptions po;
    po.k = k;
    po.seed = derive_seed(seed, "partition");
    const Partition p = stratified_partition(corpus, po);
    TaggerSpec spec;
    if (tagger == "dictionary") spec.kind = TaggerKind::Dictionary;
    else if (tagger == "linear") spec.kind = TaggerKind::Linear;
    else throw ParameterError("unknown tagger '" + tagger + "'");
    spec.epochs = epochs;
    CrossValidationOptions cv;
    cv.scheme = to_scheme(scheme);
    cv.seed = derive_seed(seed, "cross-validation");
    CrossValidationReport r;
    {
      py::gil_scoped_release release;
      r = cross_validate(corpus, p, spec, cv);
    }
    py::dict d = report_dict(r.pooled);
    d["entity_f1"] = r.pooled_entities.overall().f1();
    d["all_ok"] = r.all_ok();
    d["report_json"] = report_to_json(r);
    return d;
  }, py::arg("corpus"), py::arg("tagger") = "dictionary", py::arg("k") = 5, py::arg("seed") = 0,
     py::arg("scheme") = "BIO", py::arg("epochs") = 10);
}
