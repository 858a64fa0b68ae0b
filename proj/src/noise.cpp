#include "legalner/noise.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "legalner/error.hpp"
#include "legalner/metrics.hpp"
#include "legalner/rng.hpp"
#include "legalner/taggers.hpp"
#include "legalner/tokens.hpp"
#include "legalner/unicode.hpp"

namespace legalner {

namespace {

constexpr std::pair<std::uint8_t, std::string_view> kOperationNames[] = {
    {kSubstitute, "substitute"}, {kDelete, "delete"}, {kInsert, "insert"}, {kSwapAdjacent, "swap"}};

bool word_aligned(std::span<const TokenOffsets> tokens, const CharSpan& span) {
  bool start = false, end = false;
  for (const auto& t : tokens) {
    start = start || t.start == span.start;
    end = end || t.end == span.end;
  }
  return start && end;
}

}  // namespace

std::string noise_operations_name(std::uint8_t ops) {
  std::string out;
  for (const auto& [bit, name] : kOperationNames) {
    if (!(ops & bit)) continue;
    if (!out.empty()) out += '+';
    out += name;
  }
  return out.empty() ? "none" : out;
}

std::uint8_t parse_noise_operations(std::string_view text) {
  std::uint8_t ops = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find_first_of("+,", pos);
    if (next == std::string_view::npos) next = text.size();
    const std::string_view part = text.substr(pos, next - pos);
    if (part == "all") {
      ops |= kAllNoiseOperations;
    } else if (part == "swap-adjacent") {
      ops |= kSwapAdjacent;
    } else if (part != "none" && !part.empty()) {
      bool found = false;
      for (const auto& [bit, name] : kOperationNames) {
        if (part == name) {
          ops |= bit;
          found = true;
        }
      }
      if (!found) throw ParameterError("unknown noise operation '" + std::string(part) + "'");
    }
    pos = next + 1;
  }
  return ops;
}

std::u32string default_noise_charset() { return U"abcčćdđefghijklmnoprsštuvzž"; }

void validate(const NoiseSpec& spec) {
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0)) throw ParameterError("noise rate must lie in [0, 1]");
  if (spec.operations & ~kAllNoiseOperations) throw ParameterError("unknown noise operation bits");
  if (spec.rate > 0.0 && spec.operations == 0) throw ParameterError("noise rate > 0 needs at least one operation");
  if (spec.charset.empty() && (spec.operations & (kSubstitute | kInsert)))
    throw ParameterError("substitute/insert noise needs a non-empty charset");
}

std::vector<Edit> draw_edits(const Sentence& sentence, const NoiseSpec& spec) {
  validate(spec);
  const std::u32string text = unicode::decode(sentence.text);
  const std::size_t n = text.size();

  std::vector<bool> locked(n, false);
  if (spec.protect_entities) {
    const auto words = whitespace_words(text);
    for (const CharSpan& s : sentence.spans) {
      for (const auto& w : words) {
        if (w.end <= s.start || w.start >= s.end) continue;
        const std::size_t a = w.start > 0 ? w.start - 1 : 0, b = std::min(n, w.end + 1);
        std::fill(locked.begin() + static_cast<std::ptrdiff_t>(a), locked.begin() + static_cast<std::ptrdiff_t>(b), true);
      }
    }
  }
  std::vector<bool> boundary(n + 1, false);
  for (const CharSpan& s : sentence.spans) boundary[s.start] = boundary[s.end] = true;

  std::vector<Edit::Kind> kinds;
  if (spec.operations & kSubstitute) kinds.push_back(Edit::Kind::Substitute);
  if (spec.operations & kDelete) kinds.push_back(Edit::Kind::Delete);
  if (spec.operations & kInsert) kinds.push_back(Edit::Kind::Insert);
  if (spec.operations & kSwapAdjacent) kinds.push_back(Edit::Kind::Swap);

  Rng rng(spec.seed);
  std::vector<Edit> edits;
  if (kinds.empty() || spec.rate <= 0.0) return edits;
  for (std::size_t i = 0; i < n; ++i) {
    if (locked[i] || rng.unit() >= spec.rate) continue;
    const Edit::Kind kind = kinds[static_cast<std::size_t>(rng.below(kinds.size()))];
    switch (kind) {
      case Edit::Kind::Substitute: {
        std::u32string choices;
        for (char32_t c : spec.charset)
          if (c != text[i]) choices.push_back(c);
        if (choices.empty()) break;
        edits.push_back({kind, i, choices[static_cast<std::size_t>(rng.below(choices.size()))]});
        break;
      }
      case Edit::Kind::Delete:
        edits.push_back({kind, i, 0});
        break;
      case Edit::Kind::Insert:
        edits.push_back({kind, i, spec.charset[static_cast<std::size_t>(rng.below(spec.charset.size()))]});
        break;
      case Edit::Kind::Swap:
        if (i + 1 >= n || locked[i + 1] || boundary[i + 1] || text[i] == text[i + 1]) break;
        edits.push_back({kind, i, 0});
        ++i;
        break;
    }
  }
  return edits;
}

NoisySentence apply_edits(const Sentence& sentence, std::span<const Edit> edits) {
  NoisySentence out;
  if (edits.empty()) {
    out.sentence = sentence;
    return out;
  }
  const std::u32string text = unicode::decode(sentence.text);
  const std::size_t n = text.size();
  for (std::size_t e = 0; e < edits.size(); ++e) {
    const std::size_t limit = edits[e].kind == Edit::Kind::Swap ? edits[e].position + 1 : edits[e].position;
    if (limit >= n) throw ParameterError("noise edit beyond the end of the sentence");
    if (e > 0) {
      const Edit& prev = edits[e - 1];
      const std::size_t prev_last = prev.kind == Edit::Kind::Swap ? prev.position + 1 : prev.position;
      if (edits[e].position <= prev_last) throw ParameterError("noise edits must be sorted and non-overlapping");
    }
  }

  std::u32string noisy;
  std::vector<std::size_t> image_start(n), image_end(n);
  std::size_t e = 0;
  for (std::size_t i = 0; i < n; ++i) {
    image_start[i] = noisy.size();
    if (e < edits.size() && edits[e].position == i) {
      const Edit& edit = edits[e++];
      switch (edit.kind) {
        case Edit::Kind::Substitute: noisy.push_back(edit.ch); break;
        case Edit::Kind::Delete: ++out.deletions; break;
        case Edit::Kind::Insert:
          noisy.push_back(edit.ch);
          noisy.push_back(text[i]);
          ++out.insertions;
          break;
        case Edit::Kind::Swap:
          noisy.push_back(text[i + 1]);
          noisy.push_back(text[i]);
          image_start[i + 1] = image_start[i];
          image_end[i] = image_end[i + 1] = noisy.size();
          ++i;
          continue;
      }
    } else {
      noisy.push_back(text[i]);
    }
    image_end[i] = noisy.size();
  }

  const auto clean_tokens = word_tokenize(text);
  const auto noisy_tokens = word_tokenize(noisy);
  out.sentence.text = unicode::encode(noisy);
  for (const CharSpan& span : sentence.spans) {
    auto drop = [&](const std::string& why) {
      out.dropped.push_back(span);
      out.warnings.push_back("span [" + std::to_string(span.start) + ", " + std::to_string(span.end) + ") " +
                             std::string(wire_name(span.entity)) + " dropped: " + why);
    };
    CharSpan moved{image_start[span.start], image_end[span.end - 1], span.entity};
    if (moved.start >= moved.end) {
      drop("all characters deleted");
      continue;
    }
    auto trimmed = trim_span(noisy, moved);
    if (!trimmed) {
      drop("nothing left after trimming");
      continue;
    }
    moved = *trimmed;
    if (word_aligned(clean_tokens, span)) {
      std::size_t a = moved.end, b = moved.start;
      for (const auto& t : noisy_tokens) {
        if (t.end <= moved.start || t.start >= moved.end) continue;
        a = std::min(a, t.start);
        b = std::max(b, t.end);
      }
      if (a < b) moved = {a, b, span.entity};
    }
    if (!out.sentence.spans.empty() && moved.start < out.sentence.spans.back().end) {
      drop("overlaps the previous span after noise");
      continue;
    }
    out.sentence.spans.push_back(moved);
  }
  return out;
}

NoisySentence inject_noise(const Sentence& sentence, const NoiseSpec& spec) {
  const auto edits = draw_edits(sentence, spec);
  return apply_edits(sentence, edits);
}

NoisyCorpus inject_noise(const Corpus& corpus, const NoiseSpec& spec) {
  validate(spec);
  NoisyCorpus out;
  out.corpus = corpus;
  std::uint64_t j = 0;
  for (Document& doc : out.corpus.documents) {
    for (std::size_t s = 0; s < doc.sentences.size(); ++s, ++j) {
      NoiseSpec local = spec;
      local.seed = derive_seed(spec.seed, "noise", j);
      NoisySentence noisy = inject_noise(doc.sentences[s], local);
      out.dropped_spans += noisy.dropped.size();
      for (auto& w : noisy.warnings)
        out.warnings.push_back("document '" + doc.id + "', sentence " + std::to_string(s) + ": " + w);
      doc.sentences[s] = std::move(noisy.sentence);
    }
  }
  return out;
}

namespace {

double entity_f1(const TaggerModel& model, const Corpus& corpus) {
  EntityScorer scorer;
  for (const Document& doc : corpus.documents)
    for (const Sentence& s : doc.sentences) scorer.add(s.spans, model.predict(s).spans);
  return scorer.overall().f1();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<RobustnessRow> robustness_eval(const TaggerModel& model, const Corpus& corpus,
                                           std::span<const NoiseSpec> grid) {
  for (const NoiseSpec& spec : grid) validate(spec);
  const double clean = entity_f1(model, corpus);
  std::vector<RobustnessRow> rows;
  for (const NoiseSpec& spec : grid) {
    RobustnessRow row;
    row.spec = spec;
    row.clean_f1 = clean;
    const NoisyCorpus noisy = inject_noise(corpus, spec);
    row.dropped_spans = noisy.dropped_spans;
    row.noisy_f1 = entity_f1(model, noisy.corpus);
    row.delta_f1 = row.noisy_f1 - row.clean_f1;
    rows.push_back(row);
  }
  return rows;
}

std::string robustness_csv(std::span<const RobustnessRow> rows) {
  std::ostringstream out;
  out << "operations,rate,seed,clean_f1,noisy_f1,delta_f1\n";
  for (const RobustnessRow& r : rows) {
    std::ostringstream rate;
    rate << r.spec.rate;
    out << noise_operations_name(r.spec.operations) << ',' << rate.str() << ',' << r.spec.seed << ','
        << fixed(r.clean_f1, 6) << ',' << fixed(r.noisy_f1, 6) << ',' << fixed(r.delta_f1, 6) << '\n';
  }
  return out.str();
}

std::vector<NoiseSpec> parse_noise_grid(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json.begin(), json.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("noise grid: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("noise grid: expected an array of noise specs");
  std::vector<NoiseSpec> grid;
  try {
    for (const auto& item : j) {
      NoiseSpec spec;
      spec.operations = parse_noise_operations(item.value("operations", std::string("all")));
      spec.rate = item.at("rate").get<double>();
      spec.seed = item.value("seed", std::uint64_t{0});
      spec.protect_entities = item.value("protect_entities", false);
      if (item.contains("charset")) spec.charset = unicode::decode(item["charset"].get<std::string>());
      validate(spec);
      grid.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("noise grid: ") + e.what());
  }
  return grid;
}

}  // namespace legalner
