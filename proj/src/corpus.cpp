#include "legalner/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "legalner/error.hpp"
#include "legalner/unicode.hpp"

namespace legalner {

namespace {

constexpr std::array<std::string_view, kEntityTypeCount> kWireNames = {
    "COURT", "DATE", "DECISION", "LAW", "MONEY", "OFFICIAL_GAZETTE", "PERSON", "REFERENCE"};
constexpr std::array<std::string_view, kEntityTypeCount> kDisplayNames = {
    "Court", "Date", "Decision", "Law", "Money", "OfficialGazette", "Person", "Reference"};

std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

const nlohmann::json& member(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, std::string("missing key \"") + key + "\"");
  return *it;
}

std::size_t offset_value(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number_unsigned()) {
    if (v.is_number_integer()) schema_error(path, "negative offset");
    schema_error(path, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string location(const Document& doc, std::size_t sentence) {
  return "document '" + doc.id + "', sentence " + std::to_string(sentence);
}

}  // namespace

std::string_view wire_name(EntityType t) { return kWireNames[index_of(t)]; }
std::string_view display_name(EntityType t) { return kDisplayNames[index_of(t)]; }

std::optional<EntityType> parse_entity_type(std::string_view name) {
  const std::string up = ascii_upper(name);
  for (EntityType t : kEntityTypes) {
    if (up == wire_name(t) || up == ascii_upper(display_name(t))) return t;
  }
  if (up == "O.GAZETTE" || up == "OFFICIALGAZETTE" || up == "OFFICIAL GAZETTE") return EntityType::OfficialGazette;
  return std::nullopt;
}

Script Corpus::script() const {
  for (const auto& d : documents)
    if (d.script == Script::Cyrillic) return Script::Cyrillic;
  return Script::Latin;
}

std::size_t Corpus::sentence_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.sentences.size();
  return n;
}

const Document* Corpus::find(std::string_view id) const {
  for (const auto& d : documents)
    if (d.id == id) return &d;
  return nullptr;
}

std::string_view violation_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::EmptySpan: return "empty span";
    case ViolationKind::EndExceedsLength: return "end exceeds length";
    case ViolationKind::LeadingWhitespace: return "leading whitespace";
    case ViolationKind::TrailingWhitespace: return "trailing whitespace";
    case ViolationKind::LeadingPunctuation: return "leading punctuation";
    case ViolationKind::TrailingPunctuation: return "trailing punctuation";
    case ViolationKind::Unsorted: return "unsorted";
    case ViolationKind::Overlap: return "overlap";
    case ViolationKind::LineBreak: return "line break in sentence";
  }
  return "unknown";
}

std::vector<SpanViolation> validate_spans(const Sentence& sentence) {
  std::vector<SpanViolation> out;
  auto report = [&](ViolationKind k, std::size_t i) { out.push_back({k, i, std::string(violation_name(k))}); };
  const std::u32string text = unicode::decode(sentence.text);
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (unicode::is_line_break(text[i])) {
      report(ViolationKind::LineBreak, i);
      break;
    }
  }
  for (std::size_t i = 0; i < sentence.spans.size(); ++i) {
    const CharSpan& s = sentence.spans[i];
    if (s.start >= s.end) {
      report(ViolationKind::EmptySpan, i);
    } else if (s.end > text.size()) {
      report(ViolationKind::EndExceedsLength, i);
    } else {
      const char32_t first = text[s.start], last = text[s.end - 1];
      if (unicode::is_space(first)) report(ViolationKind::LeadingWhitespace, i);
      else if (unicode::is_punct(first)) report(ViolationKind::LeadingPunctuation, i);
      if (unicode::is_space(last)) report(ViolationKind::TrailingWhitespace, i);
      else if (unicode::is_punct(last)) report(ViolationKind::TrailingPunctuation, i);
    }
    if (i > 0) {
      const CharSpan& prev = sentence.spans[i - 1];
      if (s.start < prev.start) report(ViolationKind::Unsorted, i);
      else if (s.start < prev.end) report(ViolationKind::Overlap, i);
    }
  }
  return out;
}

std::optional<CharSpan> trim_span(std::u32string_view text, CharSpan span) {
  span.end = std::min(span.end, text.size());
  while (span.start < span.end && unicode::is_trim(text[span.start])) ++span.start;
  while (span.end > span.start && unicode::is_trim(text[span.end - 1])) --span.end;
  if (span.start >= span.end) return std::nullopt;
  return span;
}

Corpus parse_corpus(std::string_view json, const ParseOptions& options) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json.begin(), json.end());
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = line_column(json, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(std::string("malformed JSON: ") + e.what(), line, col);
  }
  const auto& docs = member(root, "documents", "$");
  if (!docs.is_array()) schema_error("$.documents", "expected an array");

  Corpus corpus;
  std::set<std::string> ids;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const std::string dpath = "$.documents[" + std::to_string(d) + "]";
    const auto& jd = docs[d];
    Document doc;
    const auto& jid = member(jd, "id", dpath);
    if (!jid.is_string()) schema_error(dpath + ".id", "expected a string");
    doc.id = jid.get<std::string>();
    const auto& jscript = member(jd, "script", dpath);
    if (jscript == "cyr") doc.script = Script::Cyrillic;
    else if (jscript == "lat") doc.script = Script::Latin;
    else schema_error(dpath + ".script", "expected \"cyr\" or \"lat\"");
    if (!ids.insert(doc.id).second) throw ValidationError("duplicate document id '" + doc.id + "'");

    const auto& jsents = member(jd, "sentences", dpath);
    if (!jsents.is_array()) schema_error(dpath + ".sentences", "expected an array");
    for (std::size_t s = 0; s < jsents.size(); ++s) {
      const std::string spath = dpath + ".sentences[" + std::to_string(s) + "]";
      const auto& js = jsents[s];
      Sentence sent;
      const auto& jtext = member(js, "text", spath);
      if (!jtext.is_string()) schema_error(spath + ".text", "expected a string");
      sent.text = jtext.get<std::string>();
      const auto& jspans = member(js, "spans", spath);
      if (!jspans.is_array()) schema_error(spath + ".spans", "expected an array");
      for (std::size_t k = 0; k < jspans.size(); ++k) {
        const std::string kpath = spath + ".spans[" + std::to_string(k) + "]";
        CharSpan span;
        span.start = offset_value(member(jspans[k], "start", kpath), kpath + ".start");
        span.end = offset_value(member(jspans[k], "end", kpath), kpath + ".end");
        const auto& jtype = member(jspans[k], "type", kpath);
        if (!jtype.is_string()) schema_error(kpath + ".type", "expected a string");
        auto type = jtype.get<std::string>();
        bool found = false;
        for (EntityType t : kEntityTypes) {
          if (type == wire_name(t)) {
            span.entity = t;
            found = true;
          }
        }
        if (!found) schema_error(kpath + ".type", "unknown entity type \"" + type + "\"");
        sent.spans.push_back(span);
      }

      std::u32string text;
      try {
        text = unicode::decode(sent.text);
      } catch (const ParseError& e) {
        schema_error(spath + ".text", e.what());
      }
      for (const auto& v : validate_spans(sent)) {
        if (v.kind == ViolationKind::LineBreak) {
          if (options.allow_multiline) continue;
          throw ValidationError(location(doc, s) + ": " + v.message);
        }
        throw ValidationError(location(doc, s) + ", span " + std::to_string(v.span_index) + ": " + v.message);
      }
      if (doc.script == Script::Latin &&
          std::any_of(text.begin(), text.end(), [](char32_t c) { return unicode::is_cyrillic(c); }))
        throw ValidationError(location(doc, s) + ": Cyrillic text in a document marked \"lat\"");
      doc.sentences.push_back(std::move(sent));
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

std::string serialize_corpus(const Corpus& corpus) {
  nlohmann::ordered_json docs = nlohmann::ordered_json::array();
  for (const auto& d : corpus.documents) {
    nlohmann::ordered_json jd;
    jd["id"] = d.id;
    jd["script"] = d.script == Script::Cyrillic ? "cyr" : "lat";
    jd["sentences"] = nlohmann::ordered_json::array();
    for (const auto& s : d.sentences) {
      nlohmann::ordered_json js;
      js["text"] = s.text;
      js["spans"] = nlohmann::ordered_json::array();
      for (const auto& sp : s.spans) {
        nlohmann::ordered_json jsp;
        jsp["start"] = sp.start;
        jsp["end"] = sp.end;
        jsp["type"] = wire_name(sp.entity);
        js["spans"].push_back(std::move(jsp));
      }
      jd["sentences"].push_back(std::move(js));
    }
    docs.push_back(std::move(jd));
  }
  nlohmann::ordered_json root;
  root["documents"] = std::move(docs);
  return root.dump(2, ' ', false) + "\n";
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << data;
}

}  // namespace

Corpus load_corpus(const std::string& path, const ParseOptions& options) { return parse_corpus(read_file(path), options); }

void save_corpus(const Corpus& corpus, const std::string& path) { write_file(path, serialize_corpus(corpus)); }

std::string to_plain_text(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus.documents)
    for (const auto& s : d.sentences) {
      out += s.text;
      out += '\n';
    }
  return out;
}

std::size_t drop_unannotated(Corpus& corpus) {
  std::size_t dropped = 0;
  for (auto& d : corpus.documents) {
    auto it = std::remove_if(d.sentences.begin(), d.sentences.end(), [](const Sentence& s) { return s.spans.empty(); });
    dropped += static_cast<std::size_t>(d.sentences.end() - it);
    d.sentences.erase(it, d.sentences.end());
  }
  return dropped;
}

std::string span_text(std::string_view utf8, std::size_t start, std::size_t end) {
  const std::u32string text = unicode::decode(utf8);
  end = std::min(end, text.size());
  start = std::min(start, end);
  return unicode::encode(std::u32string_view(text).substr(start, end - start));
}

}  // namespace legalner
