#include "legalner/labels.hpp"

#include <algorithm>
#include <set>

#include "legalner/error.hpp"
#include "legalner/unicode.hpp"

namespace legalner {

namespace {

constexpr std::array<std::string_view, 6> kSchemeNames = {"IO", "BIO", "IOE", "IOBES", "IE", "BIES"};

char prefix_char(Prefix p) {
  switch (p) {
    case Prefix::O: return 'O';
    case Prefix::B: return 'B';
    case Prefix::I: return 'I';
    case Prefix::E: return 'E';
    case Prefix::S: return 'S';
  }
  return '?';
}

bool is_ioe_family(TagScheme s) { return s == TagScheme::IOE || s == TagScheme::IE; }
bool is_iobes_family(TagScheme s) { return s == TagScheme::IOBES || s == TagScheme::BIES; }

bool same_entity(const Label& a, const Label& b) { return !a.is_outside() && !b.is_outside() && a.entity() == b.entity(); }

std::string at(std::size_t i) { return " at position " + std::to_string(i); }

}  // namespace

std::string_view scheme_name(TagScheme scheme) { return kSchemeNames[static_cast<std::size_t>(scheme)]; }

std::optional<TagScheme> parse_scheme(std::string_view name) {
  std::string up(name);
  for (char& c : up)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  if (up == "IOB" || up == "IOB2") return TagScheme::BIO;
  if (up == "BIOES" || up == "BILOU") return TagScheme::IOBES;
  for (std::size_t i = 0; i < kSchemeNames.size(); ++i)
    if (up == kSchemeNames[i]) return static_cast<TagScheme>(i);
  return std::nullopt;
}

std::string Label::str() const {
  if (is_outside()) return "O";
  std::string out(1, prefix_char(prefix_));
  out += '-';
  out += display_name(entity_);
  return out;
}

std::size_t Label::rank() const {
  if (is_outside()) return 0;
  const std::size_t p = static_cast<std::size_t>(prefix_) - 1;  // B=0, I=1, E=2, S=3
  return 1 + p * kEntityTypeCount + index_of(entity_);
}

Label label_from_rank(std::size_t rank) {
  if (rank == 0) return Label::outside();
  if (rank >= kLabelRankCount) throw ParameterError("label rank out of range");
  const std::size_t r = rank - 1;
  return Label(static_cast<Prefix>(r / kEntityTypeCount + 1), kEntityTypes[r % kEntityTypeCount]);
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "O" || text == "o") return Label::outside();
  if (text.size() < 3 || text[1] != '-') return std::nullopt;
  Prefix prefix;
  switch (text[0]) {
    case 'B': case 'b': prefix = Prefix::B; break;
    case 'I': case 'i': prefix = Prefix::I; break;
    case 'E': case 'e': prefix = Prefix::E; break;
    case 'S': case 's': prefix = Prefix::S; break;
    default: return std::nullopt;
  }
  auto type = parse_entity_type(text.substr(2));
  if (!type) return std::nullopt;
  return Label(prefix, *type);
}

bool scheme_allows(TagScheme scheme, Prefix prefix) {
  switch (prefix) {
    case Prefix::O: return true;
    case Prefix::I: return true;
    case Prefix::B: return scheme == TagScheme::BIO || is_iobes_family(scheme);
    case Prefix::E: return is_ioe_family(scheme) || is_iobes_family(scheme);
    case Prefix::S: return is_iobes_family(scheme);
  }
  return false;
}

std::vector<Label> scheme_labels(TagScheme scheme) {
  std::vector<Label> out;
  for (std::size_t r = 0; r < kLabelRankCount; ++r) {
    Label l = label_from_rank(r);
    if (scheme_allows(scheme, l.prefix())) out.push_back(l);
  }
  return out;
}

bool allowed_start(TagScheme scheme, const Label& first) {
  if (!scheme_allows(scheme, first.prefix())) return false;
  switch (scheme) {
    case TagScheme::BIO: return first.prefix() != Prefix::I;
    case TagScheme::IOBES:
    case TagScheme::BIES: return first.prefix() != Prefix::I && first.prefix() != Prefix::E;
    default: return true;
  }
}

bool allowed_transition(TagScheme scheme, const Label& prev, const Label& next) {
  if (!scheme_allows(scheme, prev.prefix()) || !scheme_allows(scheme, next.prefix())) return false;
  switch (scheme) {
    case TagScheme::IO: return true;
    case TagScheme::BIO:
      return next.prefix() != Prefix::I || (same_entity(prev, next) && prev.prefix() != Prefix::O);
    case TagScheme::IOBES:
    case TagScheme::BIES: {
      const bool open = prev.prefix() == Prefix::B || prev.prefix() == Prefix::I;
      const bool continues = next.prefix() == Prefix::I || next.prefix() == Prefix::E;
      return open ? (continues && same_entity(prev, next)) : !continues;
    }
    case TagScheme::IE:
      if (prev.prefix() == Prefix::I) return next.prefix() != Prefix::O && same_entity(prev, next);
      return true;
    case TagScheme::IOE:
      if (prev.prefix() == Prefix::E) return next.prefix() != Prefix::O && same_entity(prev, next);
      return true;
  }
  return false;
}

bool allowed_end(TagScheme scheme, const Label& last) {
  if (!scheme_allows(scheme, last.prefix())) return false;
  switch (scheme) {
    case TagScheme::IOBES:
    case TagScheme::BIES: return last.prefix() != Prefix::B && last.prefix() != Prefix::I;
    case TagScheme::IE: return last.prefix() != Prefix::I;
    case TagScheme::IOE: return last.prefix() != Prefix::E;
    default: return true;
  }
}

std::optional<std::string> grammar_violation(std::span<const Label> labels, TagScheme scheme) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label& l = labels[i];
    if (!scheme_allows(scheme, l.prefix()))
      return "tag " + l.str() + " not allowed in " + std::string(scheme_name(scheme)) + at(i);
    const bool ok = i == 0 ? allowed_start(scheme, l) : allowed_transition(scheme, labels[i - 1], l);
    if (ok) continue;
    if (i > 0 && (is_iobes_family(scheme) || scheme == TagScheme::IE)) {
      const Prefix p = labels[i - 1].prefix();
      const bool open = p == Prefix::I || (is_iobes_family(scheme) && p == Prefix::B);
      if (open) return "unterminated entity" + at(i - 1);
    }
    if (i > 0 && scheme == TagScheme::IOE && labels[i - 1].prefix() == Prefix::E)
      return "E- tag not followed by a same-type entity" + at(i - 1);
    if (l.prefix() == Prefix::E) return "orphan E- tag" + at(i);
    return "orphan I- tag" + at(i);
  }
  if (!labels.empty() && !allowed_end(scheme, labels.back())) {
    if (scheme == TagScheme::IOE) return "E- tag not followed by a same-type entity" + at(labels.size() - 1);
    return "unterminated entity" + at(labels.size() - 1);
  }
  return std::nullopt;
}

std::vector<Label> encode_labels(std::span<const TokenOffsets> tokens, std::span<const CharSpan> spans,
                                 TagScheme scheme) {
  struct Segment {
    std::size_t first, last;
    EntityType type;
  };
  std::vector<Segment> segments;
  segments.reserve(spans.size());
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const CharSpan& s = spans[k];
    auto describe = [&] {
      return "span " + std::to_string(k) + " [" + std::to_string(s.start) + "," + std::to_string(s.end) + ") " +
             std::string(display_name(s.entity));
    };
    if (s.start >= s.end) throw ParameterError(describe() + " is empty");
    if (k > 0 && s.start < spans[k - 1].end) throw ParameterError(describe() + " overlaps or precedes the previous span");
    auto a = std::partition_point(tokens.begin(), tokens.end(), [&](const TokenOffsets& t) { return t.end <= s.start; });
    if (a == tokens.end() || a->start >= s.end) throw AlignmentError(describe() + " covers no token");
    const std::size_t ai = static_cast<std::size_t>(a - tokens.begin());
    if (a->start != s.start)
      throw AlignmentError(describe() + " starts inside token " + std::to_string(ai) + " [" + std::to_string(a->start) +
                           "," + std::to_string(a->end) + ")");
    auto b = std::partition_point(tokens.begin(), tokens.end(), [&](const TokenOffsets& t) { return t.start < s.end; });
    const std::size_t bi = static_cast<std::size_t>(b - tokens.begin()) - 1;
    if (tokens[bi].end != s.end)
      throw AlignmentError(describe() + " ends inside token " + std::to_string(bi) + " [" +
                           std::to_string(tokens[bi].start) + "," + std::to_string(tokens[bi].end) + ")");
    segments.push_back({ai, bi, s.entity});
  }

  std::vector<Label> out(tokens.size());
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const Segment& g = segments[k];
    for (std::size_t i = g.first; i <= g.last; ++i) out[i] = Label(Prefix::I, g.type);
    switch (scheme) {
      case TagScheme::IO: break;
      case TagScheme::BIO: out[g.first] = Label(Prefix::B, g.type); break;
      case TagScheme::IE: out[g.last] = Label(Prefix::E, g.type); break;
      case TagScheme::IOE:
        if (k + 1 < segments.size() && segments[k + 1].first == g.last + 1 && segments[k + 1].type == g.type)
          out[g.last] = Label(Prefix::E, g.type);
        break;
      case TagScheme::IOBES:
      case TagScheme::BIES:
        if (g.first == g.last) {
          out[g.first] = Label(Prefix::S, g.type);
        } else {
          out[g.first] = Label(Prefix::B, g.type);
          out[g.last] = Label(Prefix::E, g.type);
        }
        break;
    }
  }
  return out;
}

std::vector<CharSpan> decode_labels(std::span<const Label> labels, std::span<const TokenOffsets> tokens,
                                    TagScheme scheme, const DecodeOptions& options) {
  if (labels.size() != tokens.size())
    throw ParameterError("decode_labels: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(tokens.size()) + " tokens");
  if (options.mode == DecodeMode::Strict) {
    if (auto v = grammar_violation(labels, scheme)) throw DecodeError(*v);
  }

  std::vector<CharSpan> out;
  std::optional<std::size_t> open_first;
  EntityType open_type = EntityType::Court;
  std::size_t open_last = 0;

  auto close = [&] {
    if (open_first) out.push_back({tokens[*open_first].start, tokens[open_last].end, open_type});
    open_first.reset();
  };
  auto open = [&](std::size_t i, EntityType t) {
    open_first = i;
    open_last = i;
    open_type = t;
  };
  auto adjacent = [&](std::size_t i) {
    if (scheme != TagScheme::IO || options.text.empty() || i == 0) return true;
    for (std::size_t c = tokens[i - 1].end; c < tokens[i].start && c < options.text.size(); ++c)
      if (!unicode::is_space(options.text[c])) return false;
    return true;
  };
  auto continues = [&](std::size_t i, EntityType t) {
    return open_first && open_type == t && open_last + 1 == i && adjacent(i);
  };

  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label& l = labels[i];
    switch (l.prefix()) {
      case Prefix::O: close(); break;
      case Prefix::B:
        close();
        open(i, l.entity());
        break;
      case Prefix::I:
        if (continues(i, l.entity())) {
          open_last = i;
        } else {
          close();
          open(i, l.entity());
        }
        break;
      case Prefix::E:
        if (continues(i, l.entity())) {
          open_last = i;
        } else {
          close();
          open(i, l.entity());
        }
        close();
        break;
      case Prefix::S:
        close();
        open(i, l.entity());
        close();
        break;
    }
  }
  close();
  return out;
}

std::vector<Label> convert_scheme(std::span<const Label> labels, TagScheme from, TagScheme to, DecodeMode mode) {
  std::vector<TokenOffsets> positions(labels.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = {i, i + 1};
  DecodeOptions opts;
  opts.mode = mode;
  const auto spans = decode_labels(labels, positions, from, opts);
  return encode_labels(positions, spans, to);
}

std::vector<Label> label_inventory(const Corpus& corpus, TagScheme scheme) {
  std::set<std::size_t> ranks;
  for (const auto& d : corpus.documents)
    for (const auto& s : d.sentences) {
      const std::u32string text = unicode::decode(s.text);
      for (const Label& l : encode_labels(word_tokenize(text), s.spans, scheme)) ranks.insert(l.rank());
    }
  std::vector<Label> out;
  for (std::size_t r : ranks) out.push_back(label_from_rank(r));
  return out;
}

std::string to_conll(std::u32string_view text, std::span<const TokenOffsets> tokens, std::span<const Label> labels) {
  if (labels.size() != tokens.size()) throw ParameterError("to_conll: label/token count mismatch");
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out += unicode::encode(text.substr(tokens[i].start, tokens[i].end - tokens[i].start));
    out += '\t' + std::to_string(tokens[i].start) + '\t' + std::to_string(tokens[i].end) + '\t' + labels[i].str() + '\n';
  }
  out += '\n';
  return out;
}

std::string to_conll(const Corpus& corpus, TagScheme scheme) {
  std::string out;
  for (const auto& d : corpus.documents)
    for (const auto& s : d.sentences) {
      const std::u32string text = unicode::decode(s.text);
      const auto tokens = word_tokenize(text);
      out += to_conll(text, tokens, encode_labels(tokens, s.spans, scheme));
    }
  return out;
}

}  // namespace legalner
