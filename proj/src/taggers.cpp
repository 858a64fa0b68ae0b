#include "legalner/taggers.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "legalner/error.hpp"
#include "legalner/metrics.hpp"
#include "legalner/rng.hpp"
#include "legalner/subprocess.hpp"
#include "legalner/unicode.hpp"

namespace legalner {

namespace {

std::string join_surfaces(const std::u32string& text, std::span<const TokenOffsets> tokens) {
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) key += ' ';
    key += unicode::encode(std::u32string_view(text).substr(tokens[i].start, tokens[i].end - tokens[i].start));
  }
  return key;
}

std::vector<Label> sorted_labels(std::vector<Label> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

}  // namespace

std::string_view tagger_kind_name(TaggerKind kind) {
  switch (kind) {
    case TaggerKind::Dictionary: return "dictionary";
    case TaggerKind::Linear: return "linear";
    case TaggerKind::External: return "external";
  }
  return "unknown";
}

Prediction TaggerModel::predict(const Sentence& sentence) const {
  const std::u32string text = unicode::decode(sentence.text);
  Prediction p;
  p.tokens = word_tokenize(text);
  p.labels = predict_labels(sentence, p.tokens);
  DecodeOptions opts;
  opts.text = text;
  p.spans = decode_labels(p.labels, p.tokens, scheme(), opts);
  return p;
}

// ---------------------------------------------------------------- dictionary

DictionaryTagger::DictionaryTagger(std::map<std::string, EntityType> gazetteer, TagScheme scheme)
    : gazetteer_(std::move(gazetteer)), scheme_(scheme), labels_(scheme_labels(scheme)) {
  for (const auto& [key, type] : gazetteer_) {
    const std::size_t words = static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')) + 1;
    max_tokens_ = std::max(max_tokens_, words);
  }
}

std::vector<CharSpan> DictionaryTagger::match(const std::u32string& text, std::span<const TokenOffsets> tokens) const {
  std::vector<CharSpan> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool hit = false;
    for (std::size_t len = std::min(max_tokens_, tokens.size() - i); len > 0; --len) {
      auto it = gazetteer_.find(join_surfaces(text, tokens.subspan(i, len)));
      if (it == gazetteer_.end()) continue;
      out.push_back({tokens[i].start, tokens[i + len - 1].end, it->second});
      i += len;
      hit = true;
      break;
    }
    if (!hit) ++i;
  }
  return out;
}

std::vector<Label> DictionaryTagger::predict_labels(const Sentence& sentence, std::span<const TokenOffsets> tokens) const {
  const std::u32string text = unicode::decode(sentence.text);
  return encode_labels(tokens, match(text, tokens), scheme_);
}

DictionaryTagger train_dictionary(std::span<const Sentence> training, TagScheme scheme) {
  if (training.empty()) throw ParameterError("train_dictionary: empty training set");
  std::map<std::string, std::array<std::size_t, kEntityTypeCount>> votes;
  for (const Sentence& s : training) {
    const std::u32string text = unicode::decode(s.text);
    for (const CharSpan& span : s.spans) {
      const std::u32string surface = text.substr(span.start, span.end - span.start);
      const auto tokens = word_tokenize(surface);
      if (tokens.empty()) continue;
      ++votes[join_surfaces(surface, tokens)][index_of(span.entity)];
    }
  }
  std::map<std::string, EntityType> gazetteer;
  for (const auto& [key, counts] : votes) {
    // first maximum = canonically first type on ties
    const auto best = std::max_element(counts.begin(), counts.end());
    gazetteer.emplace(key, kEntityTypes[static_cast<std::size_t>(best - counts.begin())]);
  }
  return DictionaryTagger(std::move(gazetteer), scheme);
}

// -------------------------------------------------------------------- linear

std::vector<std::string> token_features(std::u32string_view word) {
  const std::u32string lower = unicode::to_lower(word);
  std::u32string shape;
  for (char32_t c : word) {
    char32_t s = unicode::is_upper(c) ? U'X' : unicode::is_lower(c) ? U'x' : unicode::is_digit(c) ? U'd' : c;
    if (shape.empty() || shape.back() != s) shape.push_back(s);
  }
  std::vector<std::string> f = {"b", "w=" + unicode::encode(lower), "sh=" + unicode::encode(shape)};
  const std::u32string_view lv(lower);
  if (lv.size() >= 2) {
    f.push_back("p2=" + unicode::encode(lv.substr(0, 2)));
    f.push_back("s2=" + unicode::encode(lv.substr(lv.size() - 2)));
  }
  if (lv.size() >= 3) {
    f.push_back("p3=" + unicode::encode(lv.substr(0, 3)));
    f.push_back("s3=" + unicode::encode(lv.substr(lv.size() - 3)));
  }
  if (!word.empty() && std::all_of(word.begin(), word.end(), [](char32_t c) { return unicode::is_digit(c); }))
    f.push_back("dig");
  if (!word.empty() && unicode::is_upper(word.front())) f.push_back("cap");
  return f;
}

namespace {

using FeatureIds = std::vector<std::vector<std::size_t>>;  // per token

struct Grammar {
  std::vector<bool> start;  // L
  std::vector<bool> trans;  // L x L
  std::vector<bool> end;    // L
};

Grammar make_grammar(const std::vector<Label>& labels, TagScheme scheme) {
  const std::size_t L = labels.size();
  Grammar g{std::vector<bool>(L), std::vector<bool>(L * L), std::vector<bool>(L)};
  for (std::size_t a = 0; a < L; ++a) {
    g.start[a] = allowed_start(scheme, labels[a]);
    g.end[a] = allowed_end(scheme, labels[a]);
    for (std::size_t b = 0; b < L; ++b) g.trans[a * L + b] = allowed_transition(scheme, labels[a], labels[b]);
  }
  return g;
}

// Weight layout: emission F x L, then transition (L + 1) x L with row L = start.
std::vector<std::size_t> viterbi(const FeatureIds& feats, const double* emission, const double* transition,
                                 std::size_t L, const Grammar& g) {
  const std::size_t n = feats.size();
  if (n == 0) return {};
  constexpr double kNeg = -std::numeric_limits<double>::infinity();
  std::vector<double> score(n * L, kNeg);
  std::vector<std::size_t> back(n * L, 0);
  std::vector<double> emit(L);
  auto emissions = [&](std::size_t i) {
    std::fill(emit.begin(), emit.end(), 0.0);
    for (std::size_t f : feats[i])
      for (std::size_t l = 0; l < L; ++l) emit[l] += emission[f * L + l];
  };
  emissions(0);
  for (std::size_t l = 0; l < L; ++l)
    if (g.start[l]) score[l] = transition[L * L + l] + emit[l];
  for (std::size_t i = 1; i < n; ++i) {
    emissions(i);
    for (std::size_t cur = 0; cur < L; ++cur) {
      double best = kNeg;
      std::size_t arg = 0;
      for (std::size_t prev = 0; prev < L; ++prev) {
        if (!g.trans[prev * L + cur] || score[(i - 1) * L + prev] == kNeg) continue;
        const double s = score[(i - 1) * L + prev] + transition[prev * L + cur];
        if (s > best) {
          best = s;
          arg = prev;
        }
      }
      if (best == kNeg) continue;
      score[i * L + cur] = best + emit[cur];
      back[i * L + cur] = arg;
    }
  }
  double best = kNeg;
  std::size_t last = 0;
  for (std::size_t l = 0; l < L; ++l) {
    if (!g.end[l]) continue;
    if (score[(n - 1) * L + l] > best) {
      best = score[(n - 1) * L + l];
      last = l;
    }
  }
  if (best == kNeg) throw std::logic_error("viterbi: no grammatical path");
  std::vector<std::size_t> path(n);
  path[n - 1] = last;
  for (std::size_t i = n - 1; i > 0; --i) path[i - 1] = back[i * L + path[i]];
  return path;
}

FeatureIds sentence_features(const std::u32string& text, std::span<const TokenOffsets> tokens,
                             const std::map<std::string, std::size_t, std::less<>>& index) {
  FeatureIds out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (const std::string& f : token_features(std::u32string_view(text).substr(tokens[i].start, tokens[i].end - tokens[i].start))) {
      auto it = index.find(f);
      if (it != index.end()) out[i].push_back(it->second);
    }
  }
  return out;
}

}  // namespace

LinearTagger::LinearTagger(std::vector<Label> labels, LinearWeights weights, TagScheme scheme)
    : labels_(std::move(labels)), weights_(std::move(weights)), scheme_(scheme) {
  const std::size_t L = labels_.size();
  if (weights_.emission.size() != weights_.features.size() * L || weights_.transition.size() != (L + 1) * L)
    throw ParameterError("linear tagger: weight dimensions do not match the label inventory");
  if (std::find(labels_.begin(), labels_.end(), Label::outside()) == labels_.end())
    throw ParameterError("linear tagger: label inventory must include O");
  for (std::size_t i = 0; i < weights_.features.size(); ++i) feature_index_.emplace(weights_.features[i], i);
}

std::vector<Label> LinearTagger::predict_labels(const Sentence& sentence, std::span<const TokenOffsets> tokens) const {
  const std::u32string text = unicode::decode(sentence.text);
  const FeatureIds feats = sentence_features(text, tokens, feature_index_);
  const auto path = viterbi(feats, weights_.emission.data(), weights_.transition.data(), labels_.size(),
                            make_grammar(labels_, scheme_));
  std::vector<Label> out;
  out.reserve(path.size());
  for (std::size_t l : path) out.push_back(labels_[l]);
  return out;
}

LinearTraining train_linear(std::span<const Sentence> training, const LinearOptions& options,
                            std::span<const Sentence> validation) {
  if (training.empty()) throw ParameterError("train_linear: empty training set");

  struct Example {
    std::u32string text;
    std::vector<TokenOffsets> tokens;
    std::vector<Label> gold;
  };
  std::vector<Example> examples;
  std::vector<Label> inventory = {Label::outside()};
  std::map<std::string, std::size_t, std::less<>> feature_index;
  for (const Sentence& s : training) {
    Example ex;
    ex.text = unicode::decode(s.text);
    ex.tokens = word_tokenize(ex.text);
    ex.gold = encode_labels(ex.tokens, s.spans, options.scheme);
    inventory.insert(inventory.end(), ex.gold.begin(), ex.gold.end());
    for (const auto& t : ex.tokens)
      for (auto& f : token_features(std::u32string_view(ex.text).substr(t.start, t.end - t.start)))
        feature_index.emplace(std::move(f), 0);
    examples.push_back(std::move(ex));
  }
  inventory = sorted_labels(std::move(inventory));
  LinearWeights shape;
  shape.features.reserve(feature_index.size());
  {
    std::size_t i = 0;
    for (auto& [name, id] : feature_index) {
      id = i++;
      shape.features.push_back(name);
    }
  }
  const std::size_t L = inventory.size(), F = shape.features.size();
  const std::size_t emission_size = F * L, total_size = emission_size + (L + 1) * L;

  std::vector<FeatureIds> feats;
  std::vector<std::vector<std::size_t>> gold;
  for (const Example& ex : examples) {
    feats.push_back(sentence_features(ex.text, ex.tokens, feature_index));
    std::vector<std::size_t> g;
    for (const Label& l : ex.gold)
      g.push_back(static_cast<std::size_t>(std::lower_bound(inventory.begin(), inventory.end(), l) - inventory.begin()));
    gold.push_back(std::move(g));
  }

  const Grammar grammar = make_grammar(inventory, options.scheme);
  std::vector<double> w(total_size, 0.0), u(total_size, 0.0);
  std::uint64_t step = 0;

  auto averaged = [&] {
    LinearWeights out = shape;
    out.emission.assign(emission_size, 0.0);
    out.transition.assign((L + 1) * L, 0.0);
    for (std::size_t i = 0; i < total_size; ++i) {
      const double v = step == 0 ? 0.0 : w[i] - u[i] / static_cast<double>(step);
      (i < emission_size ? out.emission[i] : out.transition[i - emission_size]) = v;
    }
    return out;
  };
  auto bump = [&](std::size_t i, double delta) {
    w[i] += delta;
    u[i] += static_cast<double>(step) * delta;
  };

  LinearTraining result;
  LinearWeights best_weights = averaged();
  double best_f1 = -1.0;

  std::vector<std::size_t> order(examples.size());
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(options.seed, "linear/epoch", epoch));
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const auto& g = gold[idx];
      const auto pred = viterbi(feats[idx], w.data(), w.data() + emission_size, L, grammar);
      if (pred != g) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (g[i] != pred[i]) {
            for (std::size_t f : feats[idx][i]) {
              bump(f * L + g[i], 1.0);
              bump(f * L + pred[i], -1.0);
            }
          }
          const std::size_t pg = i == 0 ? L : g[i - 1], pp = i == 0 ? L : pred[i - 1];
          if (pg != pp || g[i] != pred[i]) {
            bump(emission_size + pg * L + g[i], 1.0);
            bump(emission_size + pp * L + pred[i], -1.0);
          }
        }
      }
      ++step;
      if (options.snapshots) options.snapshots->push_back(w);
    }

    LinearWeights current = averaged();
    if (validation.empty()) {
      best_weights = std::move(current);
      result.selected_epoch = epoch;
      continue;
    }
    LinearTagger candidate(inventory, current, options.scheme);
    ConfusionMatrix cm(scheme_labels(options.scheme));
    for (const Sentence& s : validation) {
      const std::u32string text = unicode::decode(s.text);
      const auto tokens = word_tokenize(text);
      cm.add(encode_labels(tokens, s.spans, options.scheme), candidate.predict_labels(s, tokens));
    }
    const double f1 = macro_average(per_class_metrics(cm.compact())).f1;
    result.validation_f1.push_back(f1);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_weights = std::move(current);
      result.selected_epoch = epoch;
    }
  }
  result.model = std::make_unique<LinearTagger>(std::move(inventory), std::move(best_weights), options.scheme);
  return result;
}

// ------------------------------------------------------------------ external

ExternalTagger::ExternalTagger(ExternalOptions options)
    : options_(std::move(options)), labels_(scheme_labels(options_.scheme)) {
  if (options_.command.empty()) throw ParameterError("external tagger: empty command");
}

ExternalTagger::~ExternalTagger() = default;

std::vector<Label> ExternalTagger::predict_labels(const Sentence& sentence, std::span<const TokenOffsets> tokens) const {
  nlohmann::ordered_json request;
  request["sentence"] = sentence.text;
  request["tokens"] = nlohmann::ordered_json::array();
  for (const auto& t : tokens) request["tokens"].push_back({t.start, t.end});
  if (options_.send_gold) {
    request["gold"] = nlohmann::ordered_json::array();
    for (const auto& s : sentence.spans)
      request["gold"].push_back({{"start", s.start}, {"end", s.end}, {"type", wire_name(s.entity)}});
  }

  std::lock_guard lock(mutex_);
  std::string line;
  try {
    if (!process_) process_ = std::make_unique<LineProcess>(options_.command);
    process_->write_line(request.dump());
    line = process_->read_line(options_.timeout);
  } catch (const AdapterError&) {
    process_.reset();
    throw;
  }
  auto violation = [&](const std::string& what) {
    process_.reset();
    return AdapterError("adapter protocol violation: " + what);
  };
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw violation("response is not JSON: " + line.substr(0, 80));
  }
  if (!response.is_object() || !response.contains("labels") || !response["labels"].is_array())
    throw violation("response lacks a \"labels\" array");
  const auto& jl = response["labels"];
  if (jl.size() != tokens.size())
    throw violation(std::to_string(jl.size()) + " labels for " + std::to_string(tokens.size()) + " tokens");
  std::vector<Label> out;
  for (const auto& v : jl) {
    if (!v.is_string()) throw violation("label is not a string");
    auto l = parse_label(v.get<std::string>());
    if (!l) throw violation("unknown label \"" + v.get<std::string>() + "\"");
    out.push_back(*l);
  }
  return out;
}

// -------------------------------------------------------------------- common

bool uses_validation(TaggerKind kind) { return kind == TaggerKind::Linear; }

std::unique_ptr<TaggerModel> train_tagger(const TaggerSpec& spec, std::span<const Sentence> training,
                                          std::span<const Sentence> validation, TagScheme scheme,
                                          std::uint64_t seed) {
  switch (spec.kind) {
    case TaggerKind::Dictionary: return std::make_unique<DictionaryTagger>(train_dictionary(training, scheme));
    case TaggerKind::Linear: {
      LinearOptions opts;
      opts.epochs = spec.epochs;
      opts.seed = seed;
      opts.scheme = scheme;
      return std::move(train_linear(training, opts, validation).model);
    }
    case TaggerKind::External: {
      ExternalOptions ext = spec.external;
      ext.scheme = scheme;
      return std::make_unique<ExternalTagger>(std::move(ext));
    }
  }
  throw ParameterError("unknown tagger kind");
}

namespace {

constexpr int kModelVersion = 1;

}  // namespace

std::string serialize_model(const TaggerModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "legalner-model";
  j["version"] = kModelVersion;
  j["kind"] = tagger_kind_name(model.kind());
  j["scheme"] = scheme_name(model.scheme());
  j["labels"] = nlohmann::ordered_json::array();
  for (const Label& l : model.labels()) j["labels"].push_back(l.str());
  nlohmann::ordered_json params;
  if (const auto* d = dynamic_cast<const DictionaryTagger*>(&model)) {
    params["gazetteer"] = nlohmann::ordered_json::array();
    for (const auto& [key, type] : d->gazetteer()) params["gazetteer"].push_back({key, wire_name(type)});
  } else if (const auto* l = dynamic_cast<const LinearTagger*>(&model)) {
    params["features"] = l->weights().features;
    params["emission"] = l->weights().emission;
    params["transition"] = l->weights().transition;
  } else if (const auto* e = dynamic_cast<const ExternalTagger*>(&model)) {
    params["command"] = e->options().command;
    params["send_gold"] = e->options().send_gold;
    params["timeout_ms"] = e->options().timeout.count();
  }
  j["params"] = std::move(params);
  return j.dump() + "\n";
}

std::unique_ptr<TaggerModel> parse_model(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelFormatError(std::string("corrupt model file: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != "legalner-model") throw ModelFormatError("not a model file");
    const int version = j.at("version").get<int>();
    if (version != kModelVersion) throw ModelFormatError("unsupported model version " + std::to_string(version));
    const auto scheme = parse_scheme(j.at("scheme").get<std::string>());
    if (!scheme) throw ModelFormatError("unknown scheme in model file");
    std::vector<Label> labels;
    for (const auto& v : j.at("labels")) {
      auto l = parse_label(v.get<std::string>());
      if (!l) throw ModelFormatError("unknown label in model file");
      labels.push_back(*l);
    }
    const auto kind = j.at("kind").get<std::string>();
    const auto& params = j.at("params");
    if (kind == "dictionary") {
      std::map<std::string, EntityType> gazetteer;
      for (const auto& entry : params.at("gazetteer")) {
        auto type = parse_entity_type(entry.at(1).get<std::string>());
        if (!type) throw ModelFormatError("unknown entity type in gazetteer");
        gazetteer.emplace(entry.at(0).get<std::string>(), *type);
      }
      return std::make_unique<DictionaryTagger>(std::move(gazetteer), *scheme);
    }
    if (kind == "linear") {
      LinearWeights w;
      w.features = params.at("features").get<std::vector<std::string>>();
      w.emission = params.at("emission").get<std::vector<double>>();
      w.transition = params.at("transition").get<std::vector<double>>();
      try {
        return std::make_unique<LinearTagger>(std::move(labels), std::move(w), *scheme);
      } catch (const ParameterError& e) {
        throw ModelFormatError(std::string("corrupt model file: ") + e.what());
      }
    }
    if (kind == "external") {
      ExternalOptions ext;
      ext.command = params.at("command").get<std::vector<std::string>>();
      ext.send_gold = params.at("send_gold").get<bool>();
      ext.timeout = std::chrono::milliseconds(params.at("timeout_ms").get<long long>());
      ext.scheme = *scheme;
      return std::make_unique<ExternalTagger>(std::move(ext));
    }
    throw ModelFormatError("unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("corrupt model file: ") + e.what());
  }
}

void save_model(const TaggerModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << serialize_model(model);
}

std::unique_ptr<TaggerModel> load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace legalner
