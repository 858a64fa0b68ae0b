// Oracle adapter for the external tagger protocol: labels every token from
// the gold spans sent with the request. Test modes simulate broken adapters.
#include <chrono>
#include <iostream>
#include <string>
#include <thread>

#include <json.hpp>

#include "legalner/corpus.hpp"
#include "legalner/labels.hpp"

using namespace legalner;

int main(int argc, char** argv) {
  TagScheme scheme = TagScheme::BIO;
  std::string mode = "echo";
  std::string fail_on;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--scheme") {
      auto s = parse_scheme(argv[i + 1]);
      if (!s) return 4;
      scheme = *s;
    } else if (flag == "--mode") {
      mode = argv[i + 1];
    } else if (flag == "--fail-on") {
      fail_on = argv[i + 1];
    }
  }
  if (mode == "exit") return 0;

  std::string line;
  while (std::getline(std::cin, line)) {
    if (mode == "hang") {
      std::this_thread::sleep_for(std::chrono::hours(1));
      return 0;
    }
    if (mode == "garbage") {
      std::cout << "not json" << std::endl;
      continue;
    }
    const auto request = nlohmann::json::parse(line);
    if (!fail_on.empty() && request.at("sentence").get<std::string>().find(fail_on) != std::string::npos) {
      std::cout << "{\"error\":\"refused\"}" << std::endl;
      continue;
    }
    std::vector<TokenOffsets> tokens;
    for (const auto& t : request.at("tokens")) tokens.push_back({t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>()});

    // snap each gold span onto the tokens it covers
    std::vector<CharSpan> spans;
    if (request.contains("gold")) {
      for (const auto& g : request["gold"]) {
        const auto start = g.at("start").get<std::size_t>(), end = g.at("end").get<std::size_t>();
        auto type = parse_entity_type(g.at("type").get<std::string>());
        if (!type) continue;
        std::size_t a = end, b = start;
        for (const auto& t : tokens) {
          if (t.start >= start && t.end <= end) {
            a = std::min(a, t.start);
            b = std::max(b, t.end);
          }
        }
        if (a < b && (spans.empty() || spans.back().end <= a)) spans.push_back({a, b, *type});
      }
    }
    std::vector<Label> labels = encode_labels(tokens, spans, scheme);
    if (mode == "short" && !labels.empty()) labels.pop_back();
    nlohmann::json response;
    response["labels"] = nlohmann::json::array();
    for (const Label& l : labels) response["labels"].push_back(l.str());
    std::cout << response.dump() << std::endl;
  }
  return 0;
}
