#include "legalner/electra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "legalner/error.hpp"

namespace legalner {

namespace {

void check(const ElectraBatch& b) {
  if (b.replaced.size() != b.length)
    throw ParameterError("electra batch: y has " + std::to_string(b.replaced.size()) + " entries, T = " +
                         std::to_string(b.length));
  if (b.discriminator_prob.size() != b.length)
    throw ParameterError("electra batch: p_discriminator needs one entry per position");
  if (b.generator_prob.size() != b.masked.size())
    throw ParameterError("electra batch: p_generator needs one entry per masked position");
  for (std::size_t t : b.masked)
    if (t < 1 || t > b.length) throw ParameterError("electra batch: masked position " + std::to_string(t) + " outside 1..T");
  auto sorted = b.masked;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ParameterError("electra batch: duplicate masked position");
  for (int y : b.replaced)
    if (y != 0 && y != 1) throw ParameterError("electra batch: y must be 0 or 1");
  auto probability = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
  if (!std::all_of(b.generator_prob.begin(), b.generator_prob.end(), probability) ||
      !std::all_of(b.discriminator_prob.begin(), b.discriminator_prob.end(), probability))
    throw ParameterError("electra batch: probabilities must lie in [0, 1]");
  if (!std::isfinite(b.lambda) || b.lambda < 0.0) throw ParameterError("electra batch: lambda must be >= 0");
}

}  // namespace

LossValue generator_loss(const ElectraBatch& batch) {
  check(batch);
  LossValue out;
  for (std::size_t i = 0; i < batch.masked.size(); ++i) {
    const int y = batch.replaced[batch.masked[i] - 1];
    if (y == 0) {
      out.unmarked_masked_position = true;
      continue;
    }
    out.value -= std::log(std::clamp(batch.generator_prob[i], kProbabilityEpsilon, 1.0));
  }
  return out;
}

double discriminator_loss(const ElectraBatch& batch) {
  check(batch);
  double loss = 0.0;
  for (std::size_t t = 0; t < batch.length; ++t) {
    const double p = std::clamp(batch.discriminator_prob[t], kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
    loss -= batch.replaced[t] ? std::log(p) : std::log(1.0 - p);
  }
  return loss;
}

double combined_loss(const ElectraBatch& batch) {
  return generator_loss(batch).value + batch.lambda * discriminator_loss(batch);
}

ElectraBatch parse_electra_batch(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json.begin(), json.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("electra batch: ") + e.what());
  }
  ElectraBatch b;
  try {
    b.length = j.at("T").get<std::size_t>();
    b.masked = j.at("masked").get<std::vector<std::size_t>>();
    b.replaced = j.at("y").get<std::vector<int>>();
    b.generator_prob = j.at("p_generator").get<std::vector<double>>();
    b.discriminator_prob = j.at("p_discriminator").get<std::vector<double>>();
    b.lambda = j.value("lambda", 1.0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("electra batch: ") + e.what());
  }
  check(b);
  return b;
}

}  // namespace legalner
