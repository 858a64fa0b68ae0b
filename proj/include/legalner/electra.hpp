#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace legalner {

inline constexpr double kProbabilityEpsilon = 1e-12;

/// Replaced-token-detection batch. Positions are 1-based, as in 1..T.
struct ElectraBatch {
  std::size_t length = 0;              // T
  std::vector<std::size_t> masked;     // M
  std::vector<int> replaced;           // y_t per position, size T
  std::vector<double> generator_prob;  // P_G(x_t | masked x), one per entry of `masked`
  std::vector<double> discriminator_prob;  // P_D(y_t = 1 | corrupted x), size T
  double lambda = 1.0;
};

struct LossValue {
  double value = 0.0;
  /// Some masked position had y_t = 0; its term contributes nothing.
  bool unmarked_masked_position = false;
};

/// -sum_{t in M} y_t log P_G; probabilities clamped to [eps, 1].
LossValue generator_loss(const ElectraBatch& batch);
/// -sum_{t=1..T} [y_t log P_D + (1 - y_t) log(1 - P_D)]; clamped to [eps, 1 - eps].
double discriminator_loss(const ElectraBatch& batch);
/// L_G + lambda L_D
double combined_loss(const ElectraBatch& batch);

/// {"T":2,"masked":[1],"y":[1,0],"p_generator":[0.5],"p_discriminator":[0.8,0.1],"lambda":1}
ElectraBatch parse_electra_batch(std::string_view json);

}  // namespace legalner
