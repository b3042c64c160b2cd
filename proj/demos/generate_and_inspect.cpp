// Generates one kitchen per difficulty level and prints the grid alongside
// its validator verdict and cycle-bound estimate.

#include <iostream>

#include "kitchen/estimator.hpp"
#include "kitchen/procgen.hpp"

int main(int argc, char** argv) {
  using namespace kitchen;
  const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 7;

  for (int level = 1; level <= 3; ++level) {
    const GenOutcome out =
        generate_layout_detailed(DifficultyPreset::for_level(level).params(
            derive_seed(seed, static_cast<std::uint64_t>(level))));
    std::cout << "=== level " << level << " (attempts: " << out.attempts << ")\n"
              << serialize_layout(out.layout) << "\n";
    const ValidationReport rep = validate(out.layout);
    std::cout << "validator: " << (rep.accepted ? "accepted" : "rejected") << "\n";
    try {
      const CycleEstimate est = estimate_cycle(out.layout);
      std::cout << "cycle: d=(" << est.d_onion << "," << est.d_plate << ","
                << est.d_goal << ") t_cycle=" << est.t_cycle
                << " n_max=" << est.n_max << "\n\n";
    } catch (const EstimationError& e) {
      std::cout << "cycle: " << e.what() << "\n\n";
    }
  }
  return 0;
}
