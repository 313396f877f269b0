// sga/simulate.hpp
//
// Stand-ins for recorded speech: a synthetic reader choosing options with
// a given skill, and a recognizer channel with seeded word errors and an
// optional grammar-correcting bias.

#ifndef SGA_SIMULATE_HPP_
#define SGA_SIMULATE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sga/cohort.hpp"
#include "sga/decode.hpp"

namespace sga {

struct SimulatedReading {
  Transcript transcript;             // what was actually said
  std::vector<std::size_t> choices;  // option index per slot
};

// Each slot is read correctly with probability `skill`, otherwise with a
// uniformly chosen wrong option.
SimulatedReading simulate_reading(const TaggedParagraph &p, double skill,
                                  std::uint64_t seed);

// Applies the bias (if any) and then per-token deletion, substitution and
// insertion at the configured rates. Replays exactly for a given seed.
Transcript simulate_asr(const Transcript &truth, const TaggedParagraph &p,
                        const ChannelConfig &ch, std::uint64_t seed);

// Seed of the recognizer channel paired with a reading seed, so that a
// reading and its recognition never share a random stream.
inline std::uint64_t channel_seed(std::uint64_t reading_seed) {
  return reading_seed ^ 0x5851F42D4C957F2DULL;
}

// A cohort of synthetic students read the same paragraph. Each reading is
// recognized twice: (a) by a channel with the grammar-correcting bias whose
// output is scored literally, and (b) by an unbiased channel whose output
// is constrained-decoded against the paragraph's CLM. The human reference
// score is the grammar score of what was actually said.
struct CohortSimulation {
  std::size_t students = 17;
  std::uint64_t seed = 1;  // student i reads with seed + i
  double skill_min = 0.5;
  double skill_max = 0.95;
  double p_sub = 0.05;
  double p_del = 0.02;
  double p_ins = 0.02;
  double gamma = 0.5;
  int lm_order = 3;
};

std::vector<CohortRow> simulate_cohort(const TaggedParagraph &p, const CohortSimulation &cfg);

}  // namespace sga

#endif  // SGA_SIMULATE_HPP_
