#pragma once

#include "model.hpp"

namespace depkit {

// Samples sentences from a child-sequence model's generative process with
// normalized choices over the closed vocabulary, emitting gold structures.
// Samples whose word count exceeds length_cap are rejected and redrawn.
Corpus synthesize(const TrainedModel& m, long sentences, int length_cap, uint64_t seed,
                  int section_size = 100);

}  // namespace depkit
