#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace delaylab {

// Protocol time, 1-based.
using Step = std::int64_t;
using Action = std::size_t;

// Bandit feedback carries one value (the realized reward); full-information
// feedback carries the whole reward vector of the step.
using Payload = std::vector<double>;

enum class FeedbackKind { bandit, full_information };

}  // namespace delaylab
