#pragma once

#include <stdexcept>
#include <string>

namespace ftrack {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveVolume : SimError { using SimError::SimError; };
struct NonPositiveDensity : SimError { using SimError::SimError; };
struct NonPositiveInput : SimError { using SimError::SimError; };
struct EmptyDomain : SimError { using SimError::SimError; };
struct EmptySupport : SimError { using SimError::SimError; };
struct InconsistentPattern : SimError { using SimError::SimError; };
struct NonAdjacentFronts : SimError { using SimError::SimError; };
struct NotAtBoundary : SimError { using SimError::SimError; };
struct TimeStepTooLarge : SimError { using SimError::SimError; };
struct BracketFailure : SimError { using SimError::SimError; };
struct DegenerateJump : SimError { using SimError::SimError; };
struct InsufficientData : SimError { using SimError::SimError; };
struct AllZeroOscillation : SimError { using SimError::SimError; };
struct SchemaError : SimError { using SimError::SimError; };
struct ConfigRejected : SimError { using SimError::SimError; };
struct EventCapExceeded : SimError { using SimError::SimError; };

} // namespace ftrack
