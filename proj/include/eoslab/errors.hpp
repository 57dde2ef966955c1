#pragma once

#include <stdexcept>
#include <string>

namespace eoslab {

// Base for all library errors so callers can catch the whole family at once.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define EOSLAB_DEFINE_ERROR(NAME)                                   \
    class NAME : public Error {                                     \
    public:                                                         \
        explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
    }

EOSLAB_DEFINE_ERROR(OrderingOutOfRange);
EOSLAB_DEFINE_ERROR(WindowTooSmall);
EOSLAB_DEFINE_ERROR(GridMismatch);
EOSLAB_DEFINE_ERROR(NonFiniteParams);
EOSLAB_DEFINE_ERROR(ApproximationDomain);
EOSLAB_DEFINE_ERROR(EmptySetup);
EOSLAB_DEFINE_ERROR(ZeroPump);
EOSLAB_DEFINE_ERROR(UnsupportedConfiguration);
EOSLAB_DEFINE_ERROR(PartitionViolation);
EOSLAB_DEFINE_ERROR(QuadratureNonConvergent);
EOSLAB_DEFINE_ERROR(VanishingOutcomeProbability);
EOSLAB_DEFINE_ERROR(DegeneratePartition);
EOSLAB_DEFINE_ERROR(ZeroEvidence);
EOSLAB_DEFINE_ERROR(TruncationOverflow);
EOSLAB_DEFINE_ERROR(NonPureInitial);
EOSLAB_DEFINE_ERROR(UnsupportedFamily);
EOSLAB_DEFINE_ERROR(TruncationBreach);
EOSLAB_DEFINE_ERROR(EnvelopeRefusal);
EOSLAB_DEFINE_ERROR(InvalidState);
EOSLAB_DEFINE_ERROR(ConfigError);

#undef EOSLAB_DEFINE_ERROR

}  // namespace eoslab
