#pragma once

#include <stdexcept>
#include <string>

namespace klucb {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define KLUCB_DEFINE_ERROR(Name)                                         \
    struct Name : Error {                                                \
        explicit Name(const std::string& what) : Error(what) {}          \
    }

// Family construction and parameterization.
KLUCB_DEFINE_ERROR(NonStochastic);
KLUCB_DEFINE_ERROR(Reducible);
KLUCB_DEFINE_ERROR(ConstantReward);
KLUCB_DEFINE_ERROR(ZeroMass);
KLUCB_DEFINE_ERROR(OutOfRange);
KLUCB_DEFINE_ERROR(EigenFailure);
KLUCB_DEFINE_ERROR(OutOfMeanSpace);
KLUCB_DEFINE_ERROR(DegenerateFamily);
KLUCB_DEFINE_ERROR(InfiniteDivergence);

// Concentration bounds.
KLUCB_DEFINE_ERROR(EmptySet);
KLUCB_DEFINE_ERROR(NotDoeblin);

// Bandit environment.
KLUCB_DEFINE_ERROR(BadPlayCount);
KLUCB_DEFINE_ERROR(WrongSetSize);
KLUCB_DEFINE_ERROR(DuplicateArm);
KLUCB_DEFINE_ERROR(NeverPlayed);

// Policies.
KLUCB_DEFINE_ERROR(InsufficientArms);

// Regret accounting.
KLUCB_DEFINE_ERROR(MismatchedHorizon);
KLUCB_DEFINE_ERROR(CountMismatch);

// Harness and I/O.
KLUCB_DEFINE_ERROR(ConfigError);
KLUCB_DEFINE_ERROR(IoError);

#undef KLUCB_DEFINE_ERROR

}  // namespace klucb
