#ifndef WGQKD_ERRORS_HPP
#define WGQKD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wgqkd {

// Base class for every failure this library reports on purpose.  Anything
// else escaping the public API is a bug.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A numeric argument is outside the range an operation is defined on.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// The time grid ends while the pulse or the emitter still carries
// non-negligible amplitude, so end-of-grid counts would be biased.
class GridTooShortError : public Error {
public:
    explicit GridTooShortError(const std::string& what) : Error(what) {}
};

// Probability leaked past the largest tracked photon number even after the
// truncation was enlarged up to its cap.
class TruncationTooSmallError : public Error {
public:
    explicit TruncationTooSmallError(const std::string& what) : Error(what) {}
};

// Distributions that must share one truncation length disagree about it.
class TruncationMismatchError : public Error {
public:
    explicit TruncationMismatchError(const std::string& what) : Error(what) {}
};

// A photon-number table or distribution violates its own normalization.
class NotNormalizedError : public Error {
public:
    explicit NotNormalizedError(const std::string& what) : Error(what) {}
};

// A photon-number table assigns the same index twice.
class DuplicateIndexError : public Error {
public:
    explicit DuplicateIndexError(const std::string& what) : Error(what) {}
};

// A probability is negative where only non-negative values make sense.
class NegativeProbabilityError : public Error {
public:
    explicit NegativeProbabilityError(const std::string& what) : Error(what) {}
};

// A distribution carries more truncated-tail mass than the consumer can
// absorb into its error budget.
class TailTooHeavyError : public Error {
public:
    explicit TailTooHeavyError(const std::string& what) : Error(what) {}
};

// The decoy-state estimator needs a vacuum state and none was supplied.
class MissingVacuumStateError : public Error {
public:
    explicit MissingVacuumStateError(const std::string& what) : Error(what) {}
};

// The supplied gains/error rates admit no photon-number decomposition at
// all; they contradict each other within the stated uncertainties.
class InfeasibleObservationsError : public Error {
public:
    explicit InfeasibleObservationsError(const std::string& what) : Error(what) {}
};

// Closed-form two-intensity bounds need strictly ordered intensities.
class DegenerateIntensitiesError : public Error {
public:
    explicit DegenerateIntensitiesError(const std::string& what) : Error(what) {}
};

// The closed-form yield bound came out non-positive, so no secure-rate
// statement can be made from these observations.
class VanishingYieldError : public Error {
public:
    explicit VanishingYieldError(const std::string& what) : Error(what) {}
};

// No distance with positive rate exists, so a maximal distance is undefined.
class NoPositiveRateError : public Error {
public:
    explicit NoPositiveRateError(const std::string& what) : Error(what) {}
};

// A config file or auxiliary table could not be parsed; the message carries
// file and line information.
class ConfigParseError : public Error {
public:
    explicit ConfigParseError(const std::string& what) : Error(what) {}
};

} // namespace wgqkd

#endif
