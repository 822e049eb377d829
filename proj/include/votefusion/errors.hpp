#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace votefusion {

// Argument outside the support of a likelihood model.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Target value outside the range of a monotone map (e.g. a likelihood ratio).
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An iterative optimizer failed to converge. Carries the best iterate found.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> best_iterate = {})
        : std::runtime_error(what), best_iterate_(std::move(best_iterate)) {}

    const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }

private:
    std::vector<double> best_iterate_;
};

// A policy lacks a threshold for some reachable information set.
class PolicyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operation applied to a fusion state that does not admit it.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Observed votes have probability zero under both hypotheses.
class ImpossibleObservation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace votefusion
