#pragma once

#include <stdexcept>
#include <string>

namespace imex {

// Invalid input or configuration: unsupported order, bad parameter, parse failure.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computation that could not be completed: singular system, non-convergence, blow-up.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BlowUpError : public NumericalError {
public:
    BlowUpError(const std::string& what, long step) : NumericalError(what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

}  // namespace imex
