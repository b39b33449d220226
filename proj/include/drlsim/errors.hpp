#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace drlsim {

/// Lookup of a lane, scenario or file that does not exist.
class NotFoundError : public std::runtime_error {
public:
    explicit NotFoundError(const std::string& what) : std::runtime_error(what) {}
};

/// A spawn request the scenario cannot satisfy (e.g. more traffic than lanes).
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values encountered inside an optimizer or solver.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// API misuse that violates a documented contract (e.g. stepping a finished episode).
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Malformed checkpoint file; `offset()` is the byte position of the defect.
class CorruptCheckpointError : public std::runtime_error {
public:
    CorruptCheckpointError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace drlsim
