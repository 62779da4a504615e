#ifndef TUBAL_ERRORS_HPP
#define TUBAL_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tubal {

// Base class for everything thrown by this library.
class TubalError : public std::runtime_error {
public:
    explicit TubalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operands with incompatible dimensions.
class ShapeError : public TubalError {
public:
    explicit ShapeError(const std::string& msg) : TubalError(msg) {}
};

// Invalid argument values (out-of-range ranks, bad probabilities, ...).
class ArgumentError : public TubalError {
public:
    explicit ArgumentError(const std::string& msg) : TubalError(msg) {}
};

// Numerical failures: SVD non-convergence, broken conjugate symmetry, ...
class NumericalError : public TubalError {
public:
    explicit NumericalError(const std::string& msg) : TubalError(msg) {}
};

// File-system and serialization failures.
class IoError : public TubalError {
public:
    explicit IoError(const std::string& msg) : TubalError(msg) {}
};

// Malformed file contents; carries the byte offset where parsing stopped.
class ParseError : public IoError {
public:
    ParseError(const std::string& msg, std::size_t byte_offset)
        : IoError(msg + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::size_t byte_offset() const { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace tubal

#endif
