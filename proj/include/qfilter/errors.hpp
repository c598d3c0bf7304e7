#ifndef QFILTER_ERRORS_HPP
#define QFILTER_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qfilter {

// Base class for every error raised by the library. code() is a stable,
// machine-parsable identifier used by the CLI error line.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class InvalidParameter : public Error {
public:
    InvalidParameter(std::string field, const std::string& detail)
        : Error("InvalidParameter", field + ": " + detail), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class NonNormalizable : public Error {
public:
    explicit NonNormalizable(const std::string& detail) : Error("NonNormalizable", detail) {}
};

class DegenerateCase : public Error {
public:
    explicit DegenerateCase(const std::string& detail) : Error("DegenerateCase", detail) {}
};

class BlowUp : public Error {
public:
    BlowUp(double t, std::size_t step, const std::string& detail)
        : Error("BlowUp", detail + " (t=" + std::to_string(t) + ", step=" + std::to_string(step) + ")"),
          t_(t), step_(step) {}

    double time() const noexcept { return t_; }
    std::size_t step() const noexcept { return step_; }

private:
    double t_;
    std::size_t step_;
};

class ShapeMismatch : public Error {
public:
    explicit ShapeMismatch(const std::string& detail) : Error("ShapeMismatch", detail) {}
};

class PacketOutOfDomain : public Error {
public:
    explicit PacketOutOfDomain(const std::string& detail) : Error("PacketOutOfDomain", detail) {}
};

class NotNormalized : public Error {
public:
    explicit NotNormalized(const std::string& detail) : Error("NotNormalized", detail) {}
};

class BoundaryMassExceeded : public Error {
public:
    BoundaryMassExceeded(double t, double mass)
        : Error("BoundaryMassExceeded",
                "boundary mass " + std::to_string(mass) + " at t=" + std::to_string(t)),
          mass_(mass) {}

    double mass() const noexcept { return mass_; }

private:
    double mass_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& detail)
        : Error("ParseError", "line " + std::to_string(line) + ": " + detail), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnknownKey : public Error {
public:
    explicit UnknownKey(const std::string& key) : Error("UnknownKey", key), key_(key) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& detail) : Error("IoError", detail) {}
};

}  // namespace qfilter

#endif  // QFILTER_ERRORS_HPP
