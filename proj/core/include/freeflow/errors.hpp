#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace freeflow {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

class CoincidentPoints : public Error {
public:
    using Error::Error;
};

class NonPositiveInput : public Error {
public:
    using Error::Error;
};

class EmptyNetwork : public Error {
public:
    using Error::Error;
};

class DuplicateId : public Error {
public:
    using Error::Error;
};

class DanglingNodeRef : public Error {
public:
    using Error::Error;
};

/// XML parse failure with the 1-based line/column where it was detected.
class MalformedXml : public Error {
public:
    MalformedXml(std::size_t line, std::size_t column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class UnknownNode : public Error {
public:
    using Error::Error;
};

class Unreachable : public Error {
public:
    using Error::Error;
};

class TooFewEligibleNodes : public Error {
public:
    using Error::Error;
};

class EmptyTrainingSet : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class EmptySpace : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class NonPositiveActual : public Error {
public:
    using Error::Error;
};

class BadFraction : public Error {
public:
    using Error::Error;
};

class TooFewSamples : public Error {
public:
    using Error::Error;
};

class BadProbabilities : public Error {
public:
    using Error::Error;
};

/// File-level failure (missing file, bad header, unreadable record).
/// The message always names the file and, where known, the record.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace freeflow
