#pragma once

#include <stdexcept>
#include <string>

namespace risid {

// Base for every error raised by the library. The CLI maps subclasses to
// exit codes, so keep them distinct.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// More RIS ids requested than there are distinguishable code classes.
class CapacityExceeded : public Error {
public:
    CapacityExceeded(const std::string& what, int class_count)
        : Error(what), class_count_(class_count) {}
    int class_count() const noexcept { return class_count_; }

private:
    int class_count_;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace risid
