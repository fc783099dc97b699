#pragma once

#include <stdexcept>
#include <string>

namespace apcircle {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotCoprime : public Error {
public:
    using Error::Error;
};

class EvenModulus : public Error {
public:
    using Error::Error;
};

class ModulusTooLarge : public Error {
public:
    using Error::Error;
};

class BruteTooLarge : public Error {
public:
    using Error::Error;
};

class InputTooLarge : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

/// Bad command line; the CLI maps it to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace apcircle
