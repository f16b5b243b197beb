#pragma once

#include <stdexcept>
#include <string>

namespace hybev {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// malformed input schema (missing columns, mismatched design columns)
class SchemaError : public Error {
public:
    using Error::Error;
};

// input violates a data invariant (non-monotone time, bad values)
class DataError : public Error {
public:
    using Error::Error;
};

class DegenerateTripError : public Error {
public:
    using Error::Error;
};

class ImputationError : public Error {
public:
    using Error::Error;
};

class ChannelMissingError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

// battery cannot deliver the requested power
class PowerLimitError : public Error {
public:
    using Error::Error;
};

class IdentifiabilityError : public Error {
public:
    using Error::Error;
};

class BasisError : public Error {
public:
    using Error::Error;
};

class DegreesOfFreedomError : public Error {
public:
    using Error::Error;
};

class UndefinedApeError : public Error {
public:
    using Error::Error;
};

class UndefinedIccError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace hybev
