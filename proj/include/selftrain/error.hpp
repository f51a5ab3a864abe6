#pragma once

#include <stdexcept>
#include <string>

namespace selftrain {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (parse failures, constraint
// violations, missing files). CLI maps these to exit code 2.
class DataError : public Error {
public:
    using Error::Error;
};

// Failures while reading or writing artifacts.
class IoError : public DataError {
public:
    using DataError::DataError;
};

// Pearson correlation is undefined for the given input (fewer than two
// points, or one side has zero variance).
class UndefinedCorrelation : public Error {
public:
    using Error::Error;
};

// Training could not complete (divergence, empty training set after
// validation, no selectable candidate). CLI maps these to exit code 3.
class TrainingError : public Error {
public:
    using Error::Error;
};

} // namespace selftrain
