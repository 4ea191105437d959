#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hsm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad distribution or model parameters (ratio < 1, N < M, ...).
class InvalidSpec : public Error {
public:
    using Error::Error;
};

/// Too few points for the requested fit or statistic.
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain (log of a non-positive value, x outside [0,1], ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Linear system without a unique solution.
class SingularFit : public Error {
public:
    using Error::Error;
};

/// Zero variance, all points identical, or no non-zero counts.
class DegenerateData : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

using WarningSink = std::function<void(std::string_view)>;

/// Non-fatal diagnostics go through here; the default sink writes to stderr.
void warn(std::string_view message);

/// Replaces the warning sink and returns the previous one.
WarningSink set_warning_sink(WarningSink sink);

} // namespace hsm
