// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace lorenzlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A map was evaluated on the singular line x = 0.
class SingularPointError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an operation (e.g. |x| > 1/2).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A mass query asked for more resolution than the sample supports.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Configuration or parameter validation failure.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A statistical estimator could not produce a value (degenerate input,
/// too few usable points).
class EstimationError : public Error {
public:
    using Error::Error;
};

/// A periodic (or nearly periodic) center was supplied where a
/// non-periodic one is required.
class PeriodicCenterError : public Error {
public:
    using Error::Error;
};

/// An experiment would exceed the configured work budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

} // namespace lorenzlab
