// Copyright 2026 The docqa Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace docqa {

// Base for every error raised by the toolkit. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument or configuration value.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

// Unreadable, malformed or inconsistent input data (files, CSVs, manifests).
class DataError : public Error {
public:
    using Error::Error;
};

// Statistic is undefined for the given input (e.g. constant vectors).
class DegenerateError : public Error {
public:
    using Error::Error;
};

// A crop carries no usable contrast for quality estimation.
class NoSignalError : public Error {
public:
    using Error::Error;
};

// Pooling was asked to combine zero text lines.
class NoTextError : public Error {
public:
    using Error::Error;
};

// Optimisation diverged (non-finite activations or gradients).
class TrainingError : public Error {
public:
    using Error::Error;
};

}  // namespace docqa
