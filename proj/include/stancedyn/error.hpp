#pragma once

#include <stdexcept>
#include <string>

namespace stancedyn {

/// Bad or inconsistent input data. The CLI maps this to exit code 1.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid invocation or parameters. The CLI maps this to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computed result violated an invariant that holds by construction.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace stancedyn
