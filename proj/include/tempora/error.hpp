#ifndef TEMPORA_ERROR_HPP_
#define TEMPORA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace tempora {

/// Runtime failure: bad input data, I/O, numerical divergence.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Caller misuse that the CLI reports as a usage error (unknown config key,
/// malformed option value).
class UsageError : public Error {
public:
  using Error::Error;
};

} // namespace tempora

#endif // TEMPORA_ERROR_HPP_
