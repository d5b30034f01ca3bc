#ifndef MLAB_ERROR_HPP
#define MLAB_ERROR_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace mlab {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Transient acquisition failure (network trouble, rate limiting).
// retry_after_secs carries the server-suggested wait when one was given.
class RetriableError : public Error {
public:
  explicit RetriableError(const std::string& what, std::optional<long> retry_after = std::nullopt)
      : Error(what), retry_after_secs(retry_after) {}

  std::optional<long> retry_after_secs;
};

}  // namespace mlab

#endif  // MLAB_ERROR_HPP
