#ifndef TRACEDYN_ERRORS_HPP
#define TRACEDYN_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace tracedyn {

// All domain failures carry a machine-readable kind ("UnknownLetter",
// "AxiomIViolated", ...) next to the human-readable message.
class DomainError : public std::runtime_error {
public:
  DomainError(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

}  // namespace tracedyn

#endif
