#pragma once

#include <stdexcept>
#include <string>

namespace chainlab {

/// Base of every contract-style `require` failure. The simulated transaction
/// that raised it is reverted and mined into no block.
class Revert : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A revert tagged with a module-specific reason, so callers branch on the
/// cause rather than on message text.
template <typename Reason>
class Rejected : public Revert {
 public:
  Rejected(Reason reason, const std::string& message)
      : Revert(message), reason_(reason) {}

  [[nodiscard]] Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

}  // namespace chainlab
