#pragma once

#include <stdexcept>
#include <string>

namespace ergolab {

// Bad argument or precondition (negative t, lambda <= 0, zero denominator, ...).
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A window would wrap around the cyclic grid under the guarded policy.
class aliasing_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerically degenerate geometry (dependent vectors, zero-volume bodies).
class degenerate_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace ergolab
