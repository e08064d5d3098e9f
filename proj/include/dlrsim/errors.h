#pragma once

#include <stdexcept>

namespace dlrsim {

/// Input series do not cover the same horizon.
class HorizonMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace dlrsim
