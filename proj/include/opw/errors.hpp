#pragma once

#include <stdexcept>
#include <string>

namespace opw {

// Malformed or inconsistent input data (files, tables, parameters).
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A request whose answer would be infinite or exceed a hard limit.
class Refusal : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace opw
