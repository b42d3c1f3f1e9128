#pragma once

#include <stdexcept>
#include <string>

namespace rainforge {

// Base of every error the library throws. `kind()` is a stable identifier
// written into manifests for failed records.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

// Invalid physical quantity or value-type construction.
class validation_error : public error {
  public:
    using error::error;
    const char* kind() const noexcept override { return "validation"; }
};

// Argument outside a function's mathematical domain.
class domain_error : public error {
  public:
    using error::error;
    const char* kind() const noexcept override { return "domain"; }
};

// Malformed or inconsistent configuration (unknown keys, size mismatches).
class config_error : public error {
  public:
    using error::error;
    const char* kind() const noexcept override { return "config"; }
};

class io_error : public error {
  public:
    using error::error;
    const char* kind() const noexcept override { return "io"; }
};

// A file exists but its content cannot be decoded.
class decode_error : public error {
  public:
    using error::error;
    const char* kind() const noexcept override { return "decode"; }
};

// Background and depth map disagree in size.
class dimension_error : public config_error {
  public:
    using config_error::config_error;
    const char* kind() const noexcept override { return "dimension"; }
};

// A configured budget (particle count) would be exceeded.
class resource_error : public error {
  public:
    using error::error;
    const char* kind() const noexcept override { return "resource"; }
};

// Broken internal contract; indicates a bug rather than bad input.
class internal_error : public error {
  public:
    using error::error;
    const char* kind() const noexcept override { return "internal"; }
};

}  // namespace rainforge
