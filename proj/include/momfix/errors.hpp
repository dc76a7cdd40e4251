#pragma once

#include <stdexcept>
#include <string>

namespace momfix {

// Thrown when an evaluation lands on (or numerically indistinguishably close
// to) a pole of the function being computed.  Distinct from invalid_argument
// so callers can tell "you asked at a pole" from "you asked nonsense".
class pole_error : public std::domain_error {
public:
  explicit pole_error(const std::string& what) : std::domain_error(what) {}
};

// Thrown by root-finding when a bracket does not straddle a sign change.
class bracket_error : public std::runtime_error {
public:
  explicit bracket_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a propagated error estimate exceeds the caller's cap, i.e. the
// requested value is no longer trustworthy at binary64.
class precision_error : public std::runtime_error {
public:
  explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a structural count (zeros found in a shell) disagrees with the
// expected cardinality.
class count_error : public std::runtime_error {
public:
  explicit count_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace momfix
