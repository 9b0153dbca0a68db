#pragma once

#include <stdexcept>
#include <string>

namespace iabnet {

inline constexpr const char* kVersion = "0.1.0";

enum class Tier { MBS, SBS };

// Propagation state of a single link.
enum class LinkState { LOS, NLOS };

// Joint transmitter/receiver lobe alignment of an interfering link.
enum class GainClass { MainMain, MainSide, SideSide };

inline const char* to_string(Tier t) { return t == Tier::MBS ? "mbs" : "sbs"; }
inline const char* to_string(LinkState s) { return s == LinkState::LOS ? "los" : "nlos"; }

// Configuration file is syntactically broken or violates a model invariant.
// `key` names the offending entry when known.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

// Argument outside an operation's domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Cache size whose power draw leaves no transmit power.
class InfeasibleCacheError : public DomainError {
public:
  using DomainError::DomainError;
};

// A quadrature routine could not reach the requested accuracy.
class NumericError : public std::runtime_error {
public:
  NumericError(const std::string& what, double partial_value, double error_estimate)
      : std::runtime_error(what), partial_value_(partial_value), error_estimate_(error_estimate) {}
  double partial_value() const noexcept { return partial_value_; }
  double error_estimate() const noexcept { return error_estimate_; }

private:
  double partial_value_;
  double error_estimate_;
};

}  // namespace iabnet
