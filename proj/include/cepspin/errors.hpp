#pragma once

#include <stdexcept>
#include <string>

namespace cepspin {

// ODE driver could not satisfy its tolerances; carries the failing time.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t_fail)
      : std::runtime_error(what + " (at t = " + std::to_string(t_fail) + " s)"),
        t_fail_(t_fail) {}
  double where() const noexcept { return t_fail_; }

 private:
  double t_fail_;
};

class QuadratureError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation requested inside the guard band around the omega = nu1 pole of
// the three-photon closed form.
class PoleError : public std::domain_error {
  using std::domain_error::domain_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what),
        key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace cepspin
