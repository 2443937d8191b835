#ifndef WASSIM_TYPES_HPP
#define WASSIM_TYPES_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wassim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidCoordinates : Error {
  using Error::Error;
};
struct InvalidScale : Error {
  using Error::Error;
};
struct InvalidModel : Error {
  using Error::Error;
};
struct InvalidField : Error {
  using Error::Error;
};
struct EvaluationError : Error {
  using Error::Error;
};
struct DegenerateMatching : Error {
  using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions; carries the best estimate.
struct NonConvergent : Error {
  double best_estimate;
  double error_bound;
  NonConvergent(const std::string& msg, double best, double err)
      : Error(msg), best_estimate(best), error_bound(err) {}
};

struct MatchingViolation : Error {
  int gap_index;
  MatchingViolation(const std::string& msg, int idx) : Error(msg), gap_index(idx) {}
};

struct StiffnessError : Error {
  double time;
  Vector state;
  StiffnessError(const std::string& msg, double t, Vector s)
      : Error(msg), time(t), state(std::move(s)) {}
};

/// Sign-magnitude representation of a real number in log domain. Needed
/// because scaling factors like sqrt(2*pi^3)(sigma^3/d) e^{d^2/8 sigma^2}
/// overflow doubles already for moderate sigma/d ratios.
struct LogScaledValue {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  int sign = 0;  // +1, -1, or 0 (exact zero; log_magnitude then ignored)

  static LogScaledValue zero() { return {}; }

  static LogScaledValue from_log(double log_mag, int s = 1) {
    LogScaledValue v;
    v.log_magnitude = log_mag;
    v.sign = s;
    return v;
  }

  static LogScaledValue from_value(double x) {
    LogScaledValue v;
    if (x == 0.0) return v;
    v.sign = x > 0 ? 1 : -1;
    v.log_magnitude = std::log(std::abs(x));
    return v;
  }

  /// Converts back to a plain double; may overflow to +-inf.
  double value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_magnitude);
  }

  friend LogScaledValue operator*(const LogScaledValue& a, const LogScaledValue& b) {
    if (a.sign == 0 || b.sign == 0) return zero();
    return from_log(a.log_magnitude + b.log_magnitude, a.sign * b.sign);
  }

  friend LogScaledValue operator/(const LogScaledValue& a, const LogScaledValue& b) {
    if (a.sign == 0) return zero();
    return from_log(a.log_magnitude - b.log_magnitude, a.sign * b.sign);
  }

  friend LogScaledValue operator+(const LogScaledValue& a, const LogScaledValue& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const LogScaledValue& hi = a.log_magnitude >= b.log_magnitude ? a : b;
    const LogScaledValue& lo = a.log_magnitude >= b.log_magnitude ? b : a;
    double r = hi.sign * lo.sign * std::exp(lo.log_magnitude - hi.log_magnitude);
    double s = 1.0 + r;  // r in [-1, 1]
    if (s == 0.0) return zero();
    return from_log(hi.log_magnitude + std::log(std::abs(s)), s > 0 ? hi.sign : -hi.sign);
  }

  friend LogScaledValue operator-(const LogScaledValue& a, const LogScaledValue& b) {
    LogScaledValue nb = b;
    nb.sign = -nb.sign;
    return a + nb;
  }
};

}  // namespace wassim

#endif  // WASSIM_TYPES_HPP
