#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hris {

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;

/// Thrown when an argument is outside the mathematical domain of an operation
/// (non-positive distance, non-positive transmit power, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when a configuration is structurally unsupported by an operation
/// (e.g. the single-antenna closed forms called with M > 1).
class unsupported_configuration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem-size triple shared by every module.
struct Dimensions {
  int users = 0;    // K
  int antennas = 0; // M
  int units = 0;    // N
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

}  // namespace hris
