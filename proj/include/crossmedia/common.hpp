#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace crossmedia {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::RowVectorXcd;
using Eigen::VectorXcd;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt * 1e3); }

}  // namespace crossmedia
