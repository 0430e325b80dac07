#pragma once

#include <Eigen/Dense>

#include <span>

namespace epimob {

/// Dense row-major matrix; row-major so kernels can stream rows.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline std::span<const double> view(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

inline std::span<double> view(Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace epimob
