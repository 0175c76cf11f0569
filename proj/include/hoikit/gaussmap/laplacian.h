#pragma once

#include "hoikit/geometry/types.h"

#include <Eigen/Core>

namespace hoikit::gaussmap {

using Matrix = Eigen::MatrixXd;  ///< N x D, one row per element

enum class StencilWeights { uniform, inverse_distance };

/// Top-K neighbor rows for the KNN Laplacian. Row i lists K neighbors of i
/// (never i itself) with non-negative weights summing to one.
struct LaplacianStencil {
  Eigen::Matrix<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> neighbors;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> weights;

  std::size_t rows() const { return static_cast<std::size_t>(neighbors.rows()); }
  std::size_t k() const { return static_cast<std::size_t>(neighbors.cols()); }
};

inline constexpr std::size_t kDefaultStencilK = 8;

/// Builds the stencil from exact nearest neighbors of each point (self
/// excluded). Throws InvalidArgument unless 1 <= K < N.
LaplacianStencil build_stencil(const std::vector<geometry::Vec3>& points,
                               std::size_t k = kDefaultStencilK,
                               StencilWeights scheme = StencilWeights::uniform);

/// L(x)_i = x_i - sum_k w_ik x_{j_ik}.
Matrix laplacian(const Matrix& x, const LaplacianStencil& stencil);

/// Adjoint of `laplacian`: (L^T y)_i = y_i - sum over rows r, slots k with
/// j_rk = i of w_rk y_r.
Matrix laplacian_transpose(const Matrix& y, const LaplacianStencil& stencil);

/// Positions as an N x 3 matrix.
Matrix to_matrix(const std::vector<geometry::Vec3>& v);
std::vector<geometry::Vec3> from_matrix(const Matrix& m);

struct LaplacianWeights {
  double position = 1.0e5;
  double color = 1.0e5;
  double scale = 1.0e5;
};

struct LaplacianLoss {
  double value = 0.0;
  double position_term = 0.0;
  double color_term = 0.0;
  double scale_term = 0.0;
  Matrix grad_positions;
  Matrix grad_colors;
  Matrix grad_scales;
};

/// lambda_mu * |L(mu) - L(V)|^2 + lambda_c * |L(c)|^2 + lambda_s * |L(s)|^2
/// (sums of squared entries) with exact gradients with respect to mu, c, s.
LaplacianLoss laplacian_loss(const Matrix& positions, const Matrix& reference,
                             const Matrix& colors, const Matrix& scales,
                             const LaplacianWeights& weights, const LaplacianStencil& stencil);

}  // namespace hoikit::gaussmap
