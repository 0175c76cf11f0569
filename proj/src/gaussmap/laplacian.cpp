#include "hoikit/gaussmap/laplacian.h"

#include "hoikit/error.h"
#include "hoikit/geometry/knn.h"

namespace hoikit::gaussmap {

LaplacianStencil build_stencil(const std::vector<geometry::Vec3>& points, std::size_t k,
                               StencilWeights scheme) {
  const auto n = points.size();
  if (k == 0 || k >= n) {
    throw InvalidArgument("build_stencil: need 1 <= K < N, got K = " + std::to_string(k) +
                          ", N = " + std::to_string(n));
  }
  const geometry::KnnIndex index(points);
  LaplacianStencil s;
  s.neighbors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  s.weights.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    // k + 1 neighbors include the point itself unless a duplicate with a
    // lower index shadows it; drop whichever entry is i, else the farthest.
    const auto found = index.query(points[i], k + 1);
    Eigen::Index col = 0;
    for (const auto& nb : found) {
      if (nb.index == i || col == static_cast<Eigen::Index>(k)) continue;
      s.neighbors(r, col) = nb.index;
      s.weights(r, col) = scheme == StencilWeights::uniform ? 1.0 : 1.0 / std::max(nb.distance, 1e-12);
      ++col;
    }
    s.weights.row(r) /= s.weights.row(r).sum();
  }
  return s;
}

Matrix laplacian(const Matrix& x, const LaplacianStencil& stencil) {
  if (static_cast<std::size_t>(x.rows()) != stencil.rows()) {
    throw InvalidArgument("laplacian: row count does not match the stencil");
  }
  Matrix out = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 0; k < stencil.neighbors.cols(); ++k) {
      out.row(i) -= stencil.weights(i, k) * x.row(stencil.neighbors(i, k));
    }
  }
  return out;
}

Matrix laplacian_transpose(const Matrix& y, const LaplacianStencil& stencil) {
  if (static_cast<std::size_t>(y.rows()) != stencil.rows()) {
    throw InvalidArgument("laplacian: row count does not match the stencil");
  }
  Matrix out = y;
  // Rows are visited in order, so the accumulation order is fixed.
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index k = 0; k < stencil.neighbors.cols(); ++k) {
      out.row(stencil.neighbors(i, k)) -= stencil.weights(i, k) * y.row(i);
    }
  }
  return out;
}

Matrix to_matrix(const std::vector<geometry::Vec3>& v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 3);
  for (std::size_t i = 0; i < v.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = v[i].transpose();
  return m;
}

std::vector<geometry::Vec3> from_matrix(const Matrix& m) {
  std::vector<geometry::Vec3> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) v[static_cast<std::size_t>(i)] = m.row(i).transpose();
  return v;
}

LaplacianLoss laplacian_loss(const Matrix& positions, const Matrix& reference, const Matrix& colors,
                             const Matrix& scales, const LaplacianWeights& weights,
                             const LaplacianStencil& stencil) {
  const auto n = static_cast<Eigen::Index>(stencil.rows());
  for (const Matrix* m : {&positions, &reference, &colors, &scales}) {
    if (m->rows() != n) throw InvalidArgument("laplacian_loss: row count mismatch");
  }
  if (positions.cols() != reference.cols()) {
    throw InvalidArgument("laplacian_loss: positions and reference differ in width");
  }
  LaplacianLoss out;
  const Matrix rp = laplacian(positions, stencil) - laplacian(reference, stencil);
  const Matrix rc = laplacian(colors, stencil);
  const Matrix rs = laplacian(scales, stencil);
  out.position_term = weights.position * rp.squaredNorm();
  out.color_term = weights.color * rc.squaredNorm();
  out.scale_term = weights.scale * rs.squaredNorm();
  out.value = out.position_term + out.color_term + out.scale_term;
  out.grad_positions = 2.0 * weights.position * laplacian_transpose(rp, stencil);
  out.grad_colors = 2.0 * weights.color * laplacian_transpose(rc, stencil);
  out.grad_scales = 2.0 * weights.scale * laplacian_transpose(rs, stencil);
  return out;
}

}  // namespace hoikit::gaussmap
