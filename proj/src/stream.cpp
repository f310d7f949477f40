#include "sisomap/stream.hpp"

#include "sisomap/data.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <chrono>
#include <limits>
#include <ostream>
#include <string>

namespace sisomap {

BatchModel BatchModel::build(DataMatrix X_b, Index k, Index d) {
  const Index n = X_b.rows();
  if (d < 1 || d >= n)
    throw InvalidArgument("build_batch_model: d must be in [1, n), got d=" + std::to_string(d) +
                          " for n=" + std::to_string(n));
  IsomapResult fit = isomap_fit(X_b, k, d);
  return from_parts(std::move(X_b), std::move(fit.geodesics), std::move(fit.embedding), k);
}

BatchModel BatchModel::from_parts(DataMatrix X_b, GeodesicMatrix G_b, Embedding Y_b, Index k) {
  const Index n = X_b.rows();
  if (G_b.size() != n || Y_b.size() != n)
    throw InvalidArgument("BatchModel: samples, geodesics and embedding disagree on n");
  if (Y_b.dim() < 1 || Y_b.dim() >= n) throw InvalidArgument("BatchModel: d must be in [1, n)");
  if (k < 1 || k > n) throw InvalidArgument("BatchModel: k must be in [1, n]");
  BatchModel m;
  m.X_ = std::move(X_b);
  m.G_ = std::move(G_b);
  m.Y_ = std::move(Y_b);
  m.k_ = k;
  m.prepare();
  return m;
}

void BatchModel::prepare() {
  const Index n = size();
  const Index d = dim();
  const ColMatrix<double> sq = G_.dist.array().square().matrix();
  sq_row_means_ = sq.rowwise().mean();
  sq_grand_mean_ = sq_row_means_.mean();
  coord_sums_ = Y_.coords.colwise().sum().transpose();

  Eigen::HouseholderQR<ColMatrix<double>> qr(Y_.coords);
  q_ = qr.householderQ() * ColMatrix<double>::Identity(n, d);
  r_ = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();

  const Eigen::VectorXd sv = Eigen::JacobiSVD<ColMatrix<double>>(r_).singularValues();
  const double smax = sv(0), smin = sv(d - 1);
  condition_ = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(smin > 0.0) || condition_ * condition_ > 1e12)
    throw NumericalError("BatchModel: Y_b' Y_b is singular (condition number " +
                         format_double(condition_ * condition_) + ")");
}

Eigen::VectorXd BatchModel::solve_least_squares(const Eigen::Ref<const Eigen::VectorXd>& c) const {
  const Eigen::VectorXd qtc = q_.transpose() * c;
  return r_.triangularView<Eigen::Upper>().solve(qtc);
}

Eigen::VectorXd approx_geodesics(const BatchModel& model, const NeighborQuery& q) {
  const auto& G = model.geodesics().dist;
  Eigen::VectorXd g =
      Eigen::VectorXd::Constant(model.size(), std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < q.indices.size(); ++j)
    g = g.cwiseMin((q.distances[j] + G.col(q.indices[j]).array()).matrix());
  return g;
}

Eigen::VectorXd inner_product_targets(const BatchModel& model,
                                      const Eigen::Ref<const Eigen::VectorXd>& g) {
  const Eigen::ArrayXd g2 = g.array().square();
  return 0.5 * (g2.mean() - g2 - model.squared_grand_mean() + model.squared_row_means().array())
                   .matrix();
}

PointMapping map_point_detail(const BatchModel& model,
                              const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (x.size() != model.input_dim())
    throw InvalidArgument("map_point: sample has dimension " + std::to_string(x.size()) +
                          ", model expects " + std::to_string(model.input_dim()));
  const NeighborQuery q = knn_query(model.samples(), x, model.k());
  const Eigen::VectorXd g = approx_geodesics(model, q);
  const Eigen::VectorXd c = inner_product_targets(model, g);

  PointMapping out;
  out.p = model.solve_least_squares(c);
  // Subtract the mean of the stacked rows [Y_b; p].
  const double n1 = static_cast<double>(model.size() + 1);
  out.y = out.p - (model.coord_sums() + out.p) / n1;
  out.residual = (model.coords() * out.p - c).norm();
  out.target_norm = c.norm();
  return out;
}

Eigen::VectorXd map_point(const BatchModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (x.size() != model.input_dim())
    throw InvalidArgument("map_point: sample has dimension " + std::to_string(x.size()) +
                          ", model expects " + std::to_string(model.input_dim()));
  const NeighborQuery q = knn_query(model.samples(), x, model.k());
  const Eigen::VectorXd c = inner_product_targets(model, approx_geodesics(model, q));
  const Eigen::VectorXd p = model.solve_least_squares(c);
  return p - (model.coord_sums() + p) / static_cast<double>(model.size() + 1);
}

StreamMapping run_stream(const BatchModel& model, const DataMatrix& X_s, bool with_residuals) {
  if (X_s.rows() > 0 && X_s.cols() != model.input_dim())
    throw InvalidArgument("run_stream: stream dimension " + std::to_string(X_s.cols()) +
                          " does not match the batch (" + std::to_string(model.input_dim()) + ")");
  using Clock = std::chrono::steady_clock;
  const Index m = X_s.rows();
  StreamMapping out;
  out.coords.resize(m, model.dim());
  out.per_point_nanos.reserve(static_cast<std::size_t>(m));
  out.relative_residuals.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const auto start = Clock::now();
    const Eigen::VectorXd y = map_point(model, X_s.row(i));
    const auto stop = Clock::now();
    out.coords.row(i) = y.transpose();
    out.per_point_nanos.push_back(
        std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
  }
  if (!with_residuals) return out;
  for (Index i = 0; i < m; ++i) {
    const PointMapping pm = map_point_detail(model, X_s.row(i));
    out.relative_residuals.push_back(pm.target_norm > 0.0 ? pm.residual / pm.target_norm : 0.0);
  }
  return out;
}

void write_stream_csv(std::ostream& out, const StreamMapping& mapping, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  for (Index i = 0; i < mapping.coords.rows(); ++i) {
    for (Index j = 0; j < mapping.coords.cols(); ++j) out << format_double(mapping.coords(i, j)) << ',';
    out << mapping.per_point_nanos[static_cast<std::size_t>(i)] << '\n';
  }
}

}  // namespace sisomap
