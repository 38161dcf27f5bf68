#include "eqalloc/estimation.hpp"

#include <cmath>
#include <string>

#include "eqalloc/error.hpp"
#include "eqalloc/rng.hpp"

namespace eqalloc {

MapEstimate fit_linear(std::span<const IoRecord> records, std::optional<std::size_t> window) {
  if (records.empty()) throw Error(ErrorKind::NoData, "no records to fit");
  if (window && *window == 0) throw Error(ErrorKind::InvalidInput, "window must be at least 1");
  const std::size_t take = window ? std::min(*window, records.size()) : records.size();
  const auto used = records.subspan(records.size() - take);

  const Eigen::Index m = used.front().u.size();
  const Eigen::Index p = used.front().y.size();
  if (m == 0 || p == 0) throw Error(ErrorKind::InvalidInput, "records must have nonempty u and y");
  Matrix U(static_cast<Eigen::Index>(take), m);
  Matrix Y(static_cast<Eigen::Index>(take), p);
  for (std::size_t k = 0; k < take; ++k) {
    const auto& rec = used[k];
    if (rec.u.size() != m || rec.y.size() != p)
      throw Error(ErrorKind::InvalidInput, "record dimensions differ within one community");
    if (!rec.u.allFinite() || !rec.y.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite record");
    U.row(static_cast<Eigen::Index>(k)) = rec.u.transpose();
    Y.row(static_cast<Eigen::Index>(k)) = rec.y.transpose();
  }

  // U G^T = Y in the least-squares sense; COD gives the minimum-norm solution.
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(U);
  MapEstimate est;
  est.G_hat = cod.solve(Y).transpose();
  est.n_samples = take;
  est.window = window;
  est.rank_deficient = cod.rank() < m;
  if (!est.G_hat.allFinite()) throw Error(ErrorKind::Numerical, "non-finite map estimate");
  return est;
}

MapEstimate perturb_estimate(const Matrix& G, double rel_std, std::uint64_t seed) {
  if (!(rel_std >= 0.0)) throw Error(ErrorKind::InvalidInput, "rel_std must be nonnegative");
  MapEstimate est;
  est.G_hat = G;
  if (rel_std > 0.0) {
    Rng rng = make_rng({seed, stream::kEstimate});
    std::normal_distribution<double> eps(0.0, rel_std);
    for (Eigen::Index c = 0; c < G.cols(); ++c)
      for (Eigen::Index r = 0; r < G.rows(); ++r) est.G_hat(r, c) = G(r, c) * (1.0 + eps(rng));
  }
  return est;
}

double residual_sum(std::span<const IoRecord> records, const Matrix& G) {
  double total = 0.0;
  for (const auto& rec : records) total += (rec.y - G * rec.u).squaredNorm();
  return total;
}

LearnedMap relearn_step(LearnedMap current, IoRecord record, std::optional<std::size_t> window) {
  if (!current.history.empty() &&
      (record.u.size() != current.history.front().u.size() || record.y.size() != current.history.front().y.size()))
    throw Error(ErrorKind::InvalidInput, "record dimensions differ from the history");
  current.history.push_back(std::move(record));
  current.estimate = fit_linear(current.history, window);
  return current;
}

}  // namespace eqalloc
