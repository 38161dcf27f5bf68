#include "eqalloc/objectives.hpp"

#include <cmath>
#include <string>

#include "eqalloc/error.hpp"

namespace eqalloc {
namespace {

void check_rows(const NeighborhoodGraph& graph, const Profile& p, const char* what) {
  if (static_cast<std::size_t>(p.rows()) != graph.size())
    throw Error(ErrorKind::InvalidInput, std::string(what) + " has " + std::to_string(p.rows()) +
                                             " rows for a graph of " + std::to_string(graph.size()) + " nodes");
}

// d/dv of sum_j w_j ||v_j - mean_{N_j} v||^2, given deviations d.
// Row i: 2 w_i d_i - sum_{j in N_i} (2 w_j / N_j) d_j  (the graph is symmetric).
template <class Weight>
Profile weighted_deviation_gradient(const NeighborhoodGraph& graph, const Profile& dev, Weight weight) {
  const auto n = graph.size();
  Profile scaled(dev.rows(), dev.cols());
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    scaled.row(row) = dev.row(row) * (2.0 * weight(j) / static_cast<double>(graph.degree(j)));
  }
  Profile grad(dev.rows(), dev.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    grad.row(row) = dev.row(row) * (2.0 * weight(i));
    for (auto j : graph.neighbors(i)) grad.row(row) -= scaled.row(static_cast<Eigen::Index>(j));
  }
  return grad;
}

void check_maps(std::span<const Matrix> maps, const Profile& u) {
  if (static_cast<Eigen::Index>(maps.size()) != u.rows())
    throw Error(ErrorKind::InvalidInput, "expected one map per community");
  for (const auto& G : maps)
    if (G.cols() != u.cols()) throw Error(ErrorKind::InvalidInput, "map column count differs from m");
}

}  // namespace

void CostSpec::validate(std::size_t n_communities) const {
  for (double w : {rho, sigma, equity_weight})
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidInput, "cost weights must be nonnegative");
  for (const auto* omega : {&omega_u, &omega_y}) {
    if (!omega->empty() && omega->size() != n_communities)
      throw Error(ErrorKind::Validation, "omega arrays must have one entry per community (" +
                                             std::to_string(n_communities) + "), got " +
                                             std::to_string(omega->size()));
    for (double w : *omega)
      if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorKind::InvalidInput, "omega weights must lie in [0, 1]");
  }
}

Profile neighbor_deviations(const NeighborhoodGraph& graph, const Profile& values) {
  check_rows(graph, values, "profile");
  Profile dev(values.rows(), values.cols());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const auto nbrs = graph.neighbors(i);
    if (nbrs.empty()) throw Error(ErrorKind::IsolatedNode, "community " + std::to_string(i) + " has no neighbors");
    dev.row(row) = values.row(row);
    const double share = 1.0 / static_cast<double>(nbrs.size());
    for (auto j : nbrs) dev.row(row) -= share * values.row(static_cast<Eigen::Index>(j));
  }
  return dev;
}

double neqm(const NeighborhoodGraph& graph, const Profile& y, std::size_t i) {
  return (y.row(static_cast<Eigen::Index>(i)).transpose() - neighbor_mean(graph, y, i)).squaredNorm();
}

double wc_neqm(const NeighborhoodGraph& graph, const Profile& y, std::size_t i) {
  return (y.row(static_cast<Eigen::Index>(i)).transpose() - neighbor_mean(graph, y, i)).lpNorm<Eigen::Infinity>();
}

double equitability_violation(const NeighborhoodGraph& graph, const Profile& y, Metric metric) {
  check_rows(graph, y, "outcome profile");
  const Profile dev = neighbor_deviations(graph, y);
  if (metric == Metric::NEqM) return dev.squaredNorm();
  return dev.rowwise().lpNorm<Eigen::Infinity>().sum();
}

double equal_allocation_cost(const Profile& u) {
  if (u.rows() == 0) return 0.0;
  // sum_{i,j} ||u_i - u_j||^2 = 2 N sum_i ||u_i - mean||^2
  const Eigen::RowVectorXd mean = u.colwise().mean();
  return 2.0 * static_cast<double>(u.rows()) * (u.rowwise() - mean).squaredNorm();
}

double dissatisfaction(const NeighborhoodGraph& graph, const Profile& u, const Profile& y, std::size_t i,
                       double omega_u_i, double omega_y_i) {
  double out = 0.0;
  if (omega_u_i != 0.0)
    out += omega_u_i * (u.row(static_cast<Eigen::Index>(i)).transpose() - neighbor_mean(graph, u, i)).squaredNorm();
  if (omega_y_i != 0.0) out += omega_y_i * neqm(graph, y, i);
  return out;
}

double total_cost(const CostSpec& spec, const NeighborhoodGraph& graph, const Profile& u, const Profile& y) {
  check_rows(graph, u, "allocation profile");
  check_rows(graph, y, "outcome profile");
  double cost = 0.0;
  if (spec.rho != 0.0) cost += spec.rho * equal_allocation_cost(u);
  if (spec.equity_weight != 0.0) cost += spec.equity_weight * equitability_violation(graph, y, spec.metric);
  if (spec.sigma != 0.0) {
    double delta = 0.0;
    if (!spec.omega_u.empty()) {
      const Profile du = neighbor_deviations(graph, u);
      for (std::size_t i = 0; i < graph.size(); ++i)
        delta += spec.omega_u[i] * du.row(static_cast<Eigen::Index>(i)).squaredNorm();
    }
    if (!spec.omega_y.empty()) {
      const Profile dy = neighbor_deviations(graph, y);
      for (std::size_t i = 0; i < graph.size(); ++i)
        delta += spec.omega_y[i] * dy.row(static_cast<Eigen::Index>(i)).squaredNorm();
    }
    cost += spec.sigma * delta;
  }
  return cost;
}

Profile predict_outcomes(std::span<const Matrix> maps, const Profile& u) {
  check_maps(maps, u);
  const Eigen::Index p = maps.empty() ? 0 : maps.front().rows();
  Profile y(u.rows(), p);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const auto& G = maps[static_cast<std::size_t>(i)];
    if (G.rows() != p) throw Error(ErrorKind::InvalidInput, "maps disagree on the outcome dimension");
    y.row(i).noalias() = (G * u.row(i).transpose()).transpose();
  }
  return y;
}

Profile cost_gradient(const CostSpec& spec, const NeighborhoodGraph& graph, const Profile& u,
                      std::span<const Matrix> maps) {
  if (spec.metric != Metric::NEqM)
    throw Error(ErrorKind::UnsupportedMetric, "gradient policies require the NEqM metric");
  return feedback_gradient(spec, graph, u, predict_outcomes(maps, u), maps);
}

Profile feedback_gradient(const CostSpec& spec, const NeighborhoodGraph& graph, const Profile& u,
                          const Profile& y, std::span<const Matrix> maps) {
  if (spec.metric != Metric::NEqM)
    throw Error(ErrorKind::UnsupportedMetric, "gradient policies require the NEqM metric");
  check_rows(graph, u, "allocation profile");
  check_rows(graph, y, "outcome profile");
  check_maps(maps, u);

  Profile grad = Profile::Zero(u.rows(), u.cols());

  // Outcome side: each y_j carries weight equity_weight + sigma * omega_y_j.
  const bool outcome_terms = spec.equity_weight != 0.0 || (spec.sigma != 0.0 && !spec.omega_y.empty());
  if (outcome_terms) {
    const Profile dy = neighbor_deviations(graph, y);
    const Profile gy = weighted_deviation_gradient(
        graph, dy, [&](std::size_t j) { return spec.equity_weight + spec.sigma * spec.omega_y_at(j); });
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const auto& G = maps[static_cast<std::size_t>(i)];
      if (G.rows() != y.cols()) throw Error(ErrorKind::InvalidInput, "map row count differs from p");
      grad.row(i).noalias() += (G.transpose() * gy.row(i).transpose()).transpose();
    }
  }

  // Allocation side of the dissatisfaction terms.
  if (spec.sigma != 0.0 && !spec.omega_u.empty()) {
    const Profile du = neighbor_deviations(graph, u);
    grad += weighted_deviation_gradient(graph, du, [&](std::size_t j) { return spec.sigma * spec.omega_u_at(j); });
  }

  // Equal allocation: d/du_i rho * sum_{j,l} ||u_j - u_l||^2 = 4 rho (N u_i - sum_j u_j).
  if (spec.rho != 0.0) {
    const Eigen::RowVectorXd sum = u.colwise().sum();
    grad += 4.0 * spec.rho * ((static_cast<double>(u.rows()) * u).rowwise() - sum);
  }

  if (!grad.allFinite()) throw Error(ErrorKind::Numerical, "non-finite gradient");
  return grad;
}

}  // namespace eqalloc
