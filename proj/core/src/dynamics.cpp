#include "eqalloc/dynamics.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "eqalloc/error.hpp"

namespace eqalloc {
namespace {

using nlohmann::json;

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorKind::InvalidInput, std::string(what) + " has non-finite entries");
}

Eigen::PartialPivLU<Matrix> resolvent_lu(const CommunityModel& model) {
  const auto n = model.n();
  const double rho = spectral_radius(model.A());
  if (!(rho < 1.0 - CommunityModel::kStabilityMargin)) {
    throw Error(ErrorKind::Instability,
                "community " + std::to_string(model.id()) + ": spectral radius " + std::to_string(rho));
  }
  Matrix I_minus_A = Matrix::Identity(n, n) - model.A();
  Eigen::PartialPivLU<Matrix> lu(I_minus_A);
  if (n > 0 && !(std::abs(lu.determinant()) > 0.0)) {
    throw Error(ErrorKind::Instability, "I - A is singular");
  }
  return lu;
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(process_std >= 0.0) || !std::isfinite(process_std))
    throw Error(ErrorKind::InvalidInput, "process_std must be a nonnegative number");
  if (!(feedback_std >= 0.0) || !std::isfinite(feedback_std))
    throw Error(ErrorKind::InvalidInput, "feedback_std must be a nonnegative number");
}

CommunityModel::CommunityModel(std::size_t id, Matrix A, Matrix B, Matrix C)
    : CommunityModel(id, std::move(A), std::move(B), std::move(C), Vector::Zero(0)) {}

CommunityModel::CommunityModel(std::size_t id, Matrix A, Matrix B, Matrix C, Vector state)
    : id_(id), A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), state_(std::move(state)) {
  const std::string who = "community " + std::to_string(id_);
  if (A_.rows() != A_.cols() || A_.rows() == 0)
    throw Error(ErrorKind::InvalidInput, who + ": A must be square and nonempty, got " + dims(A_));
  if (B_.rows() != A_.rows() || B_.cols() == 0)
    throw Error(ErrorKind::InvalidInput, who + ": B is " + dims(B_) + ", expected " +
                                             std::to_string(A_.rows()) + "xm");
  if (C_.cols() != A_.rows() || C_.rows() == 0)
    throw Error(ErrorKind::InvalidInput, who + ": C is " + dims(C_) + ", expected px" +
                                             std::to_string(A_.rows()));
  if (state_.size() == 0) state_ = Vector::Zero(A_.rows());
  if (state_.size() != A_.rows())
    throw Error(ErrorKind::InvalidInput, who + ": state has length " + std::to_string(state_.size()));
  require_finite(A_, "A");
  require_finite(B_, "B");
  require_finite(C_, "C");
  require_finite(state_, "state");
  const double rho = spectral_radius(A_);
  if (!(rho < 1.0 - kStabilityMargin)) {
    throw Error(ErrorKind::Instability, who + ": spectral radius of A is " + std::to_string(rho));
  }
}

void CommunityModel::set_state(Vector state) {
  if (state.size() != n())
    throw Error(ErrorKind::InvalidInput, "state has length " + std::to_string(state.size()));
  if (!state.allFinite()) throw Error(ErrorKind::Numerical, "non-finite welfare state");
  state_ = std::move(state);
}

CommunityModel CommunityModel::with_output_matrix(Matrix C) const {
  return CommunityModel(id_, A_, B_, std::move(C), state_);
}

double spectral_radius(const Matrix& A) {
  if (A.rows() != A.cols()) throw Error(ErrorKind::InvalidInput, "spectral radius of non-square " + dims(A));
  if (A.size() == 0) return 0.0;
  if (A.rows() == 1) return std::abs(A(0, 0));
  Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "eigenvalue computation failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

StaticMaps static_maps(const CommunityModel& model) {
  auto lu = resolvent_lu(model);
  const auto n = model.n();
  Matrix resolvent = lu.solve(Matrix::Identity(n, n));
  StaticMaps maps;
  maps.H = model.C() * resolvent;
  maps.G = model.C() * lu.solve(model.B());
  return maps;
}

EquilibriumTriplet equilibrium_for(const CommunityModel& model, const Vector& u_bar) {
  if (u_bar.size() != model.m())
    throw Error(ErrorKind::InvalidInput, "u_bar has length " + std::to_string(u_bar.size()));
  auto lu = resolvent_lu(model);
  EquilibriumTriplet eq;
  eq.u_bar = u_bar;
  eq.x_bar = lu.solve(model.B() * u_bar);
  eq.y_bar = model.C() * eq.x_bar;
  return eq;
}

Vector true_outcome(const CommunityModel& model) { return model.C() * model.state(); }

Vector apply_feedback_noise(const Vector& y_true, const Vector& r, FeedbackMode mode) {
  if (r.size() != y_true.size()) throw Error(ErrorKind::InvalidInput, "feedback noise has wrong length");
  if (mode == FeedbackMode::Multiplicative) return (Vector::Ones(r.size()) + r).cwiseProduct(y_true);
  return y_true + r;
}

Vector measure(const CommunityModel& model, const NoiseSpec& noise, Rng& rng) {
  Vector y = true_outcome(model);
  Vector r = draw_normal(rng, model.p(), noise.feedback_std);
  y = apply_feedback_noise(y, r, noise.feedback_mode);
  if (!y.allFinite()) throw Error(ErrorKind::Numerical, "non-finite measurement");
  return y;
}

Vector advance(const CommunityModel& model, const Vector& u, const NoiseSpec& noise, Rng& rng) {
  if (u.size() != model.m())
    throw Error(ErrorKind::InvalidInput, "allocation has length " + std::to_string(u.size()) + ", expected " +
                                             std::to_string(model.m()));
  if (u.size() > 0 && u.minCoeff() < -1e-9) throw Error(ErrorKind::InvalidInput, "negative allocation");
  Vector next = model.A() * model.state() + model.B() * u;
  next += draw_normal(rng, model.n(), noise.process_std);
  if (!next.allFinite()) throw Error(ErrorKind::Numerical, "non-finite welfare state");
  return next;
}

StepResult step(const CommunityModel& model, const Vector& u, const NoiseSpec& noise, Rng& rng) {
  StepResult out;
  out.measured_y = measure(model, noise, rng);
  out.new_state = advance(model, u, noise, rng);
  return out;
}

// --- JSON -------------------------------------------------------------------

Matrix matrix_from_json(const json& j, const char* what) {
  if (j.is_number()) {
    Matrix m(1, 1);
    m(0, 0) = j.get<double>();
    return m;
  }
  if (!j.is_array() || j.empty())
    throw Error(ErrorKind::Parse, std::string(what) + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j.front().is_array()) {
    // A flat array is a single row.
    Matrix m(1, rows);
    for (Eigen::Index c = 0; c < rows; ++c) {
      if (!j[c].is_number()) throw Error(ErrorKind::Parse, std::string(what) + ": non-numeric entry");
      m(0, c) = j[c].get<double>();
    }
    return m;
  }
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw Error(ErrorKind::Parse, std::string(what) + ": ragged row " + std::to_string(r));
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw Error(ErrorKind::Parse, std::string(what) + ": non-numeric entry at row " + std::to_string(r));
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const json& j, const char* what) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) throw Error(ErrorKind::Parse, std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::Parse, std::string(what) + ": non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

NoiseSpec noise_from_json(const json& j) {
  NoiseSpec noise;
  if (j.is_null()) return noise;
  if (!j.is_object()) throw Error(ErrorKind::Parse, "noise: expected an object");
  noise.process_std = j.value("process_std", 0.0);
  noise.feedback_std = j.value("feedback_std", 0.0);
  const auto mode = j.value("feedback_mode", std::string("additive"));
  if (mode == "additive") {
    noise.feedback_mode = FeedbackMode::Additive;
  } else if (mode == "multiplicative") {
    noise.feedback_mode = FeedbackMode::Multiplicative;
  } else {
    throw Error(ErrorKind::Parse, "noise.feedback_mode: unknown mode '" + mode + "'");
  }
  noise.seed = j.value("seed", std::uint64_t{0});
  noise.validate();
  return noise;
}

json to_json(const NoiseSpec& noise) {
  return json{{"process_std", noise.process_std},
              {"feedback_std", noise.feedback_std},
              {"feedback_mode", noise.feedback_mode == FeedbackMode::Multiplicative ? "multiplicative" : "additive"},
              {"seed", noise.seed}};
}

std::vector<CommunityModel> models_from_json(const json& doc) {
  const json& list = doc.is_array() ? doc : doc.at("communities");
  if (!list.is_array() || list.empty()) throw Error(ErrorKind::Parse, "communities: expected a nonempty array");
  std::vector<CommunityModel> models;
  models.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& c = list[i];
    const std::string field = "communities[" + std::to_string(i) + "]";
    for (const char* key : {"A", "B", "C"})
      if (!c.contains(key)) throw Error(ErrorKind::Parse, field + ": missing '" + key + "'");
    Matrix A = matrix_from_json(c["A"], "A");
    Matrix B = matrix_from_json(c["B"], "B");
    Matrix C = matrix_from_json(c["C"], "C");
    Vector x0 = c.contains("x0") ? vector_from_json(c["x0"], "x0") : Vector::Zero(A.rows());
    models.emplace_back(i, std::move(A), std::move(B), std::move(C), std::move(x0));
  }
  return models;
}

json models_to_json(const std::vector<CommunityModel>& models) {
  json list = json::array();
  for (const auto& m : models)
    list.push_back({{"A", to_json(m.A())}, {"B", to_json(m.B())}, {"C", to_json(m.C())}, {"x0", to_json(m.state())}});
  return json{{"schema_version", 1}, {"communities", std::move(list)}};
}

}  // namespace eqalloc
