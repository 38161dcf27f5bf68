#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "eqalloc/rng.hpp"
#include "eqalloc/types.hpp"

namespace eqalloc {

enum class FeedbackMode { Additive, Multiplicative };

struct NoiseSpec {
  double process_std = 0.0;
  double feedback_std = 0.0;
  /// Multiplicative: measured y = (1 + r) .* (C x), r ~ N(0, feedback_std^2).
  FeedbackMode feedback_mode = FeedbackMode::Additive;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Linear funds-to-welfare system of one community:
///   x[k+1] = A x[k] + B u[k] + w[k],   y[k] = C x[k] + r[k].
/// The matrices are fixed at construction; only the welfare state moves.
class CommunityModel {
 public:
  /// Spectral radius of A must stay below this bound.
  static constexpr double kStabilityMargin = 1e-9;

  CommunityModel(std::size_t id, Matrix A, Matrix B, Matrix C);
  CommunityModel(std::size_t id, Matrix A, Matrix B, Matrix C, Vector state);

  std::size_t id() const noexcept { return id_; }
  const Matrix& A() const noexcept { return A_; }
  const Matrix& B() const noexcept { return B_; }
  const Matrix& C() const noexcept { return C_; }
  const Vector& state() const noexcept { return state_; }

  Eigen::Index n() const noexcept { return A_.rows(); }
  Eigen::Index m() const noexcept { return B_.cols(); }
  Eigen::Index p() const noexcept { return C_.rows(); }

  void set_state(Vector state);

  /// Same A, B, state; new output matrix (used by drifting scenarios).
  CommunityModel with_output_matrix(Matrix C) const;

 private:
  std::size_t id_;
  Matrix A_;
  Matrix B_;
  Matrix C_;
  Vector state_;
};

struct StaticMaps {
  Matrix G;  ///< C (I - A)^-1 B, p x m
  Matrix H;  ///< C (I - A)^-1,   p x n
};

struct EquilibriumTriplet {
  Vector u_bar;
  Vector x_bar;
  Vector y_bar;
};

struct StepResult {
  Vector new_state;
  Vector measured_y;
};

/// max |lambda(A)|.
double spectral_radius(const Matrix& A);

StaticMaps static_maps(const CommunityModel& model);

EquilibriumTriplet equilibrium_for(const CommunityModel& model, const Vector& u_bar);

/// Noise-free indicator C x of the current state.
Vector true_outcome(const CommunityModel& model);

/// Applies a given feedback-noise realization r to a true indicator.
Vector apply_feedback_noise(const Vector& y_true, const Vector& r, FeedbackMode mode);

/// Noisy measurement of the current (pre-step) state.
Vector measure(const CommunityModel& model, const NoiseSpec& noise, Rng& rng);

/// A x + B u + w for a drawn process noise w.
Vector advance(const CommunityModel& model, const Vector& u, const NoiseSpec& noise, Rng& rng);

/// One period: measures the pre-step state, then advances it with u.
/// The measurement draw precedes the process-noise draw.
StepResult step(const CommunityModel& model, const Vector& u, const NoiseSpec& noise, Rng& rng);

// JSON document schema:
//   { "schema_version": 1,
//     "communities": [ { "A": [[...]], "B": [[...]], "C": [[...]], "x0": [...] }, ... ],
//     "noise": { "process_std": 0, "feedback_std": 0, "feedback_mode": "additive", "seed": 0 } }
// Matrices are arrays of rows. "x0" defaults to zeros; "noise" is optional.
Matrix matrix_from_json(const nlohmann::json& j, const char* what);
Vector vector_from_json(const nlohmann::json& j, const char* what);
nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const Vector& v);

std::vector<CommunityModel> models_from_json(const nlohmann::json& doc);
NoiseSpec noise_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NoiseSpec& noise);
nlohmann::json models_to_json(const std::vector<CommunityModel>& models);

}  // namespace eqalloc
