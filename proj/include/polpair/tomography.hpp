#pragma once

#include "polpair/counting.hpp"
#include "polpair/optics.hpp"
#include "polpair/quantum.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace polpair {

enum class CountsMode { net, raw };

/// The sixteen analyzer configurations used for reconstruction, realizing
/// projections onto pairs from {H, V, D, R, L} in the canonical order
/// HH, HV, VV, VH, RH, RV, DV, DH, DR, DD, RD, HD, VD, VL, HL, RL
/// (first letter Alice, second Bob). Alice analyzes through her V output,
/// Bob through his H output.
std::vector<JointSetting> james_settings();

/// Complete 16-record tomography acquisition, in canonical setting order.
struct TomographySet {
  std::array<MeasurementRecord, 16> records;

  /// Checks the records realize the canonical projections (order included).
  void validate() const;

  static TomographySet from_records(const std::vector<MeasurementRecord>& records);
};

struct TomographyOptions {
  CountsMode mode = CountsMode::net;
  /// Optional per-setting relative detection efficiencies (length 16).
  /// Counts are divided by these before reconstruction; empty = all 1.
  std::vector<double> efficiencies;
  /// Iteration budget per optimizer start.
  int max_iterations = 2000;
};

/// Direct linear solve of <P_nu> = n_nu / N over Hermitian matrices.
/// Unit trace by construction; eigenvalues may be negative.
Matrix4c linear_inversion(const TomographySet& t, CountsMode mode = CountsMode::net);

struct MleResult {
  DensityMatrix rho;
  double objective = 0.0;
  int iterations = 0;  // summed over starts
  int starts = 0;
  long evaluations = 0;
  int clamped_records = 0;  // negative net counts clamped to zero
};

/// Raised when no optimizer start converges within its iteration budget.
class MleError : public std::runtime_error {
 public:
  MleError(const Matrix4c& best, double residual)
      : std::runtime_error("mle_reconstruct: optimizer failed to converge"),
        best_so_far(best),
        residual(residual) {}
  Matrix4c best_so_far;
  double residual;
};

/// Maximum-likelihood reconstruction over the Cholesky parameterization
/// rho(T) = T†T / tr(T†T), minimizing the Gaussian-approximated negative
/// log-likelihood sum_nu (N p_nu - n_nu)² / (2 N p_nu). Physical by
/// construction. Multi-start: a linear-inversion seed plus perturbations.
MleResult mle_reconstruct_detailed(const TomographySet& t, const TomographyOptions& opts = {});
DensityMatrix mle_reconstruct(const TomographySet& t, const TomographyOptions& opts = {});

struct RecoveryResult {
  DensityMatrix rho_in;
  JonesMatrix j_A;
  JonesMatrix j_B;
  double a = 0.0;         // recovered Schmidt amplitude, a² + b² = 1
  double fidelity = 0.0;  // best fidelity against the target family
  int starts = 0;
  int iterations = 0;
};

/// Undoes the fiber rotations: maximizes
/// F((J_A ⊗ J_B)† rho_out (J_A ⊗ J_B), |Psi(a, b)><Psi(a, b)|) over the two
/// Jones unitaries (3 angles each) and the amplitude a. Multi-start local
/// descent; ties broken toward the smallest rotations.
RecoveryResult recover_chip_state(const DensityMatrix& rho_out);

/// Best fidelity against any maximally entangled state (recovery with the
/// amplitude pinned to 1/sqrt(2)).
double fidelity_to_maximal(const DensityMatrix& rho_in);

} // namespace polpair
