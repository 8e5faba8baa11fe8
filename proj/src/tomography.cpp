#include "polpair/tomography.hpp"

#include "polpair/optimize.hpp"
#include "polpair/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace polpair {

namespace {

constexpr double kPi4 = kPi / 4.0;
constexpr double kPi8 = kPi / 8.0;

// Plate angles realizing each projection through the given output port.
AnalyzerSetting alice_projection(char p) {
  switch (p) {
    case 'H': return AnalyzerSetting(0.0, kPi4, Port::V);
    case 'V': return AnalyzerSetting(0.0, 0.0, Port::V);
    case 'D': return AnalyzerSetting(kPi4, 3.0 * kPi8, Port::V);
    case 'R': return AnalyzerSetting(0.0, 3.0 * kPi8, Port::V);
    default:  return AnalyzerSetting(0.0, kPi8, Port::V); // L
  }
}

AnalyzerSetting bob_projection(char p) {
  switch (p) {
    case 'H': return AnalyzerSetting(0.0, 0.0, Port::H);
    case 'V': return AnalyzerSetting(0.0, kPi4, Port::H);
    case 'D': return AnalyzerSetting(kPi4, kPi8, Port::H);
    case 'R': return AnalyzerSetting(0.0, kPi8, Port::H);
    default:  return AnalyzerSetting(0.0, 3.0 * kPi8, Port::H); // L
  }
}

constexpr const char* kJamesOrder[16] = {"HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
                                         "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};

std::array<Matrix4c, 16> james_projectors() {
  std::array<Matrix4c, 16> ops;
  const auto settings = james_settings();
  for (int i = 0; i < 16; ++i)
    ops[i] = kron(analyzer_projector(settings[i].alice), analyzer_projector(settings[i].bob));
  return ops;
}

// Lower-triangular T from 16 real parameters (real diagonal first, then the
// sub-diagonal entries as re/im pairs), and rho = T†T / tr(T†T).
Matrix4c cholesky_to_rho(const Eigen::VectorXd& t) {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = t(0);
  m(1, 1) = t(1);
  m(2, 2) = t(2);
  m(3, 3) = t(3);
  m(1, 0) = Complex(t(4), t(5));
  m(2, 0) = Complex(t(6), t(7));
  m(2, 1) = Complex(t(8), t(9));
  m(3, 0) = Complex(t(10), t(11));
  m(3, 1) = Complex(t(12), t(13));
  m(3, 2) = Complex(t(14), t(15));
  Matrix4c rho = m.adjoint() * m;
  const double tr = rho.trace().real();
  return rho / tr;
}

Eigen::VectorXd rho_to_cholesky(const Matrix4c& rho) {
  // Want lower-triangular T with T†T = rho. With J the index-reversal
  // permutation and J rho J = L L† (standard Cholesky), T = J L† J works.
  Matrix4c rev;
  rev.setZero();
  rev(0, 3) = rev(1, 2) = rev(2, 1) = rev(3, 0) = 1.0;
  const Matrix4c reversed = rev * rho * rev;
  Eigen::LLT<Matrix4c> llt(reversed);
  const Matrix4c l = llt.matrixL();
  const Matrix4c t = rev * l.adjoint() * rev;
  Eigen::VectorXd p(16);
  p(0) = t(0, 0).real();
  p(1) = t(1, 1).real();
  p(2) = t(2, 2).real();
  p(3) = t(3, 3).real();
  p(4) = t(1, 0).real();
  p(5) = t(1, 0).imag();
  p(6) = t(2, 0).real();
  p(7) = t(2, 0).imag();
  p(8) = t(2, 1).real();
  p(9) = t(2, 1).imag();
  p(10) = t(3, 0).real();
  p(11) = t(3, 0).imag();
  p(12) = t(3, 1).real();
  p(13) = t(3, 1).imag();
  p(14) = t(3, 2).real();
  p(15) = t(3, 2).imag();
  return p;
}

std::array<double, 16> extract_counts(const TomographySet& t, const TomographyOptions& opts,
                                      int* clamped) {
  std::array<double, 16> n{};
  for (int i = 0; i < 16; ++i) {
    double v = (opts.mode == CountsMode::net) ? t.records[i].n_net : t.records[i].n_raw;
    if (v < 0.0) {
      v = 0.0; // likelihood needs nonnegative observations
      if (clamped) ++(*clamped);
    }
    if (!opts.efficiencies.empty()) {
      if (opts.efficiencies.size() != 16)
        throw std::invalid_argument("TomographyOptions: efficiencies must have length 16");
      if (opts.efficiencies[i] <= 0.0)
        throw std::invalid_argument("TomographyOptions: efficiencies must be positive");
      v /= opts.efficiencies[i];
    }
    n[i] = v;
  }
  return n;
}

// Count normalization from the complete-basis subset {HH, HV, VV, VH}
// (records 0..3 in canonical order).
double basis_normalization(const std::array<double, 16>& n) {
  const double total = n[0] + n[1] + n[2] + n[3];
  if (total <= 0.0)
    throw std::invalid_argument("tomography: basis records carry no counts");
  return total;
}

} // namespace

std::vector<JointSetting> james_settings() {
  std::vector<JointSetting> out;
  out.reserve(16);
  for (const char* pair : kJamesOrder)
    out.push_back(JointSetting{alice_projection(pair[0]), bob_projection(pair[1])});
  return out;
}

void TomographySet::validate() const {
  const auto canonical = james_settings();
  for (int i = 0; i < 16; ++i) {
    const auto& s = records[i].setting;
    const double da =
        (analyzer_projector(s.alice) - analyzer_projector(canonical[i].alice)).cwiseAbs().maxCoeff();
    const double db =
        (analyzer_projector(s.bob) - analyzer_projector(canonical[i].bob)).cwiseAbs().maxCoeff();
    if (da > 1e-9 || db > 1e-9)
      throw std::invalid_argument("TomographySet: record " + std::to_string(i) +
                                  " does not realize the canonical projection");
  }
}

TomographySet TomographySet::from_records(const std::vector<MeasurementRecord>& records) {
  if (records.size() != 16)
    throw std::invalid_argument("TomographySet: need exactly 16 records");
  TomographySet t;
  std::copy(records.begin(), records.end(), t.records.begin());
  t.validate();
  return t;
}

Matrix4c linear_inversion(const TomographySet& t, CountsMode mode) {
  TomographyOptions opts;
  opts.mode = mode;
  const auto n = extract_counts(t, opts, nullptr);
  const double norm = basis_normalization(n);

  // Hermitian basis: 4 diagonal units, then (E_ij + E_ji) and i(E_ij - E_ji)
  // for each i < j.
  std::vector<Matrix4c> basis;
  for (int k = 0; k < 4; ++k) {
    Matrix4c b = Matrix4c::Zero();
    b(k, k) = 1.0;
    basis.push_back(b);
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      Matrix4c bs = Matrix4c::Zero();
      bs(i, j) = 1.0;
      bs(j, i) = 1.0;
      basis.push_back(bs);
      Matrix4c ba = Matrix4c::Zero();
      ba(i, j) = Complex(0.0, 1.0);
      ba(j, i) = Complex(0.0, -1.0);
      basis.push_back(ba);
    }
  }

  const auto ops = james_projectors();
  Eigen::MatrixXd a(16, 16);
  Eigen::VectorXd p(16);
  for (int nu = 0; nu < 16; ++nu) {
    for (int m = 0; m < 16; ++m) a(nu, m) = (ops[nu] * basis[m]).trace().real();
    p(nu) = n[nu] / norm;
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(p);

  Matrix4c rho = Matrix4c::Zero();
  for (int m = 0; m < 16; ++m) rho += x(m) * basis[m];
  return hermitize(rho);
}

MleResult mle_reconstruct_detailed(const TomographySet& t, const TomographyOptions& opts) {
  t.validate();
  MleResult result{DensityMatrix::maximally_mixed()};
  const auto n = extract_counts(t, opts, &result.clamped_records);
  const double norm = basis_normalization(n);
  const auto ops = james_projectors();

  const auto objective = [&](const Eigen::VectorXd& params) {
    const Matrix4c rho = cholesky_to_rho(params);
    double loss = 0.0;
    for (int nu = 0; nu < 16; ++nu) {
      const double p = std::max((rho * ops[nu]).trace().real(), 1e-12);
      const double d = norm * p - n[nu];
      loss += d * d / (2.0 * norm * p);
    }
    return loss;
  };

  // Seed from linear inversion projected onto the physical set.
  const Matrix4c li = linear_inversion(t, opts.mode);
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(li);
  const Eigen::Vector4d evals = es.eigenvalues().cwiseMax(1e-6);
  Matrix4c seed_rho =
      es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().adjoint();
  seed_rho /= seed_rho.trace().real();
  const Eigen::VectorXd seed = rho_to_cholesky(seed_rho);

  MinimizeOptions mopts;
  mopts.max_iterations = opts.max_iterations;
  mopts.window = 25;
  mopts.min_improvement = 1e-10;

  constexpr int kStarts = 8;
  bool have_best = false;
  bool any_converged = false;
  Eigen::VectorXd best_x;
  double best_value = 0.0;
  const double scale = std::max(0.1, seed.norm() / 4.0);
  for (int start = 0; start < kStarts; ++start) {
    Eigen::VectorXd x0 = seed;
    if (start > 0) {
      Rng rng(derive_seed(0x4d4c45ULL /*'MLE'*/, static_cast<std::uint64_t>(start)));
      for (int i = 0; i < 16; ++i) x0(i) += 0.05 * scale * rng.normal();
    }
    const MinimizeResult r = minimize(objective, x0, mopts);
    result.iterations += r.iterations;
    result.evaluations += r.evaluations;
    any_converged = any_converged || r.converged;
    if (r.converged && (!have_best || r.value < best_value)) {
      have_best = true;
      best_value = r.value;
      best_x = r.x;
    } else if (!have_best && (best_x.size() == 0 || r.value < best_value)) {
      best_value = r.value;
      best_x = r.x;
    }
  }
  result.starts = kStarts;
  if (!any_converged) throw MleError(cholesky_to_rho(best_x), best_value);

  result.objective = best_value;
  result.rho = DensityMatrix(cholesky_to_rho(best_x));
  return result;
}

DensityMatrix mle_reconstruct(const TomographySet& t, const TomographyOptions& opts) {
  return mle_reconstruct_detailed(t, opts).rho;
}

namespace {

struct RecoveryObjective {
  const Matrix4c& rho;
  bool fix_maximal;

  // x = (xi, alphaA, betaA, gammaA, alphaB, betaB, gammaB); a = cos(xi).
  double operator()(const Eigen::VectorXd& x) const {
    const double xi = fix_maximal ? kPi / 4.0 : x(0);
    const JonesMatrix ja = JonesMatrix::from_angles(x(1), x(2), x(3));
    const JonesMatrix jb = JonesMatrix::from_angles(x(4), x(5), x(6));
    Vector4c psi = Vector4c::Zero();
    psi(0) = std::cos(xi);
    psi(3) = std::sin(xi);
    const Vector4c rotated = kron(ja.matrix(), jb.matrix()) * psi;
    const Complex f = rotated.adjoint() * rho * rotated;
    return -f.real();
  }
};

RecoveryResult recover_impl(const DensityMatrix& rho_out, bool fix_maximal) {
  RecoveryObjective obj{rho_out.matrix(), fix_maximal};

  MinimizeOptions mopts;
  mopts.max_iterations = 1000;
  mopts.window = 25;
  mopts.min_improvement = 1e-10;

  constexpr int kStarts = 32;
  struct Candidate {
    Eigen::VectorXd x;
    double fidelity;
    double rotation_norm;
    int start;
  };
  std::vector<Candidate> candidates;
  int total_iterations = 0;

  for (int start = 0; start < kStarts; ++start) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(7);
    if (start == 0) {
      // Identity rotations; amplitude guessed from the HH/VV populations.
      const double hh = std::max(rho_out.matrix()(0, 0).real(), 0.0);
      const double vv = std::max(rho_out.matrix()(3, 3).real(), 0.0);
      x0(0) = std::atan2(std::sqrt(vv), std::sqrt(hh));
    } else if (start == 1) {
      x0(0) = kPi / 4.0;
    } else {
      Rng rng(derive_seed(0x524543ULL /*'REC'*/, static_cast<std::uint64_t>(start)));
      x0(0) = rng.uniform(0.0, kPi / 2.0);
      for (int i = 1; i < 7; ++i) x0(i) = rng.uniform(-kPi, kPi);
    }
    const MinimizeResult r = minimize(obj, x0, mopts);
    total_iterations += r.iterations;
    if (!r.converged) continue;
    const JonesMatrix ja = JonesMatrix::from_angles(r.x(1), r.x(2), r.x(3));
    const JonesMatrix jb = JonesMatrix::from_angles(r.x(4), r.x(5), r.x(6));
    candidates.push_back(
        Candidate{r.x, -r.value, ja.rotation_norm() + jb.rotation_norm(), start});
  }
  if (candidates.empty())
    throw std::runtime_error("recover_chip_state: no optimizer start converged");

  // Highest fidelity wins; near-ties go to the smallest rotations, then to
  // the lowest start index, so the result is scheduling-independent.
  const double best_f =
      std::max_element(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        return a.fidelity < b.fidelity;
      })->fidelity;
  const Candidate* best = nullptr;
  for (const auto& c : candidates) {
    if (c.fidelity < best_f - 1e-9) continue;
    if (!best || c.rotation_norm < best->rotation_norm - 1e-12 ||
        (std::abs(c.rotation_norm - best->rotation_norm) <= 1e-12 && c.start < best->start))
      best = &c;
  }

  const double xi = fix_maximal ? kPi / 4.0 : best->x(0);
  JonesMatrix ja = JonesMatrix::from_angles(best->x(1), best->x(2), best->x(3));
  JonesMatrix jb = JonesMatrix::from_angles(best->x(4), best->x(5), best->x(6));

  // Canonicalize the amplitude signs into Bob's rotation: a|HH> + b|VV> with
  // a or b negative equals (I ⊗ diag(1, ±1)) applied to the nonnegative pair.
  double a = std::cos(xi);
  double b = std::sin(xi);
  if (a < 0.0) {
    a = -a;
    b = -b; // global sign dropped
  }
  if (b < 0.0) {
    b = -b;
    Matrix2c flip = Matrix2c::Identity();
    flip(1, 1) = -1.0;
    jb = JonesMatrix(jb.matrix() * flip);
  }
  // The Schmidt pair is only defined up to exchange: Psi(b, a) equals
  // (X ⊗ X) Psi(a, b). Report the dominant amplitude first.
  if (!fix_maximal && a < b) {
    std::swap(a, b);
    Matrix2c x;
    x << 0, 1, 1, 0;
    ja = JonesMatrix(ja.matrix() * x);
    jb = JonesMatrix(jb.matrix() * x);
  }

  RecoveryResult res{
      apply_local_rotation(rho_out, JonesMatrix(ja.matrix().adjoint()),
                           JonesMatrix(jb.matrix().adjoint())),
      ja,
      jb,
      a,
      best_f,
      kStarts,
      total_iterations};
  return res;
}

} // namespace

RecoveryResult recover_chip_state(const DensityMatrix& rho_out) {
  return recover_impl(rho_out, false);
}

double fidelity_to_maximal(const DensityMatrix& rho_in) {
  return recover_impl(rho_in, true).fidelity;
}

} // namespace polpair
