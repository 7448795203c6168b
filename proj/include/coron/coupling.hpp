#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coron/types.hpp"

namespace coron {

/// Algebraic data of the weakly coupled system: mu_i, the symmetric coupling matrix
/// (with beta_ii = mu_i) and a decomposition 0 = l_0 < l_1 < ... < l_q = m of the
/// components into contiguous groups I_h = {l_{h-1} < i <= l_h}.
struct CouplingSpec {
  int N = 4;
  VectorXd mu;
  MatrixXd beta;
  std::vector<int> decomposition;

  /// Builds a spec, copying mu onto the diagonal of beta. An empty decomposition puts
  /// every component in its own group.
  static CouplingSpec make(int N, VectorXd mu, MatrixXd beta, std::vector<int> decomposition = {});

  int components() const { return static_cast<int>(mu.size()); }
  int groups() const { return static_cast<int>(decomposition.size()) - 1; }
  /// Zero-based half-open index range [first, last) of group h (zero-based).
  std::pair<int, int> group_range(int h) const;
  MatrixXd block(int h) const;

  std::vector<std::string> violations() const;
};

/// Positive amplitudes making (c_i U)_{i in I_h} solve the group's bubble system.
struct CVector {
  VectorXd c;
  int group = 0;
  double residual = 0;       // max_i |sum_j beta_ij c_i^{(p-1)/2} c_j^{(p+1)/2} - c_i|
  bool on_boundary = false;  // some c_i vanished (only with CSolvePolicy::allow_boundary)
};

enum class CSolvePolicy {
  strict,          // every amplitude strictly positive
  allow_boundary,  // amplitudes that vanish to rounding are accepted and flagged
};

/// Amplitude vector of group h. For N = 4 the system is linear in c_j^2; for N = 3 it reads
/// c_i sum_j beta_ij c_j^3 = 1 and is solved by Newton in log-amplitudes.
CVector solve_c_vector(const CouplingSpec& spec, int group, CSolvePolicy policy = CSolvePolicy::strict);

double amplitude_residual(const CouplingSpec& spec, int group, const VectorXd& c);

/// Whether beta_12 lies in (-sqrt(mu1 mu2), min(mu1,mu2)) or (max(mu1,mu2), inf).
bool admissible_beta_range(double mu1, double mu2, double beta12);

enum class Verdict { nondegenerate, degenerate, inconclusive };

std::string to_string(Verdict v);

struct SpectrumReport {
  MatrixXd matC;  // C_ij = beta_ij c_i c_j
  MatrixXd matM;  // Id + 2 C
  VectorXd thetas;
  VectorXd lambdas;  // 1 + 2 theta, same order as thetas (ascending)
  VectorXd principal_eigvec;
  double principal_lambda = 0;
  Verdict verdict = Verdict::inconclusive;
  std::string reason;
  std::optional<std::pair<double, double>> m2_closed_form;  // (lambda_1, lambda_2) for k = 2

  double det_C = 0;
  double det_beta = 0;
  double prod_c2 = 0;
};

/// Eigen-decomposition of the linearized group system, N = 4 only.
SpectrumReport build_spectrum(const CouplingSpec& spec, const CVector& c);

struct VerdictDetail {
  Verdict verdict;
  std::string reason;
};

inline constexpr double kDegeneracyTol = 1e-8;

/// Compares the eigenvalues of M against the known prefix of the Bianchi-Egnell ladder.
VerdictDetail nondegeneracy_check(const SpectrumReport& report, double tol = kDegeneracyTol);

/// Known prefix (nu_1, nu_2) of the eigenvalues of -Delta v = nu U^2 v in R^4.
/// Higher eigenvalues are not provided.
constexpr std::array<double, 2> eigenvalue_ladder() { return {1.0, 3.0}; }

}  // namespace coron
