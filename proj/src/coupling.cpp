#include "coron/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coron/dimension.hpp"
#include "coron/errors.hpp"

namespace coron {
namespace {

std::string subscript(int n) {
  static const char* digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
  std::string out;
  for (char ch : std::to_string(n)) out += digits[ch - '0'];
  return out;
}

// Newton in z = log c for c_i sum_j B_ij c_j^3 = 1.
std::optional<VectorXd> newton_cubic_amplitudes(const MatrixXd& B, VectorXd c) {
  const Eigen::Index k = B.rows();
  const auto residual = [&](const VectorXd& cc) {
    const VectorXd cubes = cc.array().cube();
    return VectorXd((cc.array() * (B * cubes).array() - 1.0).matrix());
  };
  VectorXd F = residual(c);
  for (int it = 0; it < 100 && F.lpNorm<Eigen::Infinity>() > 1e-15; ++it) {
    const VectorXd cubes = c.array().cube();
    MatrixXd J(k, k);
    const VectorXd Bc3 = B * cubes;
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        // dF_i/dz_j = c_j dF_i/dc_j
        J(i, j) = c(j) * 3.0 * B(i, j) * c(i) * c(j) * c(j);
      }
      J(i, i) += c(i) * Bc3(i);
    }
    Eigen::FullPivLU<MatrixXd> lu(J);
    if (!lu.isInvertible()) return std::nullopt;
    const VectorXd dz = lu.solve(-F);
    double step = 1.0;
    const double f0 = F.norm();
    VectorXd trial;
    VectorXd Ft;
    for (int ls = 0; ls < 40; ++ls) {
      trial = (c.array().log() + step * dz.array()).exp();
      Ft = residual(trial);
      if (Ft.norm() < (1 - 1e-4 * step) * f0) break;
      step *= 0.5;
    }
    c = trial;
    F = Ft;
  }
  if (!(F.lpNorm<Eigen::Infinity>() < 1e-12) || !c.allFinite()) return std::nullopt;
  return c;
}

// Continuation in the off-diagonal coupling from the decoupled amplitudes mu_i^{-1/4}.
std::optional<VectorXd> continue_cubic_amplitudes(const MatrixXd& B) {
  const MatrixXd D = MatrixXd(B.diagonal().asDiagonal());
  VectorXd c = B.diagonal().array().pow(-0.25).matrix();
  double s = 0, ds = 0.1;
  while (s < 1) {
    const double next = std::min(1.0, s + ds);
    if (auto found = newton_cubic_amplitudes(D + next * (B - D), c)) {
      c = *found;
      s = next;
      ds = std::min(0.25, 1.5 * ds);
    } else if ((ds *= 0.5) < 1e-6) {
      return std::nullopt;
    }
  }
  return c;
}

}  // namespace

CouplingSpec CouplingSpec::make(int N, VectorXd mu, MatrixXd beta, std::vector<int> decomposition) {
  CouplingSpec s;
  s.N = N;
  s.mu = std::move(mu);
  s.beta = std::move(beta);
  if (s.beta.rows() == s.mu.size() && s.beta.cols() == s.mu.size()) s.beta.diagonal() = s.mu;
  if (decomposition.empty()) {
    for (int i = 0; i <= s.components(); ++i) decomposition.push_back(i);
  }
  s.decomposition = std::move(decomposition);
  return s;
}

std::pair<int, int> CouplingSpec::group_range(int h) const {
  if (h < 0 || h >= groups()) throw std::out_of_range("group index out of range");
  return {decomposition[h], decomposition[h + 1]};
}

MatrixXd CouplingSpec::block(int h) const {
  const auto [first, last] = group_range(h);
  return beta.block(first, first, last - first, last - first);
}

std::vector<std::string> CouplingSpec::violations() const {
  std::vector<std::string> out;
  if (N != 3 && N != 4) out.push_back("dimension must be 3 or 4");
  const int m = components();
  if (m == 0) out.push_back("at least one component is required");
  for (int i = 0; i < m; ++i) {
    if (!(mu(i) > 0)) out.push_back("mu[" + std::to_string(i) + "] must be positive");
  }
  if (beta.rows() != m || beta.cols() != m) {
    out.push_back("beta must be " + std::to_string(m) + "x" + std::to_string(m));
  } else {
    for (int i = 0; i < m; ++i) {
      if (beta(i, i) != mu(i)) out.push_back("beta[" + std::to_string(i) + "][" + std::to_string(i) + "] must equal mu");
      for (int j = i + 1; j < m; ++j) {
        if (std::abs(beta(i, j) - beta(j, i)) > 1e-12 * std::max(1.0, std::abs(beta(i, j)))) {
          out.push_back("beta is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
      }
    }
  }
  if (decomposition.size() < 2 || decomposition.front() != 0 || decomposition.back() != m) {
    out.push_back("decomposition must start at 0 and end at m");
  }
  for (std::size_t h = 1; h < decomposition.size(); ++h) {
    if (decomposition[h] <= decomposition[h - 1]) {
      out.push_back("decomposition must be strictly increasing");
      break;
    }
  }
  return out;
}

double amplitude_residual(const CouplingSpec& spec, int group, const VectorXd& c) {
  const MatrixXd B = spec.block(group);
  const double p = Dims::make(spec.N).p;
  double worst = 0;
  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    double sum = 0;
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
      sum += B(i, j) * std::pow(c(i), (p - 1) / 2) * std::pow(c(j), (p + 1) / 2);
    }
    worst = std::max(worst, std::abs(sum - c(i)));
  }
  return worst;
}

CVector solve_c_vector(const CouplingSpec& spec, int group, CSolvePolicy policy) {
  const auto dims = Dims::make(spec.N);
  const MatrixXd B = spec.block(group);
  const Eigen::Index k = B.rows();
  CVector out;
  out.group = group;

  if (spec.N == 4) {
    Eigen::FullPivLU<MatrixXd> lu(B);
    if (!lu.isInvertible()) throw SingularBlockError("coupling block of group " + std::to_string(group) + " is singular");
    const VectorXd squares = lu.solve(VectorXd::Ones(k));
    const double zero_tol = 1e-12 * std::max(1.0, squares.lpNorm<Eigen::Infinity>());
    VectorXd c(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (squares(i) > zero_tol) {
        c(i) = std::sqrt(squares(i));
      } else if (policy == CSolvePolicy::allow_boundary && squares(i) >= -zero_tol) {
        c(i) = 0.0;
        out.on_boundary = true;
      } else {
        throw NoPositiveSolutionError("no positive solution: c_" + std::to_string(i + 1) + "^2 = " +
                                          std::to_string(squares(i)),
                                      std::vector<double>(squares.data(), squares.data() + k));
      }
    }
    out.c = c;
  } else {
    if (k == 1) {
      out.c = VectorXd::Constant(1, std::pow(B(0, 0), -1.0 / (dims.p - 1)));
    } else {
      // Starting points: decoupled amplitudes, then the symmetric ansatz c_i = (row sum)^{-1/4}.
      std::vector<VectorXd> starts;
      starts.push_back(B.diagonal().array().pow(-0.25).matrix());
      const VectorXd rows = B.rowwise().sum();
      if ((rows.array() > 0).all()) starts.push_back(rows.array().pow(-0.25).matrix());
      Eigen::FullPivLU<MatrixXd> lu(B);
      if (lu.isInvertible()) {
        const VectorXd lin = lu.solve(VectorXd::Ones(k));
        if ((lin.array() > 0).all()) starts.push_back(lin.array().pow(0.25).matrix());
      }
      std::optional<VectorXd> found;
      for (const auto& s : starts) {
        if ((found = newton_cubic_amplitudes(B, s))) break;
      }
      if (!found) found = continue_cubic_amplitudes(B);
      if (!found) {
        throw NoPositiveSolutionError("no positive solution found for group " + std::to_string(group), {});
      }
      out.c = *found;
    }
  }
  out.residual = amplitude_residual(spec, group, out.c);
  return out;
}

bool admissible_beta_range(double mu1, double mu2, double beta12) {
  if (!(mu1 > 0 && mu2 > 0)) throw std::invalid_argument("mu must be positive");
  return (beta12 > -std::sqrt(mu1 * mu2) && beta12 < std::min(mu1, mu2)) || beta12 > std::max(mu1, mu2);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::nondegenerate:
      return "nondegenerate";
    case Verdict::degenerate:
      return "degenerate";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

SpectrumReport build_spectrum(const CouplingSpec& spec, const CVector& cv) {
  if (spec.N != 4) {
    throw UnsupportedDimensionError("spectral nondegeneracy analysis is only defined for N = 4");
  }
  const MatrixXd B = spec.block(cv.group);
  const Eigen::Index k = B.rows();
  if (cv.c.size() != k) throw std::invalid_argument("amplitude vector does not match the group size");

  SpectrumReport r;
  const VectorXd& c = cv.c;
  r.matC = c.asDiagonal() * B * c.asDiagonal();
  r.matM = MatrixXd::Identity(k, k) + 2.0 * r.matC;

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(r.matC);
  r.thetas = es.eigenvalues();
  r.lambdas = (1.0 + 2.0 * r.thetas.array()).matrix();

  Eigen::Index top = 0;
  (r.lambdas.array() - 3.0).abs().minCoeff(&top);
  r.principal_lambda = r.lambdas(top);
  if (std::abs(r.principal_lambda - 3.0) > 1e-6) {
    throw std::invalid_argument("amplitudes do not solve the group system: no eigenvalue 3 in Id + 2C");
  }
  r.principal_eigvec = es.eigenvectors().col(top);
  if (r.principal_eigvec.sum() < 0) r.principal_eigvec = -r.principal_eigvec;

  r.det_C = r.matC.determinant();
  r.det_beta = B.determinant();
  r.prod_c2 = c.array().square().prod();

  if (k == 2) {
    const double a11 = 3 * B(0, 0) * c(0) * c(0) + B(0, 1) * c(1) * c(1);
    const double a22 = 3 * B(1, 1) * c(1) * c(1) + B(0, 1) * c(0) * c(0);
    const double a12 = 2 * B(0, 1) * c(0) * c(1);
    const double disc = std::sqrt((a11 - a22) * (a11 - a22) + 4 * a12 * a12);
    r.m2_closed_form = std::make_pair((a11 + a22 + disc) / 2, (a11 + a22 - disc) / 2);
  }

  const auto v = nondegeneracy_check(r);
  r.verdict = v.verdict;
  r.reason = v.reason;
  return r;
}

VerdictDetail nondegeneracy_check(const SpectrumReport& report, double tol) {
  const auto ladder = eigenvalue_ladder();
  const VectorXd& L = report.lambdas;
  // Label Lambda_1 = 3 first, then the rest in descending order.
  std::vector<double> others;
  int near_three = 0;
  for (Eigen::Index i = 0; i < L.size(); ++i) {
    if (std::abs(L(i) - ladder[1]) <= tol) ++near_three;
    others.push_back(L(i));
  }
  std::sort(others.begin(), others.end(), std::greater<>());
  // drop one copy of Lambda_1 = 3
  auto it = std::min_element(others.begin(), others.end(),
                             [](double a, double b) { return std::abs(a - 3.0) < std::abs(b - 3.0); });
  if (it != others.end()) others.erase(it);

  if (near_three > 1) {
    return {Verdict::degenerate, "degenerate: Λ₁ = 3 is not simple"};
  }
  for (std::size_t i = 0; i < others.size(); ++i) {
    if (std::abs(others[i] - ladder[0]) <= tol) {
      return {Verdict::degenerate, "degenerate: λ" + subscript(static_cast<int>(i) + 2) + " = 1"};
    }
  }
  for (std::size_t i = 0; i < others.size(); ++i) {
    if (others[i] >= ladder[1] + tol) {
      std::ostringstream os;
      os << "inconclusive: λ" << subscript(static_cast<int>(i) + 2) << " = " << others[i]
         << " exceeds ν₂ = 3; higher ladder eigenvalues are not available";
      return {Verdict::inconclusive, os.str()};
    }
  }
  return {Verdict::nondegenerate, "nondegenerate: Λ₁ = 3 simple, remaining eigenvalues below 3 and away from 1"};
}

}  // namespace coron
