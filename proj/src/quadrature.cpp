#include "coron/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <queue>
#include <stdexcept>

namespace coron::quad {
namespace {

// Kronrod abscissae and weights (QUADPACK qk15); the 7-point Gauss rule uses the odd nodes.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    const double sum = fv1[j] + fv2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

  const double value = resk * half;
  resasc *= std::abs(half);
  resabs *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon())) {
    err = std::max(err, roundoff);
  }
  return {a, b, value, err};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, const std::vector<double>& breakpoints, const Options& opt) {
  if (!(std::isfinite(a) && std::isfinite(b))) throw std::invalid_argument("integration limits must be finite");
  if (a == b) return {0.0, 0.0, 0, true};
  if (a > b) {
    Result r = integrate(f, b, a, breakpoints, opt);
    r.value = -r.value;
    return r;
  }
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  std::priority_queue<Panel> heap;
  double total = 0, total_err = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    Panel p = gk15(f, cuts[i], cuts[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  int intervals = static_cast<int>(heap.size());
  while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) && intervals < opt.max_intervals) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // interval can no longer be split
      heap.push(worst);
      break;
    }
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to drop the drift of the running updates.
  total = 0;
  total_err = 0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  return {total, total_err, intervals, total_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))};
}

Result integrate(const Integrand& f, double a, double b, const Options& opt) { return integrate(f, a, b, {}, opt); }

Result integrate_to_infinity(const Integrand& f, double a, const Options& opt) {
  const auto g = [&f](double theta) {
    const double c = std::cos(theta);
    return f(std::tan(theta)) / (c * c);
  };
  return integrate(g, std::atan(a), 0.5 * std::numbers::pi, opt);
}

Result integrate_log(const Integrand& f, double a, double b, const Options& opt) {
  if (!(a > 0 && b > a)) throw std::invalid_argument("integrate_log requires 0 < a < b");
  const auto g = [&f](double t) {
    const double s = std::exp(t);
    return f(s) * s;
  };
  return integrate(g, std::log(a), std::log(b), opt);
}

}  // namespace coron::quad
