#include "elicit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "elicit/error.hpp"

namespace elicit {
namespace {

// Kronrod 15-point abscissae (descending, positive half) and weights, with
// the embedded 7-point Gauss weights at the odd-indexed abscissae.
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

enum class Map { identity, upper_tail, lower_tail };

// A piece of the original range expressed on a finite parameter interval.
struct Piece {
  Map map;
  double anchor;  // finite endpoint for tail maps
};

struct Interval {
  double a;
  double b;
  double value;
  double error;
  int piece;
  bool operator<(const Interval& other) const { return error < other.error; }
};

class Integrator {
 public:
  Integrator(const std::function<double(double)>& g, std::vector<Piece> pieces)
      : g_(g), pieces_(std::move(pieces)) {}

  Interval evaluate(double a, double b, int piece) const {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = eval(center, piece);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
      const double dx = half * kXgk[j];
      const double f1 = eval(center - dx, piece);
      const double f2 = eval(center + dx, piece);
      kronrod += kWgk[j] * (f1 + f2);
      if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss), piece};
  }

 private:
  double eval(double t, int piece) const {
    const Piece& p = pieces_[static_cast<std::size_t>(piece)];
    double x = t;
    double jac = 1.0;
    if (p.map != Map::identity) {
      const double s = 1.0 - t;
      const double offset = t / s;
      x = p.map == Map::upper_tail ? p.anchor + offset : p.anchor - offset;
      jac = 1.0 / (s * s);
    }
    const double v = g_(x);
    if (!std::isfinite(v)) {
      throw IntegrationError("integrand is not finite at x = " + std::to_string(x), 0.0,
                             std::numeric_limits<double>::infinity());
    }
    return v == 0.0 ? 0.0 : v * jac;
  }

  const std::function<double(double)>& g_;
  std::vector<Piece> pieces_;
};

}  // namespace

QuadratureResult integrate_with_error(const std::function<double(double)>& g, double lo, double hi,
                                      std::span<const double> breakpoints,
                                      const QuadratureOptions& options) {
  if (std::isnan(lo) || std::isnan(hi)) fail(ErrorCode::domain, "integration bounds are NaN");
  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  if (lo == hi) return {0.0, 0.0, 0};

  std::vector<double> cuts;
  for (double b : breakpoints) {
    if (std::isfinite(b) && b > lo && b < hi) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.empty() && std::isinf(lo) && std::isinf(hi)) cuts.push_back(0.0);

  std::vector<double> nodes;
  nodes.push_back(lo);
  nodes.insert(nodes.end(), cuts.begin(), cuts.end());
  nodes.push_back(hi);

  std::vector<Piece> pieces;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i];
    const double b = nodes[i + 1];
    if (std::isinf(a)) {
      pieces.push_back({Map::lower_tail, b});
      spans.emplace_back(0.0, 1.0);
    } else if (std::isinf(b)) {
      pieces.push_back({Map::upper_tail, a});
      spans.emplace_back(0.0, 1.0);
    } else {
      pieces.push_back({Map::identity, 0.0});
      spans.emplace_back(a, b);
    }
  }

  Integrator integrator(g, pieces);
  std::priority_queue<Interval> queue;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    Interval iv = integrator.evaluate(spans[i].first, spans[i].second, static_cast<int>(i));
    total += iv.value;
    error += iv.error;
    queue.push(iv);
  }

  while (error > options.abs_tol) {
    if (static_cast<int>(queue.size()) >= options.max_intervals) {
      throw IntegrationError("quadrature did not reach tolerance " +
                                 std::to_string(options.abs_tol) + " (error bound " +
                                 std::to_string(error) + ")",
                             sign * total, error);
    }
    Interval worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw IntegrationError("quadrature interval cannot be subdivided further", sign * total,
                             error);
    }
    Interval left = integrator.evaluate(worst.a, mid, worst.piece);
    Interval right = integrator.evaluate(mid, worst.b, worst.piece);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  // Recompute from the leaves; the running sums accumulate cancellation error.
  total = 0.0;
  error = 0.0;
  const int count = static_cast<int>(queue.size());
  while (!queue.empty()) {
    total += queue.top().value;
    error += queue.top().error;
    queue.pop();
  }
  return {sign * total, error, count};
}

double integrate(const std::function<double(double)>& g, double lo, double hi,
                 std::span<const double> breakpoints, const QuadratureOptions& options) {
  return integrate_with_error(g, lo, hi, breakpoints, options).value;
}

double integrate_over(const Distribution& d, const std::function<double(double)>& g,
                      const QuadratureOptions& options) {
  const Support s = d.support();
  const auto cuts = d.breakpoints();
  return integrate(g, s.lo, s.hi, cuts, options);
}

}  // namespace elicit
