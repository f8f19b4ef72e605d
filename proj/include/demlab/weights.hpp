#pragma once
// Weight functions V = sum_j gamma_j log|z_j| + b(z) with b bounded, the
// weight catalog, grid-sampled fields, and the discrete upper-semicontinuous
// regularization.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "common.hpp"
#include "domains.hpp"

namespace demlab {

enum class Psh { yes, no, unknown };

/// Bounded per-axis radial component v(rho), continuous on [0, R].
class RadialProfile {
 public:
  enum class Kind { zero, power, table };

  static RadialProfile zero() { return RadialProfile{}; }

  /// coef * rho^p, p > 0
  static RadialProfile power(double coef, double p) {
    RadialProfile r;
    r.kind_ = Kind::power;
    r.coef_ = coef;
    r.p_ = p;
    return r;
  }

  /// piecewise-linear in rho through (knots, values); knots strictly increasing
  static RadialProfile table(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() < 2 || knots.size() != values.size())
      throw ArgumentError("radial table needs >= 2 matching knots/values");
    for (size_t i = 0; i + 1 < knots.size(); ++i)
      if (!(knots[i] < knots[i + 1]))
        throw ArgumentError("radial table knots must be strictly increasing");
    RadialProfile r;
    r.kind_ = Kind::table;
    r.knots_ = std::move(knots);
    r.values_ = std::move(values);
    return r;
  }

  double eval(double rho) const {
    switch (kind_) {
      case Kind::zero:
        return 0.0;
      case Kind::power:
        return coef_ * std::pow(rho, p_);
      case Kind::table: {
        if (rho <= knots_.front()) return values_.front();
        if (rho >= knots_.back()) return values_.back();
        auto it = std::upper_bound(knots_.begin(), knots_.end(), rho);
        const size_t i = it - knots_.begin();
        const double t = (rho - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
        return values_[i - 1] + t * (values_[i] - values_[i - 1]);
      }
    }
    return 0.0;
  }

  /// Exact sup of the profile over [lo, hi]: endpoint values for the
  /// monotone kinds, knots plus endpoints for tables.
  double interval_max(double lo, double hi) const {
    switch (kind_) {
      case Kind::zero:
        return 0.0;
      case Kind::power:
        return std::max(eval(lo), eval(hi));  // monotone in rho for p > 0
      case Kind::table: {
        double m = std::max(eval(lo), eval(hi));
        for (size_t i = 0; i < knots_.size(); ++i)
          if (knots_[i] > lo && knots_[i] < hi) m = std::max(m, values_[i]);
        return m;
      }
    }
    return 0.0;
  }

  double bound(double R) const {
    switch (kind_) {
      case Kind::zero:
        return 0.0;
      case Kind::power:
        return std::fabs(coef_) * std::pow(R, p_);
      case Kind::table: {
        double b = 0;
        for (double v : values_) b = std::max(b, std::fabs(v));
        return b;
      }
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }

  /// kink locations (empty for the smooth kinds); lets the quadrature place
  /// panel boundaries at the table joints
  const std::vector<double>& knots() const { return knots_; }

 private:
  Kind kind_ = Kind::zero;
  double coef_ = 0, p_ = 2;
  std::vector<double> knots_, values_;
};

/// Smooth angular factor eps * rho * exp(kappa (cos theta - 1)); vanishes
/// at the origin so the weight stays continuous there. n = 1 only.
struct AngularPart {
  double eps = 0.0;
  double kappa = 4.0;

  double eval(double rho, double theta) const {
    if (eps == 0.0) return 0.0;
    return eps * rho * std::exp(kappa * (std::cos(theta) - 1.0));
  }
  /// global Lipschitz bound in the plane coordinates
  double lipschitz() const { return std::fabs(eps) * (1.0 + kappa); }
};

/// Weight V(z) = sum_j gamma_j log|z_j| + sum_j radial_j(|z_j|)
///             + angular(|z_1|, arg z_1) + offset.
class Weight {
 public:
  Weight() = default;
  Weight(std::string name, Domain dom, std::vector<double> gammas,
         std::vector<RadialProfile> radial, AngularPart angular, Psh psh)
      : name_(std::move(name)),
        dom_(dom),
        gammas_(std::move(gammas)),
        radial_(std::move(radial)),
        angular_(angular),
        psh_(psh) {
    if ((int)gammas_.size() != dom_.n || (int)radial_.size() != dom_.n)
      throw ArgumentError("weight: per-axis data must match the domain dimension");
    for (double g : gammas_)
      if (!(g >= 0)) throw ArgumentError("weight: pole coefficients must be >= 0");
    if (angular_.eps != 0.0 && dom_.n != 1)
      throw ArgumentError("weight: angular part is only supported for n = 1");
  }

  const std::string& name() const { return name_; }
  const Domain& domain() const { return dom_; }
  double gamma(int j) const { return gammas_[j]; }
  double gamma_max() const {
    double g = 0;
    for (double x : gammas_) g = std::max(g, x);
    return g;
  }
  const RadialProfile& radial(int j) const { return radial_[j]; }
  const AngularPart& angular() const { return angular_; }
  double offset() const { return offset_; }
  Psh psh() const { return psh_; }
  bool toric() const { return angular_.eps == 0.0; }

  /// Bound B on the bounded part; the pole terms are excluded.
  double bounded_bound() const {
    double b = std::fabs(offset_) + std::fabs(angular_.eps);
    for (int j = 0; j < dom_.n; ++j) b += radial_[j].bound(dom_.radius[j]);
    return b;
  }

  /// b(z): everything except the log poles.
  double bounded_part(const Point& z) const {
    double v = offset_;
    for (int j = 0; j < dom_.n; ++j) v += radial_[j].eval(std::abs(z.c[j]));
    if (angular_.eps != 0.0)
      v += angular_.eval(std::abs(z.c[0]), std::arg(z.c[0]));
    return v;
  }

  /// Full value; -inf exactly on pole axes.
  double eval(const Point& z) const {
    if (!contains(dom_, z)) throw DomainError("eval_weight: point outside domain");
    double v = bounded_part(z);
    for (int j = 0; j < dom_.n; ++j) {
      if (gammas_[j] > 0) {
        const double r = std::abs(z.c[j]);
        if (r == 0.0) return kNegInf;
        v += gammas_[j] * std::log(r);
      }
    }
    return v;
  }

  /// Same weight shifted by a constant (lands in the bounded part).
  Weight with_offset(double c) const {
    Weight w = *this;
    w.offset_ += c;
    w.name_ = name_ + (c >= 0 ? "+" : "") + fmt17(c);
    return w;
  }

  Weight renamed(std::string n) const {
    Weight w = *this;
    w.name_ = std::move(n);
    return w;
  }

  /// Spot-check |bounded_part| <= B over a deterministic sample sweep.
  void validate_bound(int samples_per_axis = 24) const {
    const double B = bounded_bound() + 1e-12;
    GridSpec g;
    g.mode = GridMode::cartesian;
    g.points_per_axis = samples_per_axis;
    g.margin = 1e-6;
    for (const Point& p : make_grid(dom_, g))
      if (std::fabs(bounded_part(p)) > B)
        throw ContractError("weight: bounded part exceeds its declared bound");
  }

 private:
  std::string name_ = "zero";
  Domain dom_ = Domain::disk();
  std::vector<double> gammas_{0.0};
  std::vector<RadialProfile> radial_{RadialProfile::zero()};
  AngularPart angular_{};
  double offset_ = 0.0;
  Psh psh_ = Psh::yes;
};

/// Parameters for catalog entries that need them.
struct CatalogParams {
  std::vector<double> gammas;      // log_pole: one per axis (or one for all)
  double eps = 0.0;                // angular_bump
  std::vector<double> knots;       // radial_custom
  std::vector<double> values;      // radial_custom
};

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {
      "zero",          "log_pole",    "neg_abs_square",
      "abs_square",    "radial_custom", "angular_bump"};
  return names;
}

/// Build a named catalog weight on `dom`.
inline Weight catalog(const Domain& dom, const std::string& name,
                      const CatalogParams& par = {}) {
  const int n = dom.n;
  std::vector<RadialProfile> flat(n, RadialProfile::zero());
  std::vector<double> no_pole(n, 0.0);
  if (name == "zero")
    return Weight("zero", dom, no_pole, flat, {}, Psh::yes);
  if (name == "log_pole") {
    std::vector<double> g = par.gammas;
    if (g.empty()) g.assign(n, 1.0);
    if (g.size() == 1 && n == 2) g.push_back(g[0]);
    if ((int)g.size() != n)
      throw CatalogError("log_pole: need one gamma per axis");
    std::string nm = "log_pole";
    for (double x : g) nm += "_" + fmt17(x);
    return Weight(nm, dom, g, flat, {}, Psh::yes);
  }
  if (name == "neg_abs_square") {
    std::vector<RadialProfile> r(n, RadialProfile::power(-1.0, 2.0));
    return Weight("neg_abs_square", dom, no_pole, r, {}, Psh::no);
  }
  if (name == "abs_square") {
    std::vector<RadialProfile> r(n, RadialProfile::power(1.0, 2.0));
    return Weight("abs_square", dom, no_pole, r, {}, Psh::yes);
  }
  if (name == "radial_custom") {
    if (par.knots.empty())
      throw CatalogError("radial_custom: a knots/values table is required");
    std::vector<RadialProfile> r(n, RadialProfile::table(par.knots, par.values));
    return Weight("radial_custom", dom, no_pole, r, {}, Psh::unknown);
  }
  if (name == "angular_bump") {
    if (n != 1) throw CatalogError("angular_bump: n = 1 only");
    AngularPart a;
    a.eps = par.eps;
    if (par.eps == 0.0)
      return Weight("angular_bump_0", dom, no_pole, flat, {}, Psh::yes);
    return Weight("angular_bump_" + fmt17(par.eps), dom, no_pole, flat, a,
                  Psh::unknown);
  }
  std::string known;
  for (const auto& s : catalog_names()) known += (known.empty() ? "" : ", ") + s;
  throw CatalogError("unknown weight '" + name + "' (known: " + known + ")");
}

/// Exact-enough sup of V over the ball B(z, r) (closed, clipped to the
/// domain). Per-axis moduli range over [|z_j| - r, |z_j| + r]; for n = 2
/// this box relaxation contains the ball, so the value upper-bounds the
/// true sup and any bound built from it stays valid. The angular part is
/// handled by dense sampling padded with its Lipschitz bound.
inline double weight_ball_sup(const Weight& w, const Point& z, double r) {
  const Domain& dom = w.domain();
  if (!(r > 0) || r > dist_to_boundary(dom, z))
    throw ArgumentError("weight_ball_sup: need 0 < r <= dist to boundary");
  double sup = w.offset();
  for (int j = 0; j < dom.n; ++j) {
    const double rho = std::abs(z.c[j]);
    const double lo = std::max(0.0, rho - r);
    const double hi = std::min(dom.radius[j], rho + r);
    sup += w.radial(j).interval_max(lo, hi);
    if (w.gamma(j) > 0) {
      if (hi == 0.0) return kNegInf;
      sup += w.gamma(j) * std::log(hi);
    }
  }
  if (w.angular().eps != 0.0) {
    // dense polar sweep of the ball plus a Lipschitz safety pad
    const int K = 64;
    double m = kNegInf;
    for (int i = 0; i <= K; ++i)
      for (int k = 0; k < K; ++k) {
        const double rr = r * i / K;
        const double th = 2.0 * std::numbers::pi * k / K;
        const Complex zz = z.c[0] + Complex(rr * std::cos(th), rr * std::sin(th));
        m = std::max(m, w.angular().eval(std::abs(zz), std::arg(zz)));
      }
    const double mesh = 2.0 * std::numbers::pi * r / K;
    sup += m + w.angular().lipschitz() * mesh;
  }
  return sup;
}

/// Values of a scalar field on the points of a grid; -inf allowed.
struct SampledField {
  Domain domain;
  GridSpec grid;
  std::vector<Point> points;
  std::vector<double> values;

  double spacing() const { return grid_spacing(points); }
};

inline SampledField sample_weight(const Weight& w, const GridSpec& g) {
  SampledField f;
  f.domain = w.domain();
  f.grid = g;
  f.points = make_grid(f.domain, g);
  f.values.reserve(f.points.size());
  for (const Point& p : f.points) f.values.push_back(w.eval(p));
  return f;
}

/// Default radius schedule {8h, 4h, 2h} for a field of spacing h.
inline std::vector<double> default_usc_radii(const SampledField& f) {
  const double h = f.spacing();
  return {8 * h, 4 * h, 2 * h};
}

/// Discrete upper-semicontinuous regularization.
///
/// Convention: the essential sup over B(a, r) is approximated by the max
/// over grid values in the open ball, where a value that strictly exceeds
/// everything else within the smallest radius by more than 1e-9 is an
/// isolated single-point spike and contributes its neighbor max instead
/// (single points carry no measure). The returned value is the discrete
/// r -> 0 limit read off the radius schedule: if the ball max has
/// stabilized across the two smallest radii it is a genuine sup that
/// survives shrinking balls; otherwise the maxes are still falling and
/// the limit is the center's own (de-spiked) value.
inline SampledField usc_regularize(const SampledField& f,
                                   std::vector<double> radii) {
  if (radii.empty()) throw ArgumentError("usc_regularize: empty radius schedule");
  for (size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] > radii[i + 1]))
      throw ArgumentError("usc_regularize: radii must be strictly decreasing");
  const double h = f.spacing();
  const double r_min = radii.back();
  if (!(r_min >= 2 * h * (1 - 1e-9)))
    throw ArgumentError("usc_regularize: smallest radius must be >= 2 x spacing");
  const double r_prev = radii.size() >= 2 ? radii[radii.size() - 2] : r_min;
  const double tol = 1e-9;
  const size_t N = f.points.size();

  // de-spiked contribution of every point
  std::vector<double> contrib(N);
  for (size_t p = 0; p < N; ++p) {
    double pnm = kNegInf;  // punctured-ball neighbor max at the smallest radius
    for (size_t q = 0; q < N; ++q)
      if (q != p && point_dist(f.points[p], f.points[q]) < r_min)
        pnm = std::max(pnm, f.values[q]);
    contrib[p] =
        (pnm > kNegInf && f.values[p] > pnm + tol) ? pnm : f.values[p];
  }

  SampledField out = f;
  for (size_t a = 0; a < N; ++a) {
    double m_min = kNegInf, m_prev = kNegInf;
    for (size_t p = 0; p < N; ++p) {
      const double d = point_dist(f.points[a], f.points[p]);
      if (d < r_min) m_min = std::max(m_min, contrib[p]);
      if (d < r_prev) m_prev = std::max(m_prev, contrib[p]);
    }
    out.values[a] = (m_prev - m_min <= tol) ? m_min : contrib[a];
  }
  return out;
}

inline SampledField usc_regularize(const SampledField& f) {
  return usc_regularize(f, default_usc_radii(f));
}

}  // namespace demlab
