#pragma once
// Weighted Bergman kernels on the diagonal. Two engines: a diagonal engine
// for toric weights (monomials are orthogonal, so the kernel is a single
// log-sum over monomial norms) and a Gram engine for general weights on the
// disk (full moment matrix, Hermitian eigendecomposition). All kernel
// arithmetic is done in log scale; the moment integrals themselves stay in
// linear scale after rescaling the radial variable to [0, 1], which keeps
// every intermediate representable as long as 2 m B <= 600 for the bounded
// part B of the weight.

#include <array>
#include <cmath>
#include <complex>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "domains.hpp"
#include "quadrature.hpp"
#include "weights.hpp"

namespace demlab {

/// Monomial z^alpha lies in the m-th weighted space iff its axis exponents
/// clear the pole: alpha_j + 1 - m gamma_j > 0. Borderline exponents are
/// excluded with a small conservative tolerance.
inline bool monomial_included(const Weight& w, int m, const std::array<int, 2>& alpha) {
  for (int j = 0; j < w.domain().n; ++j)
    if (!(alpha[j] + 1.0 - double(m) * w.gamma(j) > 1e-9)) return false;
  return true;
}

/// Included degree window per axis: a0..N with N = max(60, ceil(4 m gamma) + 40).
struct BasisSpec {
  int m = 1;
  int n = 1;
  std::array<int, 2> a0{0, 0};
  std::array<int, 2> N{0, 0};
  long total = 0;
};

inline BasisSpec make_basis(const Weight& w, int m) {
  if (m < 1) throw ArgumentError("basis: m must be >= 1");
  if (2.0 * m * w.bounded_bound() > 600.0)
    throw ArgumentError("basis: m times the weight bound is too large for the quadrature scale");
  BasisSpec s;
  s.m = m;
  s.n = w.domain().n;
  s.total = 1;
  // Positive radial mass pushes the kernel's weight toward degrees near
  // 2m sup v, so the window must scale with the bound as well as the pole
  // shift.  The offset is excluded: it rescales every norm equally and
  // moves no mass, which also keeps shifted weights on identical spans.
  const double eps_mass = std::fabs(w.angular().eps);
  for (int j = 0; j < s.n; ++j) {
    const double g = w.gamma(j);
    const double b = w.radial(j).bound(w.domain().radius[j]) + eps_mass;
    s.N[j] = std::max(60, (int)std::ceil(4.0 * m * g) + 40);
    s.N[j] = std::max(s.N[j], (int)std::ceil(4.0 * m * b) + 40);
    int a = 0;
    while (!(a + 1.0 - m * g > 1e-9)) ++a;
    s.a0[j] = a;
    s.total *= (s.N[j] - a + 1);
  }
  return s;
}

namespace detail {

/// Table-profile kinks on the unit radial scale, for panel placement.
inline std::vector<double> unit_scale_knots(const RadialProfile& rp, double R) {
  std::vector<double> s;
  for (double k : rp.knots())
    if (k > 0.0 && k < R) s.push_back(k / R);
  return s;
}

}  // namespace detail

/// log of 2 pi int_0^R r^(2a+1-2mg) e^(-2m v(r)) dr, evaluated on the unit
/// radial scale so the power prefactor moves into log space.
inline double log_axis_moment(const Weight& w, int j, int m, int alpha,
                              const QuadSpec& q = {}) {
  const double R = w.domain().radius[j];
  const double g = w.gamma(j);
  const double p = 2.0 * alpha + 1.0 - 2.0 * m * g;
  if (!(p > -1.0)) throw ArgumentError("moment: exponent not integrable");
  auto f = [&](double s) {
    return std::pow(s, p) * std::exp(-2.0 * m * w.radial(j).eval(R * s));
  };
  const QuadResult r =
      integrate_or_throw(f, 1.0, q, detail::unit_scale_knots(w.radial(j), R));
  if (!(r.value > 0) || !std::isfinite(r.value))
    throw QuadAccuracyError("radial moment left the representable range", r.value);
  return std::log(2.0 * std::numbers::pi) + (2.0 * alpha + 2.0 - 2.0 * m * g) * std::log(R) +
         std::log(r.value);
}

/// ||z^alpha||^2 in the m-th space (toric weights only).
inline double log_monomial_norm(const Weight& w, int m, const std::array<int, 2>& alpha,
                                const QuadSpec& q = {}) {
  if (!w.toric()) throw EngineMismatchError("monomial norms need a toric weight");
  if (!monomial_included(w, m, alpha))
    throw ArgumentError("monomial norm: exponent not in the space");
  double s = -2.0 * m * w.offset();
  for (int j = 0; j < w.domain().n; ++j) s += log_axis_moment(w, j, m, alpha[j], q);
  return s;
}

inline double monomial_norm(const Weight& w, int m, const std::array<int, 2>& alpha,
                            const QuadSpec& q = {}) {
  return std::exp(log_monomial_norm(w, m, alpha, q));
}

/// Kernel value on the diagonal. tail_rel is the estimated truncated mass
/// relative to the computed kernel (geometric extrapolation of the shell
/// sums); +inf flags a non-decaying shell ratio. clipped counts spectrum
/// clipping in the Gram engine (always 0 for the diagonal engine).
struct KernelValue {
  double log_value = kNegInf;
  double value = 0.0;
  double tail_rel = 0.0;
  long basis_size = 0;
  int clipped = 0;
};

enum class Engine { automatic, diagonal, gram };

namespace detail {

struct ToricData {
  BasisSpec spec;
  std::array<std::vector<double>, 2> log_axis;  // per-axis log moment, index alpha - a0
  double log_offset_term = 0.0;                 // -2 m offset

  double log_norm(int a1, int a2) const {
    double s = log_offset_term + log_axis[0][a1 - spec.a0[0]];
    if (spec.n == 2) s += log_axis[1][a2 - spec.a0[1]];
    return s;
  }
};

inline ToricData build_toric(const Weight& w, int m, const QuadSpec& q) {
  ToricData t;
  t.spec = make_basis(w, m);
  t.log_offset_term = -2.0 * m * w.offset();
  for (int j = 0; j < t.spec.n; ++j) {
    t.log_axis[j].reserve(t.spec.N[j] - t.spec.a0[j] + 1);
    for (int a = t.spec.a0[j]; a <= t.spec.N[j]; ++a)
      t.log_axis[j].push_back(log_axis_moment(w, j, m, a, q));
  }
  return t;
}

/// Shell-bucketed log-sum-exp of the included monomial terms at z.
inline KernelValue toric_eval(const ToricData& t, const Point& z) {
  const BasisSpec& sp = t.spec;
  KernelValue kv;
  kv.basis_size = sp.total;

  std::array<std::vector<double>, 2> pw;  // 2 alpha_j log|z_j| per axis, -inf if vanishing
  int max_shell = 0;
  for (int j = 0; j < sp.n; ++j) {
    const double r = std::abs(z.c[j]);
    const double lr = r > 0 ? std::log(r) : kNegInf;
    pw[j].resize(sp.N[j] + 1, kNegInf);
    for (int a = sp.a0[j]; a <= sp.N[j]; ++a)
      pw[j][a] = a == 0 ? 0.0 : (r > 0 ? 2.0 * a * lr : kNegInf);
    max_shell = std::max(max_shell, sp.N[j]);
  }

  auto term = [&](int a1, int a2) {
    double s = pw[0][a1];
    if (sp.n == 2) s += pw[1][a2];
    return s == kNegInf ? kNegInf : s - t.log_norm(a1, a2);
  };

  double top = kNegInf;
  for (int a1 = sp.a0[0]; a1 <= sp.N[0]; ++a1)
    for (int a2 = sp.a0[1]; a2 <= (sp.n == 2 ? sp.N[1] : sp.a0[1]); ++a2)
      top = std::max(top, term(a1, a2));
  if (top == kNegInf) return kv;  // every included monomial vanishes at z

  std::vector<double> shell(max_shell + 1, 0.0);
  for (int a1 = sp.a0[0]; a1 <= sp.N[0]; ++a1)
    for (int a2 = sp.a0[1]; a2 <= (sp.n == 2 ? sp.N[1] : sp.a0[1]); ++a2) {
      const double lt = term(a1, a2);
      if (lt > kNegInf) shell[std::max(a1, sp.n == 2 ? a2 : 0)] += std::exp(lt - top);
    }
  double total = 0;
  for (double s : shell) total += s;
  kv.log_value = top + std::log(total);
  kv.value = std::exp(kv.log_value);

  const double sN = shell[max_shell], sP = shell[max_shell - 1];
  if (sN == 0.0)
    kv.tail_rel = 0.0;  // the top shell vanished identically at z
  else if (sP == 0.0 || sN >= sP)
    kv.tail_rel = kPosInf;
  else {
    const double rho = sN / sP;
    kv.tail_rel = (sN / total) * rho / (1.0 - rho);
  }
  return kv;
}

/// Complex pairing K(z, w) = sum z^a conj(w^a) / ||a||^2 as (log magnitude,
/// phase factor); used by the extremal witness checks.
inline double toric_offdiag_logabs(const ToricData& t, const Point& z, const Point& w) {
  const BasisSpec& sp = t.spec;
  auto logmod = [&](const Point& p, int j, int a) {
    if (a == 0) return 0.0;
    const double r = std::abs(p.c[j]);
    return r > 0 ? a * std::log(r) : kNegInf;
  };
  double top = kNegInf;
  for (int a1 = sp.a0[0]; a1 <= sp.N[0]; ++a1)
    for (int a2 = sp.a0[1]; a2 <= (sp.n == 2 ? sp.N[1] : sp.a0[1]); ++a2) {
      double lt = logmod(z, 0, a1) + logmod(w, 0, a1);
      if (sp.n == 2) lt += logmod(z, 1, a2) + logmod(w, 1, a2);
      if (lt > kNegInf) top = std::max(top, lt - t.log_norm(a1, a2));
    }
  if (top == kNegInf) return kNegInf;
  std::complex<double> acc = 0;
  for (int a1 = sp.a0[0]; a1 <= sp.N[0]; ++a1)
    for (int a2 = sp.a0[1]; a2 <= (sp.n == 2 ? sp.N[1] : sp.a0[1]); ++a2) {
      double lt = logmod(z, 0, a1) + logmod(w, 0, a1);
      if (sp.n == 2) lt += logmod(z, 1, a2) + logmod(w, 1, a2);
      if (lt == kNegInf) continue;
      lt -= t.log_norm(a1, a2);
      double ph = a1 * (std::arg(z.c[0]) - std::arg(w.c[0]));
      if (sp.n == 2) ph += a2 * (std::arg(z.c[1]) - std::arg(w.c[1]));
      acc += std::exp(lt - top) * std::exp(std::complex<double>(0, ph));
    }
  const double am = std::abs(acc);
  return am > 0 ? top + std::log(am) : kNegInf;
}

struct GramData {
  BasisSpec spec;
  double R = 1.0, gamma = 0.0;
  int m = 1;
  Eigen::VectorXd lambda;    // spectrum of the rescaled moment matrix
  Eigen::MatrixXcd vectors;  // its eigenvectors
  std::vector<double> sigma;     // per-degree log scale, sigma_j = log sqrt(M_jj)
  std::vector<double> log_diag;  // log M_jj (degree-indexed from a0)
  double lambda_cut = 0.0;
  int clipped = 0;
};

/// Moment matrix M_jk = <z^k, z^j> over the disk, built on a fixed product
/// quadrature: dyadic Gauss-Legendre panels in radius (clustered at both
/// endpoints) and a uniform trapezoid in angle, spectrally accurate for the
/// smooth periodic integrand. Node counts are frozen; accuracy is pinned by
/// the refinement and cross-engine tests.
inline GramData build_gram(const Weight& w, int m, double clip_tol,
                           int m_theta = 1024, int panels_k = 8, int gl_order = 20) {
  if (w.domain().n != 1) throw EngineMismatchError("gram engine handles n = 1 only");
  GramData g;
  g.spec = make_basis(w, m);
  g.R = w.domain().radius[0];
  g.gamma = w.gamma(0);
  g.m = m;
  const int a0 = g.spec.a0[0], N = g.spec.N[0], B = N - a0 + 1;

  const auto& gl = detail::gauss_legendre(gl_order);
  const std::vector<double> bp =
      detail::merge_breakpoints(detail::dyadic_breakpoints(1.0, panels_k),
                                detail::unit_scale_knots(w.radial(0), g.R), 1.0);
  std::vector<double> sn, swt;
  for (size_t p = 0; p + 1 < bp.size(); ++p) {
    const double c = 0.5 * (bp[p] + bp[p + 1]), h = 0.5 * (bp[p + 1] - bp[p]);
    for (const auto& [x, wt] : gl) {
      sn.push_back(c + h * x);
      swt.push_back(h * wt);
    }
  }
  const size_t NR = sn.size();

  // angular coefficient profiles C_d(s) = int e^{i d t} e^{-2m b(R s, t)} dt
  std::vector<std::vector<std::complex<double>>> C(B, std::vector<std::complex<double>>(NR));
  const double wth = 2.0 * std::numbers::pi / m_theta;
  std::vector<double> E(m_theta);
  for (size_t i = 0; i < NR; ++i) {
    const double r = g.R * sn[i];
    for (int t = 0; t < m_theta; ++t) {
      const double th = wth * t;
      const double b = w.radial(0).eval(r) + w.angular().eval(r, th) + w.offset();
      E[t] = std::exp(-2.0 * m * b);
    }
    for (int d = 0; d < B; ++d) {
      std::complex<double> acc = 0;
      for (int t = 0; t < m_theta; ++t)
        acc += E[t] * std::exp(std::complex<double>(0, d * wth * t));
      C[d][i] = acc * wth;
    }
  }

  // radial powers s^(j+k+1-2mg), shared across entries of equal total degree
  const double pw_base = 1.0 - 2.0 * m * g.gamma;
  std::vector<std::vector<double>> S(2 * N + 1, std::vector<double>(NR));
  for (int q = 2 * a0; q <= 2 * N; ++q)
    for (size_t i = 0; i < NR; ++i) S[q][i] = std::exp((q + pw_base) * std::log(sn[i]));

  Eigen::MatrixXcd M(B, B);
  const double lR = std::log(g.R);
  for (int j = 0; j < B; ++j)
    for (int k = j; k < B; ++k) {
      const int dj = a0 + j, dk = a0 + k;
      std::complex<double> acc = 0;
      for (size_t i = 0; i < NR; ++i) acc += swt[i] * S[dj + dk][i] * C[k - j][i];
      acc *= std::exp((dj + dk + 2.0 - 2.0 * m * g.gamma) * lR);
      M(j, k) = acc;
      M(k, j) = std::conj(acc);
    }

  g.sigma.resize(B);
  g.log_diag.resize(B);
  for (int j = 0; j < B; ++j) {
    const double d = M(j, j).real();
    if (!(d > 0) || !std::isfinite(d))
      throw ConditioningError("gram diagonal left the positive range", d);
    g.log_diag[j] = std::log(d);
    g.sigma[j] = 0.5 * g.log_diag[j];
  }
  for (int j = 0; j < B; ++j)
    for (int k = 0; k < B; ++k) M(j, k) *= std::exp(-g.sigma[j] - g.sigma[k]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  if (es.info() != Eigen::Success)
    throw ConditioningError("gram eigendecomposition failed", 0.0);
  g.lambda = es.eigenvalues();
  g.vectors = es.eigenvectors();
  const double lmax = g.lambda(B - 1);
  if (!(lmax > 0)) throw ConditioningError("gram matrix has no positive spectrum", lmax);
  if (g.lambda(0) < -1e-8 * lmax)
    throw ConditioningError("gram matrix is indefinite beyond tolerance", g.lambda(0));
  g.lambda_cut = clip_tol * lmax;
  for (int i = 0; i < B; ++i)
    if (g.lambda(i) < g.lambda_cut) ++g.clipped;
  return g;
}

/// Scaled conjugate monomial vector at z, with its factored log magnitude.
/// Returns false when every component vanishes (z at a pole axis).
inline bool gram_load(const GramData& g, const Point& z, Eigen::VectorXcd& bh, double& mx) {
  const int a0 = g.spec.a0[0], N = g.spec.N[0], B = N - a0 + 1;
  const double r = std::abs(z.c[0]);
  const double th = std::arg(z.c[0]);
  const double lr = r > 0 ? std::log(r) : kNegInf;
  std::vector<double> lb(B, kNegInf);
  mx = kNegInf;
  for (int j = 0; j < B; ++j) {
    const int d = a0 + j;
    const double lm = d == 0 ? -g.sigma[j] : (r > 0 ? d * lr - g.sigma[j] : kNegInf);
    lb[j] = lm;
    mx = std::max(mx, lm);
  }
  if (mx == kNegInf) return false;
  bh.resize(B);
  for (int j = 0; j < B; ++j)
    bh(j) = lb[j] == kNegInf
                ? std::complex<double>(0)
                : std::exp(lb[j] - mx) * std::exp(std::complex<double>(0, -(a0 + j) * th));
  return true;
}

inline KernelValue gram_eval(const GramData& g, const Point& z) {
  KernelValue kv;
  kv.basis_size = g.spec.total;
  kv.clipped = g.clipped;
  Eigen::VectorXcd bh;
  double mx;
  if (!gram_load(g, z, bh, mx)) return kv;
  const Eigen::VectorXcd v = g.vectors.adjoint() * bh;
  double q = 0;
  for (int i = 0; i < g.lambda.size(); ++i)
    if (g.lambda(i) >= g.lambda_cut) q += std::norm(v(i)) / g.lambda(i);
  if (!(q > 0)) return kv;
  kv.log_value = 2.0 * mx + std::log(q);
  kv.value = std::exp(kv.log_value);

  // truncation estimate from the diagonal terms |z|^2d / M_dd
  const int B = g.lambda.size();
  const double r = std::abs(z.c[0]);
  if (r > 0 && B >= 2) {
    const double lr = std::log(r);
    auto lt = [&](int j) { return 2.0 * (g.spec.a0[0] + j) * lr - g.log_diag[j]; };
    double top = kNegInf;
    for (int j = 0; j < B; ++j) top = std::max(top, lt(j));
    double tot = 0;
    for (int j = 0; j < B; ++j) tot += std::exp(lt(j) - top);
    const double tN = std::exp(lt(B - 1) - top), tP = std::exp(lt(B - 2) - top);
    if (tN == 0.0)
      kv.tail_rel = 0.0;
    else if (tP == 0.0 || tN >= tP)
      kv.tail_rel = kPosInf;
    else
      kv.tail_rel = (tN / tot) * (tN / tP) / (1.0 - tN / tP);
  }
  return kv;
}

inline double gram_offdiag_logabs(const GramData& g, const Point& z, const Point& w) {
  Eigen::VectorXcd bz, bw;
  double mz, mw;
  if (!gram_load(g, z, bz, mz) || !gram_load(g, w, bw, mw)) return kNegInf;
  const Eigen::VectorXcd vz = g.vectors.adjoint() * bz;
  const Eigen::VectorXcd vw = g.vectors.adjoint() * bw;
  std::complex<double> acc = 0;
  for (int i = 0; i < g.lambda.size(); ++i)
    if (g.lambda(i) >= g.lambda_cut) acc += std::conj(vz(i)) * vw(i) / g.lambda(i);
  const double am = std::abs(acc);
  return am > 0 ? mz + mw + std::log(am) : kNegInf;
}

}  // namespace detail

/// One weight, one m: a reusable kernel evaluator. Engine::automatic picks
/// the diagonal engine for toric weights and the Gram engine otherwise.
class KernelEvaluator {
 public:
  KernelEvaluator(const Weight& w, int m, Engine e = Engine::automatic,
                  const QuadSpec& q = {}, double clip_tol = 1e-12)
      : w_(w), m_(m) {
    if (e == Engine::automatic) e = w.toric() ? Engine::diagonal : Engine::gram;
    engine_ = e;
    if (e == Engine::diagonal) {
      if (!w.toric())
        throw EngineMismatchError("diagonal engine requires a toric weight");
      data_ = detail::build_toric(w, m, q);
    } else {
      data_ = detail::build_gram(w, m, clip_tol);
    }
  }

  KernelValue at(const Point& z) const {
    if (!contains(w_.domain(), z)) throw DomainError("kernel: point outside domain");
    if (std::holds_alternative<detail::ToricData>(data_))
      return detail::toric_eval(std::get<detail::ToricData>(data_), z);
    return detail::gram_eval(std::get<detail::GramData>(data_), z);
  }

  /// log |K(z, w)| for the off-diagonal pairing; -inf if it vanishes.
  double offdiag_logabs(const Point& z, const Point& w) const {
    if (std::holds_alternative<detail::ToricData>(data_))
      return detail::toric_offdiag_logabs(std::get<detail::ToricData>(data_), z, w);
    return detail::gram_offdiag_logabs(std::get<detail::GramData>(data_), z, w);
  }

  const BasisSpec& basis() const {
    if (std::holds_alternative<detail::ToricData>(data_))
      return std::get<detail::ToricData>(data_).spec;
    return std::get<detail::GramData>(data_).spec;
  }

  Engine engine() const { return engine_; }
  int m() const { return m_; }
  const Weight& weight() const { return w_; }

 private:
  Weight w_;
  int m_;
  Engine engine_ = Engine::automatic;
  std::variant<detail::ToricData, detail::GramData> data_;
};

/// Numeric check of the extremal characterization: the witness state at z0
/// has unit norm and attains K(z0), and the off-diagonal pairing obeys
/// Cauchy-Schwarz against the diagonal at the sample points.
struct WitnessReport {
  double norm_gap = 0.0;    // | ||f*||^2 - 1 |
  double attain_gap = 0.0;  // relative gap between |f*(z0)|^2 and K(z0)
  double cs_excess = 0.0;   // max positive excess of log|K(z,w)|^2 over logK+logK
};

inline WitnessReport extremal_witness_check(const KernelEvaluator& ke, const Point& z0,
                                            const std::vector<Point>& samples) {
  WitnessReport r;
  const KernelValue k0 = ke.at(z0);
  if (k0.log_value == kNegInf)
    throw ArgumentError("witness check: kernel vanishes at the base point");
  // ||f*||^2 = K(z0, z0) / K(z0) through the off-diagonal route
  const double self = ke.offdiag_logabs(z0, z0);
  r.norm_gap = std::fabs(std::exp(self - k0.log_value) - 1.0);
  // |f*(z0)|^2 = |K(z0, z0)|^2 / K(z0), compared against K(z0) itself
  r.attain_gap = std::fabs(std::expm1(2.0 * (self - k0.log_value)));
  for (const Point& p : samples) {
    const KernelValue kp = ke.at(p);
    if (kp.log_value == kNegInf) continue;
    const double off = ke.offdiag_logabs(z0, p);
    if (off == kNegInf) continue;
    r.cs_excess = std::max(r.cs_excess, 2.0 * off - k0.log_value - kp.log_value);
  }
  return r;
}

}  // namespace demlab
