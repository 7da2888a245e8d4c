#include "cosserat/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "cosserat/energy.hpp"
#include "cosserat/fem.hpp"
#include "cosserat/optimizer.hpp"
#include "cosserat/stress.hpp"

namespace cosserat {

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  Vec3 vec() { return Vec3(n(), n(), n()); }
  Mat3 mat() {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m(i) = n();
    return m;
  }
  Mat32 mat32() {
    Mat32 m;
    for (int i = 0; i < 6; ++i) m(i) = n();
    return m;
  }
  Rotation rotation() { return exp_so3(uniform(0.0, 3.0) * vec().normalized()); }

 private:
  double n() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  std::mt19937_64 rng_;
};

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

template <class A, class B>
double rel(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const double s = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / s;
}

SuiteResult make(std::string name, double worst, double tol) {
  SuiteResult r;
  r.name = std::move(name);
  r.worst = worst;
  r.passed = worst <= tol;
  r.detail = fmt::format("max error {:.3e} (tolerance {:.1e})", worst, tol);
  return r;
}

}  // namespace

std::vector<SuiteResult> run_verification(const VerifyOptions& opts) {
  std::vector<SuiteResult> out;
  Sampler s(opts.seed);
  const int n = opts.samples;

  {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const Vec3 v = s.vec();
      const Mat3 a = anti<double>(v);
      worst = std::max({worst, rel(axl(a), v), rel(a.squaredNorm(), 2.0 * v.squaredNorm()),
                        rel(anti<double>(axl(a)), a)});
    }
    out.push_back(make("axl/anti roundtrip", worst, 1e-12));
  }
  {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const Mat3 x = s.mat();
      const Decomposition d = decompose(x);
      const Mat3 back = d.dev_sym + d.skew + (d.trace / 3.0) * Mat3::Identity();
      worst = std::max({worst, rel(back, x),
                        rel(x.squaredNorm(), d.dev_sym.squaredNorm() + d.skew.squaredNorm() + d.trace * d.trace / 3.0)});
    }
    out.push_back(make("decomposition", worst, 1e-10));
  }
  {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const double mu = s.uniform(0.1, 10), mc = s.uniform(0.1, 10), ka = s.uniform(0.1, 10);
      const Mat3 x = s.mat(), y = s.mat();
      const Decomposition d = decompose(x);
      const double weighted = mu * d.dev_sym.squaredNorm() + mc * d.skew.squaredNorm() + ka / 3.0 * d.trace * d.trace;
      const Mat3 px = p_operator(x, mu, mc, ka), py = p_operator(y, mu, mc, ka);
      const double adjoint = std::abs(frobenius_dot(px, y) - frobenius_dot(x, py)) / (px.norm() * y.norm());
      worst = std::max({worst, rel(px.squaredNorm(), weighted), adjoint,
                        rel(p_operator(Mat3(x.transpose()), mu, mc, ka), Mat3(px.transpose()))});
    }
    out.push_back(make("P norm and adjointness", worst, 1e-10));
  }
  {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const double mu = s.uniform(0.1, 10), mc = s.uniform(0.1, 10), ka = s.uniform(0.1, 10);
      const Mat3 x = s.mat();
      const Mat3 pp = p_operator(p_operator(x, mu, mc, ka), mu, mc, ka);
      worst = std::max(worst, rel(opts.p_squared(x, mu, mc, ka), pp));
    }
    out.push_back(make("P composition", worst, 1e-10));
  }
  {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const Mat3 g = s.mat();
      const Mat3 a = gamma_to_alpha(g);
      const Decomposition dg = decompose(g), da = decompose(a);
      const double scale = g.norm();
      worst = std::max({worst, rel(alpha_to_gamma(a), g), (da.dev_sym + dg.dev_sym).norm() / scale,
                        (da.skew - dg.skew).norm() / scale, std::abs(da.trace - 2.0 * dg.trace) / scale});
    }
    out.push_back(make("Gamma/alpha relations", worst, 1e-10));
  }
  {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const Vec3 d = s.vec();
      const Mat43 a = director_lift_matrix(d);
      worst = std::max(worst, rel(Mat3(a.transpose() * a), Mat3(d.squaredNorm() * Mat3::Identity())));
    }
    out.push_back(make("director lift A^T A", worst, 1e-10));
  }
  {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const Mat32 b = s.mat32(), c = s.mat32();
      worst = std::max(worst, rel(Mat3(circ(b, c).transpose()), circ(c, b)));
    }
    out.push_back(make("circ transpose", worst, 1e-10));
  }
  {
    // margin = <L xi, xi> / (2 min(mu, mu_c, kappa) |xi|^2) - 1, must stay positive
    double worst_margin = 1e300;
    for (int set = 0; set < 5; ++set) {
      MaterialParams p;
      p.variant = Variant::normalized_p;
      p.mu = s.uniform(0.5, 5.0);
      p.lambda = s.uniform(-0.4, 5.0) * p.mu;
      p.mu_c = s.uniform(0.1, 5.0);
      const double lam = std::min({p.mu, p.mu_c, p.kappa_normalized()});
      for (int k = 0; k < n / 5; ++k) {
        const Mat32 xi = s.mat32();
        const Rotation r = s.rotation();
        const double lhs = frobenius_dot(legendre_operator(xi, r, p), xi);
        worst_margin = std::min(worst_margin, lhs / (2.0 * lam * xi.squaredNorm()) - 1.0);
      }
    }
    SuiteResult r;
    r.name = "coercivity";
    r.worst = worst_margin;
    r.passed = worst_margin > 0.0;
    r.detail = fmt::format("smallest relative margin {:.3e}", worst_margin);
    out.push_back(r);
  }
  {
    double worst = 0.0;
    MaterialParams g, e;
    g.mu = e.mu = 2.7191e4;
    g.lambda = e.lambda = 4.4364e4;
    g.mu_c = e.mu_c = g.mu;
    g.shear_mean = ShearMean::harmonic;
    e.variant = Variant::engineering;
    e.shear_mean = ShearMean::arithmetic;
    for (int k = 0; k < std::max(1, n / 10); ++k) {
      const Mat32 dm = s.mat32();
      const Rotation r = s.rotation();
      worst = std::max(worst, rel(membrane_density(dm, r, g), membrane_density(dm, r, e)));
    }
    out.push_back(make("harmonic/arithmetic mean equivalence", worst, 1e-12));
  }
  {
    double worst = 0.0;
    MaterialParams p;
    p.variant = Variant::normalized_p;
    p.mu = p.mu_c = 1.7;
    p.lambda = 0.0;  // kappa = 3/2 kappa_hom = mu
    p.L_c = std::sqrt(2.0 / p.mu);
    for (int k = 0; k < std::max(1, n / 10); ++k) {
      const Rotation r = s.rotation();
      const Mat32 dm = s.mat32();
      const Mat3 dx = r.matrix() * anti<double>(s.vec()), dy = r.matrix() * anti<double>(s.vec());
      const Mat3 lap = s.mat();
      Mat3 dm0 = Mat3::Zero();
      dm0.leftCols<2>() = dm;
      const Mat3 omega_dr = -r.matrix() * dx.transpose() * dx - r.matrix() * dy.transpose() * dy;
      const Mat3 special = lap - omega_dr + p.mu * r.matrix() * skew(Mat3(r.matrix().transpose() * dm0));
      worst = std::max(worst, rel(el_residual_R_pointwise(lap, dm, dx, dy, r, p), special));
    }
    out.push_back(make("EL special case mu = mu_c = kappa", worst, 1e-12));
  }
  {
    double worst = 0.0;
    MaterialParams p;
    p.mu_c = 0.3 * p.mu;
    p.curvature = CurvatureModel::general;
    p.b1 = 1.2;
    p.b2 = 0.7;
    p.b3 = 0.4;
    p.L_c = 0.1;
    for (int k = 0; k < std::max(1, n / 10); ++k) {
      const Rotation q = s.rotation(), r = s.rotation();
      const Mat32 dm = s.mat32();
      const Mat3 dx = r.matrix() * anti<double>(s.vec()), dy = r.matrix() * anti<double>(s.vec());
      const Rotation qr = q * r;
      worst = std::max({worst, rel(membrane_density(Mat32(q.matrix() * dm), qr, p), membrane_density(dm, r, p)),
                        rel(curvature_density(Mat3(q.matrix() * dx), Mat3(q.matrix() * dy), qr, p),
                            curvature_density(dx, dy, r, p))});
    }
    out.push_back(make("frame indifference of densities", worst, 1e-10));
  }
  {
    double worst = 0.0;
    for (int k = 0; k < std::max(1, n / 10); ++k) {
      const Vec3 d = s.vec().normalized();
      const Mat32 dm = s.mat32(), dd = s.mat32();
      const Vec3 lap = s.vec();
      const double lhs = d.dot(director_el_residual(dm, d, lap, dd));
      const double rhs = d.dot(lap) + dd.squaredNorm();
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    out.push_back(make("director normal component", worst, 1e-12));
  }
  {
    const Mesh mesh = make_disk_mesh(1);
    MaterialParams p;
    p.mu_c = 0.5 * p.mu;
    p.L_c = 0.05;
    ShellState st = reference_state(mesh);
    for (int i = 0; i < mesh.node_count(); ++i) {
      st.m[i] += 0.05 * s.vec();
      st.R[i] = exp_so3(0.3 * s.vec());
    }
    const double err = check_gradient(mesh, st, p, {}, 1e-6);
    out.push_back(make("finite-difference gradient", err, 1e-5));
  }
  return out;
}

}  // namespace cosserat
