#include "osmium/mms.hpp"

#include <cmath>

#include "osmium/errors.hpp"

namespace osmium {

namespace {

// b(t) = (t - t^2)^2 and derivatives
struct Bump {
  double v, d1, d2, d3;
  explicit Bump(double t) {
    double u = t - t * t, up = 1.0 - 2.0 * t;
    v = u * u;
    d1 = 2.0 * u * up;
    d2 = 2.0 * up * up - 4.0 * u;
    d3 = -12.0 * up;
  }
};

// Composition: x_last = a + b cos(pi x) cos(pi y), first slot balances the
// normalization; intermediate slots constant.
class BaseCase : public ManufacturedCase {
 public:
  BaseCase(const Eigen::VectorXd& nu_Z, double amp_v, double amp_N)
      : nu_Z_(nu_Z), s_(static_cast<int>(nu_Z.size())), amp_v_(amp_v), amp_N_(amp_N) {}

  Eigen::Vector2d velocity(const Eigen::Vector2d& p) const override {
    Bump gx(p.x()), gy(p.y());
    return amp_v_ * Eigen::Vector2d(gx.v * gy.d1, -gx.d1 * gy.v);
  }
  Eigen::Matrix2d grad_velocity(const Eigen::Vector2d& p) const override {
    Bump gx(p.x()), gy(p.y());
    Eigen::Matrix2d G;
    // rows: component; cols: d/dx, d/dy
    G(0, 0) = gx.d1 * gy.d1;
    G(0, 1) = gx.v * gy.d2;
    G(1, 0) = -gx.d2 * gy.v;
    G(1, 1) = -gx.d1 * gy.d1;
    return amp_v_ * G;
  }
  void hess_velocity(const Eigen::Vector2d& p, Eigen::Matrix2d& Hx,
                     Eigen::Matrix2d& Hy) const override {
    Bump gx(p.x()), gy(p.y());
    Hx(0, 0) = gx.d2 * gy.d1;
    Hx(0, 1) = Hx(1, 0) = gx.d1 * gy.d2;
    Hx(1, 1) = gx.v * gy.d3;
    Hy(0, 0) = -gx.d3 * gy.v;
    Hy(0, 1) = Hy(1, 0) = -gx.d2 * gy.d1;
    Hy(1, 1) = -gx.d1 * gy.d2;
    Hx *= amp_v_;
    Hy *= amp_v_;
  }
  double pressure(const Eigen::Vector2d& p) const override {
    return 0.1 * std::cos(M_PI * p.x()) * std::cos(M_PI * p.y());
  }
  Eigen::Vector2d grad_pressure(const Eigen::Vector2d& p) const override {
    return 0.1 * M_PI *
           Eigen::Vector2d(-std::sin(M_PI * p.x()) * std::cos(M_PI * p.y()),
                           -std::cos(M_PI * p.x()) * std::sin(M_PI * p.y()));
  }
  Eigen::VectorXd x_nu(const Eigen::Vector2d& p) const override {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(s_);
    double xs = 0.1 + 0.03 * std::cos(M_PI * p.x()) * std::cos(M_PI * p.y());
    x[s_ - 1] = xs;
    double acc = nu_Z_[s_ - 1] * xs;
    for (int l = 1; l < s_ - 1; ++l) {
      x[l] = 0.1;
      acc += nu_Z_[l] * 0.1;
    }
    x[0] = (1.0 - acc) / nu_Z_[0];
    return x;
  }
  Eigen::MatrixXd grad_x_nu(const Eigen::Vector2d& p) const override {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(s_, 2);
    double cx = std::cos(M_PI * p.x()), sx = std::sin(M_PI * p.x());
    double cy = std::cos(M_PI * p.y()), sy = std::sin(M_PI * p.y());
    g(s_ - 1, 0) = -0.03 * M_PI * sx * cy;
    g(s_ - 1, 1) = -0.03 * M_PI * cx * sy;
    g.row(0) = -(nu_Z_[s_ - 1] / nu_Z_[0]) * g.row(s_ - 1);
    return g;
  }
  Eigen::MatrixXd N_hat(const Eigen::Vector2d& p) const override {
    Bump gx(p.x()), gy(p.y());
    Eigen::Vector2d curl(gx.v * gy.d1, -gx.d1 * gy.v);
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(s_ + 1, 2);
    for (int l = 0; l < s_; ++l) N.row(l) = amp_N_ * (0.4 + 0.6 * l) * curl.transpose();
    return N;  // current slot stays zero
  }

 protected:
  Eigen::VectorXd nu_Z_;
  int s_;
  double amp_v_, amp_N_;
};

}  // namespace

std::unique_ptr<ManufacturedCase> make_manufactured(const std::string& name,
                                                    const Eigen::VectorXd& nu_Z) {
  if (name == "diffusion") return std::make_unique<BaseCase>(nu_Z, 0.0, 0.05);
  if (name == "stokes") return std::make_unique<BaseCase>(nu_Z, 1.0, 0.05);
  fail(ErrorCode::ConfigError, "unknown manufactured case " + name);
}

}  // namespace osmium
