#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/core/random.hpp"
#include "bnpfc/gp/kernel.hpp"
#include "bnpfc/gp/predict.hpp"
#include "bnpfc/gp/projection.hpp"
#include "bnpfc/gp/sampling.hpp"
#include "bnpfc/gp/subspace.hpp"
#include "oracles.hpp"

using namespace bnpfc;
using namespace bnpfc::gp;

namespace {

Matrix randn(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(gen);
  return m;
}

double rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

Projection manual_projection(const Matrix& basis) {
  Projection p;
  p.design = basis;
  p.basis = basis;
  p.r_factor = Matrix::Identity(basis.cols(), basis.cols());
  return p;
}

}  // namespace

TEST_CASE("gaussian kernel entries") {
  Matrix X(2, 1);
  X << 0.0, 1.0;
  CHECK(gaussian_kernel_matrix(X, {0.5, 0.3})(0, 0) == 0.5);
  CHECK(gaussian_kernel_matrix(X, {1.0, 2.0})(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  const Matrix flat = gaussian_kernel_matrix(randn(6, 2, 1), {0.7, 1e-14});
  CHECK((flat.array() - 0.7).abs().maxCoeff() < 1e-12);

  const Matrix Z = randn(40, 3, 2);
  const Matrix K = gaussian_kernel_matrix(Z, {0.4, 0.6});
  CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(K).eigenvalues().minCoeff() >= -1e-8 * 0.4);
  const Matrix Kc = kernel_from_distances(squared_distances(Z), {0.4, 0.6});
  CHECK(rel_err(Kc, oracle::kernel(Z, 0.4, 0.6, kNugget)) < 1e-13);
  const Vector kx = kernel_cross(Z.topRows(39), Z.row(39).transpose(), {0.4, 0.6});
  CHECK((kx - K.col(39).head(39)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("projection matrix") {
  const Vector y = randn(9, 1, 3);
  const auto ones = projection_matrix(Matrix::Ones(9, 1));
  CHECK((ones.phi0() * y - Vector::Constant(9, y.mean())).cwiseAbs().maxCoeff() < 1e-12);

  const Matrix Q = Eigen::HouseholderQR<Matrix>(randn(10, 3, 4)).householderQ() * Matrix::Identity(10, 3);
  const auto pq = projection_matrix(Q);
  CHECK((pq.phi0() - Q * Q.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  const Matrix X = randn(30, 5, 5);
  const auto p = projection_matrix(X);
  const Matrix phi = p.phi0();
  CHECK((phi * phi - phi).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((phi - phi.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((phi - oracle::hat(X)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(p.residual_quadratic(y.head(0).size() ? y : Vector(X.col(0))) == doctest::Approx(0.0).epsilon(1e-9));

  const auto wide = projection_matrix(randn(20, 175, 6));
  CHECK(wide.rank() == 6);
  CHECK(wide.pcs.has_value());

  Matrix collinear = randn(20, 3, 7);
  collinear.col(2) = collinear.col(0) + collinear.col(1);
  CHECK_THROWS_AS(projection_matrix(collinear), DataError);

  // Augmented complement row against the dense augmented hat matrix.
  const Vector x_new = randn(5, 1, 8);
  Matrix aug(31, 5);
  aug << X, x_new.transpose();
  const Matrix h = oracle::hat(aug);
  const Vector row = augmented_complement_row(p, x_new);
  Vector expected = -h.row(30).transpose();
  expected(30) += 1.0;
  CHECK((row - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("subspace kernel") {
  const Matrix X = randn(12, 2, 9);
  const KernelHyper hyper{0.6, 0.8};
  const Matrix K = kernel_from_distances(squared_distances(X), hyper);
  const auto proj = projection_matrix(X);

  const Matrix far = subspace_kernel(K, proj, 1e8);
  CHECK((far - K).cwiseAbs().maxCoeff() < 1e-4 * K.cwiseAbs().maxCoeff());

  const auto full = manual_projection(Matrix::Identity(12, 12));
  CHECK((subspace_kernel(K, full, 0.3) - K).cwiseAbs().maxCoeff() < 1e-15);

  Matrix I2 = Matrix::Identity(2, 2);
  const auto first = manual_projection(I2.col(0));
  const Matrix k1 = subspace_kernel(I2, first, 1.0);
  CHECK(k1(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(k1(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(k1(0, 1)) < 1e-15);

  // Literal formula on a well-conditioned kernel.
  const Matrix Xs = 3.0 * randn(8, 2, 10);
  const Matrix Ks = oracle::kernel(Xs, 0.7, 0.9, 1e-3);
  const auto ps = projection_matrix(Xs);
  const Matrix P = Matrix::Identity(8, 8) - oracle::hat(Xs);
  for (double tau2 : {0.01, 0.5, 20.0}) {
    const Matrix lit = oracle::inverse(oracle::inverse(Ks) + P / tau2);
    CHECK(rel_err(subspace_kernel(Ks, ps, tau2), lit) < 1e-10);
  }
  CHECK(omega_from_tau2(0.0) == 1.0);
  CHECK(omega_from_tau2(3.0) == 0.25);
}

TEST_CASE("GP conditional moments against the literal formulas") {
  for (int T : {3, 25}) {
    const Matrix X = randn(T, 3, 20 + T);
    const Matrix K = kernel_from_distances(squared_distances(X), {0.5, 0.4});
    const auto proj = projection_matrix(X);
    const Matrix k1 = subspace_kernel(K, proj, 0.7);
    const Vector sigma = (randn(T, 1, 31).array().abs() + 0.2).matrix();
    const Vector r = randn(T, 1, 32);
    const GpConditional cond(k1, sigma, r);
    const Matrix C = oracle::inverse(Matrix(k1 + Matrix(sigma.asDiagonal())));
    const Vector fbar = k1 * C * r;
    const Matrix vbar = k1 - k1 * C * k1.transpose();
    CHECK(rel_err(cond.mean(), fbar) < 1e-10);
    CHECK(rel_err(cond.covariance(), vbar) < 1e-10);
    const Matrix S = k1 + Matrix(sigma.asDiagonal());
    const double ll = -0.5 * (T * std::log(2 * std::numbers::pi) + std::log(S.determinant()) + r.dot(oracle::inverse(S) * r));
    CHECK(cond.log_lik() == doctest::Approx(ll).epsilon(1e-10));
  }

  const Matrix K = kernel_from_distances(squared_distances(randn(4, 1, 40)), {0.5, 0.5});
  const GpConditional vague(K, Vector::Constant(4, 1e12), Vector::Ones(4));
  CHECK(vague.mean().cwiseAbs().maxCoeff() < 1e-11);
  RandomStream rng(1);
  const GpConditional zero(Matrix::Zero(3, 3), Vector::Ones(3), Vector::Ones(3));
  CHECK(zero.mean().isZero());
  CHECK(zero.covariance().isZero());
  CHECK(zero.draw(rng).isZero());
}

TEST_CASE("GP conditional draws reproduce the posterior moments") {
  const int T = 5;
  const Matrix X = randn(T, 2, 50);
  const Matrix K = kernel_from_distances(squared_distances(X), {0.8, 0.5});
  const GpConditional cond(subspace_kernel(K, projection_matrix(X), 0.5), Vector::Constant(T, 0.3), randn(T, 1, 51));
  RandomStream rng(7);
  const int n = 100000;
  Vector sum = Vector::Zero(T);
  Matrix sq = Matrix::Zero(T, T);
  for (int i = 0; i < n; ++i) {
    const Vector f = cond.draw(rng);
    sum += f;
    sq += f * f.transpose();
  }
  const Vector m = sum / n;
  const Matrix cov = sq / n - m * m.transpose();
  const Matrix V = cond.covariance();
  const double sd_scale = std::sqrt(V.diagonal().maxCoeff());
  CHECK((m - cond.mean()).cwiseAbs().maxCoeff() < 0.05 * sd_scale);
  CHECK(rel_err(cov, V) < 0.05);
}

TEST_CASE("linear limit conditional") {
  const int T = 30;
  const Matrix X = randn(T, 3, 60);
  const KernelHyper hyper{0.5, 0.3};
  const Matrix K = kernel_from_distances(squared_distances(X), hyper);
  const auto proj = projection_matrix(X);
  const SpdFactor kf = factorize_spd(K, hyper.xi, 0.0);
  const Matrix prec = linear_limit_precision(kf, proj);
  const Vector sigma = Vector::Constant(T, 0.4);
  const Vector r = randn(T, 1, 61);
  const LinearConditional lin(proj.basis, prec, sigma, r);

  const Matrix Q = proj.basis;
  const Matrix K1 = Q * oracle::inverse(Q.transpose() * oracle::inverse(K) * Q) * Q.transpose();
  const Matrix S = K1 + Matrix(sigma.asDiagonal());
  const double ll = -0.5 * (T * std::log(2 * std::numbers::pi) + std::log(S.determinant()) + r.dot(oracle::inverse(S) * r));
  CHECK(lin.log_lik() == doctest::Approx(ll).epsilon(1e-9));
  const Vector fbar = K1 * oracle::inverse(S) * r;
  CHECK(rel_err(Q * lin.coef_mean(), fbar) < 1e-9);

  // Same path through the subspace kernel with a vanishing tau2.
  const GpConditional sub(subspace_kernel(K, proj, 1e-10), sigma, r);
  CHECK(rel_err(sub.mean(), fbar) < 1e-6);
  const Vector x_new = randn(3, 1, 62);
  const GpPredictor pred(X, squared_distances(X), proj, hyper);
  const double m_sub = pred.predict(sub.mean(), 1e-10, x_new).mean;
  const double m_lin = linear_predict(proj, lin.coef_mean(), x_new);
  CHECK(m_sub == doctest::Approx(m_lin).epsilon(1e-6));
}

TEST_CASE("subspace endpoints at the level of posterior means") {
  const int T = 25;
  const Matrix X = randn(T, 3, 70);
  const KernelHyper hyper{0.9, 0.1};
  const Matrix K = kernel_from_distances(squared_distances(X), hyper);
  const auto proj = projection_matrix(X);
  const Vector y = randn(T, 1, 71);

  const double s2 = 0.2;
  const GpConditional plain(K, Vector::Constant(T, s2), y);
  const GpConditional far(subspace_kernel(K, proj, 1e8), Vector::Constant(T, s2), y);
  CHECK(rel_err(far.mean(), plain.mean()) < 1e-4);

  const GpConditional near(subspace_kernel(K, proj, 1e-8), Vector::Constant(T, 1e-4), y);
  CHECK(rel_err(near.mean(), proj.phi0() * y) < 1e-3);
}

TEST_CASE("gp_predict against dense joint-Gaussian conditioning") {
  const int T = 10;
  const Matrix X = 1.5 * randn(T, 2, 80);
  const Vector x_new = randn(2, 1, 81);
  const KernelHyper hyper{0.7, 0.9};
  const auto proj = projection_matrix(X);
  const Vector f = randn(T, 1, 82);
  const GpPredictor pred(X, squared_distances(X), proj, hyper);

  Matrix aug(T + 1, 2);
  aug << X, x_new.transpose();
  const Matrix Ka = oracle::kernel(aug, hyper.xi, hyper.phi, kNugget);
  const Matrix Pa = Matrix::Identity(T + 1, T + 1) - oracle::hat(aug);
  for (double tau2 : {0.3, 4.0}) {
    const Matrix K1a = oracle::inverse(oracle::inverse(Ka) + Pa / tau2);
    const auto [m, v] = oracle::condition_last(K1a, f);
    const auto got = pred.predict(f, tau2, x_new);
    CHECK(got.mean == doctest::Approx(m).epsilon(1e-8));
    CHECK(got.variance == doctest::Approx(v).epsilon(1e-6));
  }
  const auto [m0, v0] = oracle::condition_last(Ka, f);
  const auto g0 = pred.predict(f, kPlainGp, x_new);
  CHECK(g0.mean == doctest::Approx(m0).epsilon(1e-8));
  CHECK(g0.variance == doctest::Approx(v0).epsilon(1e-6));

  // Interpolation at a training input.
  const auto at = pred.predict(f, 1e8, X.row(3).transpose());
  CHECK(at.mean == doctest::Approx(f(3)).epsilon(1e-4));

  // Linear endpoint: OLS fitted value from regressing f on the design.
  const Vector beta = (X.transpose() * X).ldlt().solve(X.transpose() * f);
  const auto lin = pred.predict(f, 1e-8, x_new);
  CHECK(lin.mean == doctest::Approx(x_new.dot(beta)).epsilon(1e-3));
}

TEST_CASE("tau prior is half-Cauchy at d0 = d1 = 1/2") {
  const Tau2Prior prior;
  auto hc = [](double t) { return std::log(1.0 / (1.0 + t * t)); };
  for (double t : {0.5, 2.0}) {
    CHECK(log_tau_prior(t, prior) - log_tau_prior(1.0, prior) == doctest::Approx(hc(t) - hc(1.0)).epsilon(1e-14));
  }
}

TEST_CASE("truncated gamma draws match the inverse-CDF oracle") {
  RandomStream rng(5);
  struct Case { double shape, rate, upper; };
  for (const Case c : {Case{3.0, 2.0, 1.0}, Case{12.0, 1.0, 4.0}, Case{2.5, 0.5, 100.0}, Case{40.0, 0.2, 3.0}}) {
    std::vector<double> x(50000);
    for (auto& e : x) e = rng.truncated_gamma(c.shape, c.rate, c.upper);
    boost::math::gamma_distribution<double> g(c.shape, 1.0 / c.rate);
    const double top = boost::math::cdf(g, c.upper);
    const double d = oracle::ks_distance(x, [&](double v) { return boost::math::cdf(g, v) / top; });
    CHECK(d < 0.01);
  }
  std::vector<double> x(50000);
  for (auto& e : x) e = rng.truncated_gamma(2.0, 0.0, 3.0);
  CHECK(oracle::ks_distance(x, [](double v) { return std::pow(v / 3.0, 2.0); }) < 0.01);
}

TEST_CASE("tau2 slice sampler leaves its conditional invariant") {
  const int T = 20;
  const Matrix X = randn(T, 2, 90);
  const auto proj = projection_matrix(X);
  const Vector f = 0.3 * randn(T, 1, 91);
  const Tau2Prior prior;
  const double shape = prior.d0 + 0.5 * (T - 2);
  const double rate = 0.5 * proj.residual_quadratic(f);

  // Unnormalized conditional of zeta = 1 / tau2, integrated by quadrature.
  auto dens = [&](double z) {
    return z <= 0 ? 0.0 : std::exp((shape - 1) * std::log(z) - rate * z - (prior.d0 + prior.d1) * std::log1p(z));
  };
  using boost::math::quadrature::gauss_kronrod;
  const double total = gauss_kronrod<double, 61>::integrate(dens, 0.0, std::numeric_limits<double>::infinity());
  auto cdf = [&](double z) { return gauss_kronrod<double, 61>::integrate(dens, 0.0, z) / total; };

  RandomStream rng(13);
  double tau2 = 1.0;
  std::vector<double> zeta;
  for (int i = 0; i < 60000; ++i) {
    tau2 = sample_tau2(f, proj, tau2, prior, rng);
    if (i % 3 == 0) zeta.push_back(1.0 / tau2);
  }
  // Thinned to 20000 nearly independent points.
  CHECK(oracle::ks_distance(zeta, cdf) < 0.02);

  // f in the span of the basis: rate-0 limit, still finite.
  const Vector in_span = proj.basis * Vector::Ones(2);
  const double t2 = sample_tau2(in_span, proj, 1.0, prior, rng);
  CHECK(std::isfinite(t2));
  CHECK(t2 > 0.0);
}

TEST_CASE("kernel hyperparameter Metropolis step") {
  RandomStream rng(3);
  CHECK(metropolis_accept(0.0, rng));
  const auto same = propose_kernel_hyper({0.3, 0.6}, 0.0, rng);
  CHECK(same.hyper.xi == doctest::Approx(0.3));
  CHECK(same.log_jacobian_ratio == doctest::Approx(0.0).epsilon(1e-12));

  // Recover phi from a function drawn with phi = 0.3.
  const int T = 200;
  Matrix X(T, 1);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int t = 0; t < T; ++t) X(t, 0) = u(gen);
  const Matrix D = squared_distances(X);
  const KernelHyper truth{0.5, 0.3};
  const SpdFactor kf = factorize_spd(kernel_from_distances(D, truth), truth.xi, 0.0);
  RandomStream sim(113);
  const double noise = 0.01;
  Vector y = draw_from_factor(kf, sim);
  for (int t = 0; t < T; ++t) y(t) += std::sqrt(noise) * sim.normal();

  const Vector sigma = Vector::Constant(T, noise);
  auto eval = [&](const KernelHyper& h) { return GpConditional(kernel_from_distances(D, h), sigma, y); };
  KernelHyper hyper;
  std::optional<GpConditional> current;
  AdaptiveStep step;
  double phi_sum = 0.0;
  int kept = 0;
  for (int i = 0; i < 3000; ++i) {
    if (i == 1000) step.adapting = false, step.proposals = step.accepted = 0;
    sample_kernel_hyper(hyper, current, eval, step, rng);
    if (i >= 1000) phi_sum += hyper.phi, ++kept;
  }
  CHECK(step.acceptance_rate() >= 0.2);
  CHECK(step.acceptance_rate() <= 0.5);
  CHECK(phi_sum / kept == doctest::Approx(0.3).epsilon(0.5));
  CHECK(std::abs(phi_sum / kept - 0.3) < 0.15);
}
