#include <doctest.h>

#include <cmath>
#include <random>

#include "c1free/basis.hpp"

using namespace c1free;

namespace {

Eigen::MatrixXd random_points(int dim, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd pts(dim, n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd x(dim);
    do {
      for (int i = 0; i < dim; ++i) x[i] = u(rng);
    } while (x.sum() > 0.95 || x.minCoeff() < 0.02);
    pts.col(k) = x;
  }
  return pts;
}

}  // namespace

TEST_CASE("basis is nodal: identity at its own nodes") {
  for (int dim : {2, 3})
    for (int p = 1; p <= (dim == 2 ? 12 : 8); ++p) {
      const ReferenceBasis basis(dim, p);
      CHECK(basis.size() == polynomial_space_dim(dim, p));
      const Eigen::MatrixXd V = basis.tabulate(basis.nodes(), 0).values;
      CHECK((V - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("partition of unity, zero-sum derivatives") {
  for (int dim : {2, 3})
    for (int p = 1; p <= (dim == 2 ? 15 : 10); ++p) {
      const BasisTableau t = eval_basis(dim, p, random_points(dim, 20, 7u + p), 2);
      CHECK((t.values.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
      for (const auto& g : t.gradients) CHECK(g.rowwise().sum().cwiseAbs().maxCoeff() < 1e-8 * std::pow(p, 2));
      for (const auto& h : t.hessians) CHECK(h.rowwise().sum().cwiseAbs().maxCoeff() < 1e-7 * std::pow(p, 4));
    }
}

TEST_CASE("gradients and Hessians agree with central differences") {
  const double eps = 1e-6;
  for (int dim : {2, 3})
    for (int p = 1; p <= (dim == 2 ? 12 : 8); ++p) {
      const Eigen::MatrixXd pts = random_points(dim, 6, 100u + p);
      const BasisTableau t = eval_basis(dim, p, pts, 2);
      for (int k = 0; k < dim; ++k) {
        Eigen::MatrixXd plus = pts, minus = pts;
        plus.row(k).array() += eps;
        minus.row(k).array() -= eps;
        const BasisTableau tp = eval_basis(dim, p, plus, 1), tm = eval_basis(dim, p, minus, 1);
        const Eigen::MatrixXd fd = (tp.values - tm.values) / (2 * eps);
        const double scale = std::max(1.0, t.gradients[k].cwiseAbs().maxCoeff());
        CHECK((fd - t.gradients[k]).cwiseAbs().maxCoeff() / scale < 1e-5);
        for (int l = 0; l < dim; ++l) {
          const Eigen::MatrixXd fdh = (tp.gradients[l] - tm.gradients[l]) / (2 * eps);
          const double hs = std::max(1.0, t.hessians[l * dim + k].cwiseAbs().maxCoeff());
          CHECK((fdh - t.hessians[l * dim + k]).cwiseAbs().maxCoeff() / hs < 1e-5);
        }
      }
    }
}

TEST_CASE("interpolation reproduces polynomials of the basis degree") {
  for (int dim : {2, 3}) {
    const int p = dim == 2 ? 7 : 5;
    const ReferenceBasis basis(dim, p);
    auto f = [dim, p](const Eigen::VectorXd& x) { return std::pow(x[0], p - 2) * x[1] * x[1] + (dim == 3 ? x[2] : 0.0) - 0.5; };
    Eigen::VectorXd nodal(basis.size());
    for (int i = 0; i < basis.size(); ++i) nodal[i] = f(basis.nodes().col(i));
    const Eigen::MatrixXd pts = random_points(dim, 30, 3);
    const Eigen::VectorXd interp = basis.tabulate(pts, 0).values * nodal;
    for (int k = 0; k < pts.cols(); ++k) CHECK(interp[k] == doctest::Approx(f(pts.col(k))).epsilon(1e-11));
  }
}

TEST_CASE("nodes on a shared edge depend only on the edge") {
  const Eigen::MatrixXd nodes = reference_nodes(2, 6);
  // nodes with y = 0 must be the 1D set, symmetric about 1/2
  std::vector<double> xs;
  for (int i = 0; i < nodes.cols(); ++i)
    if (std::abs(nodes(1, i)) < 1e-14) xs.push_back(nodes(0, i));
  REQUIRE(xs.size() == 7);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(xs[i] + xs[xs.size() - 1 - i] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("degree 0 and invalid degrees") {
  const ReferenceBasis b0(2, 0);
  CHECK(b0.size() == 1);
  CHECK(b0.tabulate(random_points(2, 3, 1), 1).values.isOnes());
  CHECK_THROWS_AS(ReferenceBasis(2, kMaxBasisDegree + 1), std::invalid_argument);
  CHECK_THROWS_AS(ReferenceBasis(4, 2), std::invalid_argument);
  CHECK_THROWS_AS(eval_basis(2, 2, random_points(2, 2, 1), 3), std::invalid_argument);
}
