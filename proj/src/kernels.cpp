#include "kbm/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace kbm {

double ScalarKernel::operator()(const Vector& x, const Vector& y) const {
  if (x.size() != y.size())
    throw std::invalid_argument("ScalarKernel: argument dimensions differ");
  switch (kind) {
    case Kind::Linear:
      return x.dot(y);
    case Kind::Gaussian:
      return std::exp(-(x - y).squaredNorm() / (2.0 * bandwidth * bandwidth));
    case Kind::Fock: {
      const double lam = x.dot(y);
      double sum = 0.0, pow = 1.0, fact = 1.0;
      for (std::size_t k = 0; k < rho.size(); ++k) {
        if (k > 0) {
          pow *= lam;
          fact *= static_cast<double>(k);
        }
        sum += pow / (fact * rho[k]);
      }
      return sum;
    }
    case Kind::Polynomial:
      return std::pow(1.0 + x.dot(y), degree);
  }
  throw std::logic_error("ScalarKernel: unknown kind");
}

ScalarKernel ScalarKernel::linear() { return {Kind::Linear}; }

ScalarKernel ScalarKernel::gaussian(double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian kernel: bandwidth must be positive");
  ScalarKernel k{Kind::Gaussian};
  k.bandwidth = sigma;
  return k;
}

ScalarKernel ScalarKernel::fock(std::vector<double> rho) {
  if (rho.empty()) throw std::invalid_argument("fock kernel: empty weight sequence");
  for (double r : rho)
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("fock kernel: weights must be finite and positive");
  ScalarKernel k{Kind::Fock};
  k.rho = std::move(rho);
  return k;
}

ScalarKernel ScalarKernel::polynomial(int degree) {
  if (degree < 1) throw std::invalid_argument("polynomial kernel: degree must be >= 1");
  ScalarKernel k{Kind::Polynomial};
  k.degree = degree;
  return k;
}

int FeatureMap::output_dim() const {
  switch (kind) {
    case Kind::Identity:
    case Kind::Tanh:
      return input_dim;
    case Kind::Polynomial:
      return input_dim * degree;
    case Kind::Table:
      return table.empty() ? 0 : static_cast<int>(table.front().second.size());
  }
  throw std::logic_error("FeatureMap: unknown kind");
}

Vector FeatureMap::operator()(const Vector& u) const {
  if (u.size() != input_dim)
    throw std::invalid_argument("FeatureMap: wrong input dimension");
  switch (kind) {
    case Kind::Identity:
      return u;
    case Kind::Tanh:
      return u.array().tanh();
    case Kind::Polynomial: {
      Vector out(input_dim * degree);
      Vector pow = Vector::Ones(input_dim);
      for (int d = 0; d < degree; ++d) {
        pow = pow.cwiseProduct(u);
        out.segment(d * input_dim, input_dim) = pow;
      }
      return out;
    }
    case Kind::Table: {
      for (const auto& [key, value] : table)
        if ((key - u).cwiseAbs().maxCoeff() <= 1e-12) return value;
      throw std::invalid_argument("FeatureMap: input not in table");
    }
  }
  throw std::logic_error("FeatureMap: unknown kind");
}

FeatureMap FeatureMap::identity(int m) { return {Kind::Identity, m}; }
FeatureMap FeatureMap::tanh(int m) { return {Kind::Tanh, m}; }

FeatureMap FeatureMap::polynomial(int m, int degree) {
  if (degree < 1) throw std::invalid_argument("FeatureMap: degree must be >= 1");
  FeatureMap f{Kind::Polynomial, m};
  f.degree = degree;
  return f;
}

FeatureMap FeatureMap::tabulated(std::vector<std::pair<Vector, Vector>> entries) {
  if (entries.empty()) throw std::invalid_argument("FeatureMap: empty table");
  FeatureMap f{Kind::Table, static_cast<int>(entries.front().first.size())};
  f.table = std::move(entries);
  return f;
}

OperatorKernel OperatorKernel::scalar_lift(ScalarKernel k, int p) {
  if (p < 1) throw std::invalid_argument("scalar_lift: output dimension must be >= 1");
  OperatorKernel out;
  out.kind_ = Kind::ScalarLift;
  out.p_ = p;
  out.scalar_ = std::move(k);
  return out;
}

OperatorKernel OperatorKernel::direct_sum(OperatorKernel ku, OperatorKernel ky, Index split) {
  if (ku.output_dim() != ky.output_dim())
    throw std::invalid_argument("direct_sum: part output dimensions differ");
  if (split < 0) throw std::invalid_argument("direct_sum: negative split index");
  OperatorKernel out;
  out.kind_ = Kind::DirectSum;
  out.p_ = ku.output_dim();
  out.split_ = split;
  out.ku_ = std::make_shared<OperatorKernel>(std::move(ku));
  out.ky_ = std::make_shared<OperatorKernel>(std::move(ky));
  return out;
}

OperatorKernel OperatorKernel::rank_one(FeatureMap phi) {
  OperatorKernel out;
  out.kind_ = Kind::RankOneFeature;
  out.p_ = phi.output_dim();
  out.phi_ = std::move(phi);
  return out;
}

const FeatureMap& OperatorKernel::feature() const {
  if (kind_ != Kind::RankOneFeature)
    throw std::invalid_argument("OperatorKernel: not a rank-one-feature kernel");
  return phi_;
}

const ScalarKernel& OperatorKernel::scalar() const {
  if (kind_ != Kind::ScalarLift)
    throw std::invalid_argument("OperatorKernel: not a scalar-lift kernel");
  return scalar_;
}

Matrix OperatorKernel::operator()(const Vector& z1, const Vector& z2) const {
  switch (kind_) {
    case Kind::ScalarLift:
      return scalar_(z1, z2) * Matrix::Identity(p_, p_);
    case Kind::DirectSum: {
      if (z1.size() != z2.size() || z1.size() < split_)
        throw std::invalid_argument("OperatorKernel: direct-sum argument dimensions");
      return (*ku_)(z1.head(split_), z2.head(split_)) +
             (*ky_)(z1.tail(z1.size() - split_), z2.tail(z2.size() - split_));
    }
    case Kind::RankOneFeature: {
      const Vector f1 = phi_(z1);
      const Vector f2 = phi_(z2);
      return f1 * f2.transpose();
    }
  }
  throw std::logic_error("OperatorKernel: unknown kind");
}

Matrix gram_block(const OperatorKernel& k, const std::vector<Vector>& centers) {
  if (centers.empty()) throw std::invalid_argument("gram_block: empty center list");
  const Index p = k.output_dim();
  const Index n = static_cast<Index>(centers.size());
  Matrix gram(p * n, p * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) {
      const Matrix block = k(centers[i], centers[j]);
      gram.block(i * p, j * p, p, p) = block;
      if (j != i) gram.block(j * p, i * p, p, p) = block.transpose();
    }
  return gram;
}

Matrix kernel_row(const OperatorKernel& k, const Vector& z,
                  const std::vector<Vector>& centers) {
  if (centers.empty()) throw std::invalid_argument("kernel_row: empty center list");
  const Index p = k.output_dim();
  const Index n = static_cast<Index>(centers.size());
  Matrix row(p, p * n);
  for (Index j = 0; j < n; ++j) row.block(0, j * p, p, p) = k(z, centers[j]);
  return row;
}

double trace_inner(const OperatorKernel& k, const Vector& u, const Vector& v) {
  const FeatureMap& phi = k.feature();  // throws unless rank-one
  return phi(u).dot(phi(v));
}

}  // namespace kbm
