#include "frbl/geometry.hpp"

#include "frbl/error.hpp"

#include <algorithm>
#include <cmath>

namespace frbl {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::geometric: return "geometric";
    case Verdict::not_geometric_loewner: return "not-geometric-loewner";
    case Verdict::sigma_not_found: return "sigma-not-found";
  }
  return "unknown";
}

std::string_view to_string(TraceVerdict v) {
  switch (v) {
    case TraceVerdict::hypothesis_not_met: return "hypothesis-not-met";
    case TraceVerdict::conclusion_holds: return "conclusion-holds";
    case TraceVerdict::conclusion_fails: return "conclusion-fails";
  }
  return "unknown";
}

LoewnerCheck check_loewner(const FrblDatum& datum, double tol) {
  const auto maps = lambda_maps(datum);
  const double min_eig = min_eigenvalue(maps.lambda_c - sandwich(datum.q(), maps.lambda_d));
  return {min_eig >= -tol, min_eig};
}

std::pair<double, double> sigma_residuals(const FrblDatum& datum, const SymMatrix& sigma) {
  const auto& layout = datum.layout();
  if (sigma.dim() != layout.total_in()) throw InvalidInput("Sigma does not live on E_0");
  double res_in = 0.0;
  for (int i = 0; i < layout.k(); ++i) {
    const int n = layout.in_dim(i);
    const int o = layout.in_offset(i);
    res_in = std::max(res_in, (sigma.matrix().block(o, o, n, n) - Matrix::Identity(n, n)).norm());
  }
  const Matrix out = datum.q() * sigma.matrix() * datum.q().transpose();
  double res_out = 0.0;
  for (int j = 0; j < layout.m(); ++j) {
    const int n = layout.out_dim(j);
    const int o = layout.out_offset(j);
    res_out = std::max(res_out, (out.block(o, o, n, n) - Matrix::Identity(n, n)).norm());
  }
  return {res_in, res_out};
}

namespace {

// Isometric coordinates on symmetric n x n matrices: upper triangle, row by
// row, off-diagonal entries scaled by sqrt(2) so that the Euclidean inner
// product of coordinates equals the trace inner product.
class SymCoordinates {
 public:
  explicit SymCoordinates(Index n) : n_(n) {}

  Index size() const { return n_ * (n_ + 1) / 2; }

  Vector pack(const Matrix& x) const {
    Vector v(size());
    Index k = 0;
    for (Index p = 0; p < n_; ++p) {
      for (Index q = p; q < n_; ++q) v(k++) = (p == q) ? x(p, q) : kSqrt2 * x(p, q);
    }
    return v;
  }

  Matrix unpack(const Vector& v) const {
    Matrix x(n_, n_);
    Index k = 0;
    for (Index p = 0; p < n_; ++p) {
      for (Index q = p; q < n_; ++q) {
        const double val = (p == q) ? v(k) : v(k) / kSqrt2;
        x(p, q) = val;
        x(q, p) = val;
        ++k;
      }
    }
    return x;
  }

 private:
  static constexpr double kSqrt2 = 1.4142135623730950488;
  Index n_;
};

// Affine set {x : A x = b} with the exact projection x - A^+ (A x - b).
struct AffineConstraints {
  Matrix a;
  Vector b;
  Matrix complement;  // id - A^+ A
  Vector offset;      // A^+ b, the least-squares point of minimal norm

  Vector project(const Vector& x) const { return complement * x + offset; }
};

AffineConstraints build_constraints(const FrblDatum& datum, const SymCoordinates& coords) {
  const auto& layout = datum.layout();
  const Index n = layout.total_in();
  std::vector<Vector> rows;
  std::vector<double> rhs;

  // <sym(u w^T), Sigma> = target.
  const auto add = [&](const Vector& u, const Vector& w, double target) {
    const Matrix g = 0.5 * (u * w.transpose() + w * u.transpose());
    rows.push_back(coords.pack(g));
    rhs.push_back(target);
  };

  for (int i = 0; i < layout.k(); ++i) {
    const int o = layout.in_offset(i);
    for (int p = 0; p < layout.in_dim(i); ++p) {
      for (int q = p; q < layout.in_dim(i); ++q) {
        add(Vector::Unit(n, o + p), Vector::Unit(n, o + q), p == q ? 1.0 : 0.0);
      }
    }
  }
  for (int j = 0; j < layout.m(); ++j) {
    const int o = layout.out_offset(j);
    for (int r = 0; r < layout.out_dim(j); ++r) {
      for (int s = r; s < layout.out_dim(j); ++s) {
        add(datum.q().row(o + r).transpose(), datum.q().row(o + s).transpose(), r == s ? 1.0 : 0.0);
      }
    }
  }

  AffineConstraints c;
  c.a.resize(static_cast<Index>(rows.size()), coords.size());
  c.b.resize(static_cast<Index>(rhs.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    c.a.row(static_cast<Index>(r)) = rows[r].transpose();
    c.b(static_cast<Index>(r)) = rhs[r];
  }

  Eigen::JacobiSVD<Matrix> svd(c.a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = 1e-10 * (sv.size() > 0 ? sv(0) : 0.0);
  Vector inv = sv.unaryExpr([cutoff](double s) { return s > cutoff ? 1.0 / s : 0.0; });
  const Matrix pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  c.complement = Matrix::Identity(coords.size(), coords.size()) - pinv * c.a;
  c.offset = pinv * c.b;
  return c;
}

Matrix block_identity(const SpaceLayout& layout) {
  // Off-diagonal blocks zero, so the whole matrix is the identity on E_0.
  return Matrix::Identity(layout.total_in(), layout.total_in());
}

}  // namespace

SigmaSearch find_sigma(const FrblDatum& datum, const SigmaSearchOptions& options) {
  if (!(options.tol > 0)) throw InvalidInput("feasibility tolerance must be positive");
  if (options.max_iter < 1) throw InvalidInput("max_iter must be at least 1");

  const SymCoordinates coords(datum.layout().total_in());
  const AffineConstraints affine = build_constraints(datum, coords);
  SigmaSearch out;

  const double ls_residual = (affine.a * affine.offset - affine.b).lpNorm<Eigen::Infinity>();
  if (ls_residual > options.tol) {
    const SymMatrix ls_point(coords.unpack(affine.offset));
    std::tie(out.residual_in, out.residual_out) = sigma_residuals(datum, ls_point);
    out.sigma_min_eig = min_eigenvalue(ls_point);
    out.reason = "affine-infeasible";
    return out;
  }

  const auto accept = [&](const SymMatrix& candidate) {
    const auto [res_in, res_out] = sigma_residuals(datum, candidate);
    const double min_eig = min_eigenvalue(candidate);
    out.residual_in = res_in;
    out.residual_out = res_out;
    out.sigma_min_eig = min_eig;
    if (std::max(res_in, res_out) <= options.tol && min_eig >= -options.tol) {
      out.found = true;
      out.sigma = candidate;
      out.reason = "converged";
      return true;
    }
    return false;
  };

  Vector x = coords.pack(block_identity(datum.layout()));
  Vector p = Vector::Zero(x.size());  // correction for the affine step
  Vector q = Vector::Zero(x.size());  // correction for the cone step
  for (int it = 1; it <= options.max_iter; ++it) {
    out.iterations = it;
    const Vector y = affine.project(x + p);
    p = x + p - y;
    const Vector x_next = coords.pack(psd_project(SymMatrix(coords.unpack(y + q))).matrix());
    q = y + q - x_next;
    x = x_next;

    if (options.record_trace) out.affine_distance_trace.push_back((x - affine.project(x)).norm());
    if (accept(SymMatrix(coords.unpack(x)))) return out;
    if (accept(SymMatrix(coords.unpack(y)))) return out;
  }
  // Report the residuals of the last PSD iterate.
  accept(SymMatrix(coords.unpack(x)));
  out.reason = "max-iter";
  return out;
}

GeometricCertificate check_geometric(const FrblDatum& datum, const CertifyOptions& options) {
  GeometricCertificate cert;
  cert.options = options;
  const auto loewner = check_loewner(datum, options.loewner_tol);
  cert.loewner_ok = loewner.ok;
  cert.loewner_min_eig = loewner.min_eig;

  auto search = find_sigma(datum, {options.feasibility_tol, options.max_iter, false});
  cert.sigma = std::move(search.sigma);
  cert.sigma_min_eig = search.sigma_min_eig;
  cert.residual_in = search.residual_in;
  cert.residual_out = search.residual_out;
  cert.iterations = search.iterations;
  cert.reason = search.reason;

  if (!cert.loewner_ok) {
    cert.verdict = Verdict::not_geometric_loewner;
  } else if (search.found) {
    cert.verdict = Verdict::geometric;
  } else {
    cert.verdict = Verdict::sigma_not_found;
  }
  return cert;
}

InequalityCheck verify_key1(const FrblDatum& datum, std::span<const Vector> v_blocks) {
  const auto& layout = datum.layout();
  if (static_cast<int>(v_blocks.size()) != layout.m()) {
    throw InvalidInput("expected " + std::to_string(layout.m()) + " vectors, got " +
                       std::to_string(v_blocks.size()));
  }
  for (int j = 0; j < layout.m(); ++j) {
    if (v_blocks[j].size() != layout.out_dim(j)) {
      throw InvalidInput("v^" + std::to_string(j) + " has the wrong dimension");
    }
  }
  InequalityCheck out;
  for (int i = 0; i < layout.k(); ++i) {
    Vector acc = Vector::Zero(layout.in_dim(i));
    for (int j = 0; j < layout.m(); ++j) acc += datum.d()[j] * datum.block(j, i).transpose() * v_blocks[j];
    out.lhs += acc.squaredNorm() / datum.c()[i];
  }
  for (int j = 0; j < layout.m(); ++j) out.rhs += datum.d()[j] * v_blocks[j].squaredNorm();
  out.holds = out.lhs <= out.rhs + 1e-10 * (1.0 + out.rhs);
  return out;
}

TraceImplication verify_trace_implication(const FrblDatum& datum, std::span<const SymMatrix> x_blocks,
                                          std::span<const SymMatrix> y_blocks, const SymMatrix& sigma,
                                          double tol) {
  const auto& layout = datum.layout();
  if (static_cast<int>(x_blocks.size()) != layout.k() || static_cast<int>(y_blocks.size()) != layout.m()) {
    throw InvalidInput("need one X block per input space and one Y block per output space");
  }
  for (int i = 0; i < layout.k(); ++i) {
    if (x_blocks[i].dim() != layout.in_dim(i)) throw InvalidInput("X block shape mismatch");
  }
  for (int j = 0; j < layout.m(); ++j) {
    if (y_blocks[j].dim() != layout.out_dim(j)) throw InvalidInput("Y block shape mismatch");
  }
  if (sigma.dim() != layout.total_in()) throw InvalidInput("Sigma does not live on E_0");

  std::vector<SymMatrix> cx;
  std::vector<SymMatrix> dy;
  TraceImplication out;
  for (int i = 0; i < layout.k(); ++i) {
    cx.push_back(datum.c()[i] * x_blocks[i]);
    out.lhs += datum.c()[i] * x_blocks[i].trace();
  }
  for (int j = 0; j < layout.m(); ++j) {
    dy.push_back(datum.d()[j] * y_blocks[j]);
    out.rhs += datum.d()[j] * y_blocks[j].trace();
  }
  const SymMatrix left = block_diagonal(cx);
  const SymMatrix right_inner = block_diagonal(dy);
  const SymMatrix right = sandwich(datum.q(), right_inner);
  out.hypothesis_min_eig = min_eigenvalue(right - left);
  out.sigma_lhs = (sigma.matrix() * left.matrix()).trace();
  out.sigma_rhs = (datum.q() * sigma.matrix() * datum.q().transpose() * right_inner.matrix()).trace();

  if (out.hypothesis_min_eig < -tol) {
    out.verdict = TraceVerdict::hypothesis_not_met;
    return out;
  }
  const double scale = 1.0 + std::abs(out.lhs) + std::abs(out.rhs);
  out.verdict = out.lhs <= out.rhs + 1e-10 * scale ? TraceVerdict::conclusion_holds
                                                   : TraceVerdict::conclusion_fails;
  return out;
}

}  // namespace frbl
