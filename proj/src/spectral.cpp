#include "rrd/spectral.hpp"

#include <lapacke.h>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "rrd/rng.hpp"

namespace rrd {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;
using EVec = Eigen::VectorXcd;

double norm2(const CVec& v) {
  double s = 0;
  for (const auto& c : v) s += abs2(c);
  return std::sqrt(s);
}

CVec to_cvec(const EVec& v) { return CVec(v.data(), v.data() + v.size()); }

EVec random_unit(int n, Philox& g) {
  EVec x(n);
  for (int i = 0; i < n; ++i) x[i] = cplx(g.normal(), g.normal());
  return x / x.norm();
}

}  // namespace

SpectralProbe smallest_sv_probe(const RegularMatrix& M, cplx z, const RowMask& K, double tol, int max_iter,
                                std::uint64_t seed) {
  if (!(tol > 0)) throw InputError("smallest_sv_probe: tol must be positive");
  const int n = M.n();
  if (K.n != n) throw InputError("smallest_sv_probe: mask size differs from n");
  const auto rows = K.rows();
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
    const int i = rows[r];
    bool diag = false;
    for (int j : M.row(i)) {
      cplx v = 1.0;
      if (j == i) {
        v -= z;
        diag = true;
      }
      trip.emplace_back(r, j, v);
    }
    if (!diag && z != 0.0) trip.emplace_back(r, i, -z);
  }
  SpMat B(static_cast<int>(rows.size()), n);
  B.setFromTriplets(trip.begin(), trip.end());
  const double scale = M.d() + std::abs(z);
  SpMat A = SpMat(B.adjoint()) * B;
  SpMat I(n, n);
  I.setIdentity();
  A += (1e-10 * scale * scale) * I;
  Eigen::SimplicialLDLT<SpMat> ldlt(A);
  SpectralProbe P;
  if (ldlt.info() != Eigen::Success) return P;
  Philox g(seed, label_hash("smallest_sv_probe"));
  EVec x = random_unit(n, g);
  double prev = -1;
  for (int it = 1; it <= max_iter; ++it) {
    EVec y = ldlt.solve(x);
    x = y / y.norm();
    P.iterations = it;
    P.x = to_cvec(x);
    P.sigma_min = norm2(shifted_apply(M, z, K, P.x));
    if (P.sigma_min <= tol * scale || (prev >= 0 && std::abs(P.sigma_min - prev) <= 1e-10 * std::max(P.sigma_min, tol))) {
      P.converged = true;
      break;
    }
    prev = P.sigma_min;
  }
  P.residual = P.sigma_min;
  return P;
}

namespace {

void finish_pairs(const RegularMatrix& M, std::vector<EigenPair>& out, const EigenOptions& opt) {
  const int n = M.n(), d = M.d();
  const auto all = RowMask::all(n);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& e : out) {
    e.residual = norm2(shifted_apply(M, e.lambda, all, e.x));
    e.certified = e.residual <= opt.tol * d;
    cplx s = 0;
    for (const auto& v : e.x) s += v;
    e.perron = std::abs(e.lambda - static_cast<double>(d)) <= opt.cluster_tol * d && std::abs(s) * inv_sqrt_n > 1 - 1e-6;
  }
  // Multiplicity by clustering sorted eigenvalues.
  std::vector<int> idx(out.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return out[a].lambda.real() != out[b].lambda.real() ? out[a].lambda.real() < out[b].lambda.real()
                                                        : out[a].lambda.imag() < out[b].lambda.imag();
  });
  const double eps = opt.cluster_tol * std::max(1, d);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    int cnt = 0;
    for (std::size_t b = a; b-- > 0;) {
      if (out[idx[a]].lambda.real() - out[idx[b]].lambda.real() > eps) break;
      cnt += std::abs(out[idx[a]].lambda - out[idx[b]].lambda) <= eps;
    }
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      if (out[idx[b]].lambda.real() - out[idx[a]].lambda.real() > eps) break;
      cnt += std::abs(out[idx[a]].lambda - out[idx[b]].lambda) <= eps;
    }
    out[idx[a]].multiplicity = cnt + 1;
  }
}

}  // namespace

std::vector<EigenPair> eigenpairs(const RegularMatrix& M, const EigenOptions& opt) {
  const int n = M.n();
  if (n > opt.dense_budget) throw GuardError("eigenpairs: n exceeds the dense solver budget");
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0), wr(n), wi(n), vr(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j : M.row(i)) a[static_cast<std::size_t>(j) * n + i] = 1.0;
  double dummy = 0;
  const int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, wr.data(), wi.data(), &dummy, 1, vr.data(), n);
  if (info != 0) throw std::runtime_error("eigenpairs: dgeev failed with info " + std::to_string(info));
  std::vector<EigenPair> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    const double* c0 = vr.data() + static_cast<std::size_t>(j) * n;
    if (wi[j] == 0.0) {
      EigenPair e;
      e.lambda = wr[j];
      e.x.resize(n);
      for (int i = 0; i < n; ++i) e.x[i] = c0[i];
      out.push_back(std::move(e));
    } else {
      const double* c1 = c0 + n;
      for (int sgn : {1, -1}) {
        EigenPair e;
        e.lambda = cplx(wr[j], sgn * wi[j]);
        e.x.resize(n);
        for (int i = 0; i < n; ++i) e.x[i] = cplx(c0[i], sgn * c1[i]);
        out.push_back(std::move(e));
      }
      ++j;
    }
  }
  for (auto& e : out) {
    const double nv = norm2(e.x);
    for (auto& v : e.x) v /= nv;
  }
  finish_pairs(M, out, opt);
  return out;
}

EigenPair eigenpair_near(const RegularMatrix& M, cplx shift, double tol, int max_iter, std::uint64_t seed) {
  const int n = M.n(), d = M.d();
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int i = 0; i < n; ++i) {
    for (int j : M.row(i)) trip.emplace_back(i, j, 1.0);
    trip.emplace_back(i, i, -shift);
  }
  SpMat A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("eigenpair_near: factorization failed");
  Philox g(seed, label_hash("eigenpair_near"));
  EVec x = random_unit(n, g);
  const auto all = RowMask::all(n);
  EigenPair e;
  for (int it = 0; it < max_iter; ++it) {
    x.array() -= x.mean();
    x /= x.norm();
    EVec y = lu.solve(x);
    y.array() -= y.mean();
    x = y / y.norm();
    e.x = to_cvec(x);
    CVec Mx = shifted_apply(M, 0.0, all, e.x);
    cplx lam = 0;
    for (int i = 0; i < n; ++i) lam += std::conj(e.x[i]) * Mx[i];
    e.lambda = lam;
    e.residual = norm2(shifted_apply(M, lam, all, e.x));
    if (e.residual <= tol * d) break;
  }
  EigenOptions opt;
  opt.tol = tol;
  std::vector<EigenPair> one{e};
  finish_pairs(M, one, opt);
  return one[0];
}

DelocReport census_from_pairs(const std::vector<EigenPair>& pairs, int n, int d, double rho_rel, double delta,
                              const TaxonomyParams& P) {
  DelocReport R;
  R.n = n;
  R.d = d;
  R.rho_rel = rho_rel;
  R.delta = delta;
  for (const auto& e : pairs) {
    if (e.perron) {
      ++R.perron_excluded;
      continue;
    }
    CensusRow row;
    row.lambda = e.lambda;
    row.residual = e.residual;
    row.certified = e.certified;
    row.multiplicity = e.multiplicity;
    row.verdict = many_levels_verdict(e.x, rho_rel, delta, 1, P);
    row.mass_lower = static_cast<double>(row.verdict.ball.lower) / n;
    row.mass_upper = static_cast<double>(row.verdict.ball.upper) / n;
    row.ball_violation = !row.verdict.ball_ok;
    R.gradual += row.verdict.gradual_many_levels;
    R.very_steep += row.verdict.very_steep;
    R.neither += row.verdict.neither;
    R.undecided += row.verdict.ball_undecided;
    R.violations += row.ball_violation;
    R.multiple += row.multiplicity > 1;
    R.uncertified += !row.certified;
    R.rows.push_back(std::move(row));
  }
  auto median = [&](auto field) {
    std::vector<double> v;
    for (const auto& r : R.rows) v.push_back(r.*field);
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    double hi = v[v.size() / 2];
    if (v.size() % 2) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + v.size() / 2);
    return 0.5 * (lo + hi);
  };
  R.median_mass_lower = median(&CensusRow::mass_lower);
  R.median_mass_upper = median(&CensusRow::mass_upper);
  R.violation_fraction = R.rows.empty() ? 0.0 : static_cast<double>(R.violations) / R.rows.size();
  return R;
}

DelocReport delocalization_census(const RegularMatrix& M, double rho_rel, double delta, const TaxonomyParams& P,
                                  const EigenOptions& opt) {
  if (P.n != M.n()) throw InputError("delocalization_census: parameters are for a different n");
  return census_from_pairs(eigenpairs(M, opt), M.n(), M.d(), rho_rel, delta, P);
}

}  // namespace rrd
