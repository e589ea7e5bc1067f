#include "rrd/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "rrd/rng.hpp"

namespace rrd {

std::string to_string(VectorKind k) {
  switch (k) {
    case VectorKind::Annulus: return "annulus";
    case VectorKind::Clusters: return "clusters";
    case VectorKind::Lattice: return "lattice";
    case VectorKind::Ramp: return "ramp";
  }
  return "?";
}

VectorKind vector_kind_from(int i) { return static_cast<VectorKind>(((i % 4) + 4) % 4); }

CVec synthetic_vector(VectorKind kind, std::int64_t n, std::int64_t n3, std::uint64_t seed) {
  if (n < 1 || n3 < 1 || n3 > n) throw InputError("synthetic_vector: need 1 <= n3 <= n");
  Philox g(seed, label_hash(to_string(kind).c_str()));
  CVec x(n);
  // Area-uniform on the annulus by rejection from the bounding square.
  auto polar = [&](double rlo, double rhi) {
    for (;;) {
      const cplx z(rhi * (2 * g.uniform01() - 1), rhi * (2 * g.uniform01() - 1));
      const double r2 = abs2(z);
      if (r2 >= rlo * rlo && r2 <= rhi * rhi) return z;
    }
  };
  switch (kind) {
    case VectorKind::Annulus:
      for (auto& v : x) v = polar(0.2, 3.0);
      break;
    case VectorKind::Clusters: {
      const int c = 3 + static_cast<int>(g.uniform_int(10));
      std::vector<cplx> centre(c);
      for (auto& z : centre) z = polar(0.5, 3.0);
      const double jitter = 0.002 + 0.05 * g.uniform01();
      for (auto& v : x) v = centre[g.uniform_int(c)] + cplx(jitter * g.normal(), jitter * g.normal());
      break;
    }
    case VectorKind::Lattice: {
      const double h = std::array<double, 4>{0.01, 0.03, 0.1, 0.25}[g.uniform_int(4)];
      for (auto& v : x) {
        cplx z = polar(0.3, 3.0);
        v = cplx(h * std::round(z.real() / h), h * std::round(z.imag() / h));
      }
      break;
    }
    case VectorKind::Ramp: {
      const double phase = 2 * M_PI * g.uniform01();
      for (std::int64_t i = 0; i < n; ++i) {
        const double r = 0.3 + 2.7 * static_cast<double>(i) / n;
        x[i] = std::polar(r, phase + (g.uniform01() < 0.5 ? 0.0 : M_PI));
      }
      g.shuffle(x.begin(), x.end());
      break;
    }
  }
  const double s = order_statistics(x, {n3})[0];
  if (s > 0)
    for (auto& v : x) v /= s;
  return x;
}

CVec gradual_vector(VectorKind kind, const TaxonomyParams& P, std::uint64_t seed, int* tries) {
  for (int t = 0; t < 1000; ++t) {
    auto x = synthetic_vector(kind, P.n, P.n3, derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    auto V = classify(x, P);
    if (V.gradual && V.normalized) {
      if (tries) *tries = t + 1;
      return x;
    }
  }
  throw std::runtime_error("gradual_vector: no gradual draw in 1000 attempts");
}

}  // namespace rrd
