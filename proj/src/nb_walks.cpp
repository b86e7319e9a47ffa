#include "liftpm/nb_walks.hpp"

#include <cmath>
#include <complex>

#include "liftpm/errors.hpp"
#include "liftpm/first_moment.hpp"
#include "liftpm/rng.hpp"
#include "liftpm/second_moment.hpp"

namespace liftpm {

NBMatrix nb_matrix(const Multigraph& G) {
  const int h = G.edge_count();
  NBMatrix R;
  R.dim = 2 * h;
  R.entries.assign(R.dim, std::vector<int>(R.dim, 0));
  // directed edge index -> head vertex
  const auto head = [&](int de) {
    const auto& ed = G.edge(de / 2);
    return de % 2 == 0 ? ed.v : ed.u;
  };
  const auto tail = [&](int de) {
    const auto& ed = G.edge(de / 2);
    return de % 2 == 0 ? ed.u : ed.v;
  };
  for (int a = 0; a < R.dim; ++a)
    for (int b = 0; b < R.dim; ++b)
      if (tail(b) == head(a) && b / 2 != a / 2) R.entries[a][b] = 1;
  return R;
}

std::vector<Int> walk_counts(const Multigraph& G, const GraphMatrices& M, int kmax) {
  const auto d_opt = G.regular_degree();
  if (!d_opt || *d_opt < 3)
    throw validation_error("walk counts require a d-regular graph, d >= 3");
  const long d = *d_opt;
  const int g = G.vertex_count();
  if (kmax < 2) throw validation_error("walk counts need kmax >= 2");

  const NBMatrix R = nb_matrix(G);
  // trace path: exact integer powers
  IntMat P = IntMat::identity(R.dim);
  IntMat Rm(R.dim, R.dim);
  for (int i = 0; i < R.dim; ++i)
    for (int j = 0; j < R.dim; ++j) Rm.at(i, j) = R.entries[i][j];
  std::vector<Int> w(kmax + 1, 0);
  for (int k = 1; k <= kmax; ++k) {
    P = mul(P, Rm);
    Int tr = 0;
    for (int i = 0; i < R.dim; ++i) tr += P.at(i, i);
    w[k] = tr;
  }

  // spectral path: beta_i^+/- from the adjacency eigenvalues
  for (int k = 2; k <= kmax; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < g; ++i) {
      const std::complex<double> alpha(M.alphas[i], 0.0);
      const std::complex<double> disc = std::sqrt(alpha * alpha / 4.0 - double(d - 1));
      acc += std::pow(alpha / 2.0 + disc, k) + std::pow(alpha / 2.0 - disc, k);
    }
    const double fixed = 0.5 * g * double(d - 2) * (1.0 + (k % 2 == 0 ? 1.0 : -1.0));
    const double spectral = fixed + acc.real();
    const Int rounded(static_cast<long>(std::llround(spectral)));
    if (rounded != w[k])
      throw consistency_error("walk count paths disagree at k=" + std::to_string(k));
  }
  return w;
}

SscResult ssc_constant(const Multigraph& G, const GraphMatrices& M) {
  const auto d_opt = G.regular_degree();
  if (!d_opt || *d_opt < 3)
    throw validation_error("SSC constant requires a d-regular graph, d >= 3");
  const long d = *d_opt;
  const long g = G.vertex_count();
  const long dg = d * g;

  // determinant route over R
  const NBMatrix R = nb_matrix(G);
  IntMat ER(R.dim, R.dim);
  const long lam = (d - 1) * (d - 1);
  for (int i = 0; i < R.dim; ++i)
    for (int j = 0; j < R.dim; ++j) ER.at(i, j) = (i == j ? lam : 0) - R.entries[i][j];
  const Int detR = determinant(ER);
  if (detR <= 0) throw consistency_error("det((d-1)^2 I - R) must be positive");

  // adjacency route
  IntMat EA(g, g);
  const long shift = (d - 1) * (d - 1) * (d - 1) + 1;
  for (long i = 0; i < g; ++i)
    for (long j = 0; j < g; ++j)
      EA.at(i, j) = (i == j ? shift : 0) - (d - 1) * M.adjacency[i][j];
  const Int detA = determinant(EA);
  if (detA <= 0) throw consistency_error("det(((d-1)^3+1) I - (d-1) A) must be positive");

  // exact characteristic-polynomial identity linking the two determinants
  Int lhs = detR;
  Int rhs = detA;
  mpz_class base = Int((d - 1));
  Int pw;
  mpz_pow_ui(pw.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(g));
  rhs *= pw;
  Int ring((d - 1) * (d - 1) * (d - 1) * (d - 1) - 1);
  Int ringpw;
  mpz_pow_ui(ringpw.get_mpz_t(), ring.get_mpz_t(),
             static_cast<unsigned long>((d - 2) * g / 2));
  rhs *= ringpw;
  if (lhs != rhs)
    throw consistency_error("determinant identity between R and A routes failed");

  SscResult out;
  out.eld_value = std::exp(dg * std::log(double(d - 1)) - 0.5 * std::log(detR.get_d()));

  Factored f;
  f.mul_int_pow(d - 1, make_rat(2 * dg - g, 2));
  f.mul_int_pow((d - 1) * (d - 1) * (d - 1) * (d - 1) - 1, -make_rat((d - 2) * g, 4));
  f.mul_int_pow(detA, make_rat(-1, 2));
  out.factored = f;
  out.cw_value = f.to_double();
  out.paths_agree = std::abs(out.eld_value / out.cw_value - 1.0) < 1e-9;
  if (!out.paths_agree)
    throw consistency_error("SSC constant routes disagree beyond 1e-9");
  return out;
}

CycleSpectrum cycle_series(const Multigraph& G, const GraphMatrices& M, int kmax) {
  const auto d_opt = G.regular_degree();
  if (!d_opt || *d_opt < 3)
    throw validation_error("cycle series requires a d-regular graph, d >= 3");
  const long d = *d_opt;

  CycleSpectrum cs;
  cs.kmax = kmax;
  cs.w = walk_counts(G, M, kmax);
  cs.lambda.assign(kmax + 1, 0.0);
  cs.delta.assign(kmax + 1, 0.0);
  cs.mu.assign(kmax + 1, 0.0);
  for (int k = 1; k <= kmax; ++k) {
    cs.lambda[k] = cs.w[k].get_d() / (2.0 * k);
    cs.delta[k] = (k % 2 ? -1.0 : 1.0) * std::pow(1.0 / double(d - 1), k);
    cs.mu[k] = (1.0 + cs.delta[k]) * cs.lambda[k];
  }
  const auto ssc = ssc_constant(G, M);
  cs.ssc = ssc.cw_value;
  cs.ssc_factored = ssc.factored;
  // lambda_k delta_k^2 <= dg (d-1)^-k / (2k); geometric tail from kmax+1.
  const double dg = double(d) * G.vertex_count();
  cs.truncation_tail_bound = dg * std::pow(double(d - 1), -kmax) /
                             (2.0 * (kmax + 1) * double(d - 2));
  return cs;
}

A4Report a4_check(const Multigraph& G, const GraphMatrices& M) {
  const auto first = asymptotic_first_moment(G, M);
  const auto second = asymptotic_second_moment(G, M);
  A4Report rep;
  rep.power_excess = second.analytic.poly_power - 2 * first.closed_form.poly_power;
  rep.power_cancel = rep.power_excess == 0;
  // constants carry their own pi parts, so they cancel in the plain ratio
  rep.lhs = second.analytic.constant /
            (first.closed_form.constant * first.closed_form.constant);
  rep.rhs = ssc_constant(G, M).cw_value;
  rep.pass = rep.power_cancel && std::abs(rep.lhs / rep.rhs - 1.0) < 1e-6;
  return rep;
}

std::vector<double> sample_limit_W(const Multigraph& G, const GraphMatrices& M, int kmax,
                                   int count, std::uint64_t seed) {
  const auto cs = cycle_series(G, M, kmax);
  std::vector<double> samples(count, 1.0);
  for (int k = 2; k <= kmax; ++k) {
    if (cs.lambda[k] <= 0.0) continue;
    const double log1d = std::log1p(cs.delta[k]);
    const double shift = cs.lambda[k] * cs.delta[k];
    for (int t = 0; t < count; ++t) {
      KeyedStream rng(seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(t));
      const long y = poisson_draw(rng, cs.lambda[k]);
      samples[t] *= std::exp(y * log1d - shift);
    }
  }
  return samples;
}

}  // namespace liftpm
