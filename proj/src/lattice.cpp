#include "liftpm/lattice.hpp"

#include <algorithm>

#include "liftpm/errors.hpp"

namespace liftpm {

Lattice integer_kernel_basis(const IntMat& M) {
  Lattice L;
  L.ambient_dim = M.cols();
  L.basis = integer_kernel(M);
  L.gram_det = gram_determinant(L.basis);
  L.vol_squared = Rat(L.gram_det);
  return L;
}

Int gram_determinant(const std::vector<std::vector<Int>>& vectors) {
  return determinant(gram_matrix(vectors));
}

Int quotient_order(const std::vector<std::vector<Int>>& spanning) {
  if (spanning.empty()) return 1;
  if (gram_determinant(spanning) == 0)
    throw validation_error("quotient_order requires independent vectors");
  const int m = static_cast<int>(spanning.size());
  const IntMat X = IntMat::from_rows(spanning);

  // L = span(X) ∩ Z^N via the double-kernel construction.
  const std::vector<std::vector<Int>> perp = integer_kernel(X);
  std::vector<std::vector<Int>> saturated;
  if (perp.empty()) {
    saturated = IntMat::identity(X.cols()).to_rows();
  } else {
    saturated = integer_kernel(IntMat::from_rows(perp));
  }
  if (static_cast<int>(saturated.size()) != m)
    throw consistency_error("saturated basis rank mismatch in quotient_order");

  // Change of basis C with X = C * Y; integral because span(X) ∩ Z^N = span_Z(Y).
  const IntMat Yt = transpose(IntMat::from_rows(saturated));
  IntMat C(m, m);
  for (int i = 0; i < m; ++i) {
    std::vector<Rat> rhs(Yt.rows());
    for (int k = 0; k < Yt.rows(); ++k) rhs[k] = Rat(spanning[i][k]);
    const auto coeff = solve_rational(Yt, rhs);
    if (!coeff) throw consistency_error("spanning vector outside saturated lattice span");
    for (int j = 0; j < m; ++j) {
      const Rat& c = (*coeff)[j];
      if (c.get_den() != 1)
        throw consistency_error("non-integral change of basis in quotient_order");
      C.at(i, j) = c.get_num();
    }
  }
  Int q = determinant(C);
  q = abs(q);

  // Lemma L5 ratio: Vol(L0)^2 = q^2 Vol(L)^2.
  const Int vol0 = gram_determinant(spanning);
  const Int vol = gram_determinant(saturated);
  if (vol0 != q * q * vol)
    throw consistency_error("quotient order does not match covolume ratio");
  return q;
}

LatticeDuality perp_lattice_volume(const std::vector<std::vector<Int>>& spanning) {
  LatticeDuality out;
  out.m = static_cast<int>(spanning.size());
  out.vol0_squared = gram_determinant(spanning);
  if (out.vol0_squared == 0)
    throw validation_error("perp_lattice_volume requires independent vectors");
  out.q = quotient_order(spanning);
  out.perp = integer_kernel_basis(IntMat::from_rows(spanning));
  out.perp_vol_squared = make_rat(out.vol0_squared, out.q * out.q);
  if (Rat(out.perp.gram_det) != out.perp_vol_squared)
    throw consistency_error("perp lattice volume disagrees with Vol(L0)/q");
  return out;
}

LatticeReport first_moment_lattice(const Multigraph& G, const GraphMatrices& M) {
  const int g = G.vertex_count();
  const int h = G.edge_count();
  LatticeReport rep;
  rep.lattice = integer_kernel_basis(IntMat::from_long_rows(M.incidence));

  const bool bipartite = G.is_bipartite();
  rep.expected_rank = bipartite ? h - g + 1 : h - g;
  rep.rank_matches = rep.lattice.rank() == rep.expected_rank;
  rep.closed_form_available = true;
  if (!bipartite) {
    IntMat AD(g, g);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j)
        AD.at(i, j) = M.adjacency[i][j] + (i == j ? M.degrees[i] : 0);
    rep.closed_form_vol_squared = make_rat(determinant(AD), 4);
    rep.note = "closed form det(A+D)/4";
  } else {
    IntMat AD(g - 1, g - 1);
    for (int i = 0; i + 1 < g; ++i)
      for (int j = 0; j + 1 < g; ++j)
        AD.at(i, j) = M.adjacency[i][j] + (i == j ? M.degrees[i] : 0);
    rep.closed_form_vol_squared = Rat(determinant(AD));
    rep.note = "closed form det(A'+D'), bipartite case";
  }
  rep.closed_form_matches = rep.lattice.vol_squared == rep.closed_form_vol_squared;
  if (!rep.closed_form_matches)
    throw consistency_error("first-moment lattice closed form disagrees with kernel basis");
  return rep;
}

PairIndex::PairIndex(const Multigraph& G) : graph_(&G) {
  const int g = G.vertex_count();
  offset_.resize(g);
  deg_.resize(g);
  int at = 0;
  for (int i = 0; i < g; ++i) {
    offset_[i] = at;
    deg_[i] = G.degree(i);
    at += deg_[i] * deg_[i];
  }
  dim_ = at;
}

int PairIndex::slot_of_edge(int i, int e) const {
  const auto& inc = graph_->incident(i);
  const auto it = std::lower_bound(inc.begin(), inc.end(), e);
  if (it == inc.end() || *it != e)
    throw validation_error("edge not incident to vertex in PairIndex lookup");
  return static_cast<int>(it - inc.begin());
}

IntMat second_moment_constraints(const Multigraph& G, const GraphMatrices& M,
                                 const PairIndex& P) {
  const int g = G.vertex_count();
  const int h = G.edge_count();
  IntMat X(g + 3 * h, P.dim());
  int row = 0;
  // x^{0j}: all-ones on block j
  for (int j = 0; j < g; ++j, ++row) {
    const int d = P.block_degree(j);
    for (int k = 0; k < d * d; ++k) X.at(row, P.block_offset(j) + k) = 1;
  }
  // x^{1e}, x^{2e}, x^{3e} from the directed incidence entries
  for (int fam = 1; fam <= 3; ++fam) {
    for (int e = 0; e < h; ++e, ++row) {
      for (int i = 0; i < g; ++i) {
        const long a = M.directed_incidence[i][e];
        if (a == 0) continue;
        const int se = P.slot_of_edge(i, e);
        const int d = P.block_degree(i);
        if (fam == 1) {
          X.at(row, P.index_by_slot(i, se, se)) = a;
        } else if (fam == 2) {
          for (int b = 0; b < d; ++b)
            if (b != se) X.at(row, P.index_by_slot(i, se, b)) = a;
        } else {
          for (int b = 0; b < d; ++b)
            if (b != se) X.at(row, P.index_by_slot(i, b, se)) = a;
        }
      }
    }
  }
  return X;
}

LatticeReport second_moment_lattice(const Multigraph& G, const GraphMatrices& M) {
  const auto d_opt = G.regular_degree();
  if (!d_opt || *d_opt < 3)
    throw validation_error("second-moment lattice requires a d-regular graph, d >= 3");
  const long d = *d_opt;
  const int g = G.vertex_count();
  const int h = G.edge_count();

  const PairIndex P(G);
  LatticeReport rep;
  rep.lattice = integer_kernel_basis(second_moment_constraints(G, M, P));

  const bool bipartite = G.is_bipartite();
  rep.expected_rank =
      bipartite ? d * d * g - g - 3 * h + 2 : d * d * g - g - 3 * h;
  rep.rank_matches = rep.lattice.rank() == rep.expected_rank;

  if (!bipartite) {
    IntMat dIA(g, g), dJA(g, g);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        dIA.at(i, j) = M.adjacency[i][j] + (i == j ? d : 0);
        dJA.at(i, j) = (i == j ? d * (2 * d - 3) : 0) - M.adjacency[i][j];
      }
    const Int det1 = determinant(dIA);
    const Int det2 = determinant(dJA);
    // Vol^2 = 2^(3h-3g-4) (d(d-2))^(h-g) det(dI+A)^2 det(d(2d-3)I-A)
    Rat vol2 = Rat(det1 * det1 * det2);
    const long e2 = 3L * h - 3L * g - 4;
    Rat pow2 = e2 >= 0 ? Rat(Int(1) << e2) : make_rat(1, Int(1) << (-e2));
    Int dd2 = 1;
    for (long k = 0; k < h - g; ++k) dd2 *= d * (d - 2);
    vol2 *= pow2 * Rat(dd2);
    rep.closed_form_available = true;
    rep.closed_form_vol_squared = vol2;
    rep.closed_form_matches = rep.lattice.vol_squared == vol2;
    if (!rep.closed_form_matches)
      throw consistency_error("second-moment lattice closed form disagrees with kernel basis");
  } else {
    rep.closed_form_available = false;
    rep.note =
        "bipartite graph: no closed-form covolume; kernel path only, "
        "expected rank d^2 g - g - 3h + 2 is presumed";
  }
  return rep;
}

bool lattice_contains(const Lattice& L, const std::vector<Int>& x) {
  if (static_cast<int>(x.size()) != L.ambient_dim)
    throw validation_error("lattice membership of wrong-dimension vector");
  if (L.basis.empty()) {
    return std::all_of(x.begin(), x.end(), [](const Int& v) { return v == 0; });
  }
  const IntMat Bt = transpose(IntMat::from_rows(L.basis));
  std::vector<Rat> rhs(L.ambient_dim);
  for (int k = 0; k < L.ambient_dim; ++k) rhs[k] = Rat(x[k]);
  const auto coeff = solve_rational(Bt, rhs);
  if (!coeff) return false;
  // solve_rational zero-fills free variables; basis rows are independent so
  // the solution is unique. Verify residual and integrality.
  for (const Rat& c : *coeff)
    if (c.get_den() != 1) return false;
  for (int k = 0; k < L.ambient_dim; ++k) {
    Rat acc(0);
    for (int j = 0; j < static_cast<int>(L.basis.size()); ++j)
      acc += (*coeff)[j] * Rat(L.basis[j][k]);
    if (acc != Rat(x[k])) return false;
  }
  return true;
}

}  // namespace liftpm
