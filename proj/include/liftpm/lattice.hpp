#pragma once

#include <string>
#include <vector>

#include "liftpm/exact.hpp"
#include "liftpm/matrices.hpp"
#include "liftpm/multigraph.hpp"

namespace liftpm {

// Integer lattice given by a basis (rows). For lattices produced by
// integer_kernel_basis the basis spans the full integer lattice of its real
// span, so vol_squared equals the basis Gram determinant.
struct Lattice {
  int ambient_dim = 0;
  std::vector<std::vector<Int>> basis;
  Int gram_det = 1;
  Rat vol_squared = Rat(1);

  int rank() const { return static_cast<int>(basis.size()); }
};

// Saturated basis of {v in Z^N : M v = 0}.
Lattice integer_kernel_basis(const IntMat& M);

// Exact Gram determinant of a list of integer vectors; 0 iff dependent.
Int gram_determinant(const std::vector<std::vector<Int>>& vectors);

// Order q of L/L0, where L0 is the integer span of the given independent
// vectors and L is the full integer-point lattice of their real span.
// Computed from the change-of-basis matrix to a saturated basis; the same
// matrix's elementary divisors drive the enumeration cross-check.
Int quotient_order(const std::vector<std::vector<Int>>& spanning);

struct LatticeDuality {
  int m = 0;             // number of spanning vectors
  Lattice perp;          // integer points of the orthogonal complement
  Int q = 1;             // |L / L0|
  Int vol0_squared = 1;  // Gram determinant of the spanning vectors
  Rat perp_vol_squared = Rat(1);
};

// Rank and squared covolume of the orthogonal-complement lattice, computed
// both as vol0_squared / q^2 and directly from the perp kernel basis; the
// two must agree exactly.
LatticeDuality perp_lattice_volume(const std::vector<std::vector<Int>>& spanning);

struct LatticeReport {
  Lattice lattice;
  int expected_rank = 0;
  bool rank_matches = false;
  bool closed_form_available = false;
  Rat closed_form_vol_squared = Rat(0);
  bool closed_form_matches = false;
  std::string note;
};

// Kernel lattice of the incidence matrix, with the closed-form squared
// covolume det(A+D)/4 (non-bipartite) or det(A'+D') (bipartite) checked
// against the kernel-basis Gram determinant.
LatticeReport first_moment_lattice(const Multigraph& G, const GraphMatrices& M);

// Coordinate order of the second-moment state space: position (i, e, f)
// with e, f incident to i, lexicographic by (i, slot of e, slot of f) where
// each vertex's incident edges are listed ascending. Shared by the lattice
// construction, the term functions, and the Laplace objective.
class PairIndex {
 public:
  explicit PairIndex(const Multigraph& G);

  int dim() const { return dim_; }
  int block_offset(int i) const { return offset_[i]; }
  int block_degree(int i) const { return deg_[i]; }
  // slot positions a, b index into incident(i)
  int index_by_slot(int i, int a, int b) const { return offset_[i] + a * deg_[i] + b; }
  int slot_of_edge(int i, int e) const;  // position of edge e in incident(i)
  int index(int i, int e, int f) const {
    return index_by_slot(i, slot_of_edge(i, e), slot_of_edge(i, f));
  }

 private:
  const Multigraph* graph_;
  std::vector<int> offset_;
  std::vector<int> deg_;
  int dim_ = 0;
};

// The g+3h orthogonality constraint vectors spanning the complement of the
// second-moment lattice: one all-ones block per vertex, and the three
// directed-incidence families per edge (diagonal, row-sum, column-sum).
IntMat second_moment_constraints(const Multigraph& G, const GraphMatrices& M,
                                 const PairIndex& P);

// Kernel lattice of the constraints. For regular non-bipartite G the
// closed-form squared covolume
//   2^(3h-3g-4) (d(d-2))^(h-g) det(dI+A)^2 det(d(2d-3)I-A)
// is evaluated exactly and checked; for bipartite G only the kernel path
// runs and the report carries a note.
LatticeReport second_moment_lattice(const Multigraph& G, const GraphMatrices& M);

// True when x is an integer combination of the basis rows.
bool lattice_contains(const Lattice& L, const std::vector<Int>& x);

}  // namespace liftpm
