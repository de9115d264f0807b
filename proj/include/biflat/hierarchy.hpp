#pragma once

// Hydrodynamic-hierarchy machinery: the symmetry-equation residual, the
// three recursion schemes realized as path integration of a compatible
// first-order system, and grid-based flow-commutativity diagnostics.

#include "biflat/darboux.hpp"
#include "biflat/geometry.hpp"

namespace biflat {
namespace hier {

// Residual of d_nabla(X o) = 0 as max |nabla_j T^i_k - nabla_k T^i_j| for
// the endomorphism T^i_k = c^i_{ks} X^s, with finite differences for dT.
double symmetry_residual(const ConnectionField& conn, const ProductField& c,
                         const VectorField& x, const Point& p,
                         const FdScheme& fd);

enum class RecursionScheme { Principal, Equivalent, Dual };

struct RecursionOptions {
  int steps_per_segment = 400;
  double separation = kDefaultSeparation;
};

// Integrates the total first-order system of the chosen scheme along a
// polyline, starting from the value x_base at waypoints.front().
//   Principal : d_j X^i = -G1^i_{js} X^s + c^i_{js} Xprev^s
//   Equivalent: d_j X^i = d_j Xprev^i + G2^i_{js} Xprev^s - G1^i_{js} X^s
//   Dual      : as Equivalent with Xprev replaced by E o Xprev
// conn2 is ignored by the principal scheme; e_or_euler only feeds the dual
// scheme.
Vec recursion_step_path(RecursionScheme scheme, const ConnectionField& conn1,
                        const ConnectionField& conn2, const ProductField& c,
                        const VectorField& e_or_euler,
                        const VectorField& x_prev,
                        const std::vector<Point>& waypoints, const Vec& x_base,
                        const FdScheme& fd, const RecursionOptions& opts = {});

Vec recursion_step(RecursionScheme scheme, const ConnectionField& conn1,
                   const ConnectionField& conn2, const ProductField& c,
                   const VectorField& e_or_euler, const VectorField& x_prev,
                   const Point& base, const Vec& x_base, const Point& target,
                   const FdScheme& fd, const RecursionOptions& opts = {});

// The recursion output as a field: every evaluation integrates from the
// base point along the straight segment to the query point.
VectorField recursion_step_field(RecursionScheme scheme,
                                 const ConnectionField& conn1,
                                 const ConnectionField& conn2,
                                 const ProductField& c,
                                 const VectorField& e_or_euler,
                                 const VectorField& x_prev, const Point& base,
                                 const Vec& x_base, const FdScheme& fd,
                                 const RecursionOptions& opts = {});

// Least-squares linear-dependence flag for a recursion chain sampled at a
// fixed probe set; relative residual below the threshold marks resonance.
bool resonant_chain(const std::vector<VectorField>& chain,
                    const std::vector<Point>& probes, double threshold = 1e-8);

// ---------------------------------------------------------------------------
// Periodic-grid flows u^i_t = c^i_{jk} X^j(u) u^k_x.
// ---------------------------------------------------------------------------

struct GridState {
  int n = 0;       // components per cell
  int cells = 0;   // m >= 16
  double length = 1.0;
  Vec a;           // cells x n, cell-major

  double dx() const { return length / cells; }
  double& at(int cell, int comp) { return a[cell * n + comp]; }
  double at(int cell, int comp) const { return a[cell * n + comp]; }
};

// base + amplitude * sin(2 pi x / L + phase) per component.
GridState make_grid(int n, int cells, double length, const Vec& base,
                    const Vec& amplitude, const Vec& phase);

void require_admissible_grid(const GridState& g, double separation);

// 4th-order central spatial derivative on the periodic grid.
void grid_derivative(const GridState& g, Vec& out);

void flow_rhs(const ProductField& c, const VectorField& x, const GridState& g,
              Vec& dudt);

// `steps` RK4 steps of size dt for the X-flow.
void evolve(const ProductField& c, const VectorField& x, GridState& g,
            double dt, int steps);

// sup-norm difference between (X then Y) and (Y then X), each flow evolved
// for `steps` RK4 steps of size dt.
double commutator_check(const ProductField& c, const VectorField& x,
                        const VectorField& y, const GridState& g, double dt,
                        int steps);

// log2 of the ratio between successive commutator differences as dt halves;
// returns the fitted order (mean of per-level log2 ratios over `levels`
// halvings starting from dt0).
double commutator_order(const ProductField& c, const VectorField& x,
                        const VectorField& y, const GridState& g, double dt0,
                        int steps, int levels, Vec* diffs = nullptr);

}  // namespace hier
}  // namespace biflat
