/*! \file lp_reference.hpp
 *  \brief Exhaustive reference solver for small boxed linear programs.
 *
 * Enumerates every basic point (k active rows + n-k active bounds), keeps the
 * feasible ones, and minimizes by brute force.  Valid whenever all variables
 * have finite bounds, because a nonempty bounded polyhedron attains its
 * optimum at such a point.  Completely independent of the production solver.
 */

#pragma once

#include <aqfp/lp.hpp>

namespace aqfp::testing
{

struct reference_result
{
  bool feasible = false;
  double objective = 0.0;
};

/*! \brief Brute-force optimum of a boxed minimization model. */
[[nodiscard]] reference_result reference_solve( linear_program const& lp );

/*! \brief Number of rows/bounds a point violates (0 = feasible). */
[[nodiscard]] int point_violations( linear_program const& lp, std::vector<double> const& x,
                                    double tol = 1e-9 );

} // namespace aqfp::testing
