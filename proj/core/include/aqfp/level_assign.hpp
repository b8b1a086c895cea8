/*! \file level_assign.hpp
 *  \brief Level re-assignment for a fixed splitter topology, and buffer
 *         materialization.
 *
 * Once splitters are physical nodes in the graph, buffers are the only
 * remaining cost and every edge prices them directly: an edge spanning Δ
 * levels needs ⌈Δ/N⌉ − 1 buffers.  The model here minimizes that price over
 * all node levels (splitters included), either as a relaxation with ceiling
 * rounding or to proven integer optimality, and `materialize_buffers` turns
 * a level assignment into the explicit buffer chains.
 */

#pragma once

#include "config.hpp"
#include "lp.hpp"
#include "netlist.hpp"

#include <cstdint>
#include <vector>

namespace aqfp
{

/*! \brief Buffer-pricing model plus the variable layout to read it back. */
struct assignment_lp
{
  linear_program lp;
  std::vector<uint32_t> level_var; /*!< per node; all outputs share one variable */
  std::vector<uint32_t> cost_var;  /*!< per edge id; UINT32_MAX for tombstones */
};

/*! \brief Builds the buffer-pricing model for a buffer-free netlist.
 *
 * Variables: one level per node (splitters included; primary outputs share a
 * single equality-enforcing variable, primary inputs are fixed) and one
 * buffer count per edge, all flagged integral.  Objective: Σ C_e, unweighted.
 * Constraints per edge (i, j): L_j − L_i ≥ 1 and L_j − L_i ≤ N·(C_e + 1).
 * No fanout-subset reservations — the splitter topology is already fixed.
 *
 * Throws std::invalid_argument if the graph still contains buffer nodes
 * (their cost would be double-counted; contract them away first).
 */
[[nodiscard]] assignment_lp build_assignment_lp( netlist const& net, phase_config const& cfg );

/*! \brief Levels chosen by the model, with the objective before rounding. */
struct assignment_result
{
  levels lv;
  double fractional_cost = 0.0;
};

/*! \brief Maps per-node levels onto the model's variables (solver hot start).
 *
 * Shared variables (all primary outputs) take their deepest member, and each
 * edge's buffer count is priced from the resulting variable values.  When
 * `lv` is a legal leveling of `net`, every model row holds at the returned
 * point, so the solver skips its feasibility phase.
 */
[[nodiscard]] std::vector<double> assignment_warm_start( netlist const& net, phase_config const& cfg,
                                                         assignment_lp const& model, levels const& lv );

/*! \brief Solves the buffer-pricing model.
 *
 * `exact` solves the integer program (optimal buffer count for the given
 * splitter topology); otherwise the relaxation is solved and every level is
 * rounded up, which keeps all edges increasing and outputs equal.  Solver
 * failures surface as std::runtime_error.  The solve hot-starts from `warm`
 * when given (any legal leveling of `net`), else from earliest levels.
 */
[[nodiscard]] assignment_result assign_levels( netlist const& net, phase_config const& cfg, bool exact,
                                               levels const* warm = nullptr );

/*! \brief A netlist with buffer chains inserted, plus levels for all nodes. */
struct materialized
{
  netlist net;
  levels lv;
};

/*! \brief Expands every edge spanning Δ > N levels into a buffer chain.
 *
 * Each such edge gets ⌈Δ/N⌉ − 1 buffers at levels L_src + N, L_src + 2N, …
 * (earliest placement, so trailing slack stays visible at gate outputs);
 * the original edge polarity rides on the first hop.  Edges spanning at
 * most N levels are left untouched.
 */
[[nodiscard]] materialized materialize_buffers( netlist const& net, levels const& lv,
                                                phase_config const& cfg );

/*! \brief Inserted-hardware count of a netlist. */
struct cost_summary
{
  int64_t buffers = 0;
  int64_t splitters = 0;
  int64_t total = 0;

  friend bool operator==( cost_summary const& a, cost_summary const& b )
  {
    return a.buffers == b.buffers && a.splitters == b.splitters && a.total == b.total;
  }
};

/*! \brief Counts buffer and splitter nodes; total is their sum. */
[[nodiscard]] cost_summary total_cost( netlist const& net );

} // namespace aqfp
