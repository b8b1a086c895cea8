/*! \file initial_levels.hpp
 *  \brief First-pass fractional level assignment for splitter-free netlists.
 *
 * Before any buffer or splitter exists, node levels are chosen by a linear
 * program that prices every edge by the buffers it would need and reserves
 * room below multi-fanout nodes for their future splitter trees: for a
 * subset S of a node's consumers, the consumer levels must sit far enough
 * below the driver that some fanout tree over |S| leaves fits.  The model is
 * solved fractionally and rounded up; the result seeds the insertion loop
 * and is refined by later passes.
 */

#pragma once

#include "config.hpp"
#include "lp.hpp"
#include "netlist.hpp"

#include <cstdint>
#include <vector>

namespace aqfp
{

/*! \brief Minimal all-path node sum of a fanout tree with `m` leaves.
 *
 * Over all trees whose internal nodes have between 2 and `max_fanout`
 * children and which have exactly `m` leaves, returns the minimum of
 * Σ_leaves (internal nodes on the root-to-leaf path).  A single consumer
 * needs no tree, so the sum is 0 for m = 1.  Nondecreasing in m.
 */
[[nodiscard]] int64_t min_tree_path_sum( int m, int max_fanout );

/*! \brief Deterministic sample of consumer subsets used for tree reservations.
 *
 * Subsets have size ≥ 2 (singletons are covered by the per-edge rows).  Up
 * to `cfg.enum_threshold` consumers every subset is returned; above it,
 * exactly `cfg.subset_cap` distinct subsets are drawn (size-stratified
 * uniform, deduplicated), fewer only if that many do not exist.  The draw
 * is seeded by (cfg.seed, source), so each node's sample is independent of
 * netlist traversal order.
 */
[[nodiscard]] std::vector<std::vector<node_id>> sample_fanout_subsets(
    std::vector<node_id> const& fanouts, phase_config const& cfg, node_id source );

/*! \brief Fractional leveling model plus the variable layout to read it back. */
struct initial_lp
{
  linear_program lp;
  std::vector<uint32_t> level_var; /*!< per node; all outputs share one variable */
  std::vector<uint32_t> cost_var;  /*!< per edge id; UINT32_MAX for tombstones */
};

/*! \brief Builds the leveling model for a splitter-free netlist.
 *
 * Variables: one level per node (primary outputs share a single variable,
 * which enforces their equality; primary inputs are fixed to cfg.pi_level)
 * and one buffer-count estimate per edge.  Objective: Σ C_e / fanout(src).
 * Constraints per edge (i, j): L_j − L_i ≥ 1 and L_j − L_i ≤ N·(C_e + 1).
 * Per sampled consumer subset S of node i: Σ_{j∈S} L_j − |S|·L_i ≥
 * min_tree_path_sum(|S|) + |S|.
 */
[[nodiscard]] initial_lp build_initial_lp( netlist const& net, phase_config const& cfg );

/*! \brief A feasible integral point of the leveling model (solver hot start).
 *
 * Levels come from a topological sweep that spaces every multi-fanout node's
 * consumers along the leaf depths of a balanced fanout tree, so all edge rows
 * and subset reservations hold at the returned point (any subtree of a valid
 * tree is again a valid tree, so sampled subsets stay covered).  Entries are
 * aligned with `model`'s variable layout.
 */
[[nodiscard]] std::vector<double> initial_warm_start( netlist const& net, phase_config const& cfg,
                                                      initial_lp const& model );

/*! \brief Solves the leveling model and rounds every level up to an integer.
 *
 * The rounded solution keeps every edge increasing and all outputs equal.
 * Throws std::runtime_error if the solver fails (impossible for an acyclic
 * netlist unless the model construction itself is broken).
 */
[[nodiscard]] levels assign_initial_levels( netlist const& net, phase_config const& cfg );

} // namespace aqfp
