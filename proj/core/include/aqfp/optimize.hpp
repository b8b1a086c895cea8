/*! \file optimize.hpp
 *  \brief The full insertion flow: initial leveling, splitter-tree insertion,
 *         and the re-level / strip / rebuild improvement loop.
 *
 * Starting from a gate-only netlist, the flow first estimates levels with the
 * tree-aware fractional model, inserts a locally optimal fanout tree under
 * every multi-fanout node, and then alternates two moves until they stop
 * paying off: re-assign all levels for the fixed tree topology (pricing the
 * buffers exactly), and rebuild every tree for the new levels using the
 * postponement slack exposed by trailing buffer chains.  The cheapest
 * materialized solution seen along the way is returned.
 */

#pragma once

#include "config.hpp"
#include "level_assign.hpp"
#include "netlist.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace aqfp
{

/*! \brief Size and effort counters of an optimization run. */
struct solution_metrics
{
  int64_t buffers = 0;
  int64_t splitters = 0;
  int64_t total = 0;      /*!< buffers + splitters */
  int iterations = 0;     /*!< level-assignment rounds executed */
  double wall_time_ms = 0.0;
};

/*! \brief A materialized result: netlist with buffers/splitters, plus levels. */
struct solution
{
  netlist net;
  levels lv;
  solution_metrics metrics;
};

/*! \brief One improvement-loop round, as reported to observers. */
struct iteration_report
{
  int index = 0;               /*!< 1-based round number */
  double fractional_cost = 0.0; /*!< leveling objective before rounding */
  cost_summary cost;           /*!< materialized hardware after rounding */
  bool accepted = false;       /*!< true iff this round improved the best */
};

/*! \brief Callback invoked once per improvement-loop round. */
using iteration_observer = std::function<void( iteration_report const& )>;

/*! \brief Free postponement room per node, read off trailing buffer chains.
 *
 * For every 2-input gate whose single fanout runs through a chain of
 * fanout-1 buffers, the slack is the level of the last such buffer minus the
 * gate's own level: postponing the gate by up to that amount is absorbed by
 * shortening the chain.  Every other node — 3-input gates, inputs, outputs,
 * buffers, splitters — has slack 0.
 */
[[nodiscard]] std::vector<int32_t> compute_slacks( netlist const& net, levels const& lv );

/*! \brief Removes every buffer and splitter, restoring direct edges.
 *
 * Each surviving consumer is reconnected straight to the gate (or input) at
 * the root of its buffer/splitter chain, with the polarities along the chain
 * composed into the new edge.  Gate levels are retained; names are preserved.
 * A buffer/splitter-free netlist passes through unchanged.
 */
[[nodiscard]] materialized strip_splitter_trees( netlist const& net, levels const& lv );

/*! \brief Runs the full flow on a gate-only netlist.
 *
 * Requires a valid netlist with no buffers, splitters, or inverters (contract
 * and absorb them first); throws std::invalid_argument otherwise.  Uses
 * cfg.exact_levels to pick the exact or rounded leveling model and
 * cfg.max_iters to bound the improvement loop; stops earlier when a round
 * fails to improve the best total (including the rounding-induced regression
 * case, where the previously stored solution is returned) or when the cost
 * hits zero.  Solver failures surface as std::runtime_error naming the step.
 * The result passes legality, structure, and equivalence verification.
 *
 * `observer`, when given, is called once per round with the same numbers
 * that go to the progress log.
 */
[[nodiscard]] solution optimize( netlist const& net, phase_config const& cfg,
                                 iteration_observer const& observer = {} );

} // namespace aqfp
