/*! \file verify.hpp
 *  \brief Independent legality, structure, and equivalence checks, plus the
 *         buffer-chain-reduction baseline.
 *
 * Everything here re-derives its answers from the netlist alone, sharing no
 * traversal code with the optimizer, so it can serve as an oracle for the
 * optimizer's output.
 */

#pragma once

#include "config.hpp"
#include "level_assign.hpp"
#include "netlist.hpp"

#include <string>
#include <vector>

namespace aqfp
{

/*! \brief Human-readable problems; empty means the check passed. */
using violation_list = std::vector<std::string>;

/*! \brief Clocking legality: every edge spans 1..N levels, all primary
 *  outputs share one level, all primary inputs sit at the configured base. */
[[nodiscard]] violation_list check_phase_legality( netlist const& net, levels const& lv,
                                                   phase_config const& cfg );

/*! \brief Structural discipline of a materialized solution.
 *
 * Everything netlist-core validation enforces, plus: splitters drive at most
 * cfg.max_fanout consumers, and every other node drives at most one — after
 * insertion, fanout exists only at splitters.
 */
[[nodiscard]] violation_list check_structure( netlist const& net, phase_config const& cfg );

/*! \brief Functional equivalence of a solution against the original network.
 *
 * Collapses every buffer and splitter in `solution` (composing edge
 * polarities along the way) and compares the resulting gate graph with
 * `original`, matching nodes by name and fanins as multisets; when the
 * circuit has at most 12 inputs, additionally simulates both netlists over
 * every input combination and compares all outputs.
 */
[[nodiscard]] bool check_equivalence( netlist const& original, netlist const& solution );

/*! \brief The phase-skipping baseline: shorten buffer chains, keep levels.
 *
 * Every maximal chain of single-fanout buffers whose endpoints span Δ levels
 * is replaced by ⌈Δ/N⌉ − 1 buffers at earliest positions; gate and splitter
 * levels are untouched.  With N = 1 the solution is returned unchanged, and
 * the operation is idempotent for any fixed N.
 */
[[nodiscard]] materialized buffer_chain_reduce( netlist const& net, levels const& lv,
                                                phase_config const& target );

} // namespace aqfp
