/*! \file config.hpp
 *  \brief Shared knobs for level assignment and buffer/splitter insertion.
 */

#pragma once

#include <cstdint>

namespace aqfp
{

/*! \brief Configuration of the clocking discipline and the optimizer.
 *
 * With `skip` allowed skipped phases per interconnect hop, a connection may
 * span between 1 and `skip + 1` levels, so `span()` is the longest hop a
 * wire can take without an intermediate buffer.
 */
struct phase_config
{
  /*! \brief Phases a hop may skip (0 = every hop spans exactly one level). */
  int skip = 0;

  /*! \brief Maximum number of consumers a splitter may drive. */
  int max_fanout = 4;

  /*! \brief Seed for all randomized choices (subset sampling). */
  uint64_t seed = 1;

  /*! \brief Cap on sampled fanout subsets per node in the first leveling pass. */
  int subset_cap = 32768;

  /*! \brief Fanout count up to which subsets are enumerated exhaustively. */
  int enum_threshold = 15;

  /*! \brief Level assigned to every primary input (0 or 1). */
  int pi_level = 0;

  /*! \brief Solve level-assignment models to proven integer optimality. */
  bool exact_levels = false;

  /*! \brief Upper bound on reconstruction rounds in the optimization loop. */
  int max_iters = 50;

  /*! \brief Longest legal hop, in levels. */
  [[nodiscard]] int span() const { return skip + 1; }
};

} // namespace aqfp
