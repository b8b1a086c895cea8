/*! \file report.hpp
 *  \brief Run metrics serialization and benchmark-table rendering.
 *
 * Every optimizer or baseline run emits one metrics record (JSON file); the
 * report renderer aggregates a set of records into a CSV table with one row
 * per run and, for every method that has both a skip-0 and a skipped run of
 * the same circuits, an average-savings summary row.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aqfp
{

/*! \brief Result of one run of a method on one benchmark at one skip value. */
struct metrics_record
{
  std::string benchmark;
  std::string method; /*!< "optimize" or "chain_reduce" */
  int skip = 0;
  int64_t buffers = 0;
  int64_t splitters = 0;
  int64_t total = 0;
  int iterations = 0;
  double runtime_ms = 0.0;
  bool exact = false; /*!< levels solved to proven integer optimality */

  friend bool operator==( metrics_record const& a, metrics_record const& b )
  {
    return a.benchmark == b.benchmark && a.method == b.method && a.skip == b.skip &&
           a.buffers == b.buffers && a.splitters == b.splitters && a.total == b.total &&
           a.iterations == b.iterations && a.runtime_ms == b.runtime_ms && a.exact == b.exact;
  }
};

/*! \brief Serializes one record as a self-contained JSON object. */
[[nodiscard]] std::string metrics_to_json( metrics_record const& record );

/*! \brief Parses a record; throws std::runtime_error on malformed input or
 *         missing fields. */
[[nodiscard]] metrics_record metrics_from_json( std::string const& text );

/*! \brief Renders the benchmark table.
 *
 * Header "benchmark,method,skip,buffers,splitters,total", one row per record
 * sorted by (benchmark, method, skip), then one summary row per (method,
 * skip > 0) pair for which skip-0 records of the same method exist:
 * "average_savings,<method>,<skip>,,,<value>" where the value is the mean
 * over benchmarks of 1 − total_skip/total_0 (benchmarks with zero skip-0
 * total are left out), printed with four decimals.
 */
[[nodiscard]] std::string render_report_csv( std::vector<metrics_record> records );

} // namespace aqfp
