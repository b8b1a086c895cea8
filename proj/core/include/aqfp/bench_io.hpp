/*! \file bench_io.hpp
 *  \brief Text (bench-style) and JSON readers/writers for netlists.
 *
 * Text format, one statement per line:
 *
 *     INPUT(a)
 *     OUTPUT(f)
 *     g1 = MAJ3(a, !b, c)
 *     f  = AND(g1, s1)
 *     b1 = BUF(g1)
 *     s1 = SPL(b1)
 *     n1 = NOT(a)
 *     # level g1 = 3
 *
 * `!` in an operand position marks a negated connection.  `# level <name> =
 * <int>` comment lines optionally annotate clocking levels; any other `#`
 * starts an ordinary comment.  Each OUTPUT(sig) statement materializes an
 * output node named `po_<sig>` (suffixed `_2`, `_3`, ... on collision).
 */

#pragma once

#include "netlist.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace aqfp
{

/*! \brief Parse failure with 1-based source line information. */
struct bench_parse_error : public std::runtime_error
{
  bench_parse_error( int line_no, std::string const& message )
      : std::runtime_error( "line " + std::to_string( line_no ) + ": " + message ), line( line_no )
  {
  }
  int line;
};

/*! \brief Result of parsing: the graph plus optional level annotations. */
struct parsed_netlist
{
  netlist net;
  levels lv;            /*!< per node; -1 where the file gave no level */
  bool has_levels = false; /*!< true iff at least one level annotation appeared */
};

/*! \brief Parses the text format; throws bench_parse_error on bad input. */
[[nodiscard]] parsed_netlist parse_bench( std::string const& text );

/*! \brief Serializes to the text format; emits level comments when `lv` is given.
 *
 * Output is a deterministic function of the netlist construction order, and
 * `parse_bench(serialize_bench(n))` reproduces a netlist isomorphic to `n`.
 */
[[nodiscard]] std::string serialize_bench( netlist const& net, levels const* lv = nullptr );

/*! \brief Parses the JSON mirror of the format (nodes/edges/levels arrays). */
[[nodiscard]] parsed_netlist parse_json( std::string const& text );

/*! \brief Serializes to the JSON mirror; includes levels when `lv` is given. */
[[nodiscard]] std::string serialize_json( netlist const& net, levels const* lv = nullptr );

/*! \brief Reads a file and dispatches on `json` extension, else text format. */
[[nodiscard]] parsed_netlist read_netlist_file( std::string const& path );

/*! \brief Writes text or JSON depending on `as_json`. */
void write_netlist_file( std::string const& path, netlist const& net, levels const* lv, bool as_json );

/*! \brief True when two netlists are the same graph up to node ids.
 *
 * Nodes are matched by name; fanins are compared as multisets of
 * (driver name, polarity).  Used by round-trip tests.
 */
[[nodiscard]] bool isomorphic_by_names( netlist const& a, netlist const& b );

} // namespace aqfp
