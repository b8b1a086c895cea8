/*! \file netlist.hpp
 *  \brief Clocked logic netlist with explicit buffer and splitter nodes.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace aqfp
{

/*! \brief Index of a node inside a netlist. */
using node_id = uint32_t;

/*! \brief Sentinel meaning "no node". */
inline constexpr node_id null_node = static_cast<node_id>( -1 );

/*! \brief Index of an edge inside a netlist. */
using edge_id = uint32_t;

/*! \brief Sentinel meaning "no edge". */
inline constexpr edge_id null_edge = static_cast<edge_id>( -1 );

/*! \brief Role of a node in the clocked netlist.
 *
 * `inverter` is a transient role: input files may contain NOT nodes, but
 * inversions are free in this technology, so `absorb_inverters` folds them
 * into edge polarities before any optimization runs.
 */
enum class node_kind : uint8_t
{
  primary_input,
  primary_output,
  gate,
  buffer,
  splitter,
  inverter
};

/*! \brief Logic function metadata carried by gate nodes.
 *
 * Only the equivalence checker evaluates functions; level assignment and
 * buffer/splitter insertion treat every gate alike.
 */
enum class gate_func : uint8_t
{
  none,
  and2,
  or2,
  maj3
};

/*! \brief Directed connection between two nodes, with polarity.
 *
 * Inversions ride on edges (negated couplings) rather than on clocked
 * devices, so an inverted edge costs nothing.
 */
struct edge
{
  node_id src = null_node;
  node_id dst = null_node;
  bool inverted = false;
};

/*! \brief Per-node clocking levels, indexed by node id; -1 means unset. */
using levels = std::vector<int32_t>;

/*! \brief A (driver, polarity) pair used when creating gates. */
struct signal
{
  node_id node = null_node;
  bool inverted = false;
};

/*! \brief Directed acyclic netlist over named nodes.
 *
 * Node ids are dense and creation-ordered; edges keep insertion order.
 * Removing an edge leaves a tombstone so that surviving edge ids stay
 * stable; iteration helpers skip tombstones.  All iteration orders are
 * deterministic functions of the construction sequence.
 */
class netlist
{
public:
  netlist() = default;

  /* \brief Number of nodes ever created (ids are 0..num_nodes()-1). */
  [[nodiscard]] uint32_t num_nodes() const { return static_cast<uint32_t>( kinds_.size() ); }

  /* \brief Number of live (non-removed) edges. */
  [[nodiscard]] uint32_t num_edges() const { return num_live_edges_; }

  /* \brief Upper bound for edge ids, including tombstones. */
  [[nodiscard]] uint32_t edge_bound() const { return static_cast<uint32_t>( edges_.size() ); }

  [[nodiscard]] node_kind kind( node_id v ) const { return kinds_[v]; }
  [[nodiscard]] gate_func func( node_id v ) const { return funcs_[v]; }
  [[nodiscard]] std::string const& name( node_id v ) const { return names_[v]; }

  [[nodiscard]] bool is_pi( node_id v ) const { return kinds_[v] == node_kind::primary_input; }
  [[nodiscard]] bool is_po( node_id v ) const { return kinds_[v] == node_kind::primary_output; }
  [[nodiscard]] bool is_gate( node_id v ) const { return kinds_[v] == node_kind::gate; }
  [[nodiscard]] bool is_buffer( node_id v ) const { return kinds_[v] == node_kind::buffer; }
  [[nodiscard]] bool is_splitter( node_id v ) const { return kinds_[v] == node_kind::splitter; }
  [[nodiscard]] bool is_inverter( node_id v ) const { return kinds_[v] == node_kind::inverter; }

  /* \brief Live edge ids entering / leaving a node, in insertion order. */
  [[nodiscard]] std::vector<edge_id> const& fanin_edges( node_id v ) const { return fanins_[v]; }
  [[nodiscard]] std::vector<edge_id> const& fanout_edges( node_id v ) const { return fanouts_[v]; }

  [[nodiscard]] uint32_t fanin_count( node_id v ) const { return static_cast<uint32_t>( fanins_[v].size() ); }
  [[nodiscard]] uint32_t fanout_count( node_id v ) const { return static_cast<uint32_t>( fanouts_[v].size() ); }

  [[nodiscard]] edge const& edge_at( edge_id e ) const { return edges_[e]; }
  [[nodiscard]] bool edge_alive( edge_id e ) const { return edges_[e].src != null_node; }

  /* \brief Lone fanin edge of a single-input node. */
  [[nodiscard]] edge const& single_fanin( node_id v ) const { return edges_[fanins_[v].front()]; }

  /* \brief Looks a node up by name. */
  [[nodiscard]] std::optional<node_id> find( std::string const& name ) const;

  /* \brief Returns `prefix<k>` for the smallest k that is not taken yet. */
  [[nodiscard]] std::string make_name( std::string const& prefix );

  /* \brief Number of nodes of the given kind. */
  [[nodiscard]] uint32_t count_kind( node_kind k ) const;

  node_id add_primary_input( std::string name );
  node_id add_gate( std::string name, gate_func fn, std::vector<signal> const& fanins );
  node_id add_primary_output( std::string name, signal driver );
  node_id add_buffer( std::string name, signal driver );
  node_id add_splitter( std::string name, signal driver );
  node_id add_inverter( std::string name, signal driver );

  /*! \brief Creates a node without any fanins.
   *
   * Lets builders (parsers, rewriters) create all nodes first and wire edges
   * afterwards, so definitions may reference signals in any order.
   */
  node_id add_node_raw( std::string name, node_kind k, gate_func fn = gate_func::none );

  /*! \brief Adds an edge; rejects duplicate (src, dst) pairs. */
  edge_id add_edge( node_id src, node_id dst, bool inverted );

  /*! \brief Tombstones an edge and unlinks it from both adjacency lists. */
  void remove_edge( edge_id e );

  /* \brief All node ids in creation order. */
  template<typename Fn>
  void for_each_node( Fn&& fn ) const
  {
    for ( node_id v = 0; v < num_nodes(); ++v )
      fn( v );
  }

  /* \brief All live edges in insertion order. */
  template<typename Fn>
  void for_each_edge( Fn&& fn ) const
  {
    for ( edge_id e = 0; e < edge_bound(); ++e )
      if ( edge_alive( e ) )
        fn( e, edges_[e] );
  }

private:
  node_id add_node( std::string name, node_kind k, gate_func fn );

  std::vector<node_kind> kinds_;
  std::vector<gate_func> funcs_;
  std::vector<std::string> names_;
  std::vector<std::vector<edge_id>> fanins_;
  std::vector<std::vector<edge_id>> fanouts_;
  std::vector<edge> edges_;
  uint32_t num_live_edges_ = 0;
  std::unordered_map<std::string, node_id> name_index_;
};

/*! \brief Structural sanity check; returns human-readable problems (empty = ok).
 *
 * Verified properties: per-kind arities (inputs have no fanins, outputs have
 * exactly one fanin and no fanouts, gates have 2 or 3 fanins matching their
 * function, buffers/inverters have one fanin, splitters have one fanin and at
 * least two fanouts, buffers at most one fanout), acyclicity, unique names,
 * and reachability of every non-input node from some input.
 */
[[nodiscard]] std::vector<std::string> validate( netlist const& net );

/*! \brief Topological order of all nodes (inputs first). Requires acyclicity. */
[[nodiscard]] std::vector<node_id> topological_order( netlist const& net );

/*! \brief Removes every inverter node by folding its negation into edge polarities.
 *
 * Returns a rewritten netlist (node ids may change; names are preserved).
 */
[[nodiscard]] netlist absorb_inverters( netlist const& net );

/*! \brief Removes every buffer node by reconnecting its consumers to its driver.
 *
 * Used to normalize inputs that already carry path-balancing buffers before
 * re-optimization.  Returns a rewritten netlist.
 */
[[nodiscard]] netlist contract_buffers( netlist const& net );

} // namespace aqfp
