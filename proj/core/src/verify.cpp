#include "aqfp/verify.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>

namespace aqfp
{

violation_list check_phase_legality( netlist const& net, levels const& lv, phase_config const& cfg )
{
  violation_list out;
  if ( lv.size() < net.num_nodes() )
  {
    out.push_back( "levels cover " + std::to_string( lv.size() ) + " of " +
                   std::to_string( net.num_nodes() ) + " nodes" );
    return out;
  }

  net.for_each_node( [&]( node_id v ) {
    if ( lv[v] < 0 )
      out.push_back( "node " + net.name( v ) + " has no level" );
  } );
  if ( !out.empty() )
    return out;

  int32_t const span = cfg.span();
  net.for_each_edge( [&]( edge_id, edge const& e ) {
    int32_t const delta = lv[e.dst] - lv[e.src];
    if ( delta < 1 || delta > span )
      out.push_back( "edge " + net.name( e.src ) + "->" + net.name( e.dst ) + " spans " +
                     std::to_string( delta ) + " (allowed 1.." + std::to_string( span ) + ")" );
  } );

  node_id first_po = null_node;
  net.for_each_node( [&]( node_id v ) {
    if ( net.is_pi( v ) && lv[v] != cfg.pi_level )
      out.push_back( "input " + net.name( v ) + " at level " + std::to_string( lv[v] ) +
                     ", expected " + std::to_string( cfg.pi_level ) );
    if ( net.is_po( v ) )
    {
      if ( first_po == null_node )
        first_po = v;
      else if ( lv[v] != lv[first_po] )
        out.push_back( "output " + net.name( v ) + " at level " + std::to_string( lv[v] ) +
                       " differs from output " + net.name( first_po ) + " at level " +
                       std::to_string( lv[first_po] ) );
    }
  } );
  return out;
}

violation_list check_structure( netlist const& net, phase_config const& cfg )
{
  violation_list out = validate( net );
  net.for_each_node( [&]( node_id v ) {
    uint32_t const fo = net.fanout_count( v );
    if ( net.is_splitter( v ) )
    {
      if ( fo > static_cast<uint32_t>( cfg.max_fanout ) )
        out.push_back( "splitter " + net.name( v ) + " drives " + std::to_string( fo ) +
                       " consumers (max " + std::to_string( cfg.max_fanout ) + ")" );
    }
    else if ( fo > 1 )
    {
      out.push_back( "node " + net.name( v ) + " has fanout " + std::to_string( fo ) +
                     " without a splitter" );
    }
  } );
  return out;
}

namespace
{

/*! \brief Follows buffer/splitter ancestry up to the first gate or input,
 *  XOR-composing edge polarities along the way. */
std::pair<node_id, bool> trace_root( netlist const& net, node_id v, bool inverted )
{
  while ( net.is_buffer( v ) || net.is_splitter( v ) )
  {
    edge const& e = net.single_fanin( v );
    inverted ^= e.inverted;
    v = e.src;
  }
  return { v, inverted };
}

/*! \brief All-input simulation over 64-bit truth-table words. */
std::vector<std::vector<uint64_t>> simulate( netlist const& net,
                                             std::vector<std::string> const& pi_order )
{
  uint32_t const n = static_cast<uint32_t>( pi_order.size() );
  uint32_t const words = std::max<uint32_t>( 1, ( 1u << n ) >> 6 );
  std::vector<std::vector<uint64_t>> value( net.num_nodes(), std::vector<uint64_t>( words, 0 ) );

  for ( uint32_t i = 0; i < n; ++i )
  {
    auto const v = net.find( pi_order[i] );
    if ( !v )
      throw std::logic_error( "simulate: missing input " + pi_order[i] );
    auto& bits = value[*v];
    for ( uint32_t w = 0; w < words; ++w )
      for ( uint32_t b = 0; b < 64 && ( w * 64 + b ) < ( 1u << n ); ++b )
        if ( ( ( w * 64 + b ) >> i ) & 1u )
          bits[w] |= uint64_t{ 1 } << b;
  }

  auto const edge_value = [&]( edge const& e, uint32_t w ) {
    uint64_t const x = value[e.src][w];
    return e.inverted ? ~x : x;
  };

  for ( node_id const v : topological_order( net ) )
  {
    if ( net.is_pi( v ) )
      continue;
    auto const& fi = net.fanin_edges( v );
    for ( uint32_t w = 0; w < words; ++w )
    {
      uint64_t r = 0;
      switch ( net.kind( v ) )
      {
      case node_kind::gate:
      {
        uint64_t const a = edge_value( net.edge_at( fi[0] ), w );
        uint64_t const b = edge_value( net.edge_at( fi[1] ), w );
        if ( net.func( v ) == gate_func::and2 )
          r = a & b;
        else if ( net.func( v ) == gate_func::or2 )
          r = a | b;
        else
        {
          uint64_t const c = edge_value( net.edge_at( fi[2] ), w );
          r = ( a & b ) | ( a & c ) | ( b & c );
        }
        break;
      }
      case node_kind::primary_output:
      case node_kind::buffer:
      case node_kind::splitter:
      case node_kind::inverter:
        r = edge_value( net.edge_at( fi[0] ), w );
        if ( net.kind( v ) == node_kind::inverter )
          r = ~r;
        break;
      default:
        break;
      }
      value[v][w] = r;
    }
  }
  return value;
}

} // namespace

bool check_equivalence( netlist const& original, netlist const& solution )
{
  /* Same named inputs, outputs, and gates (kind and function included). */
  std::vector<std::string> pis;
  bool same = true;
  original.for_each_node( [&]( node_id v ) {
    if ( original.is_buffer( v ) || original.is_splitter( v ) )
    {
      same = false;
      return;
    }
    if ( original.is_pi( v ) )
      pis.push_back( original.name( v ) );
    if ( !original.is_pi( v ) && !original.is_po( v ) && !original.is_gate( v ) )
    {
      same = false;
      return;
    }
    auto const w = solution.find( original.name( v ) );
    if ( !w || solution.kind( *w ) != original.kind( v ) ||
         solution.func( *w ) != original.func( v ) )
      same = false;
  } );
  if ( !same )
    return false;

  uint32_t named = 0;
  solution.for_each_node( [&]( node_id v ) {
    if ( solution.is_pi( v ) || solution.is_po( v ) || solution.is_gate( v ) )
    {
      ++named;
      if ( !original.find( solution.name( v ) ) )
        same = false;
    }
  } );
  if ( !same || named != original.num_nodes() )
    return false;

  /* Collapsed fanins agree as (driver, polarity) multisets. */
  bool fanins_equal = true;
  original.for_each_node( [&]( node_id v ) {
    if ( original.is_pi( v ) || !fanins_equal )
      return;
    auto const w = solution.find( original.name( v ) );
    std::multiset<std::pair<std::string, bool>> a, b;
    for ( edge_id const e : original.fanin_edges( v ) )
    {
      auto const [root, inv] = trace_root( original, original.edge_at( e ).src,
                                           original.edge_at( e ).inverted );
      a.emplace( original.name( root ), inv );
    }
    for ( edge_id const e : solution.fanin_edges( *w ) )
    {
      auto const [root, inv] =
          trace_root( solution, solution.edge_at( e ).src, solution.edge_at( e ).inverted );
      b.emplace( solution.name( root ), inv );
    }
    fanins_equal = a == b;
  } );
  if ( !fanins_equal )
    return false;

  /* Exhaustive simulation for small input counts. */
  if ( pis.size() <= 12 )
  {
    auto const va = simulate( original, pis );
    auto const vb = simulate( solution, pis );
    bool outputs_equal = true;
    original.for_each_node( [&]( node_id v ) {
      if ( !original.is_po( v ) || !outputs_equal )
        return;
      auto const w = solution.find( original.name( v ) );
      uint32_t const words = static_cast<uint32_t>( va[v].size() );
      uint64_t mask = ~uint64_t{ 0 };
      if ( pis.size() < 6 )
        mask = ( uint64_t{ 1 } << ( 1u << pis.size() ) ) - 1;
      for ( uint32_t k = 0; k < words; ++k )
        if ( ( va[v][k] & mask ) != ( vb[*w][k] & mask ) )
          outputs_equal = false;
    } );
    if ( !outputs_equal )
      return false;
  }
  return true;
}

materialized buffer_chain_reduce( netlist const& net, levels const& lv, phase_config const& target )
{
  materialized out;
  int32_t const span = target.span();

  /* Copy everything except buffers, preserving names and creation order. */
  std::vector<node_id> remap( net.num_nodes(), null_node );
  net.for_each_node( [&]( node_id v ) {
    if ( net.is_buffer( v ) )
      return;
    remap[v] = out.net.add_node_raw( net.name( v ), net.kind( v ), net.func( v ) );
  } );
  out.lv.assign( out.net.num_nodes(), -1 );
  net.for_each_node( [&]( node_id v ) {
    if ( remap[v] != null_node )
      out.lv[remap[v]] = lv[v];
  } );

  /* Edges between kept nodes copy over; an edge entering a buffer is the
   * head of a chain and is handled when its tail edge is reached. */
  net.for_each_edge( [&]( edge_id, edge const& e ) {
    if ( net.is_buffer( e.dst ) )
      return;
    if ( !net.is_buffer( e.src ) )
    {
      out.net.add_edge( remap[e.src], remap[e.dst], e.inverted );
      return;
    }

    /* Walk the chain backwards to its non-buffer head, composing polarity. */
    bool inverted = e.inverted;
    node_id head = e.src;
    while ( net.is_buffer( head ) )
    {
      edge const& up = net.single_fanin( head );
      inverted ^= up.inverted;
      head = up.src;
    }

    int32_t const delta = lv[e.dst] - lv[head];
    int32_t const count = ( delta + span - 1 ) / span - 1;
    node_id prev = remap[head];
    for ( int32_t i = 1; i <= count; ++i )
    {
      node_id const b =
          out.net.add_buffer( out.net.make_name( "buf" ), { prev, i == 1 ? inverted : false } );
      out.lv.resize( out.net.num_nodes(), -1 );
      out.lv[b] = lv[head] + i * span;
      prev = b;
    }
    out.net.add_edge( prev, remap[e.dst], count == 0 ? inverted : false );
  } );
  return out;
}

} // namespace aqfp
