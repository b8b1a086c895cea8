#include "aqfp/netlist.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace aqfp
{

std::optional<node_id> netlist::find( std::string const& name ) const
{
  auto const it = name_index_.find( name );
  if ( it == name_index_.end() )
    return std::nullopt;
  return it->second;
}

std::string netlist::make_name( std::string const& prefix )
{
  /* Fresh names must not collide with names already present in the input. */
  for ( uint64_t k = 1;; ++k )
  {
    std::string candidate = prefix + std::to_string( k );
    if ( !name_index_.count( candidate ) )
      return candidate;
  }
}

uint32_t netlist::count_kind( node_kind k ) const
{
  uint32_t n = 0;
  for ( auto const kk : kinds_ )
    if ( kk == k )
      ++n;
  return n;
}

node_id netlist::add_node( std::string name, node_kind k, gate_func fn )
{
  if ( name.empty() )
    throw std::invalid_argument( "node name must not be empty" );
  if ( name_index_.count( name ) )
    throw std::invalid_argument( "duplicate node name: " + name );
  node_id const v = num_nodes();
  name_index_.emplace( name, v );
  kinds_.push_back( k );
  funcs_.push_back( fn );
  names_.push_back( std::move( name ) );
  fanins_.emplace_back();
  fanouts_.emplace_back();
  return v;
}

node_id netlist::add_node_raw( std::string name, node_kind k, gate_func fn )
{
  return add_node( std::move( name ), k, fn );
}

node_id netlist::add_primary_input( std::string name )
{
  return add_node( std::move( name ), node_kind::primary_input, gate_func::none );
}

node_id netlist::add_gate( std::string name, gate_func fn, std::vector<signal> const& fanins )
{
  node_id const v = add_node( std::move( name ), node_kind::gate, fn );
  for ( auto const& s : fanins )
    add_edge( s.node, v, s.inverted );
  return v;
}

node_id netlist::add_primary_output( std::string name, signal driver )
{
  node_id const v = add_node( std::move( name ), node_kind::primary_output, gate_func::none );
  add_edge( driver.node, v, driver.inverted );
  return v;
}

node_id netlist::add_buffer( std::string name, signal driver )
{
  node_id const v = add_node( std::move( name ), node_kind::buffer, gate_func::none );
  add_edge( driver.node, v, driver.inverted );
  return v;
}

node_id netlist::add_splitter( std::string name, signal driver )
{
  node_id const v = add_node( std::move( name ), node_kind::splitter, gate_func::none );
  add_edge( driver.node, v, driver.inverted );
  return v;
}

node_id netlist::add_inverter( std::string name, signal driver )
{
  node_id const v = add_node( std::move( name ), node_kind::inverter, gate_func::none );
  add_edge( driver.node, v, driver.inverted );
  return v;
}

edge_id netlist::add_edge( node_id src, node_id dst, bool inverted )
{
  if ( src >= num_nodes() || dst >= num_nodes() )
    throw std::invalid_argument( "edge endpoint out of range" );
  for ( edge_id const e : fanouts_[src] )
    if ( edges_[e].dst == dst )
      throw std::invalid_argument( "duplicate connection " + names_[src] + " -> " + names_[dst] );
  edge_id const e = static_cast<edge_id>( edges_.size() );
  edges_.push_back( edge{ src, dst, inverted } );
  fanouts_[src].push_back( e );
  fanins_[dst].push_back( e );
  ++num_live_edges_;
  return e;
}

void netlist::remove_edge( edge_id e )
{
  edge& ed = edges_[e];
  if ( ed.src == null_node )
    throw std::invalid_argument( "edge already removed" );
  auto unlink = []( std::vector<edge_id>& list, edge_id id ) {
    list.erase( std::find( list.begin(), list.end(), id ) );
  };
  unlink( fanouts_[ed.src], e );
  unlink( fanins_[ed.dst], e );
  ed = edge{};
  --num_live_edges_;
}

std::vector<node_id> topological_order( netlist const& net )
{
  uint32_t const n = net.num_nodes();
  std::vector<uint32_t> indeg( n, 0 );
  net.for_each_edge( [&]( edge_id, edge const& e ) { ++indeg[e.dst]; } );

  std::deque<node_id> ready;
  for ( node_id v = 0; v < n; ++v )
    if ( indeg[v] == 0 )
      ready.push_back( v );

  std::vector<node_id> order;
  order.reserve( n );
  while ( !ready.empty() )
  {
    node_id const v = ready.front();
    ready.pop_front();
    order.push_back( v );
    for ( edge_id const e : net.fanout_edges( v ) )
    {
      node_id const w = net.edge_at( e ).dst;
      if ( --indeg[w] == 0 )
        ready.push_back( w );
    }
  }
  return order; /* shorter than n iff the graph has a cycle */
}

std::vector<std::string> validate( netlist const& net )
{
  std::vector<std::string> problems;
  auto complain = [&]( node_id v, std::string const& what ) {
    problems.push_back( "node '" + net.name( v ) + "': " + what );
  };

  for ( node_id v = 0; v < net.num_nodes(); ++v )
  {
    uint32_t const fi = net.fanin_count( v );
    uint32_t const fo = net.fanout_count( v );
    switch ( net.kind( v ) )
    {
    case node_kind::primary_input:
      if ( fi != 0 )
        complain( v, "primary input has fanins" );
      break;
    case node_kind::primary_output:
      if ( fi != 1 )
        complain( v, "primary output needs exactly one fanin" );
      if ( fo != 0 )
        complain( v, "primary output has fanouts" );
      break;
    case node_kind::gate:
    {
      uint32_t want = 0;
      switch ( net.func( v ) )
      {
      case gate_func::and2:
      case gate_func::or2:
        want = 2;
        break;
      case gate_func::maj3:
        want = 3;
        break;
      case gate_func::none:
        complain( v, "gate without a logic function" );
        break;
      }
      if ( want != 0 && fi != want )
        complain( v, "gate fanin count does not match its function" );
      break;
    }
    case node_kind::buffer:
      if ( fi != 1 )
        complain( v, "buffer needs exactly one fanin" );
      if ( fo > 1 )
        complain( v, "buffer drives more than one consumer" );
      break;
    case node_kind::splitter:
      if ( fi != 1 )
        complain( v, "splitter needs exactly one fanin" );
      if ( fo < 2 )
        complain( v, "splitter drives fewer than two consumers" );
      break;
    case node_kind::inverter:
      if ( fi != 1 )
        complain( v, "inverter needs exactly one fanin" );
      break;
    }
  }

  if ( topological_order( net ).size() != net.num_nodes() )
    problems.push_back( "netlist contains a combinational cycle" );

  /* Every non-input node must be fed, transitively, from some input. */
  {
    std::vector<char> reached( net.num_nodes(), 0 );
    std::deque<node_id> queue;
    for ( node_id v = 0; v < net.num_nodes(); ++v )
      if ( net.is_pi( v ) )
      {
        reached[v] = 1;
        queue.push_back( v );
      }
    while ( !queue.empty() )
    {
      node_id const v = queue.front();
      queue.pop_front();
      for ( edge_id const e : net.fanout_edges( v ) )
      {
        node_id const w = net.edge_at( e ).dst;
        if ( !reached[w] )
        {
          reached[w] = 1;
          queue.push_back( w );
        }
      }
    }
    for ( node_id v = 0; v < net.num_nodes(); ++v )
      if ( !reached[v] && !net.is_pi( v ) )
        complain( v, "not reachable from any primary input" );
  }

  return problems;
}

namespace
{

/*! \brief Rebuilds a netlist with every node of kind `victim` removed.
 *
 * Consumers of a removed node are rewired to its transitive driver; polarities
 * along the removed chain are XOR-composed into the surviving edge.
 */
netlist contract_kind( netlist const& net, node_kind victim )
{
  netlist out;
  std::vector<node_id> map( net.num_nodes(), null_node );
  for ( node_id v = 0; v < net.num_nodes(); ++v )
  {
    if ( net.kind( v ) == victim )
      continue;
    map[v] = out.add_node_raw( net.name( v ), net.kind( v ), net.func( v ) );
  }
  /* Resolve a source through chains of removed nodes, composing polarity.
   * Stepping through an inverter contributes one extra negation on top of
   * whatever its incoming edge carries; buffers are polarity-neutral. */
  bool const node_negates = ( victim == node_kind::inverter );
  auto resolve = [&]( node_id src, bool inv ) {
    while ( net.kind( src ) == victim )
    {
      if ( net.fanin_count( src ) != 1 )
        throw std::logic_error( "cannot contract node '" + net.name( src ) + "' without a single driver" );
      edge const& up = net.single_fanin( src );
      inv ^= up.inverted ^ node_negates;
      src = up.src;
    }
    return signal{ src, inv };
  };
  net.for_each_edge( [&]( edge_id, edge const& e ) {
    if ( net.kind( e.dst ) == victim )
      return;
    signal const s = resolve( e.src, e.inverted );
    out.add_edge( map[s.node], map[e.dst], s.inverted );
  } );
  return out;
}

} // namespace

netlist absorb_inverters( netlist const& net )
{
  return contract_kind( net, node_kind::inverter );
}

netlist contract_buffers( netlist const& net )
{
  return contract_kind( net, node_kind::buffer );
}

} // namespace aqfp
