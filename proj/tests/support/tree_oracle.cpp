#include "tree_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

namespace aqfp::testing
{

namespace
{

using front = std::vector<cost_tuple>;

bool dominates( cost_tuple const& a, cost_tuple const& b )
{
  return a.max_extra <= b.max_extra && a.total_extra <= b.total_extra && a.bs_count <= b.bs_count;
}

void front_add( front& f, cost_tuple const& t )
{
  for ( auto const& e : f )
    if ( dominates( e, t ) )
      return;
  f.erase( std::remove_if( f.begin(), f.end(), [&]( cost_tuple const& e ) { return dominates( t, e ); } ),
           f.end() );
  f.push_back( t );
}

front cross( front const& a, front const& b )
{
  front out;
  for ( auto const& x : a )
    for ( auto const& y : b )
      front_add( out, cost_tuple{ std::max( x.max_extra, y.max_extra ), x.total_extra + y.total_extra,
                                  x.bs_count + y.bs_count } );
  return out;
}

int32_t ceil_log( int32_t base, int32_t value )
{
  int32_t k = 0;
  int64_t power = 1;
  while ( power < value )
  {
    power *= base;
    ++k;
  }
  return k;
}

struct oracle
{
  std::vector<fanout_leaf> leaves;
  int max_fanout;
  int span;
  dp_mode mode;
  int depth_limit;
  std::vector<front> memo;
  std::vector<bool> done;

  front const& serve( uint32_t mask, int d )
  {
    size_t const key = static_cast<size_t>( mask ) * ( depth_limit + 1 ) + d;
    if ( done[key] )
      return memo[key];
    front f;

    if ( std::popcount( mask ) == 1 )
    {
      /* Direct attachment: the wire must end within `span` levels; the
       * consumer never sits above its natural level. */
      auto const& leaf = leaves[std::countr_zero( mask )];
      int const t_min = std::max( d + 1, leaf.delay + 1 );
      if ( t_min <= d + span )
      {
        int32_t const push = t_min - ( leaf.delay + 1 );
        if ( push <= leaf.slack )
          front_add( f, cost_tuple{ 0, 0, 0 } );
        else if ( mode == dp_mode::initial )
          front_add( f, cost_tuple{ push - leaf.slack, push - leaf.slack, 0 } );
      }
    }

    for ( int dn = d + 1; dn <= std::min( d + span, depth_limit ); ++dn )
    {
      /* A buffer: same consumer set, one node deeper. */
      for ( auto const& t : serve( mask, dn ) )
        front_add( f, cost_tuple{ t.max_extra, t.total_extra, t.bs_count + 1 } );

      /* A splitter: partition the set into 2..max_fanout blocks. */
      if ( std::popcount( mask ) >= 2 )
        partition( mask, dn, max_fanout, front{ cost_tuple{ 0, 0, 1 } }, f );
    }

    memo[key] = std::move( f );
    done[key] = true;
    return memo[key];
  }

  /*! \brief Enumerates unordered partitions; each block holds the lowest
   *  remaining consumer, which canonicalizes the enumeration. */
  void partition( uint32_t rest, int dn, int blocks_left, front acc, front& out )
  {
    if ( rest == 0u )
    {
      for ( auto const& t : acc )
        front_add( out, t );
      return;
    }
    if ( blocks_left == 0 )
      return;
    uint32_t const low = rest & ( ~rest + 1u );
    uint32_t const others = rest ^ low;
    /* Enumerate every submask of `others` as the remainder of this block. */
    uint32_t sub = others;
    while ( true )
    {
      uint32_t const block = low | sub;
      /* When this is the top-level call the "block" must not take all
       * consumers with blocks_left == max_fanout only if... no restriction:
       * a single block equal to `rest` is a fanout-1 use of a splitter
       * output, which the buffer transition already covers more cheaply;
       * allowing it is harmless for a Pareto search. */
      front const& bf = serve( block, dn );
      if ( !bf.empty() )
        partition( others ^ sub, dn, blocks_left - 1, cross( acc, bf ), out );
      if ( sub == 0u )
        break;
      sub = ( sub - 1 ) & others;
    }
  }
};

} // namespace

cost_tuple oracle_tree_cost( std::vector<fanout_leaf> const& leaves, int max_fanout, int span,
                             dp_mode mode )
{
  if ( leaves.empty() || leaves.size() > 10 )
    throw std::invalid_argument( "oracle_tree_cost: 1..10 consumers" );

  oracle o;
  o.leaves = leaves;
  o.max_fanout = max_fanout;
  o.span = span;
  o.mode = mode;
  int32_t max_delay = 0;
  for ( auto const& f : leaves )
    max_delay = std::max( max_delay, f.delay );
  o.depth_limit = max_delay + ceil_log( max_fanout, static_cast<int32_t>( leaves.size() ) );
  size_t const states = ( size_t{ 1 } << leaves.size() ) * ( o.depth_limit + 1 );
  o.memo.resize( states );
  o.done.assign( states, false );

  uint32_t const full = ( 1u << leaves.size() ) - 1u;
  front const& f = o.serve( full, 0 );
  if ( f.empty() )
    return cost_tuple::infeasible();
  return *std::min_element( f.begin(), f.end() );
}

} // namespace aqfp::testing
