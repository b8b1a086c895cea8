#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <aqfp/level_assign.hpp>

#include "support/det_rng.hpp"
#include "support/random_circuits.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

using namespace aqfp;

namespace
{

/*! \brief Minimum total buffers over all integer level assignments.
 *
 * Exhaustively tries every combination of levels in [1, bound] for the
 * non-input, non-output nodes (inputs pinned, outputs shared), pricing each
 * edge at ⌈Δ/N⌉ − 1.  Exponential; fixtures keep the node count tiny.
 */
int64_t brute_force_buffer_count( netlist const& net, phase_config const& cfg, int32_t bound )
{
  std::vector<node_id> free_nodes;
  net.for_each_node( [&]( node_id v ) {
    if ( !net.is_pi( v ) && !net.is_po( v ) )
      free_nodes.push_back( v );
  } );

  levels lv( net.num_nodes(), 0 );
  net.for_each_node( [&]( node_id v ) {
    if ( net.is_pi( v ) )
      lv[v] = cfg.pi_level;
  } );

  int32_t const span = cfg.span();
  int64_t best = std::numeric_limits<int64_t>::max();
  std::function<void( size_t )> enumerate = [&]( size_t i ) {
    if ( i == free_nodes.size() )
    {
      /* shared output level: one value for every output marker */
      for ( int32_t out_level = 1; out_level <= bound + 1; ++out_level )
      {
        int64_t cost = 0;
        bool ok = true;
        net.for_each_edge( [&]( edge_id, edge const& e ) {
          if ( !ok )
            return;
          int32_t const src = lv[e.src];
          int32_t const dst = net.is_po( e.dst ) ? out_level : lv[e.dst];
          int32_t const delta = dst - src;
          if ( delta < 1 )
          {
            ok = false;
            return;
          }
          cost += ( delta + span - 1 ) / span - 1;
        } );
        if ( ok )
          best = std::min( best, cost );
      }
      return;
    }
    for ( int32_t level = 1; level <= bound; ++level )
    {
      lv[free_nodes[i]] = level;
      enumerate( i + 1 );
    }
  };
  enumerate( 0 );
  return best;
}

/*! \brief Pure diamond: one long leg of three edges, one short leg of one. */
netlist diamond_net()
{
  netlist net;
  auto const p = net.add_node_raw( "p", node_kind::primary_input );
  auto const a = net.add_node_raw( "a", node_kind::gate, gate_func::and2 );
  auto const b = net.add_node_raw( "b", node_kind::gate, gate_func::and2 );
  auto const c = net.add_node_raw( "c", node_kind::gate, gate_func::and2 );
  auto const d = net.add_node_raw( "d", node_kind::gate, gate_func::and2 );
  auto const o = net.add_node_raw( "o", node_kind::primary_output );
  net.add_edge( p, a, false );
  net.add_edge( a, b, false );
  net.add_edge( b, c, false );
  net.add_edge( c, d, false );
  net.add_edge( a, d, false );
  net.add_edge( d, o, false );
  return net;
}

} // namespace

TEST_CASE( "pricing model shape: splitters get their own level variable" )
{
  netlist net;
  auto const a = net.add_primary_input( "a" );
  auto const b = net.add_primary_input( "b" );
  auto const g = net.add_gate( "g", gate_func::and2, { { a, false }, { b, false } } );
  auto const s = net.add_splitter( "s", { g, false } );
  auto const u = net.add_gate( "u", gate_func::and2, { { s, false }, { a, true } } );
  auto const v = net.add_gate( "v", gate_func::or2, { { s, true }, { b, false } } );
  net.add_primary_output( "ou", { u, false } );
  net.add_primary_output( "ov", { v, false } );

  auto const model = build_assignment_lp( net, phase_config{} );
  /* levels: a, b, g, s, u, v + shared output = 7; costs: 9 edges */
  CHECK( model.lp.num_variables() == 7 + 9 );
  CHECK( model.lp.num_constraints() == 2 * 9 );
  CHECK( model.level_var[s] != model.level_var[g] );

  /* no subset reservations: every row has two or three terms */
  for ( uint32_t i = 0; i < model.lp.num_constraints(); ++i )
    CHECK( model.lp.constraint( i ).terms.size() <= 3 );
}

TEST_CASE( "pricing model rejects graphs that still contain buffers" )
{
  netlist net;
  auto const a = net.add_primary_input( "a" );
  auto const f = net.add_buffer( "f", { a, false } );
  net.add_primary_output( "o", { f, false } );
  CHECK_THROWS_AS( (void)build_assignment_lp( net, phase_config{} ), std::invalid_argument );
}

TEST_CASE( "a unit-spaced chain prices to zero" )
{
  netlist net;
  auto const p = net.add_primary_input( "p" );
  auto const q = net.add_primary_input( "q" );
  auto const g1 = net.add_gate( "g1", gate_func::and2, { { p, false }, { q, false } } );
  net.add_primary_output( "out", { g1, false } );

  phase_config cfg;
  auto const res = assign_levels( net, cfg, false );
  CHECK( res.fractional_cost == doctest::Approx( 0.0 ) );
  CHECK( res.lv[g1] == 1 );

  auto const twice = assign_levels( net, cfg, false );
  CHECK( res.lv == twice.lv );
}

TEST_CASE( "diamond legs price exactly as the exhaustive search says" )
{
  netlist const net = diamond_net();
  struct expectation
  {
    int skip;
    int64_t cost;
  };
  /* long leg forces the short edge to span three levels */
  for ( expectation const e : { expectation{ 0, 2 }, expectation{ 1, 1 }, expectation{ 3, 0 } } )
  {
    phase_config cfg;
    cfg.skip = e.skip;

    CHECK( brute_force_buffer_count( net, cfg, 6 ) == e.cost );

    auto const exact = assign_levels( net, cfg, true );
    CHECK( exact.fractional_cost == doctest::Approx( static_cast<double>( e.cost ) ) );

    auto const built = materialize_buffers( net, exact.lv, cfg );
    CHECK( total_cost( built.net ).buffers == e.cost );
  }
}

TEST_CASE( "buffer chains are earliest-placed and exactly counted" )
{
  phase_config cfg;
  cfg.skip = 1; /* N = 2 */

  netlist net;
  auto const a = net.add_primary_input( "a" );
  auto const b = net.add_primary_input( "b" );
  auto const g = net.add_gate( "g", gate_func::and2, { { a, false }, { b, true } } );
  auto const h = net.add_gate( "h", gate_func::or2, { { g, true }, { b, false } } );
  auto const o = net.add_primary_output( "o", { h, false } );

  levels lv( net.num_nodes(), 0 );
  lv[g] = 2;
  lv[h] = 7; /* g->h spans 5: two buffers at 4 and 6 */
  lv[o] = 8;

  auto const built = materialize_buffers( net, lv, cfg );
  /* g->h spans 5 (2 buffers), b->h spans 7 (3 buffers), others fit */
  CHECK( total_cost( built.net ) == cost_summary{ 5, 0, 5 } );

  int64_t expected = 0;
  net.for_each_edge( [&]( edge_id, edge const& e ) {
    expected += ( lv[e.dst] - lv[e.src] + 1 ) / 2 - 1;
  } );
  CHECK( total_cost( built.net ).buffers == expected );

  /* all spans within [1, N]; polarity of g->h survives on the first hop */
  built.net.for_each_edge( [&]( edge_id, edge const& e ) {
    CHECK( built.lv[e.dst] - built.lv[e.src] >= 1 );
    CHECK( built.lv[e.dst] - built.lv[e.src] <= 2 );
  } );
  bool saw_inverted_from_g = false;
  for ( edge_id const e : built.net.fanout_edges( g ) )
    saw_inverted_from_g = saw_inverted_from_g || built.net.edge_at( e ).inverted;
  CHECK( saw_inverted_from_g );

  /* earliest placement: buffers on the g chain sit at 4 and 6 */
  std::vector<int32_t> buffer_levels;
  built.net.for_each_node( [&]( node_id v ) {
    if ( built.net.is_buffer( v ) && built.net.single_fanin( v ).src == g )
      buffer_levels.push_back( built.lv[v] );
  } );
  REQUIRE( buffer_levels.size() == 1 );
  CHECK( buffer_levels[0] == 4 );

  SUBCASE( "spans within one hop produce nothing" )
  {
    levels tight( net.num_nodes(), 0 );
    tight[g] = 1;
    tight[h] = 2;
    tight[o] = 3;
    phase_config wide;
    wide.skip = 3;
    auto const untouched = materialize_buffers( net, tight, wide );
    CHECK( total_cost( untouched.net ) == cost_summary{ 0, 0, 0 } );
    CHECK( untouched.net.num_edges() == net.num_edges() );
  }

  SUBCASE( "a full-skip span of four needs nothing at N = 4" )
  {
    levels spread( net.num_nodes(), 0 );
    spread[g] = 4;
    spread[h] = 8;
    spread[o] = 9;
    phase_config wide;
    wide.skip = 3;
    auto const untouched = materialize_buffers( net, spread, wide );
    /* only b->h (span 8) needs one buffer; both span-4 edges pass through */
    CHECK( total_cost( untouched.net ).buffers == 1 );
    untouched.net.for_each_node( [&]( node_id v ) {
      if ( untouched.net.is_buffer( v ) )
        CHECK( untouched.net.single_fanin( v ).src == b );
    } );
  }

  SUBCASE( "decreasing levels are rejected" )
  {
    levels broken( net.num_nodes(), 0 );
    broken[g] = 2;
    broken[h] = 1;
    broken[o] = 3;
    CHECK_THROWS_AS( (void)materialize_buffers( net, broken, cfg ), std::invalid_argument );
  }
}

TEST_CASE( "ceiling rounding keeps edges increasing on random fractional points" )
{
  testing::det_rng rng( 0xc0ffee );
  for ( int trial = 0; trial < 2000; ++trial )
  {
    double const a = rng.real01() * 20.0;
    double const b = a + 1.0 + rng.real01() * 10.0;
    int32_t const ra = static_cast<int32_t>( std::ceil( a - 1e-9 ) );
    int32_t const rb = static_cast<int32_t>( std::ceil( b - 1e-9 ) );
    CHECK( rb - ra >= 1 );
  }
}

TEST_CASE( "relaxed levels stay legal and exact mode never loses" )
{
  for ( uint64_t trial = 0; trial < 100; ++trial )
  {
    netlist const net = testing::small_random_netlist( 1000 + trial, 3, 8 );
    phase_config cfg;
    cfg.skip = static_cast<int>( trial % 4 );

    auto const relaxed = assign_levels( net, cfg, false );

    /* rounding kept every edge increasing and outputs shared one level */
    net.for_each_edge( [&]( edge_id, edge const& e ) {
      REQUIRE( relaxed.lv[e.dst] - relaxed.lv[e.src] >= 1 );
    } );
    int32_t out_level = -1;
    net.for_each_node( [&]( node_id v ) {
      if ( net.is_po( v ) )
      {
        if ( out_level < 0 )
          out_level = relaxed.lv[v];
        CHECK( relaxed.lv[v] == out_level );
      }
      if ( net.is_pi( v ) )
        CHECK( relaxed.lv[v] == cfg.pi_level );
    } );

    auto const exact = assign_levels( net, cfg, true );
    int64_t const relaxed_cost = total_cost( materialize_buffers( net, relaxed.lv, cfg ).net ).buffers;
    int64_t const exact_cost = total_cost( materialize_buffers( net, exact.lv, cfg ).net ).buffers;
    CHECK( exact_cost <= relaxed_cost );
    CHECK( static_cast<double>( relaxed_cost ) >= relaxed.fractional_cost - 1e-6 );
    CHECK( exact_cost == static_cast<int64_t>( std::llround( exact.fractional_cost ) ) );
  }
}
