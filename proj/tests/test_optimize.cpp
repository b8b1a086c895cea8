#include <doctest.h>

#include <aqfp/bench_io.hpp>
#include <aqfp/netlist.hpp>
#include <aqfp/optimize.hpp>
#include <aqfp/splitter_tree.hpp>
#include <aqfp/verify.hpp>

#include <random_circuits.hpp>
#include <tree_oracle.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

using namespace aqfp;

namespace
{

void require_verified( netlist const& original, solution const& sol, phase_config const& cfg )
{
  auto const legality = check_phase_legality( sol.net, sol.lv, cfg );
  if ( !legality.empty() )
    MESSAGE( legality.front() );
  REQUIRE( legality.empty() );
  auto const structure = check_structure( sol.net, cfg );
  if ( !structure.empty() )
    MESSAGE( structure.front() );
  REQUIRE( structure.empty() );
  REQUIRE( check_equivalence( original, sol.net ) );
  CHECK( sol.metrics.total == sol.metrics.buffers + sol.metrics.splitters );
  auto const counted = total_cost( sol.net );
  CHECK( counted.buffers == sol.metrics.buffers );
  CHECK( counted.splitters == sol.metrics.splitters );
}

/*! \brief Exhaustive minimum inserted-node count over every legal insertion.
 *
 * Enumerates all level assignments up to `max_level` (inputs fixed, outputs
 * shared), prices single-fanout edges as forced buffer chains, and serves
 * each multi-fanout node's consumers at exactly the assigned delays through
 * the exhaustive tree enumerator.  Every legal solution induces such an
 * assignment, so the result is a true minimum for small circuits whose
 * optimum fits under `max_level`.  Exponential; tiny netlists only.
 */
int64_t enumerate_insertion_minimum( netlist const& net, phase_config const& cfg, int max_level )
{
  auto const order = topological_order( net );
  int const span = cfg.span();
  levels lv( net.num_nodes(), -1 );
  net.for_each_node( [&]( node_id v ) {
    if ( net.is_pi( v ) )
      lv[v] = cfg.pi_level;
  } );

  int64_t best = std::numeric_limits<int64_t>::max();

  auto price = [&]() -> int64_t {
    int64_t total = 0;
    bool feasible = true;
    net.for_each_node( [&]( node_id u ) {
      if ( !feasible || net.fanout_count( u ) == 0 )
        return;
      if ( net.fanout_count( u ) == 1 )
      {
        int const delta = lv[net.edge_at( net.fanout_edges( u ).front() ).dst] - lv[u];
        if ( delta < 1 )
          feasible = false;
        else
          total += ( delta + span - 1 ) / span - 1;
        return;
      }
      std::vector<fanout_leaf> leaves;
      for ( edge_id const e : net.fanout_edges( u ) )
      {
        node_id const w = net.edge_at( e ).dst;
        leaves.push_back( fanout_leaf{ w, lv[w] - lv[u] - 1, 0 } );
        if ( lv[w] - lv[u] - 1 < 0 )
          feasible = false;
      }
      if ( !feasible )
        return;
      auto const ct = testing::oracle_tree_cost( leaves, cfg.max_fanout, span, dp_mode::reconstruct );
      if ( ct.is_infeasible() )
        feasible = false;
      else
        total += ct.bs_count;
    } );
    return feasible ? total : std::numeric_limits<int64_t>::max();
  };

  int po_level = -1;
  std::function<void( size_t )> assign = [&]( size_t idx ) {
    if ( idx == order.size() )
    {
      best = std::min( best, price() );
      return;
    }
    node_id const v = order[idx];
    if ( net.is_pi( v ) )
    {
      assign( idx + 1 );
      return;
    }
    int lo = 1;
    for ( edge_id const e : net.fanin_edges( v ) )
    {
      node_id const s = net.edge_at( e ).src;
      /* A consumer of a multi-fanout signal sits behind at least one splitter. */
      lo = std::max( lo, lv[s] + ( net.fanout_count( s ) >= 2 ? 2 : 1 ) );
    }
    if ( net.is_po( v ) && po_level >= 0 )
    {
      if ( po_level >= lo )
      {
        lv[v] = po_level;
        assign( idx + 1 );
      }
      return;
    }
    for ( int level = lo; level <= max_level; ++level )
    {
      lv[v] = level;
      bool const first_po = net.is_po( v ) && po_level < 0;
      if ( first_po )
        po_level = level;
      assign( idx + 1 );
      if ( first_po )
        po_level = -1;
    }
    lv[v] = -1;
  };
  assign( 0 );
  return best;
}

/*! \brief Invariants every run must satisfy, checked through the observer. */
solution optimize_checked( netlist const& net, phase_config const& cfg )
{
  std::vector<iteration_report> reports;
  auto sol = optimize( net, cfg, [&]( iteration_report const& r ) { reports.push_back( r ); } );

  REQUIRE( !reports.empty() );
  CHECK( sol.metrics.iterations == static_cast<int>( reports.size() ) );
  CHECK( sol.metrics.iterations <= std::max( cfg.max_iters, 1 ) );
  int64_t best_seen = std::numeric_limits<int64_t>::max();
  for ( size_t i = 0; i < reports.size(); ++i )
  {
    CHECK( reports[i].index == static_cast<int>( i ) + 1 );
    CHECK( reports[i].cost.total == reports[i].cost.buffers + reports[i].cost.splitters );
    /* The relaxation's objective lower-bounds the materialized count. */
    CHECK( reports[i].fractional_cost <= static_cast<double>( reports[i].cost.total ) + 1e-6 );
    bool const improves = reports[i].cost.total < best_seen;
    CHECK( reports[i].accepted == improves );
    if ( improves )
      best_seen = reports[i].cost.total;
    if ( !reports[i].accepted )
      CHECK( i + 1 == reports.size() ); /* a non-improving round stops the loop */
  }
  CHECK( sol.metrics.total == best_seen );
  return sol;
}

} // namespace

TEST_CASE( "slack follows trailing buffer chains" )
{
  netlist net;
  auto const a = net.add_primary_input( "a" );
  auto const b = net.add_primary_input( "b" );
  auto const c = net.add_primary_input( "c" );
  auto const d = net.add_primary_input( "d" );
  auto const e = net.add_primary_input( "e" );

  /* g feeds a splitter through two buffers: slack 2. */
  auto const g = net.add_gate( "g", gate_func::and2, { { a, false }, { b, false } } );
  auto const b1 = net.add_buffer( "b1", { g, false } );
  auto const b2 = net.add_buffer( "b2", { b1, false } );
  auto const s = net.add_splitter( "s", { b2, false } );

  /* h feeds its splitter directly: slack 0. */
  auto const h = net.add_gate( "h", gate_func::or2, { { s, false }, { c, false } } );
  auto const hs = net.add_splitter( "hs", { h, false } );

  /* m is 3-input: slack 0 even behind a buffer. */
  auto const m = net.add_gate( "m", gate_func::maj3, { { s, true }, { hs, false }, { d, false } } );
  auto const mb = net.add_buffer( "mb", { m, false } );

  /* k drives an output through one buffer: slack counts. */
  auto const k = net.add_gate( "k", gate_func::and2, { { hs, false }, { e, false } } );
  auto const kb = net.add_buffer( "kb", { k, false } );
  auto const o1 = net.add_primary_output( "o1", { mb, false } );
  auto const o2 = net.add_primary_output( "o2", { kb, false } );

  levels lv( net.num_nodes(), 0 );
  lv[g] = 5;
  lv[b1] = 6;
  lv[b2] = 7;
  lv[s] = 8;
  lv[h] = 9;
  lv[hs] = 10;
  lv[m] = 11;
  lv[mb] = 12;
  lv[k] = 11;
  lv[kb] = 13;
  lv[o1] = 14;
  lv[o2] = 14;

  auto const slack = compute_slacks( net, lv );
  CHECK( slack[g] == 2 );
  CHECK( slack[h] == 0 );
  CHECK( slack[m] == 0 );
  CHECK( slack[k] == 2 );
  CHECK( slack[a] == 0 );
  CHECK( slack[b1] == 0 );
  CHECK( slack[s] == 0 );
  CHECK( slack[o1] == 0 );

  SUBCASE( "incomplete level map is rejected" )
  {
    levels const short_lv( 3, 0 );
    CHECK_THROWS_AS( (void)compute_slacks( net, short_lv ), std::invalid_argument );
  }
}

TEST_CASE( "stripping splitter trees restores the gate graph" )
{
  /* Five-node circuit: one multi-fanout gate with an inverted consumer leg. */
  netlist gates;
  auto const a = gates.add_primary_input( "a" );
  auto const b = gates.add_primary_input( "b" );
  auto const c = gates.add_primary_input( "c" );
  auto const d = gates.add_primary_input( "d" );
  auto const g = gates.add_gate( "g", gate_func::and2, { { a, false }, { b, false } } );
  auto const u = gates.add_gate( "u", gate_func::or2, { { g, true }, { c, false } } );
  auto const v = gates.add_gate( "v", gate_func::and2, { { g, false }, { d, false } } );
  auto const w = gates.add_gate( "w", gate_func::and2, { { u, false }, { v, true } } );
  auto const o = gates.add_primary_output( "o", { w, false } );

  levels lv( gates.num_nodes(), 0 );
  lv[g] = 1;
  lv[u] = 3;
  lv[v] = 5;
  lv[w] = 6;
  lv[o] = 7;

  netlist applied = gates;
  levels applied_lv = lv;
  {
    std::vector<fanout_leaf> const leaves{ { u, lv[u] - lv[g] - 1, 0 }, { v, lv[v] - lv[g] - 1, 0 } };
    splitter_dp const dp( leaves, 4, 1, dp_mode::reconstruct );
    apply_tree( applied, applied_lv, g, backtrack_tree( dp ) );
  }
  REQUIRE( applied.count_kind( node_kind::splitter ) == 1 );
  REQUIRE( applied.count_kind( node_kind::buffer ) >= 1 );

  auto const stripped = strip_splitter_trees( applied, applied_lv );
  CHECK( isomorphic_by_names( stripped.net, gates ) );
  CHECK( check_equivalence( gates, stripped.net ) );

  /* The inverted leg g -> u survives the round trip. */
  auto const su = *stripped.net.find( "u" );
  bool found_inverted = false;
  for ( edge_id const e : stripped.net.fanin_edges( su ) )
  {
    auto const& ed = stripped.net.edge_at( e );
    if ( stripped.net.name( ed.src ) == "g" )
      found_inverted = ed.inverted;
  }
  CHECK( found_inverted );

  /* Gate levels are retained. */
  gates.for_each_node( [&]( node_id x ) {
    auto const sx = stripped.net.find( gates.name( x ) );
    REQUIRE( sx.has_value() );
    CHECK( stripped.lv[*sx] == lv[x] );
  } );

  SUBCASE( "a splitter-free netlist passes through unchanged" )
  {
    auto const same = strip_splitter_trees( gates, lv );
    CHECK( isomorphic_by_names( same.net, gates ) );
    CHECK( same.lv == lv );
  }
}

TEST_CASE( "single-output chains cost nothing and stop after one round" )
{
  /* A chain g1 -> g2 -> g3 whose side fanins arrive at matching depths, so
   * every edge can span exactly one level and no hardware is needed. */
  netlist net;
  auto const a = net.add_primary_input( "a" );
  auto const b = net.add_primary_input( "b" );
  auto const c = net.add_primary_input( "c" );
  auto const d = net.add_primary_input( "d" );
  auto const e = net.add_primary_input( "e" );
  auto const f = net.add_primary_input( "f" );
  auto const p = net.add_primary_input( "p" );
  auto const q = net.add_primary_input( "q" );
  auto const g1 = net.add_gate( "g1", gate_func::and2, { { a, false }, { b, false } } );
  auto const s1 = net.add_gate( "s1", gate_func::and2, { { c, false }, { d, true } } );
  auto const s2 = net.add_gate( "s2", gate_func::or2, { { e, false }, { f, false } } );
  auto const s3 = net.add_gate( "s3", gate_func::and2, { { p, true }, { q, false } } );
  auto const g2 = net.add_gate( "g2", gate_func::or2, { { g1, false }, { s1, false } } );
  auto const s4 = net.add_gate( "s4", gate_func::or2, { { s2, false }, { s3, false } } );
  auto const g3 = net.add_gate( "g3", gate_func::and2, { { g2, true }, { s4, false } } );
  (void)net.add_primary_output( "o", { g3, false } );

  for ( int skip = 0; skip <= 3; ++skip )
  {
    for ( bool exact : { false, true } )
    {
      phase_config cfg;
      cfg.skip = skip;
      cfg.exact_levels = exact;
      CAPTURE( skip );
      CAPTURE( exact );
      auto const sol = optimize_checked( net, cfg );
      CHECK( sol.metrics.buffers == 0 );
      CHECK( sol.metrics.splitters == 0 );
      CHECK( sol.metrics.total == 0 );
      CHECK( sol.metrics.iterations == 1 );
      require_verified( net, sol, cfg );
      CHECK( isomorphic_by_names( sol.net, net ) );
    }
  }

  SUBCASE( "a wire from input to output is already done" )
  {
    netlist wire;
    auto const x = wire.add_primary_input( "x" );
    (void)wire.add_primary_output( "o", { x, true } );
    phase_config const cfg;
    auto const sol = optimize_checked( wire, cfg );
    CHECK( sol.metrics.total == 0 );
    CHECK( sol.metrics.iterations == 1 );
    require_verified( wire, sol, cfg );
  }
}

TEST_CASE( "diamond fanout hits the enumerated optimum" )
{
  /* g1 feeds g2 and g3, g2 feeds g3; side inputs are balanced so that only
   * the diamond itself forces insertions (z supplies g2's second fanin at
   * the right depth). */
  netlist net;
  auto const pa = net.add_primary_input( "pa" );
  auto const pb = net.add_primary_input( "pb" );
  auto const p = net.add_primary_input( "p" );
  auto const q = net.add_primary_input( "q" );
  auto const r = net.add_primary_input( "r" );
  auto const t = net.add_primary_input( "t" );
  auto const g1 = net.add_gate( "g1", gate_func::and2, { { pa, false }, { pb, false } } );
  auto const z1 = net.add_gate( "z1", gate_func::and2, { { p, false }, { q, false } } );
  auto const z2 = net.add_gate( "z2", gate_func::or2, { { r, false }, { t, false } } );
  auto const z = net.add_gate( "z", gate_func::and2, { { z1, false }, { z2, true } } );
  auto const g2 = net.add_gate( "g2", gate_func::and2, { { g1, false }, { z, false } } );
  auto const g3 = net.add_gate( "g3", gate_func::or2, { { g1, true }, { g2, false } } );
  (void)net.add_primary_output( "o", { g3, false } );

  struct expectation
  {
    int skip;
    int64_t total;
    int64_t splitters;
  };
  /* One splitter is always needed for g1; at skip 0 the g1 -> g3 leg also
   * needs one buffer because g3 must sit below g2. */
  for ( auto const& [skip, total, splitters] :
        { expectation{ 0, 2, 1 }, expectation{ 1, 1, 1 }, expectation{ 2, 1, 1 } } )
  {
    phase_config cfg;
    cfg.skip = skip;
    CAPTURE( skip );
    CHECK( enumerate_insertion_minimum( net, cfg, 10 ) == total );
    auto const sol = optimize_checked( net, cfg );
    CHECK( sol.metrics.total == total );
    CHECK( sol.metrics.splitters == splitters );
    CHECK( sol.metrics.buffers == total - splitters );
    require_verified( net, sol, cfg );
  }
}

TEST_CASE( "tiny random nets: never below the exhaustive insertion minimum" )
{
  int optimal_hits = 0;
  int trials_run = 0;
  for ( uint64_t seed = 1; seed <= 6; ++seed )
  {
    auto const net = testing::small_random_netlist( 500 + seed, 3, 3 + seed % 2 );
    for ( int skip : { 0, 1, 2 } )
    {
      phase_config cfg;
      cfg.skip = skip;
      CAPTURE( seed );
      CAPTURE( skip );
      auto const lower = enumerate_insertion_minimum( net, cfg, 8 );
      auto const sol = optimize_checked( net, cfg );
      require_verified( net, sol, cfg );
      CHECK( sol.metrics.total >= lower );
      ++trials_run;
      if ( sol.metrics.total == lower )
        ++optimal_hits;
      else
        MESSAGE( "seed ", seed, " skip ", skip, ": got ", sol.metrics.total, ", minimum ", lower );
    }
  }
  /* The loop is a heuristic, but on tiny instances it should rarely miss. */
  CHECK( optimal_hits >= trials_run * 3 / 4 );
}

TEST_CASE( "random nets: verified, monotone in skip, deterministic" )
{
  for ( uint64_t trial = 0; trial < 12; ++trial )
  {
    auto const net = testing::small_random_netlist( 3000 + trial, 4, 10 + trial % 6 );
    int64_t previous_total = std::numeric_limits<int64_t>::max();
    for ( int skip = 0; skip <= 3; ++skip )
    {
      phase_config cfg;
      cfg.skip = skip;
      cfg.exact_levels = ( trial % 4 == 3 );
      CAPTURE( trial );
      CAPTURE( skip );
      auto const sol = optimize_checked( net, cfg );
      require_verified( net, sol, cfg );
      CHECK( sol.metrics.total <= previous_total );
      previous_total = sol.metrics.total;

      if ( skip == static_cast<int>( trial % 4 ) )
      {
        auto const again = optimize( net, cfg );
        CHECK( serialize_bench( again.net, &again.lv ) == serialize_bench( sol.net, &sol.lv ) );
        CHECK( again.metrics.buffers == sol.metrics.buffers );
        CHECK( again.metrics.splitters == sol.metrics.splitters );
        CHECK( again.metrics.iterations == sol.metrics.iterations );
      }
    }
  }
}

TEST_CASE( "a rounding regression stops the loop and returns the stored best" )
{
  /* Fixture found by scanning generator seeds for a run whose round totals
   * dip and then rise again (here 40, 36, 37); if planner internals change
   * this trajectory, re-scan seeds with the observer to refresh it. */
  auto const net = testing::small_random_netlist( 26, 5, 20 );
  phase_config cfg;
  cfg.skip = 1;

  std::vector<iteration_report> reports;
  auto const sol = optimize( net, cfg, [&]( iteration_report const& r ) { reports.push_back( r ); } );

  REQUIRE( reports.size() >= 2 );
  auto const& last = reports.back();
  auto const& prev = reports[reports.size() - 2];
  CHECK( last.cost.total > prev.cost.total );
  CHECK_FALSE( last.accepted );
  for ( size_t i = 0; i + 1 < reports.size(); ++i )
  {
    CHECK( reports[i].accepted );
    if ( i > 0 )
      CHECK( reports[i].cost.total < reports[i - 1].cost.total );
  }
  CHECK( sol.metrics.total == prev.cost.total );
  require_verified( net, sol, cfg );
}

TEST_CASE( "optimize rejects inputs that still carry inserted nodes" )
{
  netlist net;
  auto const a = net.add_primary_input( "a" );
  auto const b = net.add_primary_input( "b" );
  auto const g = net.add_gate( "g", gate_func::and2, { { a, false }, { b, false } } );
  auto const buf = net.add_buffer( "buf", { g, false } );
  (void)net.add_primary_output( "o", { buf, false } );

  phase_config const cfg;
  CHECK_THROWS_AS( (void)optimize( net, cfg ), std::invalid_argument );

  netlist split;
  auto const x = split.add_primary_input( "x" );
  auto const y = split.add_primary_input( "y" );
  auto const h = split.add_gate( "h", gate_func::and2, { { x, false }, { y, false } } );
  auto const sp = split.add_splitter( "sp", { h, false } );
  (void)split.add_primary_output( "o1", { sp, false } );
  (void)split.add_primary_output( "o2", { sp, true } );
  CHECK_THROWS_AS( (void)optimize( split, cfg ), std::invalid_argument );

  netlist inv;
  auto const m = inv.add_primary_input( "m" );
  auto const n = inv.add_primary_input( "n" );
  auto const k = inv.add_gate( "k", gate_func::or2, { { m, false }, { n, false } } );
  auto const nt = inv.add_inverter( "nt", { k, false } );
  (void)inv.add_primary_output( "o", { nt, false } );
  CHECK_THROWS_AS( (void)optimize( inv, cfg ), std::invalid_argument );
}
