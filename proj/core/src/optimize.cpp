#include "aqfp/optimize.hpp"

#include "aqfp/initial_levels.hpp"
#include "aqfp/logging.hpp"
#include "aqfp/splitter_tree.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aqfp
{

std::vector<int32_t> compute_slacks( netlist const& net, levels const& lv )
{
  if ( lv.size() < net.num_nodes() )
    throw std::invalid_argument( "compute_slacks: level assignment does not cover the netlist" );

  std::vector<int32_t> slack( net.num_nodes(), 0 );
  net.for_each_node( [&]( node_id g ) {
    if ( !net.is_gate( g ) || net.fanin_count( g ) != 2 || net.fanout_count( g ) != 1 )
      return;
    node_id last = null_node;
    node_id cur = net.edge_at( net.fanout_edges( g ).front() ).dst;
    while ( net.is_buffer( cur ) )
    {
      last = cur;
      if ( net.fanout_count( cur ) != 1 )
        break;
      cur = net.edge_at( net.fanout_edges( cur ).front() ).dst;
    }
    if ( last != null_node && lv[last] > lv[g] )
      slack[g] = lv[last] - lv[g];
  } );
  return slack;
}

materialized strip_splitter_trees( netlist const& net, levels const& lv )
{
  if ( lv.size() < net.num_nodes() )
    throw std::invalid_argument( "strip_splitter_trees: level assignment does not cover the netlist" );

  materialized out;
  std::vector<node_id> map( net.num_nodes(), null_node );
  net.for_each_node( [&]( node_id v ) {
    if ( net.is_buffer( v ) || net.is_splitter( v ) )
      return;
    node_id const nv = out.net.add_node_raw( net.name( v ), net.kind( v ), net.func( v ) );
    map[v] = nv;
    out.lv.resize( out.net.num_nodes(), -1 );
    out.lv[nv] = lv[v];
  } );

  net.for_each_edge( [&]( edge_id, edge const& ed ) {
    if ( net.is_buffer( ed.dst ) || net.is_splitter( ed.dst ) )
      return;
    bool pol = ed.inverted;
    node_id src = ed.src;
    while ( net.is_buffer( src ) || net.is_splitter( src ) )
    {
      edge const& up = net.single_fanin( src );
      pol ^= up.inverted;
      src = up.src;
    }
    out.net.add_edge( map[src], map[ed.dst], pol );
  } );
  return out;
}

namespace
{

/*! \brief Restores `level(dst) >= level(src) + 1` below freshly moved nodes. */
void relax_downstream( netlist const& net, levels& lv, std::vector<node_id> seeds )
{
  while ( !seeds.empty() )
  {
    node_id const u = seeds.back();
    seeds.pop_back();
    for ( edge_id const e : net.fanout_edges( u ) )
    {
      node_id const w = net.edge_at( e ).dst;
      if ( lv[w] < lv[u] + 1 )
      {
        lv[w] = lv[u] + 1;
        seeds.push_back( w );
      }
    }
  }
}

/*! \brief Plans and materializes a fanout tree under every multi-fanout node.
 *
 * Sources are the multi-fanout nodes present on entry, visited in ascending
 * id order; consumer delays are read off the (possibly already adjusted)
 * level map at planning time.  Consumers postponed by a plan have their
 * remaining slack reduced and any downstream levels relaxed to keep every
 * edge increasing.
 */
void insert_fanout_trees( netlist& net, levels& lv, std::vector<int32_t>& slack,
                          dp_mode mode, phase_config const& cfg )
{
  std::vector<node_id> sources;
  net.for_each_node( [&]( node_id v ) {
    if ( net.fanout_count( v ) >= 2 )
      sources.push_back( v );
  } );

  for ( node_id const v : sources )
  {
    std::vector<fanout_leaf> fl;
    fl.reserve( net.fanout_count( v ) );
    for ( edge_id const e : net.fanout_edges( v ) )
    {
      node_id const dst = net.edge_at( e ).dst;
      fl.push_back( fanout_leaf{ dst, lv[dst] - lv[v] - 1, slack[dst] } );
    }

    splitter_tree tree;
    {
      splitter_dp dp( fl, cfg.max_fanout, cfg.span(), mode );
      if ( mode == dp_mode::reconstruct && dp.root().is_infeasible() )
      {
        /* The range tables can miss feasible non-contiguous plans on fanouts
         * too large for the exact subset search; replanning with free
         * postponement always succeeds, and the next leveling round
         * re-prices the outcome. */
        splitter_dp retry( fl, cfg.max_fanout, cfg.span(), dp_mode::initial );
        tree = backtrack_tree( retry );
      }
      else
      {
        tree = backtrack_tree( dp );
      }
    }

    apply_result const res = apply_tree( net, lv, v, tree );
    slack.resize( net.num_nodes(), 0 );
    if ( !res.pushed.empty() )
    {
      std::vector<node_id> moved;
      moved.reserve( res.pushed.size() );
      for ( auto const& [leaf, extra] : res.pushed )
      {
        slack[leaf] = std::max( 0, slack[leaf] - extra );
        moved.push_back( leaf );
      }
      relax_downstream( net, lv, std::move( moved ) );
    }
  }
}

} // namespace

solution optimize( netlist const& input, phase_config const& cfg, iteration_observer const& observer )
{
  auto const t0 = std::chrono::steady_clock::now();

  input.for_each_node( [&]( node_id v ) {
    if ( input.is_buffer( v ) || input.is_splitter( v ) || input.is_inverter( v ) )
      throw std::invalid_argument( "optimize: input must be gate-only (found '" + input.name( v ) +
                                   "'); contract buffers and absorb inverters first" );
  } );
  if ( auto problems = validate( input ); !problems.empty() )
    throw std::invalid_argument( "optimize: invalid netlist: " + problems.front() );

  levels lv;
  try
  {
    lv = assign_initial_levels( input, cfg );
  }
  catch ( std::runtime_error const& e )
  {
    throw std::runtime_error( std::string{ "initial leveling failed: " } + e.what() );
  }

  netlist working = input;
  std::vector<int32_t> slack( working.num_nodes(), 0 );
  insert_fanout_trees( working, lv, slack, dp_mode::initial, cfg );

  solution best;
  bool have_best = false;
  int64_t prev_total = -1;
  int round = 0;
  std::string stop_reason;

  while ( true )
  {
    ++round;

    netlist const contracted = contract_buffers( working );

    /* The working levels stay legal across contraction, so they hot-start
     * the re-assignment model (carried over by name). */
    levels warm( contracted.num_nodes(), 0 );
    contracted.for_each_node( [&]( node_id v ) {
      auto const src = working.find( contracted.name( v ) );
      warm[v] = src ? lv[*src] : 0;
    } );

    assignment_result res;
    try
    {
      res = assign_levels( contracted, cfg, cfg.exact_levels, &warm );
    }
    catch ( std::runtime_error const& e )
    {
      throw std::runtime_error( "level re-assignment failed in round " + std::to_string( round ) +
                                ": " + e.what() );
    }
    materialized const mat = materialize_buffers( contracted, res.lv, cfg );
    cost_summary const cost = total_cost( mat.net );

    bool const accepted = !have_best || cost.total < best.metrics.total;
    if ( accepted )
    {
      best.net = mat.net;
      best.lv = mat.lv;
      best.metrics.buffers = cost.buffers;
      best.metrics.splitters = cost.splitters;
      best.metrics.total = cost.total;
      have_best = true;
    }

    log_info() << "round " << round << ": fractional " << res.fractional_cost << ", materialized "
               << cost.buffers << "+" << cost.splitters << "=" << cost.total << " ("
               << ( accepted ? "accepted" : "rejected" ) << ")";
    if ( observer )
      observer( iteration_report{ round, res.fractional_cost, cost, accepted } );

    if ( cost.total == 0 )
    {
      stop_reason = "nothing left to remove";
      break;
    }
    if ( prev_total >= 0 && cost.total >= prev_total )
    {
      stop_reason = cost.total > prev_total ? "cost regressed after rounding" : "no improvement";
      break;
    }
    if ( round >= cfg.max_iters )
    {
      stop_reason = "round limit reached";
      break;
    }
    prev_total = cost.total;

    std::vector<int32_t> const mat_slack = compute_slacks( mat.net, mat.lv );
    materialized stripped = strip_splitter_trees( mat.net, mat.lv );
    std::vector<int32_t> next_slack( stripped.net.num_nodes(), 0 );
    stripped.net.for_each_node( [&]( node_id v ) {
      next_slack[v] = mat_slack[*mat.net.find( stripped.net.name( v ) )];
    } );
    working = std::move( stripped.net );
    lv = std::move( stripped.lv );
    slack = std::move( next_slack );
    insert_fanout_trees( working, lv, slack, dp_mode::reconstruct, cfg );
  }

  best.metrics.iterations = round;
  best.metrics.wall_time_ms =
      std::chrono::duration<double, std::milli>( std::chrono::steady_clock::now() - t0 ).count();
  log_info() << "stopped after round " << round << " (" << stop_reason << "); best total "
             << best.metrics.total;
  return best;
}

} // namespace aqfp
