#include "aqfp/initial_levels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace aqfp
{

namespace
{

/*! \brief f(m) for all m up to `up_to` (see min_tree_path_sum).
 *
 * Recurrence over (leaves, remaining branches): g[m][k] is the cheapest way
 * to distribute m leaves over at most k sibling subtrees; a root with c
 * children costs one extra path node per leaf, so f(m) = m + best split of m
 * into 2..max_fanout subtrees.
 */
std::vector<int64_t> path_sum_table( int up_to, int max_fanout )
{
  if ( up_to < 1 || max_fanout < 2 )
    throw std::invalid_argument( "min_tree_path_sum: need m >= 1 and max_fanout >= 2" );

  std::vector<int64_t> f( up_to + 1, 0 );
  std::vector<std::vector<int64_t>> g( up_to + 1, std::vector<int64_t>( max_fanout, 0 ) );
  for ( int m = 1; m <= up_to; ++m )
  {
    if ( m >= 2 )
    {
      int64_t best = std::numeric_limits<int64_t>::max();
      for ( int j = 1; j <= m - 1; ++j )
        best = std::min( best, f[j] + g[m - j][max_fanout - 2] );
      f[m] = m + best;
    }
    g[m][0] = f[m];
    for ( int k = 1; k < max_fanout; ++k )
    {
      g[m][k] = g[m][k - 1];
      for ( int j = 1; j <= m - 1; ++j )
        g[m][k] = std::min( g[m][k], f[j] + g[m - j][k - 1] );
    }
  }
  return f;
}

/*! \brief splitmix64 step: the standard 64-bit finalizing mix. */
uint64_t mix64( uint64_t& state )
{
  uint64_t z = ( state += 0x9e3779b97f4a7c15ULL );
  z = ( z ^ ( z >> 30 ) ) * 0xbf58476d1ce4e5b9ULL;
  z = ( z ^ ( z >> 27 ) ) * 0x94d049bb133111ebULL;
  return z ^ ( z >> 31 );
}

/*! \brief Uniform draw in [0, n) with rejection, platform-independent. */
uint64_t draw_below( uint64_t& state, uint64_t n )
{
  uint64_t const limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do
    x = mix64( state );
  while ( x >= limit );
  return x % n;
}

} // namespace

int64_t min_tree_path_sum( int m, int max_fanout )
{
  return path_sum_table( m, max_fanout )[m];
}

std::vector<std::vector<node_id>> sample_fanout_subsets( std::vector<node_id> const& fanouts,
                                                         phase_config const& cfg, node_id source )
{
  int const t = static_cast<int>( fanouts.size() );
  std::vector<std::vector<node_id>> out;
  if ( t < 2 )
    return out;

  if ( t <= cfg.enum_threshold && t <= 30 )
  {
    for ( uint32_t mask = 3; mask < ( 1u << t ); ++mask )
    {
      if ( std::popcount( mask ) < 2 )
        continue;
      std::vector<node_id> subset;
      for ( int i = 0; i < t; ++i )
        if ( mask & ( 1u << i ) )
          subset.push_back( fanouts[i] );
      out.push_back( std::move( subset ) );
    }
    return out;
  }

  /* Distinct subsets of size >= 2 that exist at all (saturates for large t). */
  uint64_t total = UINT64_MAX;
  if ( t <= 62 )
    total = ( uint64_t{ 1 } << t ) - static_cast<uint64_t>( t ) - 1;
  uint64_t const want = std::min<uint64_t>( static_cast<uint64_t>( cfg.subset_cap ), total );

  uint64_t state = cfg.seed;
  state ^= 0x9e3779b97f4a7c15ULL * ( static_cast<uint64_t>( source ) + 1 );
  (void)mix64( state );

  std::unordered_set<uint64_t> seen;
  std::vector<uint32_t> pick;
  while ( out.size() < want )
  {
    int const s = 2 + static_cast<int>( draw_below( state, static_cast<uint64_t>( t - 1 ) ) );

    /* Floyd's uniform s-subset of {0..t-1}. */
    pick.clear();
    for ( int j = t - s; j < t; ++j )
    {
      uint32_t const r = static_cast<uint32_t>( draw_below( state, static_cast<uint64_t>( j ) + 1 ) );
      if ( std::find( pick.begin(), pick.end(), r ) != pick.end() )
        pick.push_back( static_cast<uint32_t>( j ) );
      else
        pick.push_back( r );
    }
    std::sort( pick.begin(), pick.end() );

    uint64_t key = 0;
    if ( t <= 62 )
    {
      for ( uint32_t const i : pick )
        key |= uint64_t{ 1 } << i;
    }
    else
    {
      key = 0xcbf29ce484222325ULL;
      for ( uint32_t const i : pick )
      {
        key ^= i + 1;
        key *= 0x100000001b3ULL;
      }
    }
    if ( !seen.insert( key ).second )
      continue;

    std::vector<node_id> subset( pick.size() );
    std::transform( pick.begin(), pick.end(), subset.begin(),
                    [&]( uint32_t i ) { return fanouts[i]; } );
    out.push_back( std::move( subset ) );
  }
  return out;
}

initial_lp build_initial_lp( netlist const& net, phase_config const& cfg )
{
  initial_lp model;
  double const span = cfg.span();

  /* Level variables; every primary output maps to one shared variable. */
  model.level_var.assign( net.num_nodes(), UINT32_MAX );
  uint32_t shared_output = UINT32_MAX;
  net.for_each_node( [&]( node_id v ) {
    if ( net.is_po( v ) )
    {
      if ( shared_output == UINT32_MAX )
        shared_output = model.lp.add_variable( 0.0, lp_inf, 0.0, false, "L_out" );
      model.level_var[v] = shared_output;
      return;
    }
    double const lo = net.is_pi( v ) ? static_cast<double>( cfg.pi_level ) : 0.0;
    double const hi = net.is_pi( v ) ? static_cast<double>( cfg.pi_level ) : lp_inf;
    model.level_var[v] = model.lp.add_variable( lo, hi, 0.0, false, "L_" + net.name( v ) );
  } );

  /* Edge buffer estimates, priced per future tree leg. */
  model.cost_var.assign( net.edge_bound(), UINT32_MAX );
  net.for_each_edge( [&]( edge_id e, edge const& ed ) {
    double const weight = 1.0 / static_cast<double>( net.fanout_count( ed.src ) );
    model.cost_var[e] = model.lp.add_variable( 0.0, lp_inf, weight, false, "C" + std::to_string( e ) );
  } );

  net.for_each_edge( [&]( edge_id e, edge const& ed ) {
    uint32_t const li = model.level_var[ed.src];
    uint32_t const lj = model.level_var[ed.dst];
    model.lp.add_constraint( { { lj, 1.0 }, { li, -1.0 } }, '>', 1.0 );
    model.lp.add_constraint( { { lj, 1.0 }, { li, -1.0 }, { model.cost_var[e], -span } }, '<', span );
  } );

  /* Room below multi-fanout nodes for their future splitter trees. */
  int max_fanout_count = 1;
  net.for_each_node( [&]( node_id v ) {
    max_fanout_count = std::max( max_fanout_count, static_cast<int>( net.fanout_count( v ) ) );
  } );
  std::vector<int64_t> const f = path_sum_table( max_fanout_count, cfg.max_fanout );

  net.for_each_node( [&]( node_id v ) {
    if ( net.fanout_count( v ) < 2 )
      return;
    std::vector<node_id> fanouts;
    for ( edge_id const e : net.fanout_edges( v ) )
      fanouts.push_back( net.edge_at( e ).dst );

    for ( auto const& subset : sample_fanout_subsets( fanouts, cfg, v ) )
    {
      /* Coefficients accumulate in case several members share a variable
       * (multiple primary outputs use the same shared level). */
      std::map<uint32_t, double> coeff;
      for ( node_id const j : subset )
        coeff[model.level_var[j]] += 1.0;
      coeff[model.level_var[v]] -= static_cast<double>( subset.size() );

      std::vector<std::pair<uint32_t, double>> terms( coeff.begin(), coeff.end() );
      double const rhs = static_cast<double>( f[subset.size()] + subset.size() );
      model.lp.add_constraint( std::move( terms ), '>', rhs );
    }
  } );
  return model;
}

std::vector<double> initial_warm_start( netlist const& net, phase_config const& cfg,
                                        initial_lp const& model )
{
  /* Leaf depths (splitters on the root path) of a balanced fanout tree. */
  std::vector<int32_t> depths;
  auto const profile = [&]( auto&& self, int m, int base ) -> void {
    if ( m == 1 )
    {
      depths.push_back( base );
      return;
    }
    int const parts = std::min( m, cfg.max_fanout );
    int const q = m / parts, rem = m % parts;
    for ( int p = 0; p < parts; ++p )
      self( self, q + ( p < rem ? 1 : 0 ), base + 1 );
  };

  levels w( net.num_nodes(), 0 );
  for ( node_id const v : topological_order( net ) )
  {
    if ( net.is_pi( v ) )
      w[v] = cfg.pi_level;
    auto const fanout = net.fanout_edges( v );
    if ( fanout.empty() )
      continue;
    depths.clear();
    if ( fanout.size() == 1 )
      depths.push_back( 0 );
    else
      profile( profile, static_cast<int>( fanout.size() ), 0 );
    for ( size_t k = 0; k < fanout.size(); ++k )
    {
      node_id const dst = net.edge_at( fanout[k] ).dst;
      w[dst] = std::max( w[dst], w[v] + 1 + depths[k] );
    }
  }

  /* Shared variables (all primary outputs) take their deepest member. */
  std::vector<double> start( model.lp.num_variables(), 0.0 );
  net.for_each_node( [&]( node_id v ) {
    uint32_t const var = model.level_var[v];
    start[var] = std::max( start[var], static_cast<double>( w[v] ) );
  } );
  double const span = cfg.span();
  net.for_each_edge( [&]( edge_id e, edge const& ed ) {
    double const gap = start[model.level_var[ed.dst]] - start[model.level_var[ed.src]];
    start[model.cost_var[e]] = std::max( 0.0, std::ceil( gap / span ) - 1.0 );
  } );
  return start;
}

levels assign_initial_levels( netlist const& net, phase_config const& cfg )
{
  initial_lp const model = build_initial_lp( net, cfg );
  lp_options options;
  options.start = initial_warm_start( net, cfg, model );
  lp_result const sol = solve_lp( model.lp, options );
  if ( sol.status != lp_status::optimal )
    throw std::runtime_error( "initial leveling: linear program did not solve to optimality" );

  levels out( net.num_nodes(), -1 );
  net.for_each_node( [&]( node_id v ) {
    out[v] = static_cast<int32_t>( std::ceil( sol.x[model.level_var[v]] - 1e-9 ) );
  } );
  return out;
}

} // namespace aqfp
