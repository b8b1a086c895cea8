#include "aqfp/level_assign.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aqfp
{

assignment_lp build_assignment_lp( netlist const& net, phase_config const& cfg )
{
  if ( net.count_kind( node_kind::buffer ) != 0 )
    throw std::invalid_argument(
        "build_assignment_lp: graph still contains buffers; contract them first" );

  assignment_lp model;
  double const span = cfg.span();

  model.level_var.assign( net.num_nodes(), UINT32_MAX );
  uint32_t shared_output = UINT32_MAX;
  net.for_each_node( [&]( node_id v ) {
    if ( net.is_po( v ) )
    {
      if ( shared_output == UINT32_MAX )
        shared_output = model.lp.add_variable( 0.0, lp_inf, 0.0, true, "L_out" );
      model.level_var[v] = shared_output;
      return;
    }
    double const lo = net.is_pi( v ) ? static_cast<double>( cfg.pi_level ) : 0.0;
    double const hi = net.is_pi( v ) ? static_cast<double>( cfg.pi_level ) : lp_inf;
    model.level_var[v] = model.lp.add_variable( lo, hi, 0.0, true, "L_" + net.name( v ) );
  } );

  model.cost_var.assign( net.edge_bound(), UINT32_MAX );
  net.for_each_edge( [&]( edge_id e, edge const& ) {
    model.cost_var[e] = model.lp.add_variable( 0.0, lp_inf, 1.0, true, "C" + std::to_string( e ) );
  } );

  net.for_each_edge( [&]( edge_id e, edge const& ed ) {
    uint32_t const li = model.level_var[ed.src];
    uint32_t const lj = model.level_var[ed.dst];
    model.lp.add_constraint( { { lj, 1.0 }, { li, -1.0 } }, '>', 1.0 );
    model.lp.add_constraint( { { lj, 1.0 }, { li, -1.0 }, { model.cost_var[e], -span } }, '<', span );
  } );
  return model;
}

std::vector<double> assignment_warm_start( netlist const& net, phase_config const& cfg,
                                           assignment_lp const& model, levels const& lv )
{
  std::vector<double> start( model.lp.num_variables(), 0.0 );
  net.for_each_node( [&]( node_id v ) {
    uint32_t const var = model.level_var[v];
    start[var] = std::max( start[var], static_cast<double>( lv[v] ) );
  } );
  double const span = cfg.span();
  net.for_each_edge( [&]( edge_id e, edge const& ed ) {
    double const gap = start[model.level_var[ed.dst]] - start[model.level_var[ed.src]];
    start[model.cost_var[e]] = std::max( 0.0, std::ceil( gap / span ) - 1.0 );
  } );
  return start;
}

namespace
{

/*! \brief Earliest legal levels (fallback hot start when none is supplied). */
levels earliest_levels( netlist const& net, phase_config const& cfg )
{
  levels lv( net.num_nodes(), 0 );
  for ( node_id const v : topological_order( net ) )
  {
    if ( net.is_pi( v ) )
      lv[v] = cfg.pi_level;
    for ( edge_id const e : net.fanout_edges( v ) )
    {
      node_id const dst = net.edge_at( e ).dst;
      lv[dst] = std::max( lv[dst], lv[v] + 1 );
    }
  }
  return lv;
}

} // namespace

assignment_result assign_levels( netlist const& net, phase_config const& cfg, bool exact,
                                 levels const* warm )
{
  assignment_lp const model = build_assignment_lp( net, cfg );
  lp_options options;
  options.start = assignment_warm_start( net, cfg, model,
                                         warm ? *warm : earliest_levels( net, cfg ) );
  ilp_options iopt;
  iopt.lp = options;
  lp_result const sol = exact ? solve_ilp_small( model.lp, iopt ) : solve_lp( model.lp, options );
  if ( sol.status != lp_status::optimal )
    throw std::runtime_error( std::string( "level assignment: " ) +
                              ( exact ? "integer program" : "linear program" ) +
                              " did not solve to optimality" );

  assignment_result out;
  out.fractional_cost = sol.objective;
  out.lv.assign( net.num_nodes(), -1 );
  net.for_each_node( [&]( node_id v ) {
    double const value = sol.x[model.level_var[v]];
    out.lv[v] = exact ? static_cast<int32_t>( std::llround( value ) )
                      : static_cast<int32_t>( std::ceil( value - 1e-9 ) );
  } );
  return out;
}

materialized materialize_buffers( netlist const& net, levels const& lv, phase_config const& cfg )
{
  materialized out{ net, lv };
  out.lv.resize( net.num_nodes(), -1 );
  int32_t const span = cfg.span();

  std::vector<edge_id> worklist;
  out.net.for_each_edge( [&]( edge_id e, edge const& ) { worklist.push_back( e ); } );

  for ( edge_id const e : worklist )
  {
    edge const ed = out.net.edge_at( e );
    int32_t const delta = out.lv[ed.dst] - out.lv[ed.src];
    if ( delta < 1 )
      throw std::invalid_argument( "materialize_buffers: levels do not increase along an edge" );
    int32_t const count = ( delta + span - 1 ) / span - 1;
    if ( count <= 0 )
      continue;

    out.net.remove_edge( e );
    node_id prev = ed.src;
    for ( int32_t i = 1; i <= count; ++i )
    {
      node_id const b =
          out.net.add_buffer( out.net.make_name( "buf" ), { prev, i == 1 ? ed.inverted : false } );
      out.lv.resize( out.net.num_nodes(), -1 );
      out.lv[b] = out.lv[ed.src] + i * span;
      prev = b;
    }
    out.net.add_edge( prev, ed.dst, false );
  }
  return out;
}

cost_summary total_cost( netlist const& net )
{
  cost_summary c;
  c.buffers = net.count_kind( node_kind::buffer );
  c.splitters = net.count_kind( node_kind::splitter );
  c.total = c.buffers + c.splitters;
  return c;
}

} // namespace aqfp
