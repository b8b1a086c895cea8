/*! \file aqfp_bsopt.cpp
 *  \brief Command-line front end: optimize / verify / reduce / report.
 *
 * Exit codes: 0 success, 1 usage error, 2 input parse/read error, 3 solver
 * error, 4 verification failure.  Log verbosity comes from AQFP_BSOPT_LOG.
 */

#include <aqfp/bench_io.hpp>
#include <aqfp/config.hpp>
#include <aqfp/level_assign.hpp>
#include <aqfp/logging.hpp>
#include <aqfp/netlist.hpp>
#include <aqfp/optimize.hpp>
#include <aqfp/report.hpp>
#include <aqfp/verify.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_parse = 2;
constexpr int exit_solver = 3;
constexpr int exit_verify = 4;

struct tool_options
{
  aqfp::phase_config cfg;
  std::string lp_mode = "relaxed";
  std::string input;
  std::string solution; /*!< verify only: the optimized file */
  std::string output;
  std::string metrics_path;
  std::string format = "bench";
};

void add_config_flags( CLI::App* cmd, tool_options& opt )
{
  cmd->add_option( "--skip", opt.cfg.skip, "Phases a hop may skip" )
      ->check( CLI::Range( 0, 3 ) )
      ->capture_default_str();
  cmd->add_option( "--max-fanout", opt.cfg.max_fanout, "Splitter capacity" )
      ->check( CLI::Range( 2, 64 ) )
      ->capture_default_str();
  cmd->add_option( "--seed", opt.cfg.seed, "Seed for randomized subset sampling" )
      ->capture_default_str();
  cmd->add_option( "--subset-cap", opt.cfg.subset_cap,
                   "Sampled fanout subsets per node in the first leveling pass" )
      ->check( CLI::PositiveNumber )
      ->capture_default_str();
  cmd->add_option( "--enum-threshold", opt.cfg.enum_threshold,
                   "Fanout count up to which subsets are enumerated exhaustively" )
      ->check( CLI::Range( 0, 30 ) )
      ->capture_default_str();
  cmd->add_option( "--lp", opt.lp_mode, "Level model: relaxed (rounded) or exact (integer)" )
      ->check( CLI::IsMember( { "relaxed", "exact" } ) )
      ->capture_default_str();
  cmd->add_option( "--max-iters", opt.cfg.max_iters, "Upper bound on improvement rounds" )
      ->check( CLI::PositiveNumber )
      ->capture_default_str();
  cmd->add_option( "--pi-level", opt.cfg.pi_level, "Level assigned to every primary input" )
      ->check( CLI::Range( 0, 1 ) )
      ->capture_default_str();
}

void add_output_flags( CLI::App* cmd, tool_options& opt )
{
  cmd->add_option( "-o,--output", opt.output, "Output netlist path (stdout when omitted)" );
  cmd->add_option( "--metrics", opt.metrics_path,
                   "Metrics JSON path (defaults to the output path with a .metrics.json suffix)" );
  cmd->add_option( "--format", opt.format, "Output encoding" )
      ->check( CLI::IsMember( { "bench", "json" } ) )
      ->capture_default_str();
}

std::string benchmark_name( std::string const& path )
{
  return std::filesystem::path( path ).stem().string();
}

std::string default_metrics_path( std::string const& output )
{
  std::filesystem::path p( output );
  p.replace_extension();
  return p.string() + ".metrics.json";
}

void write_text_file( std::string const& path, std::string const& content )
{
  std::ofstream os( path, std::ios::binary );
  if ( !os )
    throw std::runtime_error( "cannot open '" + path + "' for writing" );
  os << content;
  if ( !os )
    throw std::runtime_error( "failed while writing '" + path + "'" );
}

/*! \brief Reads a netlist and normalizes it to gate-only form. */
aqfp::netlist read_gate_network( std::string const& path )
{
  auto parsed = aqfp::read_netlist_file( path );
  auto net = aqfp::contract_buffers( aqfp::absorb_inverters( parsed.net ) );
  if ( net.count_kind( aqfp::node_kind::splitter ) != 0 )
    throw std::runtime_error( "'" + path + "' contains splitters; expected a gate-level netlist" );
  if ( auto const problems = aqfp::validate( net ); !problems.empty() )
    throw std::runtime_error( "'" + path + "': " + problems.front() );
  return net;
}

void print_violations( std::string const& check, aqfp::violation_list const& violations )
{
  for ( auto const& v : violations )
    std::fprintf( stderr, "%s: %s\n", check.c_str(), v.c_str() );
}

/*! \brief Legality + structure + equivalence; prints problems, returns clean. */
bool verify_solution( aqfp::netlist const& original, aqfp::netlist const& net,
                      aqfp::levels const& lv, aqfp::phase_config const& cfg )
{
  auto const legality = aqfp::check_phase_legality( net, lv, cfg );
  print_violations( "legality", legality );
  auto const structure = aqfp::check_structure( net, cfg );
  print_violations( "structure", structure );
  bool const equivalent = aqfp::check_equivalence( original, net );
  if ( !equivalent )
    std::fprintf( stderr, "equivalence: solution does not match the original network\n" );
  return legality.empty() && structure.empty() && equivalent;
}

int emit_result( tool_options const& opt, aqfp::netlist const& net, aqfp::levels const& lv,
                 aqfp::metrics_record const& record )
{
  bool const as_json = opt.format == "json";
  try
  {
    if ( opt.output.empty() )
    {
      auto const text = as_json ? aqfp::serialize_json( net, &lv ) : aqfp::serialize_bench( net, &lv );
      std::fputs( text.c_str(), stdout );
    }
    else
    {
      aqfp::write_netlist_file( opt.output, net, &lv, as_json );
    }
    std::string metrics_path = opt.metrics_path;
    if ( metrics_path.empty() && !opt.output.empty() )
      metrics_path = default_metrics_path( opt.output );
    if ( !metrics_path.empty() )
      write_text_file( metrics_path, aqfp::metrics_to_json( record ) );
  }
  catch ( std::exception const& e )
  {
    std::fprintf( stderr, "error: %s\n", e.what() );
    return exit_parse;
  }
  return exit_ok;
}

int cmd_optimize( tool_options& opt )
{
  aqfp::netlist net;
  try
  {
    net = read_gate_network( opt.input );
  }
  catch ( std::exception const& e )
  {
    std::fprintf( stderr, "error: %s\n", e.what() );
    return exit_parse;
  }

  opt.cfg.exact_levels = opt.lp_mode == "exact";
  aqfp::solution sol;
  try
  {
    sol = aqfp::optimize( net, opt.cfg );
  }
  catch ( std::invalid_argument const& e )
  {
    std::fprintf( stderr, "error: %s\n", e.what() );
    return exit_parse;
  }
  catch ( std::runtime_error const& e )
  {
    std::fprintf( stderr, "solver error: %s\n", e.what() );
    return exit_solver;
  }

  if ( !verify_solution( net, sol.net, sol.lv, opt.cfg ) )
    return exit_verify;

  aqfp::metrics_record record;
  record.benchmark = benchmark_name( opt.input );
  record.method = "optimize";
  record.skip = opt.cfg.skip;
  record.buffers = sol.metrics.buffers;
  record.splitters = sol.metrics.splitters;
  record.total = sol.metrics.total;
  record.iterations = sol.metrics.iterations;
  record.runtime_ms = sol.metrics.wall_time_ms;
  record.exact = opt.cfg.exact_levels;
  return emit_result( opt, sol.net, sol.lv, record );
}

int cmd_reduce( tool_options& opt )
{
  auto const t0 = std::chrono::steady_clock::now();
  aqfp::netlist net;
  try
  {
    net = read_gate_network( opt.input );
  }
  catch ( std::exception const& e )
  {
    std::fprintf( stderr, "error: %s\n", e.what() );
    return exit_parse;
  }

  opt.cfg.exact_levels = opt.lp_mode == "exact";
  aqfp::phase_config base_cfg = opt.cfg;
  base_cfg.skip = 0;

  aqfp::solution sol;
  aqfp::materialized reduced;
  try
  {
    sol = aqfp::optimize( net, base_cfg );
    reduced = aqfp::buffer_chain_reduce( sol.net, sol.lv, opt.cfg );
  }
  catch ( std::invalid_argument const& e )
  {
    std::fprintf( stderr, "error: %s\n", e.what() );
    return exit_parse;
  }
  catch ( std::runtime_error const& e )
  {
    std::fprintf( stderr, "solver error: %s\n", e.what() );
    return exit_solver;
  }

  if ( !verify_solution( net, reduced.net, reduced.lv, opt.cfg ) )
    return exit_verify;

  auto const cost = aqfp::total_cost( reduced.net );
  aqfp::metrics_record record;
  record.benchmark = benchmark_name( opt.input );
  record.method = "chain_reduce";
  record.skip = opt.cfg.skip;
  record.buffers = cost.buffers;
  record.splitters = cost.splitters;
  record.total = cost.total;
  record.iterations = sol.metrics.iterations;
  record.runtime_ms =
      std::chrono::duration<double, std::milli>( std::chrono::steady_clock::now() - t0 ).count();
  record.exact = opt.cfg.exact_levels;
  return emit_result( opt, reduced.net, reduced.lv, record );
}

int cmd_verify( tool_options const& opt )
{
  aqfp::netlist original;
  aqfp::parsed_netlist sol;
  try
  {
    original = read_gate_network( opt.input );
    sol = aqfp::read_netlist_file( opt.solution );
  }
  catch ( std::exception const& e )
  {
    std::fprintf( stderr, "error: %s\n", e.what() );
    return exit_parse;
  }

  if ( !sol.has_levels )
  {
    std::fprintf( stderr, "legality: solution file carries no level annotations\n" );
    return exit_verify;
  }
  if ( !verify_solution( original, sol.net, sol.lv, opt.cfg ) )
    return exit_verify;
  std::fprintf( stderr, "verification clean\n" );
  return exit_ok;
}

int cmd_report( tool_options const& opt )
{
  std::vector<std::filesystem::path> files;
  try
  {
    for ( auto const& entry : std::filesystem::directory_iterator( opt.input ) )
      if ( entry.is_regular_file() && entry.path().extension() == ".json" )
        files.push_back( entry.path() );
  }
  catch ( std::filesystem::filesystem_error const& e )
  {
    std::fprintf( stderr, "error: %s\n", e.what() );
    return exit_parse;
  }
  std::sort( files.begin(), files.end() );

  std::vector<aqfp::metrics_record> records;
  for ( auto const& file : files )
  {
    std::ifstream is( file, std::ios::binary );
    std::string const text( ( std::istreambuf_iterator<char>( is ) ),
                            std::istreambuf_iterator<char>() );
    try
    {
      records.push_back( aqfp::metrics_from_json( text ) );
    }
    catch ( std::exception const& e )
    {
      std::fprintf( stderr, "error: %s: %s\n", file.string().c_str(), e.what() );
      return exit_parse;
    }
  }

  auto const csv = aqfp::render_report_csv( records );
  if ( opt.output.empty() )
  {
    std::fputs( csv.c_str(), stdout );
    return exit_ok;
  }
  try
  {
    write_text_file( opt.output, csv );
  }
  catch ( std::exception const& e )
  {
    std::fprintf( stderr, "error: %s\n", e.what() );
    return exit_parse;
  }
  return exit_ok;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Buffer and splitter insertion for phase-skipping clocked netlists" };
  app.require_subcommand( 1 );

  tool_options optimize_opt;
  auto* optimize_cmd =
      app.add_subcommand( "optimize", "Insert a minimized set of buffers and splitters" );
  optimize_cmd->add_option( "input", optimize_opt.input, "Gate-level netlist" )->required();
  add_config_flags( optimize_cmd, optimize_opt );
  add_output_flags( optimize_cmd, optimize_opt );

  tool_options reduce_opt;
  auto* reduce_cmd = app.add_subcommand(
      "reduce", "Baseline: optimize at skip 0, then shorten buffer chains for the target skip" );
  reduce_cmd->add_option( "input", reduce_opt.input, "Gate-level netlist" )->required();
  add_config_flags( reduce_cmd, reduce_opt );
  add_output_flags( reduce_cmd, reduce_opt );

  tool_options verify_opt;
  auto* verify_cmd =
      app.add_subcommand( "verify", "Check a solution against the original gate network" );
  verify_cmd->add_option( "original", verify_opt.input, "Gate-level netlist" )->required();
  verify_cmd->add_option( "solution", verify_opt.solution, "Optimized netlist with level comments" )
      ->required();
  add_config_flags( verify_cmd, verify_opt );

  tool_options report_opt;
  auto* report_cmd = app.add_subcommand( "report", "Aggregate metrics JSON files into a CSV table" );
  report_cmd->add_option( "directory", report_opt.input, "Directory of metrics JSON files" )
      ->required();
  report_cmd->add_option( "-o,--output", report_opt.output, "CSV path (stdout when omitted)" );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::CallForHelp const& e )
  {
    return app.exit( e );
  }
  catch ( CLI::ParseError const& e )
  {
    app.exit( e );
    return exit_usage;
  }

  if ( app.got_subcommand( optimize_cmd ) )
    return cmd_optimize( optimize_opt );
  if ( app.got_subcommand( reduce_cmd ) )
    return cmd_reduce( reduce_opt );
  if ( app.got_subcommand( verify_cmd ) )
    return cmd_verify( verify_opt );
  return cmd_report( report_opt );
}
