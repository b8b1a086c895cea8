#include "aqfp/bench_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <json.hpp>
#include <sstream>

namespace aqfp
{

namespace
{

bool ident_char( char c )
{
  return std::isalnum( static_cast<unsigned char>( c ) ) || c == '_' || c == '.' || c == '[' || c == ']' || c == '$';
}

struct cursor
{
  std::string const& s;
  size_t pos = 0;
  int line;

  void skip_ws()
  {
    while ( pos < s.size() && std::isspace( static_cast<unsigned char>( s[pos] ) ) )
      ++pos;
  }
  bool eat( char c )
  {
    skip_ws();
    if ( pos < s.size() && s[pos] == c )
    {
      ++pos;
      return true;
    }
    return false;
  }
  void expect( char c, std::string const& what )
  {
    if ( !eat( c ) )
      throw bench_parse_error( line, std::string( "expected '" ) + c + "' " + what );
  }
  std::string ident()
  {
    skip_ws();
    size_t const start = pos;
    while ( pos < s.size() && ident_char( s[pos] ) )
      ++pos;
    if ( pos == start )
      throw bench_parse_error( line, "expected an identifier" );
    return s.substr( start, pos - start );
  }
  bool at_end()
  {
    skip_ws();
    return pos >= s.size();
  }
};

struct operand
{
  std::string name;
  bool inverted;
};

struct definition
{
  std::string name;
  std::string func;
  std::vector<operand> ops;
  int line;
};

struct annotation
{
  std::string name;
  int32_t level;
  int line;
};

std::string upper( std::string s )
{
  std::transform( s.begin(), s.end(), s.begin(), []( unsigned char c ) { return static_cast<char>( std::toupper( c ) ); } );
  return s;
}

/*! \brief Picks an unused output-node name derived from the signal name. */
std::string output_node_name( netlist const& net, std::string const& signal_name )
{
  std::string const base = "po_" + signal_name;
  if ( !net.find( base ) )
    return base;
  for ( uint64_t k = 2;; ++k )
  {
    std::string candidate = base + "_" + std::to_string( k );
    if ( !net.find( candidate ) )
      return candidate;
  }
}

node_id require_signal( netlist const& net, std::string const& name, int line )
{
  auto const v = net.find( name );
  if ( !v )
    throw bench_parse_error( line, "undefined signal '" + name + "'" );
  return *v;
}

void apply_annotations( parsed_netlist& result, std::vector<annotation> const& notes )
{
  result.lv.assign( result.net.num_nodes(), -1 );
  result.has_levels = !notes.empty();
  for ( auto const& a : notes )
  {
    node_id const v = require_signal( result.net, a.name, a.line );
    result.lv[v] = a.level;
  }
}

} // namespace

parsed_netlist parse_bench( std::string const& text )
{
  std::vector<std::pair<std::string, int>> inputs;
  std::vector<std::pair<operand, int>> outputs;
  std::vector<definition> defs;
  std::vector<annotation> notes;

  std::istringstream in( text );
  std::string raw;
  int line_no = 0;
  while ( std::getline( in, raw ) )
  {
    ++line_no;
    std::string line = raw;
    if ( auto const hash = line.find( '#' ); hash != std::string::npos )
    {
      /* "# level <name> = <int>" is semantic; any other comment is dropped. */
      cursor c{ line, hash + 1, line_no };
      c.skip_ws();
      if ( line.compare( c.pos, 5, "level" ) == 0 && ( c.pos + 5 == line.size() || !ident_char( line[c.pos + 5] ) ) )
      {
        c.pos += 5;
        std::string const name = c.ident();
        c.expect( '=', "in level annotation" );
        c.skip_ws();
        size_t const start = c.pos;
        if ( c.pos < line.size() && ( line[c.pos] == '-' || line[c.pos] == '+' ) )
          ++c.pos;
        while ( c.pos < line.size() && std::isdigit( static_cast<unsigned char>( line[c.pos] ) ) )
          ++c.pos;
        if ( c.pos == start )
          throw bench_parse_error( line_no, "expected an integer in level annotation" );
        notes.push_back( annotation{ name, static_cast<int32_t>( std::stol( line.substr( start, c.pos - start ) ) ), line_no } );
        if ( !c.at_end() )
          throw bench_parse_error( line_no, "trailing characters after level annotation" );
      }
      line.resize( hash );
    }

    cursor c{ line, 0, line_no };
    if ( c.at_end() )
      continue;

    std::string const first = c.ident();
    std::string const key = upper( first );
    if ( key == "INPUT" || key == "OUTPUT" )
    {
      c.expect( '(', "after " + key );
      bool const inv = c.eat( '!' );
      std::string const name = c.ident();
      c.expect( ')', "to close " + key );
      if ( !c.at_end() )
        throw bench_parse_error( line_no, "trailing characters after statement" );
      if ( key == "INPUT" )
      {
        if ( inv )
          throw bench_parse_error( line_no, "INPUT cannot be negated" );
        inputs.emplace_back( name, line_no );
      }
      else
      {
        outputs.push_back( { operand{ name, inv }, line_no } );
      }
      continue;
    }

    definition def;
    def.name = first;
    def.line = line_no;
    c.expect( '=', "in definition" );
    def.func = upper( c.ident() );
    c.expect( '(', "after function name" );
    do
    {
      operand op;
      op.inverted = c.eat( '!' );
      op.name = c.ident();
      def.ops.push_back( std::move( op ) );
    } while ( c.eat( ',' ) );
    c.expect( ')', "to close operand list" );
    if ( !c.at_end() )
      throw bench_parse_error( line_no, "trailing characters after statement" );
    defs.push_back( std::move( def ) );
  }

  parsed_netlist result;
  netlist& net = result.net;

  auto add_unique = [&]( std::string const& name, node_kind kind, gate_func fn, int line ) {
    if ( net.find( name ) )
      throw bench_parse_error( line, "signal '" + name + "' defined twice" );
    return net.add_node_raw( name, kind, fn );
  };

  for ( auto const& [name, line] : inputs )
    add_unique( name, node_kind::primary_input, gate_func::none, line );

  static std::map<std::string, std::pair<node_kind, gate_func>> const func_table = {
      { "AND", { node_kind::gate, gate_func::and2 } },
      { "OR", { node_kind::gate, gate_func::or2 } },
      { "MAJ3", { node_kind::gate, gate_func::maj3 } },
      { "NOT", { node_kind::inverter, gate_func::none } },
      { "BUF", { node_kind::buffer, gate_func::none } },
      { "SPL", { node_kind::splitter, gate_func::none } },
  };
  for ( auto const& def : defs )
  {
    auto const it = func_table.find( def.func );
    if ( it == func_table.end() )
      throw bench_parse_error( def.line, "unknown function '" + def.func + "'" );
    size_t const want = it->second.second == gate_func::maj3 ? 3 : ( it->second.first == node_kind::gate ? 2 : 1 );
    if ( def.ops.size() != want )
      throw bench_parse_error( def.line, def.func + " expects " + std::to_string( want ) + " operand(s), got " + std::to_string( def.ops.size() ) );
    add_unique( def.name, it->second.first, it->second.second, def.line );
  }

  /* Second pass: wire fanins (definitions may reference later signals). */
  for ( auto const& def : defs )
  {
    node_id const v = *net.find( def.name );
    for ( auto const& op : def.ops )
    {
      node_id const src = require_signal( net, op.name, def.line );
      try
      {
        net.add_edge( src, v, op.inverted );
      }
      catch ( std::invalid_argument const& ex )
      {
        throw bench_parse_error( def.line, ex.what() );
      }
    }
  }

  for ( auto const& [op, line] : outputs )
  {
    node_id const src = require_signal( net, op.name, line );
    net.add_primary_output( output_node_name( net, op.name ), signal{ src, op.inverted } );
  }

  apply_annotations( result, notes );
  return result;
}

namespace
{

char const* func_token( netlist const& net, node_id v )
{
  switch ( net.kind( v ) )
  {
  case node_kind::buffer:
    return "BUF";
  case node_kind::splitter:
    return "SPL";
  case node_kind::inverter:
    return "NOT";
  case node_kind::gate:
    switch ( net.func( v ) )
    {
    case gate_func::and2:
      return "AND";
    case gate_func::or2:
      return "OR";
    case gate_func::maj3:
      return "MAJ3";
    default:
      break;
    }
    break;
  default:
    break;
  }
  return nullptr;
}

} // namespace

std::string serialize_bench( netlist const& net, levels const* lv )
{
  std::ostringstream os;
  net.for_each_node( [&]( node_id v ) {
    if ( net.is_pi( v ) )
      os << "INPUT(" << net.name( v ) << ")\n";
  } );
  net.for_each_node( [&]( node_id v ) {
    if ( net.is_po( v ) )
    {
      edge const& e = net.single_fanin( v );
      os << "OUTPUT(" << ( e.inverted ? "!" : "" ) << net.name( e.src ) << ")\n";
    }
  } );
  net.for_each_node( [&]( node_id v ) {
    char const* const fn = func_token( net, v );
    if ( !fn )
      return;
    os << net.name( v ) << " = " << fn << "(";
    bool first = true;
    for ( edge_id const e : net.fanin_edges( v ) )
    {
      edge const& ed = net.edge_at( e );
      os << ( first ? "" : ", " ) << ( ed.inverted ? "!" : "" ) << net.name( ed.src );
      first = false;
    }
    os << ")\n";
  } );
  if ( lv )
  {
    net.for_each_node( [&]( node_id v ) {
      if ( v < lv->size() && ( *lv )[v] >= 0 )
        os << "# level " << net.name( v ) << " = " << ( *lv )[v] << "\n";
    } );
  }
  return os.str();
}

namespace
{

char const* kind_token( node_kind k )
{
  switch ( k )
  {
  case node_kind::primary_input:
    return "input";
  case node_kind::primary_output:
    return "output";
  case node_kind::gate:
    return "gate";
  case node_kind::buffer:
    return "buffer";
  case node_kind::splitter:
    return "splitter";
  case node_kind::inverter:
    return "inverter";
  }
  return "";
}

char const* func_json_token( gate_func f )
{
  switch ( f )
  {
  case gate_func::and2:
    return "and";
  case gate_func::or2:
    return "or";
  case gate_func::maj3:
    return "maj3";
  default:
    return "";
  }
}

} // namespace

std::string serialize_json( netlist const& net, levels const* lv )
{
  nlohmann::ordered_json doc;
  doc["nodes"] = nlohmann::ordered_json::array();
  net.for_each_node( [&]( node_id v ) {
    nlohmann::ordered_json n;
    n["name"] = net.name( v );
    n["kind"] = kind_token( net.kind( v ) );
    if ( net.is_gate( v ) )
      n["func"] = func_json_token( net.func( v ) );
    doc["nodes"].push_back( std::move( n ) );
  } );
  doc["edges"] = nlohmann::ordered_json::array();
  net.for_each_edge( [&]( edge_id, edge const& e ) {
    nlohmann::ordered_json j;
    j["src"] = net.name( e.src );
    j["dst"] = net.name( e.dst );
    j["inverted"] = e.inverted;
    doc["edges"].push_back( std::move( j ) );
  } );
  if ( lv )
  {
    nlohmann::ordered_json lm;
    net.for_each_node( [&]( node_id v ) {
      if ( v < lv->size() && ( *lv )[v] >= 0 )
        lm[net.name( v )] = ( *lv )[v];
    } );
    doc["levels"] = std::move( lm );
  }
  return doc.dump( 2 ) + "\n";
}

parsed_netlist parse_json( std::string const& text )
{
  nlohmann::json doc;
  try
  {
    doc = nlohmann::json::parse( text );
  }
  catch ( nlohmann::json::exception const& ex )
  {
    throw bench_parse_error( 0, std::string( "invalid JSON: " ) + ex.what() );
  }

  parsed_netlist result;
  netlist& net = result.net;
  try
  {
    for ( auto const& n : doc.at( "nodes" ) )
    {
      std::string const name = n.at( "name" ).get<std::string>();
      std::string const kind = n.at( "kind" ).get<std::string>();
      node_kind k;
      gate_func f = gate_func::none;
      if ( kind == "input" )
        k = node_kind::primary_input;
      else if ( kind == "output" )
        k = node_kind::primary_output;
      else if ( kind == "buffer" )
        k = node_kind::buffer;
      else if ( kind == "splitter" )
        k = node_kind::splitter;
      else if ( kind == "inverter" )
        k = node_kind::inverter;
      else if ( kind == "gate" )
      {
        k = node_kind::gate;
        std::string const fs = n.at( "func" ).get<std::string>();
        if ( fs == "and" )
          f = gate_func::and2;
        else if ( fs == "or" )
          f = gate_func::or2;
        else if ( fs == "maj3" )
          f = gate_func::maj3;
        else
          throw bench_parse_error( 0, "unknown gate function '" + fs + "'" );
      }
      else
        throw bench_parse_error( 0, "unknown node kind '" + kind + "'" );
      if ( net.find( name ) )
        throw bench_parse_error( 0, "node '" + name + "' defined twice" );
      net.add_node_raw( name, k, f );
    }
    for ( auto const& e : doc.at( "edges" ) )
    {
      node_id const src = require_signal( net, e.at( "src" ).get<std::string>(), 0 );
      node_id const dst = require_signal( net, e.at( "dst" ).get<std::string>(), 0 );
      bool const inv = e.value( "inverted", false );
      try
      {
        net.add_edge( src, dst, inv );
      }
      catch ( std::invalid_argument const& ex )
      {
        throw bench_parse_error( 0, ex.what() );
      }
    }
    result.lv.assign( net.num_nodes(), -1 );
    if ( doc.contains( "levels" ) )
    {
      result.has_levels = true;
      for ( auto const& [name, value] : doc.at( "levels" ).items() )
        result.lv[require_signal( net, name, 0 )] = value.get<int32_t>();
    }
  }
  catch ( nlohmann::json::exception const& ex )
  {
    throw bench_parse_error( 0, std::string( "malformed netlist JSON: " ) + ex.what() );
  }
  return result;
}

parsed_netlist read_netlist_file( std::string const& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw std::runtime_error( "cannot open '" + path + "'" );
  std::ostringstream buffer;
  buffer << in.rdbuf();
  bool const json = path.size() >= 5 && path.compare( path.size() - 5, 5, ".json" ) == 0;
  return json ? parse_json( buffer.str() ) : parse_bench( buffer.str() );
}

void write_netlist_file( std::string const& path, netlist const& net, levels const* lv, bool as_json )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out )
    throw std::runtime_error( "cannot write '" + path + "'" );
  out << ( as_json ? serialize_json( net, lv ) : serialize_bench( net, lv ) );
}

bool isomorphic_by_names( netlist const& a, netlist const& b )
{
  if ( a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges() )
    return false;
  auto fanin_key = []( netlist const& n, node_id v ) {
    std::vector<std::pair<std::string, bool>> key;
    for ( edge_id const e : n.fanin_edges( v ) )
      key.emplace_back( n.name( n.edge_at( e ).src ), n.edge_at( e ).inverted );
    std::sort( key.begin(), key.end() );
    return key;
  };
  /* Output node names are synthetic (derived from the driven signal by the
   * text writer), so outputs are matched by observed signal instead. */
  std::vector<std::pair<std::string, bool>> pos_a, pos_b;
  for ( node_id va = 0; va < a.num_nodes(); ++va )
  {
    if ( a.is_po( va ) )
    {
      edge const& e = a.single_fanin( va );
      pos_a.emplace_back( a.name( e.src ), e.inverted );
      continue;
    }
    auto const vb = b.find( a.name( va ) );
    if ( !vb )
      return false;
    if ( a.kind( va ) != b.kind( *vb ) || a.func( va ) != b.func( *vb ) )
      return false;
    if ( fanin_key( a, va ) != fanin_key( b, *vb ) )
      return false;
  }
  for ( node_id vb = 0; vb < b.num_nodes(); ++vb )
    if ( b.is_po( vb ) )
    {
      edge const& e = b.single_fanin( vb );
      pos_b.emplace_back( b.name( e.src ), e.inverted );
    }
  std::sort( pos_a.begin(), pos_a.end() );
  std::sort( pos_b.begin(), pos_b.end() );
  return pos_a == pos_b;
}

} // namespace aqfp
