#include "aqfp/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace aqfp
{

std::string metrics_to_json( metrics_record const& record )
{
  nlohmann::json j;
  j["benchmark"] = record.benchmark;
  j["method"] = record.method;
  j["skip"] = record.skip;
  j["buffers"] = record.buffers;
  j["splitters"] = record.splitters;
  j["total"] = record.total;
  j["iterations"] = record.iterations;
  j["runtime_ms"] = record.runtime_ms;
  j["exact"] = record.exact;
  return j.dump( 2 ) + "\n";
}

metrics_record metrics_from_json( std::string const& text )
{
  try
  {
    auto const j = nlohmann::json::parse( text );
    metrics_record r;
    r.benchmark = j.at( "benchmark" ).get<std::string>();
    r.method = j.at( "method" ).get<std::string>();
    r.skip = j.at( "skip" ).get<int>();
    r.buffers = j.at( "buffers" ).get<int64_t>();
    r.splitters = j.at( "splitters" ).get<int64_t>();
    r.total = j.at( "total" ).get<int64_t>();
    r.iterations = j.at( "iterations" ).get<int>();
    r.runtime_ms = j.at( "runtime_ms" ).get<double>();
    r.exact = j.at( "exact" ).get<bool>();
    return r;
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw std::runtime_error( std::string{ "malformed metrics: " } + e.what() );
  }
}

std::string render_report_csv( std::vector<metrics_record> records )
{
  std::sort( records.begin(), records.end(), []( metrics_record const& a, metrics_record const& b ) {
    if ( a.benchmark != b.benchmark )
      return a.benchmark < b.benchmark;
    if ( a.method != b.method )
      return a.method < b.method;
    return a.skip < b.skip;
  } );

  std::string out = "benchmark,method,skip,buffers,splitters,total\n";
  for ( auto const& r : records )
  {
    out += r.benchmark + ',' + r.method + ',' + std::to_string( r.skip ) + ',' +
           std::to_string( r.buffers ) + ',' + std::to_string( r.splitters ) + ',' +
           std::to_string( r.total ) + '\n';
  }

  /* First record wins on duplicate (method, benchmark, skip) keys. */
  std::map<std::string, std::map<std::string, std::map<int, int64_t>>> totals;
  for ( auto const& r : records )
    totals[r.method][r.benchmark].emplace( r.skip, r.total );

  for ( auto const& [method, by_benchmark] : totals )
  {
    std::set<int> skips;
    for ( auto const& [benchmark, by_skip] : by_benchmark )
      for ( auto const& [skip, total] : by_skip )
        if ( skip > 0 )
          skips.insert( skip );

    for ( int const skip : skips )
    {
      double sum = 0.0;
      int n = 0;
      for ( auto const& [benchmark, by_skip] : by_benchmark )
      {
        auto const base = by_skip.find( 0 );
        auto const at_skip = by_skip.find( skip );
        if ( base == by_skip.end() || at_skip == by_skip.end() || base->second <= 0 )
          continue;
        sum += 1.0 - static_cast<double>( at_skip->second ) / static_cast<double>( base->second );
        ++n;
      }
      if ( n > 0 )
      {
        char value[32];
        std::snprintf( value, sizeof value, "%.4f", sum / n );
        out += "average_savings," + method + ',' + std::to_string( skip ) + ",,," + value + '\n';
      }
    }
  }
  return out;
}

} // namespace aqfp
