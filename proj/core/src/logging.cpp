#include "aqfp/logging.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace aqfp
{

log_level active_log_level()
{
  static log_level const lvl = [] {
    char const* env = std::getenv( "AQFP_BSOPT_LOG" );
    if ( !env )
      return log_level::warn;
    if ( !std::strcmp( env, "error" ) || !std::strcmp( env, "0" ) )
      return log_level::error;
    if ( !std::strcmp( env, "warn" ) || !std::strcmp( env, "1" ) )
      return log_level::warn;
    if ( !std::strcmp( env, "info" ) || !std::strcmp( env, "2" ) )
      return log_level::info;
    if ( !std::strcmp( env, "debug" ) || !std::strcmp( env, "3" ) )
      return log_level::debug;
    return log_level::warn;
  }();
  return lvl;
}

void log_line( log_level lvl, std::string const& message )
{
  static char const* const tags[] = { "error", "warn", "info", "debug" };
  std::fprintf( stderr, "[%s] %s\n", tags[static_cast<int>( lvl )], message.c_str() );
}

} // namespace aqfp
