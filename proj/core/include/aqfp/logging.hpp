/*! \file logging.hpp
 *  \brief Minimal stderr logger controlled by the AQFP_BSOPT_LOG variable.
 */

#pragma once

#include <sstream>
#include <string>

namespace aqfp
{

enum class log_level : int
{
  error = 0,
  warn = 1,
  info = 2,
  debug = 3
};

/*! \brief Active verbosity, read once from AQFP_BSOPT_LOG (default: warn).
 *
 * Accepted values: error, warn, info, debug (or 0..3).
 */
[[nodiscard]] log_level active_log_level();

[[nodiscard]] inline bool log_enabled( log_level lvl )
{
  return static_cast<int>( lvl ) <= static_cast<int>( active_log_level() );
}

/*! \brief Writes one line to stderr if `lvl` is enabled. */
void log_line( log_level lvl, std::string const& message );

namespace detail
{
struct log_stream
{
  log_level lvl;
  std::ostringstream os;
  bool enabled;
  explicit log_stream( log_level l ) : lvl( l ), enabled( log_enabled( l ) ) {}
  ~log_stream()
  {
    if ( enabled )
      log_line( lvl, os.str() );
  }
  template<typename T>
  log_stream& operator<<( T const& t )
  {
    if ( enabled )
      os << t;
    return *this;
  }
};
} // namespace detail

inline detail::log_stream log_error() { return detail::log_stream( log_level::error ); }
inline detail::log_stream log_warn() { return detail::log_stream( log_level::warn ); }
inline detail::log_stream log_info() { return detail::log_stream( log_level::info ); }
inline detail::log_stream log_debug() { return detail::log_stream( log_level::debug ); }

} // namespace aqfp
