#include <doctest.h>

#include <aqfp/report.hpp>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

using namespace aqfp;

namespace
{

metrics_record make_record( std::string benchmark, std::string method, int skip, int64_t buffers,
                            int64_t splitters )
{
  metrics_record r;
  r.benchmark = std::move( benchmark );
  r.method = std::move( method );
  r.skip = skip;
  r.buffers = buffers;
  r.splitters = splitters;
  r.total = buffers + splitters;
  r.iterations = 3;
  r.runtime_ms = 12.5;
  return r;
}

} // namespace

TEST_CASE( "metrics survive a JSON round trip" )
{
  metrics_record r = make_record( "mult8", "optimize", 2, 700, 130 );
  r.exact = true;
  r.iterations = 7;
  r.runtime_ms = 4321.125;

  auto const text = metrics_to_json( r );
  CHECK( text.find( "\"benchmark\"" ) != std::string::npos );
  CHECK( text.find( "\"runtime_ms\"" ) != std::string::npos );
  CHECK( metrics_from_json( text ) == r );
}

TEST_CASE( "malformed metrics are rejected" )
{
  CHECK_THROWS_AS( (void)metrics_from_json( "not json at all" ), std::runtime_error );
  CHECK_THROWS_AS( (void)metrics_from_json( "{}" ), std::runtime_error );
  CHECK_THROWS_AS(
      (void)metrics_from_json( R"({"benchmark":"x","method":"optimize","skip":"one"})" ),
      std::runtime_error );
  /* missing one field */
  auto text = metrics_to_json( make_record( "c", "optimize", 0, 1, 2 ) );
  auto const pos = text.find( "\"total\"" );
  REQUIRE( pos != std::string::npos );
  text.erase( pos, text.find( ',', pos ) - pos + 1 );
  CHECK_THROWS_AS( (void)metrics_from_json( text ), std::runtime_error );
}

TEST_CASE( "report table lists runs and averages per-circuit savings" )
{
  /* Two circuits at skips 0 and 1: savings 1 - 8/10 = 0.2 and 1 - 10/20 = 0.5,
   * so the summary row carries (0.2 + 0.5) / 2 = 0.35. */
  std::vector<metrics_record> rows{
      make_record( "c1", "optimize", 0, 6, 4 ),  /* total 10 */
      make_record( "c1", "optimize", 1, 5, 3 ),  /* total 8 */
      make_record( "c2", "optimize", 0, 15, 5 ), /* total 20 */
      make_record( "c2", "optimize", 1, 7, 3 ),  /* total 10 */
  };

  auto const csv = render_report_csv( rows );
  auto const expected = std::string{ "benchmark,method,skip,buffers,splitters,total\n"
                                     "c1,optimize,0,6,4,10\n"
                                     "c1,optimize,1,5,3,8\n"
                                     "c2,optimize,0,15,5,20\n"
                                     "c2,optimize,1,7,3,10\n"
                                     "average_savings,optimize,1,,,0.3500\n" };
  CHECK( csv == expected );

  SUBCASE( "row order does not affect the output" )
  {
    std::mt19937 rng( 7 );
    for ( int i = 0; i < 5; ++i )
    {
      std::shuffle( rows.begin(), rows.end(), rng );
      CHECK( render_report_csv( rows ) == expected );
    }
  }
}

TEST_CASE( "report edge cases" )
{
  SUBCASE( "no records renders the header only" )
  {
    CHECK( render_report_csv( {} ) == "benchmark,method,skip,buffers,splitters,total\n" );
  }

  SUBCASE( "zero-cost baselines are left out of the average" )
  {
    std::vector<metrics_record> const rows{
        make_record( "free", "optimize", 0, 0, 0 ),
        make_record( "free", "optimize", 2, 0, 0 ),
        make_record( "busy", "optimize", 0, 8, 2 ), /* total 10 */
        make_record( "busy", "optimize", 2, 4, 1 ), /* total 5: savings 0.5 */
    };
    auto const csv = render_report_csv( rows );
    CHECK( csv.find( "average_savings,optimize,2,,,0.5000\n" ) != std::string::npos );
  }

  SUBCASE( "methods are averaged separately and negative savings survive" )
  {
    std::vector<metrics_record> const rows{
        make_record( "c", "chain_reduce", 0, 10, 0 ),
        make_record( "c", "chain_reduce", 1, 12, 0 ), /* savings -0.2 */
        make_record( "c", "optimize", 0, 10, 0 ),
        make_record( "c", "optimize", 1, 6, 0 ), /* savings 0.4 */
    };
    auto const csv = render_report_csv( rows );
    CHECK( csv.find( "average_savings,chain_reduce,1,,,-0.2000\n" ) != std::string::npos );
    CHECK( csv.find( "average_savings,optimize,1,,,0.4000\n" ) != std::string::npos );
  }

  SUBCASE( "skips without a matching base row produce no summary" )
  {
    std::vector<metrics_record> const rows{
        make_record( "c", "optimize", 1, 5, 0 ),
        make_record( "c", "optimize", 2, 4, 0 ),
    };
    auto const csv = render_report_csv( rows );
    CHECK( csv.find( "average_savings" ) == std::string::npos );
  }
}
