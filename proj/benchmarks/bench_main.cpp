#include <benchmark/benchmark.h>

#include "random_circuits.hpp"

#include <aqfp/netlist.hpp>

static void BM_multiplier_generation( benchmark::State& state )
{
  for ( auto _ : state )
  {
    auto net = aqfp::testing::multiplier_netlist( static_cast<unsigned>( state.range( 0 ) ) );
    benchmark::DoNotOptimize( net.num_nodes() );
  }
}
BENCHMARK( BM_multiplier_generation )->Arg( 8 )->Arg( 18 );

BENCHMARK_MAIN();
