#include "lp_reference.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace aqfp::testing
{

namespace
{

constexpr double tol = 1e-7;

/*! \brief Dense Gaussian elimination; returns false when singular. */
bool solve_dense( std::vector<std::vector<double>>& a, std::vector<double>& rhs )
{
  size_t const k = rhs.size();
  for ( size_t col = 0; col < k; ++col )
  {
    size_t pivot = col;
    for ( size_t r = col + 1; r < k; ++r )
      if ( std::fabs( a[r][col] ) > std::fabs( a[pivot][col] ) )
        pivot = r;
    if ( std::fabs( a[pivot][col] ) < 1e-9 )
      return false;
    std::swap( a[pivot], a[col] );
    std::swap( rhs[pivot], rhs[col] );
    for ( size_t r = 0; r < k; ++r )
    {
      if ( r == col || a[r][col] == 0.0 )
        continue;
      double const f = a[r][col] / a[col][col];
      for ( size_t c = col; c < k; ++c )
        a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for ( size_t i = 0; i < k; ++i )
    rhs[i] /= a[i][i];
  return true;
}

bool point_feasible( linear_program const& lp, std::vector<double> const& x )
{
  for ( uint32_t j = 0; j < lp.num_variables(); ++j )
    if ( x[j] < lp.lower_bound( j ) - tol || x[j] > lp.upper_bound( j ) + tol )
      return false;
  for ( uint32_t i = 0; i < lp.num_constraints(); ++i )
  {
    auto const& row = lp.constraint( i );
    double act = 0.0;
    for ( auto const& [j, a] : row.terms )
      act += a * x[j];
    double const slack = row.rhs - act;
    double const scale = 1.0 + std::fabs( row.rhs );
    if ( row.sense == '<' && slack < -tol * scale )
      return false;
    if ( row.sense == '>' && slack > tol * scale )
      return false;
    if ( row.sense == '=' && std::fabs( slack ) > tol * scale )
      return false;
  }
  return true;
}

} // namespace

reference_result reference_solve( linear_program const& lp )
{
  uint32_t const n = lp.num_variables();
  uint32_t const m = lp.num_constraints();
  for ( uint32_t j = 0; j < n; ++j )
    if ( std::fabs( lp.lower_bound( j ) ) > 1e20 || std::fabs( lp.upper_bound( j ) ) > 1e20 )
      throw std::invalid_argument( "reference_solve requires finite variable boxes" );

  reference_result best;

  std::vector<uint32_t> rows_pick;
  std::vector<uint32_t> vars_pick;

  /* Iterate k = number of rows treated as equalities, then choose which k
   * variables stay free; all other variables are pinned to one of their two
   * bounds.  The k x k linear system determines the free variables. */
  auto try_point = [&]( std::vector<double> const& x ) {
    if ( !point_feasible( lp, x ) )
      return;
    double obj = 0.0;
    for ( uint32_t j = 0; j < n; ++j )
      obj += lp.objective_coeff( j ) * x[j];
    if ( !best.feasible || obj < best.objective )
    {
      best.feasible = true;
      best.objective = obj;
    }
  };

  std::vector<double> x( n );

  std::function<void( uint32_t )> enumerate_bounds_and_solve;

  uint32_t k = 0;
  std::vector<char> is_free;

  enumerate_bounds_and_solve = [&]( uint32_t j ) {
    if ( j == n )
    {
      if ( k == 0 )
      {
        try_point( x );
        return;
      }
      /* Solve the k x k system of the selected rows over the free vars. */
      std::vector<std::vector<double>> a( k, std::vector<double>( k, 0.0 ) );
      std::vector<double> rhs( k, 0.0 );
      std::vector<uint32_t> free_index( n, 0 );
      {
        uint32_t f = 0;
        for ( uint32_t v = 0; v < n; ++v )
          if ( is_free[v] )
            free_index[v] = f++;
      }
      for ( uint32_t r = 0; r < k; ++r )
      {
        auto const& row = lp.constraint( rows_pick[r] );
        rhs[r] = row.rhs;
        for ( auto const& [v, c] : row.terms )
        {
          if ( is_free[v] )
            a[r][free_index[v]] += c;
          else
            rhs[r] -= c * x[v];
        }
      }
      if ( !solve_dense( a, rhs ) )
        return;
      for ( uint32_t v = 0; v < n; ++v )
        if ( is_free[v] )
          x[v] = rhs[free_index[v]];
      try_point( x );
      return;
    }
    if ( is_free[j] )
    {
      enumerate_bounds_and_solve( j + 1 );
      return;
    }
    x[j] = lp.lower_bound( j );
    enumerate_bounds_and_solve( j + 1 );
    if ( lp.upper_bound( j ) != lp.lower_bound( j ) )
    {
      x[j] = lp.upper_bound( j );
      enumerate_bounds_and_solve( j + 1 );
    }
  };

  std::function<void( uint32_t, uint32_t )> choose_free_vars = [&]( uint32_t start, uint32_t left ) {
    if ( left == 0 )
    {
      enumerate_bounds_and_solve( 0 );
      return;
    }
    for ( uint32_t v = start; v + left <= n; ++v )
    {
      is_free[v] = 1;
      choose_free_vars( v + 1, left - 1 );
      is_free[v] = 0;
    }
  };

  std::function<void( uint32_t, uint32_t )> choose_rows = [&]( uint32_t start, uint32_t left ) {
    if ( left == 0 )
    {
      is_free.assign( n, 0 );
      choose_free_vars( 0, k );
      return;
    }
    for ( uint32_t r = start; r + left <= m; ++r )
    {
      rows_pick.push_back( r );
      choose_rows( r + 1, left - 1 );
      rows_pick.pop_back();
    }
  };

  for ( k = 0; k <= std::min( n, m ); ++k )
  {
    rows_pick.clear();
    choose_rows( 0, k );
  }
  return best;
}

int point_violations( linear_program const& lp, std::vector<double> const& x, double tol )
{
  if ( x.size() != lp.num_variables() )
    return static_cast<int>( lp.num_constraints() ) + 1;
  int bad = 0;
  for ( uint32_t j = 0; j < lp.num_variables(); ++j )
  {
    if ( lp.lower_bound( j ) > -lp_inf / 2 && x[j] < lp.lower_bound( j ) - tol )
      ++bad;
    if ( lp.upper_bound( j ) < lp_inf / 2 && x[j] > lp.upper_bound( j ) + tol )
      ++bad;
  }
  for ( uint32_t i = 0; i < lp.num_constraints(); ++i )
  {
    auto const& row = lp.constraint( i );
    double act = 0.0;
    for ( auto const& [j, c] : row.terms )
      act += c * x[j];
    double const slack = act - row.rhs;
    if ( row.sense == '>' && slack < -tol )
      ++bad;
    else if ( row.sense == '<' && slack > tol )
      ++bad;
    else if ( row.sense == '=' && std::fabs( slack ) > tol )
      ++bad;
  }
  return bad;
}

} // namespace aqfp::testing
