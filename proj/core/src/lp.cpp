#include "aqfp/lp.hpp"

#include "aqfp/logging.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace aqfp
{

namespace
{

bool finite_bound( double v )
{
  return std::fabs( v ) < lp_inf / 2;
}

} // namespace

uint32_t linear_program::add_variable( double lb, double ub, double objective, bool integral, std::string name )
{
  lb_.push_back( lb );
  ub_.push_back( ub );
  obj_.push_back( objective );
  integral_.push_back( integral ? 1 : 0 );
  names_.push_back( std::move( name ) );
  return num_variables() - 1;
}

void linear_program::add_constraint( std::vector<std::pair<uint32_t, double>> terms, char sense, double rhs )
{
  if ( sense != '<' && sense != '>' && sense != '=' )
    throw std::invalid_argument( "constraint sense must be one of '<', '>', '='" );
  for ( auto const& [j, a] : terms )
  {
    if ( j >= num_variables() )
      throw std::invalid_argument( "constraint references unknown variable" );
    (void)a;
  }
  /* Merge duplicate indices so the solver sees clean columns. */
  std::sort( terms.begin(), terms.end(), []( auto const& a, auto const& b ) { return a.first < b.first; } );
  std::vector<std::pair<uint32_t, double>> merged;
  for ( auto const& t : terms )
  {
    if ( !merged.empty() && merged.back().first == t.first )
      merged.back().second += t.second;
    else
      merged.push_back( t );
  }
  nonzeros_ += merged.size();
  rows_.push_back( row{ std::move( merged ), sense, rhs } );
  rhs_.push_back( rhs );
}

std::string linear_program::variable_name( uint32_t j ) const
{
  return names_[j].empty() ? "x" + std::to_string( j ) : names_[j];
}

void write_lp_format( linear_program const& lp, std::ostream& os )
{
  auto num = []( double v ) {
    char buf[40];
    std::snprintf( buf, sizeof buf, "%.12g", v );
    return std::string( buf );
  };
  os << "Minimize\n obj:";
  for ( uint32_t j = 0; j < lp.num_variables(); ++j )
  {
    double const c = lp.objective_coeff( j );
    if ( c == 0.0 )
      continue;
    os << ( c >= 0 ? " + " : " - " ) << num( std::fabs( c ) ) << " " << lp.variable_name( j );
  }
  os << "\nSubject To\n";
  for ( uint32_t i = 0; i < lp.num_constraints(); ++i )
  {
    auto const& row = lp.constraint( i );
    os << " c" << i << ":";
    for ( auto const& [j, a] : row.terms )
      os << ( a >= 0 ? " + " : " - " ) << num( std::fabs( a ) ) << " " << lp.variable_name( j );
    os << " " << ( row.sense == '<' ? "<=" : row.sense == '>' ? ">=" : "=" ) << " " << num( row.rhs ) << "\n";
  }
  os << "Bounds\n";
  for ( uint32_t j = 0; j < lp.num_variables(); ++j )
  {
    double const lb = lp.lower_bound( j ), ub = lp.upper_bound( j );
    bool const fl = finite_bound( lb ), fu = finite_bound( ub );
    os << " ";
    if ( !fl && !fu )
      os << lp.variable_name( j ) << " free";
    else if ( fl && fu )
      os << num( lb ) << " <= " << lp.variable_name( j ) << " <= " << num( ub );
    else if ( fl )
      os << lp.variable_name( j ) << " >= " << num( lb );
    else
      os << lp.variable_name( j ) << " <= " << num( ub );
    os << "\n";
  }
  bool any_int = false;
  for ( uint32_t j = 0; j < lp.num_variables(); ++j )
    if ( lp.is_integral( j ) )
    {
      if ( !any_int )
        os << "General\n";
      any_int = true;
      os << " " << lp.variable_name( j ) << "\n";
    }
  os << "End\n";
}

namespace
{

/*! \brief One product-form update: basis column at `row` was replaced and the
 * incoming column's basis representation was `w` (pivot = w[row]). */
struct eta_op
{
  uint32_t row;
  double pivot;
  std::vector<std::pair<uint32_t, double>> others; /*!< (i, w_i) for i != row */
};

enum class vst : uint8_t
{
  basic,
  at_lb,
  at_ub,
  free0,   /*!< free variable resting at zero */
  anchored /*!< nonbasic resting at xval_, strictly between its bounds */
};

class simplex
{
public:
  simplex( linear_program const& lp, lp_options const& opt ) : opt_( opt )
  {
    m_ = lp.num_constraints();
    n_struct_ = lp.num_variables();
    cols_.resize( n_struct_ + m_ );
    lb_.resize( n_struct_ + m_ );
    ub_.resize( n_struct_ + m_ );
    cost_.assign( n_struct_ + m_, 0.0 );

    for ( uint32_t j = 0; j < n_struct_; ++j )
    {
      lb_[j] = lp.lower_bound( j );
      ub_[j] = lp.upper_bound( j );
      cost_[j] = lp.objective_coeff( j );
    }
    b_.resize( m_ );
    for ( uint32_t i = 0; i < m_; ++i )
    {
      auto const& row = lp.constraint( i );
      b_[i] = row.rhs;
      for ( auto const& [j, a] : row.terms )
        if ( a != 0.0 )
          cols_[j].push_back( { i, a } );
      uint32_t const s = n_struct_ + i;
      cols_[s].push_back( { i, 1.0 } );
      switch ( row.sense )
      {
      case '<':
        lb_[s] = 0.0;
        ub_[s] = lp_inf;
        break;
      case '>':
        lb_[s] = -lp_inf;
        ub_[s] = 0.0;
        break;
      default:
        lb_[s] = 0.0;
        ub_[s] = 0.0;
        break;
      }
    }
    pivot_limit_ = opt_.pivot_limit ? opt_.pivot_limit
                                    : std::max<uint64_t>( 20000, 10ull * ( m_ + n_struct_ ) );
    wstamp_.assign( m_, 0 );
    for ( auto const& col : cols_ )
      base_nnz_ += col.size();
  }

  lp_result run()
  {
    lp_result out;
    for ( uint32_t j = 0; j < n_struct_ + m_; ++j )
      if ( lb_[j] > ub_[j] + opt_.feas_tol )
      {
        out.status = lp_status::infeasible;
        return out;
      }

    /* Nonbasic start: every variable rests at a finite bound (or 0 if free). */
    state_.assign( cols_.size(), vst::at_lb );
    xval_.assign( cols_.size(), 0.0 );
    for ( uint32_t j = 0; j < cols_.size(); ++j )
    {
      if ( finite_bound( lb_[j] ) )
      {
        state_[j] = vst::at_lb;
        xval_[j] = lb_[j];
      }
      else if ( finite_bound( ub_[j] ) )
      {
        state_[j] = vst::at_ub;
        xval_[j] = ub_[j];
      }
      else
      {
        state_[j] = vst::free0;
        xval_[j] = 0.0;
      }
    }

    /* Caller-provided anchors override the defaults; values land inside the
     * bounds and interior points rest as `anchored` nonbasics. */
    if ( opt_.start.size() == n_struct_ )
    {
      for ( uint32_t j = 0; j < n_struct_; ++j )
      {
        double v = opt_.start[j];
        if ( !std::isfinite( v ) )
          continue;
        if ( finite_bound( lb_[j] ) )
          v = std::max( v, lb_[j] );
        if ( finite_bound( ub_[j] ) )
          v = std::min( v, ub_[j] );
        if ( finite_bound( lb_[j] ) && v <= lb_[j] )
        {
          state_[j] = vst::at_lb;
          xval_[j] = lb_[j];
        }
        else if ( finite_bound( ub_[j] ) && v >= ub_[j] )
        {
          state_[j] = vst::at_ub;
          xval_[j] = ub_[j];
        }
        else
        {
          state_[j] = vst::anchored;
          xval_[j] = v;
        }
      }
    }

    /* Initial basis: the slack of each row, or an artificial when the slack
     * cannot hold the residual within its own bounds. */
    basis_.assign( m_, 0 );
    xb_.assign( m_, 0.0 );
    std::vector<double> residual = b_;
    for ( uint32_t j = 0; j < n_struct_; ++j )
      if ( xval_[j] != 0.0 )
        for ( auto const& [i, a] : cols_[j] )
          residual[i] -= a * xval_[j];

    uint32_t const art_start = static_cast<uint32_t>( cols_.size() );
    for ( uint32_t i = 0; i < m_; ++i )
    {
      uint32_t const s = n_struct_ + i;
      double const r = residual[i];
      if ( r >= lb_[s] - opt_.feas_tol && r <= ub_[s] + opt_.feas_tol )
      {
        basis_[i] = s;
        state_[s] = vst::basic;
        xb_[i] = r;
        continue;
      }
      double const anchor = r > ub_[s] ? ub_[s] : lb_[s];
      state_[s] = anchor == ub_[s] ? vst::at_ub : vst::at_lb;
      xval_[s] = anchor;
      double const gap = r - anchor;
      uint32_t const a = static_cast<uint32_t>( cols_.size() );
      cols_.push_back( { { i, gap > 0 ? 1.0 : -1.0 } } );
      lb_.push_back( 0.0 );
      ub_.push_back( lp_inf );
      cost_.push_back( 0.0 );
      state_.push_back( vst::basic );
      xval_.push_back( 0.0 );
      basis_[i] = a;
      xb_[i] = std::fabs( gap );
    }
    art_start_ = art_start;


    if ( !rebuild() )
    {
      out.status = lp_status::resource_limit;
      return out;
    }

    if ( art_start_ < cols_.size() )
    {
      /* Phase 1: minimize the sum of artificial values. */
      phase1_ = true;
      lp_status const st = iterate();
      if ( st == lp_status::resource_limit )
      {
        out.status = st;
        out.pivots = pivots_;
        return out;
      }
      /* Nonbasic artificials rest at zero, so only basic ones contribute. */
      double infeas = 0.0;
      for ( uint32_t r = 0; r < m_; ++r )
        if ( basis_[r] >= art_start_ )
          infeas += std::fabs( xb_[r] );
      double bscale = 1.0;
      for ( double const v : b_ )
        bscale = std::max( bscale, std::fabs( v ) );
      if ( infeas > opt_.feas_tol * bscale * 10 )
      {
        out.status = lp_status::infeasible;
        out.pivots = pivots_;
        return out;
      }
      drive_out_artificials();
      phase1_ = false;
    }

    lp_status const st = iterate();
    out.status = st;
    out.pivots = pivots_;
    if ( st != lp_status::optimal )
      return out;

    extract( out );

    /* Post-solve audit: row activity and bound satisfaction. */
    if ( !audit( out ) )
    {
      rebuild();
      recompute_xb();
      extract( out );
      if ( !audit( out ) )
      {
        log_warn() << "lp: solution failed the numerical audit; reporting resource_limit";
        out.status = lp_status::resource_limit;
        out.x.clear();
      }
    }
    return out;
  }

private:
  [[nodiscard]] double active_cost( uint32_t j ) const
  {
    if ( phase1_ )
      return j >= art_start_ ? 1.0 : 0.0;
    return j < cost_.size() ? cost_[j] : 0.0;
  }

  void ftran( std::vector<double>& y ) const
  {
    for ( auto const& e : etas_ )
    {
      double const yr = y[e.row] / e.pivot;
      if ( yr != 0.0 )
        for ( auto const& [i, wi] : e.others )
          y[i] -= wi * yr;
      y[e.row] = yr;
    }
  }

  /*! \brief ftran that also tracks which entries of `y` were touched.
   *
   * `nz` must already list the nonzero seeds, each stamped with `gen` in
   * `stamp`.  On return `nz` covers every possibly-nonzero entry (some may
   * have cancelled to exact zero); the caller zeroes them before reuse.
   */
  void ftran_sparse( std::vector<double>& y, std::vector<uint32_t>& nz,
                     std::vector<uint64_t>& stamp, uint64_t gen ) const
  {
    for ( auto const& e : etas_ )
    {
      double const yin = y[e.row];
      if ( yin == 0.0 )
        continue;
      double const yr = yin / e.pivot;
      y[e.row] = yr;
      for ( auto const& [i, wi] : e.others )
      {
        if ( stamp[i] != gen )
        {
          stamp[i] = gen;
          nz.push_back( i );
          y[i] = 0.0;
        }
        y[i] -= wi * yr;
      }
    }
  }

  void btran( std::vector<double>& y ) const
  {
    for ( auto it = etas_.rbegin(); it != etas_.rend(); ++it )
    {
      double t = y[it->row];
      for ( auto const& [i, wi] : it->others )
        t -= wi * y[i];
      y[it->row] = t / it->pivot;
    }
  }

  /*! \brief Refactorizes the basis from scratch (sets a fresh eta sequence). */
  bool rebuild()
  {
    etas_.clear();
    eta_nnz_ = 0;
    std::vector<char> pivoted( m_, 0 );
    std::vector<uint32_t> later;
    std::vector<uint32_t> cols = basis_;

    /* Singleton columns pivot without fill; order the rest by sparsity. */
    for ( uint32_t const c : cols )
    {
      if ( cols_[c].size() == 1 )
      {
        uint32_t const r = cols_[c].front().first;
        if ( pivoted[r] )
          return false;
        pivoted[r] = 1;
        etas_.push_back( eta_op{ r, cols_[c].front().second, {} } );
        eta_nnz_ += 1;
        basis_[r] = c;
      }
      else
        later.push_back( c );
    }
    std::stable_sort( later.begin(), later.end(),
                      [&]( uint32_t a, uint32_t b ) { return cols_[a].size() < cols_[b].size(); } );
    std::vector<double> w( m_, 0.0 );
    for ( uint32_t const c : later )
    {
      wnz_.clear();
      ++wgen_;
      for ( auto const& [i, a] : cols_[c] )
      {
        w[i] = a;
        wstamp_[i] = wgen_;
        wnz_.push_back( i );
      }
      ftran_sparse( w, wnz_, wstamp_, wgen_ );
      uint32_t best = m_;
      double best_mag = 0.0;
      for ( uint32_t const r : wnz_ )
        if ( !pivoted[r] && std::fabs( w[r] ) > best_mag )
        {
          best = r;
          best_mag = std::fabs( w[r] );
        }
      if ( best == m_ || best_mag < 1e-10 )
      {
        for ( uint32_t const r : wnz_ )
          w[r] = 0.0;
        return false;
      }
      eta_op e;
      e.row = best;
      e.pivot = w[best];
      for ( uint32_t const r : wnz_ )
        if ( r != best && w[r] != 0.0 )
          e.others.push_back( { r, w[r] } );
      eta_nnz_ += e.others.size() + 1;
      etas_.push_back( std::move( e ) );
      pivoted[best] = 1;
      basis_[best] = c;
      for ( uint32_t const r : wnz_ )
        w[r] = 0.0;
    }
    return true;
  }

  /*! \brief Recomputes basic values from nonbasic anchors (accuracy reset). */
  void recompute_xb()
  {
    std::vector<double> v = b_;
    for ( uint32_t j = 0; j < cols_.size(); ++j )
      if ( state_[j] != vst::basic && xval_[j] != 0.0 )
        for ( auto const& [i, a] : cols_[j] )
          v[i] -= a * xval_[j];
    ftran( v );
    xb_ = v;
  }

  lp_status iterate()
  {
    uint32_t degen_streak = 0;
    bool bland = false;
    std::vector<double> y( m_ ), w( m_, 0.0 );

    for ( ;; )
    {
      if ( pivots_ >= pivot_limit_ )
        return lp_status::resource_limit;
      if ( etas_.size() > 512 || eta_nnz_ > 8ull * m_ + 2ull * base_nnz_ )
      {
        if ( !rebuild() )
          return lp_status::resource_limit;
        recompute_xb();
      }

      /* Reduced costs: d_j = c_j - y . A_j with y = c_B B^-1. */
      std::fill( y.begin(), y.end(), 0.0 );
      for ( uint32_t r = 0; r < m_; ++r )
        y[r] = active_cost( basis_[r] );
      btran( y );

      auto reduced = [&]( uint32_t j ) {
        double d = active_cost( j );
        for ( auto const& [i, a] : cols_[j] )
          d -= a * y[i];
        return d;
      };
      auto candidate_dir = [&]( uint32_t j, double d ) -> int {
        double const tol = opt_.opt_tol * ( 1.0 + std::fabs( active_cost( j ) ) );
        switch ( state_[j] )
        {
        case vst::at_lb:
          return d < -tol ? +1 : 0;
        case vst::at_ub:
          return d > tol ? -1 : 0;
        case vst::free0:
        case vst::anchored:
          return std::fabs( d ) > tol ? ( d < 0 ? +1 : -1 ) : 0;
        default:
          return 0;
        }
      };

      uint32_t const ncols = static_cast<uint32_t>( cols_.size() );
      uint32_t entering = ncols;
      int dir = 0;
      double best_score = 0.0;
      if ( bland )
      {
        /* Anti-cycling: lowest improving index, full deterministic scan. */
        for ( uint32_t j = 0; j < ncols; ++j )
        {
          if ( state_[j] == vst::basic || lb_[j] == ub_[j] )
            continue;
          int const cd = candidate_dir( j, reduced( j ) );
          if ( cd )
          {
            entering = j;
            dir = cd;
            break;
          }
        }
      }
      else
      {
        /* Partial pricing: wrap-around windows; the first window holding any
         * improving column supplies its best-scoring one. */
        uint32_t const window = std::max<uint32_t>( 512, ncols / 8 );
        uint32_t j = price_cursor_ < ncols ? price_cursor_ : 0;
        uint32_t scanned = 0;
        while ( scanned < ncols )
        {
          for ( uint32_t step = 0; step < window && scanned < ncols; ++step, ++scanned )
          {
            uint32_t const cur = j;
            j = j + 1 == ncols ? 0 : j + 1;
            if ( state_[cur] == vst::basic || lb_[cur] == ub_[cur] )
              continue;
            double const d = reduced( cur );
            int const cd = candidate_dir( cur, d );
            if ( !cd )
              continue;
            if ( std::fabs( d ) > best_score )
            {
              best_score = std::fabs( d );
              entering = cur;
              dir = cd;
            }
          }
          if ( entering != ncols )
          {
            price_cursor_ = j;
            break;
          }
        }
      }
      if ( entering == ncols )
        return lp_status::optimal;

      wnz_.clear();
      ++wgen_;
      for ( auto const& [i, a] : cols_[entering] )
      {
        w[i] = a;
        wstamp_[i] = wgen_;
        wnz_.push_back( i );
      }
      ftran_sparse( w, wnz_, wstamp_, wgen_ );

      /* Bounded ratio test: the entering variable moves by t in direction dir. */
      double t = lp_inf;
      bool own_limit = false;
      {
        double const own_bound = dir > 0 ? ub_[entering] : lb_[entering];
        if ( finite_bound( own_bound ) )
        {
          t = dir > 0 ? own_bound - xval_[entering] : xval_[entering] - own_bound;
          own_limit = true;
        }
      }
      uint32_t leave_row = m_;
      for ( uint32_t const r : wnz_ )
      {
        if ( std::fabs( w[r] ) <= 1e-9 )
          continue;
        double const rate = -dir * w[r];
        uint32_t const bc = basis_[r];
        double tr;
        if ( rate > 0 )
        {
          if ( !finite_bound( ub_[bc] ) )
            continue;
          tr = ( ub_[bc] - xb_[r] ) / rate;
        }
        else
        {
          if ( !finite_bound( lb_[bc] ) )
            continue;
          tr = ( lb_[bc] - xb_[r] ) / rate;
        }
        if ( tr < 0 )
          tr = 0;
        bool take = false;
        if ( tr < t - 1e-9 )
          take = true;
        else if ( tr <= t + 1e-9 && leave_row != m_ )
        {
          if ( bland )
            take = basis_[r] < basis_[leave_row];
          else
            take = std::fabs( w[r] ) > std::fabs( w[leave_row] );
        }
        else if ( tr <= t + 1e-9 && leave_row == m_ && own_limit )
        {
          take = true; /* row limit preferred over a pure bound flip at equal t */
        }
        if ( take )
        {
          t = std::min( t, tr );
          leave_row = r;
          own_limit = false;
        }
      }

      if ( !finite_bound( t ) && leave_row == m_ )
        return lp_status::unbounded;

      if ( t < 1e-9 )
      {
        if ( ++degen_streak > 200 )
          bland = true;
      }
      else
      {
        degen_streak = 0;
        bland = false;
      }

      if ( leave_row == m_ )
      {
        /* Bound flip: the entering variable runs to its bound ahead. */
        for ( uint32_t const r : wnz_ )
          if ( w[r] != 0.0 )
            xb_[r] -= dir * t * w[r];
        state_[entering] = dir > 0 ? vst::at_ub : vst::at_lb;
        xval_[entering] = dir > 0 ? ub_[entering] : lb_[entering];
        for ( uint32_t const r : wnz_ )
          w[r] = 0.0;
        ++pivots_;
        continue;
      }

      double const enter_val = xval_[entering] + dir * t;
      for ( uint32_t const r : wnz_ )
        if ( w[r] != 0.0 )
          xb_[r] -= dir * t * w[r];

      uint32_t const leaving = basis_[leave_row];
      double const rate = -dir * w[leave_row];
      if ( rate > 0 )
      {
        state_[leaving] = vst::at_ub;
        xval_[leaving] = ub_[leaving];
      }
      else
      {
        state_[leaving] = vst::at_lb;
        xval_[leaving] = lb_[leaving];
      }

      eta_op e;
      e.row = leave_row;
      e.pivot = w[leave_row];
      e.others.reserve( wnz_.size() );
      for ( uint32_t const r : wnz_ )
        if ( r != leave_row && w[r] != 0.0 )
          e.others.push_back( { r, w[r] } );
      eta_nnz_ += e.others.size() + 1;
      etas_.push_back( std::move( e ) );
      for ( uint32_t const r : wnz_ )
        w[r] = 0.0;

      basis_[leave_row] = entering;
      state_[entering] = vst::basic;
      xb_[leave_row] = enter_val;
      xval_[entering] = 0.0;
      ++pivots_;
    }
  }

  /*! \brief After phase 1, pivots zero-valued artificials out where possible. */
  void drive_out_artificials()
  {
    std::vector<double> rho( m_ ), w( m_ );
    for ( uint32_t r = 0; r < m_; ++r )
    {
      if ( basis_[r] < art_start_ )
        continue;
      std::fill( rho.begin(), rho.end(), 0.0 );
      rho[r] = 1.0;
      btran( rho );
      uint32_t repl = art_start_;
      for ( uint32_t j = 0; j < art_start_; ++j )
      {
        if ( state_[j] == vst::basic )
          continue;
        double alpha = 0.0;
        for ( auto const& [i, a] : cols_[j] )
          alpha += a * rho[i];
        if ( std::fabs( alpha ) > 1e-7 )
        {
          repl = j;
          break;
        }
      }
      if ( repl == art_start_ )
      {
        /* Redundant row: keep the artificial pinned at zero. */
        uint32_t const a = basis_[r];
        lb_[a] = ub_[a] = 0.0;
        continue;
      }
      std::fill( w.begin(), w.end(), 0.0 );
      for ( auto const& [i, a] : cols_[repl] )
        w[i] = a;
      ftran( w );
      if ( std::fabs( w[r] ) < 1e-10 )
      {
        /* Numerically unusable replacement: pin the artificial instead. */
        uint32_t const a = basis_[r];
        lb_[a] = ub_[a] = 0.0;
        continue;
      }
      eta_op e;
      e.row = r;
      e.pivot = w[r];
      for ( uint32_t i = 0; i < m_; ++i )
        if ( i != r && w[i] != 0.0 )
          e.others.push_back( { i, w[i] } );
      eta_nnz_ += e.others.size() + 1;
      etas_.push_back( std::move( e ) );
      uint32_t const art = basis_[r];
      state_[art] = vst::at_lb;
      xval_[art] = 0.0;
      lb_[art] = ub_[art] = 0.0;
      basis_[r] = repl;
      state_[repl] = vst::basic;
      xb_[r] = xval_[repl];
      xval_[repl] = 0.0;
    }
    /* Pin every remaining artificial so phase 2 cannot move it. */
    for ( uint32_t j = art_start_; j < cols_.size(); ++j )
    {
      lb_[j] = 0.0;
      ub_[j] = 0.0;
      if ( state_[j] != vst::basic )
      {
        state_[j] = vst::at_lb;
        xval_[j] = 0.0;
      }
    }
  }

  void extract( lp_result& out )
  {
    out.x.assign( n_struct_, 0.0 );
    for ( uint32_t j = 0; j < n_struct_; ++j )
      if ( state_[j] != vst::basic )
        out.x[j] = xval_[j];
    for ( uint32_t r = 0; r < m_; ++r )
      if ( basis_[r] < n_struct_ )
        out.x[basis_[r]] = xb_[r];
    for ( uint32_t j = 0; j < n_struct_; ++j )
    {
      if ( finite_bound( lb_[j] ) )
        out.x[j] = std::max( out.x[j], lb_[j] );
      if ( finite_bound( ub_[j] ) )
        out.x[j] = std::min( out.x[j], ub_[j] );
    }
    out.objective = 0.0;
    for ( uint32_t j = 0; j < n_struct_; ++j )
      out.objective += cost_[j] * out.x[j];
  }

  [[nodiscard]] bool audit( lp_result const& out ) const
  {
    /* Row activity is re-derived from scratch; the slack absorbs the rest and
     * must fit inside its own bounds for the row to hold. */
    std::vector<double> activity( m_, 0.0 );
    for ( uint32_t j = 0; j < n_struct_; ++j )
      if ( out.x[j] != 0.0 )
        for ( auto const& [i, a] : cols_[j] )
          activity[i] += a * out.x[j];
    for ( uint32_t i = 0; i < m_; ++i )
    {
      uint32_t const s = n_struct_ + i;
      double const tol = opt_.feas_tol * ( 1.0 + std::fabs( b_[i] ) ) * 10;
      double const slack_needed = b_[i] - activity[i];
      if ( slack_needed < lb_[s] - tol || slack_needed > ub_[s] + tol )
        return false;
    }
    return true;
  }

  lp_options opt_;
  uint32_t m_ = 0, n_struct_ = 0, art_start_ = 0;
  bool phase1_ = false;
  std::vector<std::vector<std::pair<uint32_t, double>>> cols_;
  std::vector<double> lb_, ub_, cost_, b_;
  std::vector<vst> state_;
  std::vector<double> xval_, xb_;
  std::vector<uint32_t> basis_;
  std::vector<eta_op> etas_;
  uint64_t pivots_ = 0, pivot_limit_ = 0;
  uint64_t eta_nnz_ = 0, base_nnz_ = 0;

  /* Scratch for sparse pivot columns: stamped nonzero tracking. */
  std::vector<uint64_t> wstamp_;
  std::vector<uint32_t> wnz_;
  uint64_t wgen_ = 0;
  uint32_t price_cursor_ = 0;
};

} // namespace

lp_result solve_lp( linear_program const& lp, lp_options const& options )
{
  if ( lp.num_constraints() == 0 )
  {
    /* No rows: every variable independently sits at its cheapest bound. */
    lp_result out;
    out.x.assign( lp.num_variables(), 0.0 );
    for ( uint32_t j = 0; j < lp.num_variables(); ++j )
    {
      double const c = lp.objective_coeff( j );
      double const lb = lp.lower_bound( j ), ub = lp.upper_bound( j );
      if ( lb > ub )
      {
        out.status = lp_status::infeasible;
        out.x.clear();
        return out;
      }
      if ( c > 0 )
      {
        if ( !finite_bound( lb ) )
        {
          out.status = lp_status::unbounded;
          out.x.clear();
          return out;
        }
        out.x[j] = lb;
      }
      else if ( c < 0 )
      {
        if ( !finite_bound( ub ) )
        {
          out.status = lp_status::unbounded;
          out.x.clear();
          return out;
        }
        out.x[j] = ub;
      }
      else
        out.x[j] = finite_bound( lb ) ? lb : ( finite_bound( ub ) ? ub : 0.0 );
      out.objective += c * out.x[j];
    }
    out.status = lp_status::optimal;
    return out;
  }
  simplex s( lp, options );
  return s.run();
}

lp_result solve_ilp_small( linear_program const& lp, ilp_options const& options )
{
  linear_program work = lp;
  lp_result incumbent;
  incumbent.status = lp_status::infeasible;
  double best_obj = std::numeric_limits<double>::infinity();
  uint64_t nodes = 0;
  bool aborted = false;
  bool unbounded = false;

  std::function<void()> dfs = [&]() {
    if ( aborted || unbounded )
      return;
    if ( ++nodes > options.node_limit )
    {
      aborted = true;
      return;
    }
    lp_result const rel = solve_lp( work, options.lp );
    if ( rel.status == lp_status::resource_limit )
    {
      aborted = true;
      return;
    }
    if ( rel.status == lp_status::unbounded )
    {
      unbounded = true;
      return;
    }
    if ( rel.status != lp_status::optimal )
      return;
    if ( rel.objective >= best_obj - 1e-9 )
      return;

    uint32_t branch = work.num_variables();
    for ( uint32_t j = 0; j < work.num_variables(); ++j )
      if ( work.is_integral( j ) && std::fabs( rel.x[j] - std::round( rel.x[j] ) ) > 1e-6 )
      {
        branch = j;
        break;
      }
    if ( branch == work.num_variables() )
    {
      incumbent = rel;
      for ( uint32_t j = 0; j < work.num_variables(); ++j )
        if ( work.is_integral( j ) )
          incumbent.x[j] = std::round( incumbent.x[j] );
      incumbent.objective = 0.0;
      for ( uint32_t j = 0; j < work.num_variables(); ++j )
        incumbent.objective += work.objective_coeff( j ) * incumbent.x[j];
      best_obj = incumbent.objective;
      return;
    }

    double const saved_lb = work.lower_bound( branch );
    double const saved_ub = work.upper_bound( branch );
    double const split = std::floor( rel.x[branch] + 1e-9 );
    if ( split >= saved_lb - 1e-9 )
    {
      work.set_bounds( branch, saved_lb, split );
      dfs();
    }
    if ( split + 1 <= saved_ub + 1e-9 )
    {
      work.set_bounds( branch, split + 1, saved_ub );
      dfs();
    }
    work.set_bounds( branch, saved_lb, saved_ub );
  };

  dfs();

  if ( unbounded )
  {
    incumbent = lp_result{};
    incumbent.status = lp_status::unbounded;
    return incumbent;
  }
  if ( aborted )
  {
    incumbent.status = lp_status::resource_limit;
    return incumbent;
  }
  if ( incumbent.status != lp_status::infeasible )
    incumbent.status = lp_status::optimal;
  return incumbent;
}

} // namespace aqfp
