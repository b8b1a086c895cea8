#include "aqfp/splitter_tree.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace aqfp
{

int32_t leaf_connection_cost( int32_t delta, int32_t span )
{
  if ( delta < 0 || span <= 0 )
    throw std::invalid_argument( "leaf_connection_cost: need delta >= 0 and span >= 1" );
  return delta / span;
}

namespace
{

/*! \brief Sum composition for sibling plans; charged maxima do not add. */
cost_tuple combine( cost_tuple const& a, cost_tuple const& b )
{
  if ( a.is_infeasible() || b.is_infeasible() )
    return cost_tuple::infeasible();
  return cost_tuple{ std::max( a.max_extra, b.max_extra ), a.total_extra + b.total_extra,
                     a.bs_count + b.bs_count };
}

/*! \brief Order used while filling the range tables: additive components only.
 *
 * Minimizing (total, nodes) is exchange-stable under addition, so it is safe
 * inside the tables; the charged maximum is controlled by the outer cap loop
 * instead (it does not compose additively and must not steer choices here).
 */
bool fill_better( cost_tuple const& a, cost_tuple const& b )
{
  if ( a.total_extra != b.total_extra )
    return a.total_extra < b.total_extra;
  return a.bs_count < b.bs_count;
}

int32_t ceil_log( int32_t base, int32_t value )
{
  int32_t k = 0;
  int64_t power = 1;
  while ( power < value )
  {
    power *= base;
    ++k;
  }
  return k;
}

/*! \brief Attaches one consumer below depth `d`: a buffer chain when the
 *  consumer sits deeper than the wire, a postponement record otherwise. */
void emit_leaf( splitter_tree& out, fanout_leaf const& f, int d, int parent, int span )
{
  if ( d <= f.delay )
  {
    int32_t const count = leaf_connection_cost( f.delay - d, span );
    int attach = parent;
    for ( int32_t i = 1; i <= count; ++i )
    {
      out.nodes.push_back( { false, d + i * span, attach } );
      attach = static_cast<int>( out.nodes.size() ) - 1;
    }
    out.leaves.push_back( { f.node, attach, 0 } );
  }
  else
  {
    out.leaves.push_back( { f.node, parent, d - f.delay } );
  }
}

} // namespace

splitter_dp::splitter_dp( std::vector<fanout_leaf> leaves, int max_fanout, int span, dp_mode mode )
    : leaves_( std::move( leaves ) ), max_fanout_( max_fanout ), span_( span ), mode_( mode )
{
  if ( leaves_.empty() )
    throw std::invalid_argument( "splitter_dp: at least one consumer required" );
  if ( max_fanout_ < 2 || span_ < 1 )
    throw std::invalid_argument( "splitter_dp: need max_fanout >= 2 and span >= 1" );
  for ( auto const& f : leaves_ )
    if ( f.delay < 0 || f.slack < 0 )
      throw std::invalid_argument( "splitter_dp: negative delay or slack" );

  /* Due-date order: a consumer attached at depth p is charged
   * max(0, p - (delay + slack)), so delay + slack is its due date; delay
   * breaks ties so consumers with similar buffer-chain needs sit together.
   * With all-zero slack this is plain delay order. */
  std::sort( leaves_.begin(), leaves_.end(), []( fanout_leaf const& a, fanout_leaf const& b ) {
    if ( a.delay + a.slack != b.delay + b.slack )
      return a.delay + a.slack < b.delay + b.slack;
    if ( a.delay != b.delay )
      return a.delay < b.delay;
    return a.node < b.node;
  } );

  int const n = num_leaves();
  int32_t max_delay = 0;
  bool any_slack = false;
  for ( auto const& f : leaves_ )
  {
    max_delay = std::max( max_delay, f.delay );
    any_slack = any_slack || f.slack > 0;
  }
  depth_limit_ = max_delay + ceil_log( max_fanout_, n );
  branch_limit_ = std::min( max_fanout_, n );

  size_t const states = static_cast<size_t>( n ) * n * branch_limit_ * ( depth_limit_ + 1 );
  if ( states > ( size_t{ 1 } << 28 ) )
    throw std::runtime_error( "splitter_dp: fanout instance too large to plan" );
  dp_.assign( states, cost_tuple::infeasible() );
  pt_.assign( states, pivot_entry{} );

  if ( mode_ == dp_mode::reconstruct )
  {
    fill_pass( -1 );
  }
  else
  {
    /* Charged postponement caps are swept upward; the first cap that admits
     * any plan equals the optimal maximum charge, and within that cap the
     * additive objective (total, nodes) is minimized exactly. */
    for ( int32_t cap = 0;; ++cap )
    {
      fill_pass( cap );
      if ( !at( 1, n, 1, 0 ).is_infeasible() )
        break;
      if ( cap > depth_limit_ )
        throw std::logic_error( "splitter_dp: no feasible plan below the depth limit" );
    }
  }

  /* Range contiguity is only proven optimal for uniform (zero) slack; small
   * instances with slack get the exact subset search on top. */
  if ( any_slack && n >= 2 && n <= 10 && depth_limit_ <= 40 )
    run_exact_search();
}

size_t splitter_dp::index( int l, int r, int b, int d ) const
{
  int const n = num_leaves();
  return ( ( static_cast<size_t>( l - 1 ) * n + ( r - 1 ) ) * branch_limit_ + ( b - 1 ) ) *
             ( depth_limit_ + 1 ) +
         d;
}

cost_tuple splitter_dp::at( int l, int r, int b, int d ) const
{
  if ( l < 1 || r > num_leaves() || l > r || d < 0 || d > depth_limit_ || b < 1 )
    throw std::out_of_range( "splitter_dp::at" );
  if ( b > branch_limit_ || b > r - l + 1 )
    return cost_tuple::infeasible();
  return dp_[index( l, r, b, d )];
}

pivot_entry splitter_dp::pivot_at( int l, int r, int b, int d ) const
{
  if ( l < 1 || r > num_leaves() || l > r || d < 0 || d > depth_limit_ || b < 1 || b > branch_limit_ )
    throw std::out_of_range( "splitter_dp::pivot_at" );
  return pt_[index( l, r, b, d )];
}

cost_tuple splitter_dp::base_cost( int leaf, int d, int32_t charge_cap ) const
{
  fanout_leaf const& f = leaves_[leaf];
  if ( d <= f.delay )
    return cost_tuple{ 0, 0, leaf_connection_cost( f.delay - d, span_ ) };
  int32_t const push = d - f.delay;
  if ( push <= f.slack )
    return cost_tuple{ 0, 0, 0 };
  if ( charge_cap < 0 )
    return cost_tuple::infeasible(); /* reconstruction must respect slack */
  int32_t const charge = push - f.slack;
  if ( charge > charge_cap )
    return cost_tuple::infeasible();
  return cost_tuple{ charge, charge, 0 };
}

void splitter_dp::fill_pass( int32_t charge_cap )
{
  int const n = num_leaves();
  for ( int d = depth_limit_; d >= 0; --d )
  {
    /* One wire: either the single-consumer closed form, or place one node
     * (buffer when it keeps one output, splitter when it fans out). */
    for ( int l = 1; l <= n; ++l )
    {
      dp_[index( l, l, 1, d )] = base_cost( l - 1, d, charge_cap );
      pt_[index( l, l, 1, d )] = pivot_entry{};
      for ( int r = l + 1; r <= n; ++r )
      {
        cost_tuple best = cost_tuple::infeasible();
        pivot_entry best_pt{};
        int const k_max = std::min( branch_limit_, r - l + 1 );
        for ( int k = 1; k <= k_max; ++k )
          for ( int jump = 1; jump <= std::min( span_, depth_limit_ - d ); ++jump )
          {
            cost_tuple const sub = dp_[index( l, r, k, d + jump )];
            if ( sub.is_infeasible() )
              continue;
            cost_tuple const cand{ sub.max_extra, sub.total_extra, sub.bs_count + 1 };
            if ( best.is_infeasible() || fill_better( cand, best ) )
            {
              best = cand;
              best_pt = pivot_entry{ -1, static_cast<int16_t>( k ), static_cast<int16_t>( d + jump ) };
            }
          }
        dp_[index( l, r, 1, d )] = best;
        pt_[index( l, r, 1, d )] = best_pt;
      }
    }

    /* Several wires at the same depth: divide the sorted consumer range. */
    for ( int b = 2; b <= branch_limit_; ++b )
      for ( int l = 1; l + b - 1 <= n; ++l )
        for ( int r = l + b - 1; r <= n; ++r )
        {
          cost_tuple best = cost_tuple::infeasible();
          pivot_entry best_pt{};
          for ( int k = 1; k <= b - 1; ++k )
            for ( int p = l + k - 1; p <= r - ( b - k ); ++p )
            {
              cost_tuple const left = dp_[index( l, p, k, d )];
              if ( left.is_infeasible() )
                continue;
              cost_tuple const right = dp_[index( p + 1, r, b - k, d )];
              if ( right.is_infeasible() )
                continue;
              cost_tuple const cand = combine( left, right );
              if ( best.is_infeasible() || fill_better( cand, best ) )
              {
                best = cand;
                best_pt = pivot_entry{ static_cast<int16_t>( p ), static_cast<int16_t>( k ),
                                       static_cast<int16_t>( d ) };
              }
            }
          dp_[index( l, r, b, d )] = best;
          pt_[index( l, r, b, d )] = best_pt;
        }
  }
}

namespace
{

/*! \brief One Pareto-front element of the exact subset search, with enough
 *  context to rebuild the plan (base attach / node placement / set split). */
struct subset_entry
{
  enum class op : uint8_t
  {
    base,
    place,
    split
  };
  cost_tuple cost;
  op what = op::base;
  uint16_t block = 0;     /*!< split: consumer subset served by the left side */
  uint8_t wires_left = 0; /*!< split: wires given to `block` */
  uint8_t branches = 0;   /*!< place: outputs of the placed node */
  int16_t depth = 0;      /*!< place: depth of the placed node */
  uint32_t left = 0;      /*!< child entry index (place/split) */
  uint32_t right = 0;     /*!< right child entry index (split) */
};

bool dominates( cost_tuple const& a, cost_tuple const& b )
{
  return a.max_extra <= b.max_extra && a.total_extra <= b.total_extra && a.bs_count <= b.bs_count;
}

void front_add( std::vector<subset_entry>& f, subset_entry const& e )
{
  for ( auto const& o : f )
    if ( dominates( o.cost, e.cost ) )
      return;
  f.erase( std::remove_if( f.begin(), f.end(),
                           [&]( subset_entry const& o ) { return dominates( e.cost, o.cost ); } ),
           f.end() );
  f.push_back( e );
}

} // namespace

void splitter_dp::run_exact_search()
{
  int const n = num_leaves();
  uint32_t const full = ( 1u << n ) - 1u;
  int const bmax = branch_limit_;
  int const depths = depth_limit_ + 1;
  int32_t const cap = mode_ == dp_mode::reconstruct ? -1 : INT32_MAX / 8;

  std::vector<std::vector<subset_entry>> fronts( ( size_t{ full } + 1 ) * bmax * depths );
  auto const fi = [&]( uint32_t mask, int b, int d ) {
    return ( static_cast<size_t>( mask ) * bmax + ( b - 1 ) ) * depths + d;
  };

  for ( int d = depth_limit_; d >= 0; --d )
    for ( uint32_t mask = 1; mask <= full; ++mask )
    {
      int const pc = std::popcount( mask );
      for ( int b = 1; b <= std::min( bmax, pc ); ++b )
      {
        auto& f = fronts[fi( mask, b, d )];
        if ( b == 1 && pc == 1 )
        {
          cost_tuple const base = base_cost( std::countr_zero( mask ), d, cap );
          if ( !base.is_infeasible() )
            front_add( f, subset_entry{ base, subset_entry::op::base, 0, 0, 0, 0, 0, 0 } );
          continue;
        }
        if ( b == 1 )
        {
          int const k_max = std::min( bmax, pc );
          for ( int k = 1; k <= k_max; ++k )
            for ( int jump = 1; jump <= std::min( span_, depth_limit_ - d ); ++jump )
            {
              auto const& child = fronts[fi( mask, k, d + jump )];
              for ( uint32_t i = 0; i < child.size(); ++i )
              {
                cost_tuple const c = child[i].cost;
                front_add( f, subset_entry{ cost_tuple{ c.max_extra, c.total_extra, c.bs_count + 1 },
                                            subset_entry::op::place, 0, 0, static_cast<uint8_t>( k ),
                                            static_cast<int16_t>( d + jump ), i, 0 } );
              }
            }
          continue;
        }
        /* b >= 2: split the set; the block keeps the lowest consumer, which
         * canonicalizes the unordered division. */
        uint32_t const low = mask & ( ~mask + 1u );
        uint32_t const others = mask ^ low;
        for ( int k = 1; k <= b - 1; ++k )
        {
          uint32_t sub = others;
          while ( true )
          {
            uint32_t const block = low | sub;
            uint32_t const rest = mask ^ block;
            if ( rest != 0u && std::popcount( block ) >= k && std::popcount( rest ) >= b - k )
            {
              auto const& fl = fronts[fi( block, k, d )];
              auto const& fr = fronts[fi( rest, b - k, d )];
              for ( uint32_t i = 0; i < fl.size(); ++i )
                for ( uint32_t j = 0; j < fr.size(); ++j )
                  front_add( f, subset_entry{ combine( fl[i].cost, fr[j].cost ),
                                              subset_entry::op::split, static_cast<uint16_t>( block ),
                                              static_cast<uint8_t>( k ), 0, 0, i, j } );
            }
            if ( sub == 0u )
              break;
            sub = ( sub - 1 ) & others;
          }
        }
      }
    }

  auto const& root_front = fronts[fi( full, 1, 0 )];
  if ( root_front.empty() )
    return; /* subset space is a superset, so the tables are infeasible too */

  uint32_t best = 0;
  for ( uint32_t i = 1; i < root_front.size(); ++i )
    if ( root_front[i].cost < root_front[best].cost )
      best = i;
  exact_root_ = root_front[best].cost;

  cost_tuple const table_root = at( 1, n, 1, 0 );
  if ( !table_root.is_infeasible() && table_root < exact_root_ )
    throw std::logic_error( "splitter_dp: range tables beat the exhaustive subset search" );

  splitter_tree tree;
  std::function<void( uint32_t, int, int, uint32_t, int )> decode =
      [&]( uint32_t mask, int b, int d, uint32_t idx, int parent ) {
        subset_entry const& e = fronts[fi( mask, b, d )][idx];
        switch ( e.what )
        {
        case subset_entry::op::base:
          emit_leaf( tree, leaves_[std::countr_zero( mask )], d, parent, span_ );
          break;
        case subset_entry::op::place:
          tree.nodes.push_back( { e.branches >= 2, e.depth, parent } );
          decode( mask, e.branches, e.depth, e.left, static_cast<int>( tree.nodes.size() ) - 1 );
          break;
        case subset_entry::op::split:
          decode( e.block, e.wires_left, d, e.left, parent );
          decode( mask ^ e.block, b - e.wires_left, d, e.right, parent );
          break;
        }
      };
  decode( full, 1, 0, best, -1 );
  exact_tree_ = std::move( tree );
}

void splitter_dp::dump_slice( std::ostream& os, int b, int d ) const
{
  int const n = num_leaves();
  os << "slice b=" << b << " d=" << d << "\n";
  for ( int l = 1; l <= n; ++l )
  {
    for ( int r = 1; r <= n; ++r )
    {
      if ( r < l )
      {
        os << " .";
        continue;
      }
      cost_tuple const t = at( l, r, b, d );
      if ( t.is_infeasible() )
      {
        os << " -";
        continue;
      }
      pivot_entry const p = pivot_at( l, r, b, d );
      os << " [" << l << "," << r << "]=(" << t.max_extra << "," << t.total_extra << "," << t.bs_count
         << ")";
      if ( p.split != -2 )
        os << "@(" << p.split << "," << p.branches << "," << p.depth << ")";
    }
    os << "\n";
  }
}

int32_t splitter_tree::splitter_count() const
{
  int32_t k = 0;
  for ( auto const& n : nodes )
    k += n.is_splitter ? 1 : 0;
  return k;
}

int32_t splitter_tree::buffer_count() const
{
  return static_cast<int32_t>( nodes.size() ) - splitter_count();
}

splitter_tree backtrack_tree( splitter_dp const& dp )
{
  if ( dp.root().is_infeasible() )
    throw std::logic_error( "backtrack_tree: no feasible plan to decode" );

  int const n = dp.num_leaves();
  if ( dp.exact_tree_ && ( dp.at( 1, n, 1, 0 ).is_infeasible() || dp.exact_root_ < dp.at( 1, n, 1, 0 ) ) )
    return *dp.exact_tree_;

  splitter_tree out;
  std::function<void( int, int, int, int, int )> decode = [&]( int l, int r, int b, int d, int parent ) {
    if ( b == 1 && l == r )
    {
      emit_leaf( out, dp.leaves()[l - 1], d, parent, dp.span() );
      return;
    }
    pivot_entry const pe = dp.pivot_at( l, r, b, d );
    if ( b == 1 )
    {
      out.nodes.push_back( { pe.branches >= 2, pe.depth, parent } );
      decode( l, r, pe.branches, pe.depth, static_cast<int>( out.nodes.size() ) - 1 );
      return;
    }
    decode( l, pe.split, pe.branches, d, parent );
    decode( pe.split + 1, r, b - pe.branches, d, parent );
  };
  decode( 1, n, 1, 0, -1 );
  return out;
}

apply_result apply_tree( netlist& net, levels& lv, node_id source, splitter_tree const& tree )
{
  apply_result res;

  /* Unhook the direct consumer edges, remembering their polarity. */
  std::vector<std::pair<node_id, bool>> polarity;
  for ( auto const& at : tree.leaves )
  {
    edge_id found = null_edge;
    for ( edge_id const e : net.fanout_edges( source ) )
      if ( net.edge_at( e ).dst == at.leaf )
      {
        found = e;
        break;
      }
    if ( found == null_edge )
      throw std::logic_error( "apply_tree: plan references a consumer that is not connected" );
    polarity.emplace_back( at.leaf, net.edge_at( found ).inverted );
    net.remove_edge( found );
  }

  /* Parents precede children in decode order, so a single sweep suffices. */
  std::vector<node_id> ids( tree.nodes.size() );
  for ( size_t i = 0; i < tree.nodes.size(); ++i )
  {
    auto const& tn = tree.nodes[i];
    node_id const parent = tn.parent < 0 ? source : ids[tn.parent];
    node_id const v = tn.is_splitter ? net.add_splitter( net.make_name( "spl" ), { parent, false } )
                                     : net.add_buffer( net.make_name( "buf" ), { parent, false } );
    lv.resize( net.num_nodes(), -1 );
    lv[v] = lv[source] + tn.depth;
    ids[i] = v;
    res.created.push_back( v );
  }

  for ( size_t i = 0; i < tree.leaves.size(); ++i )
  {
    auto const& at = tree.leaves[i];
    node_id const parent = at.parent < 0 ? source : ids[at.parent];
    net.add_edge( parent, at.leaf, polarity[i].second );
    if ( at.extra > 0 )
    {
      lv[at.leaf] += at.extra;
      res.pushed.emplace_back( at.leaf, at.extra );
    }
  }
  return res;
}

} // namespace aqfp
