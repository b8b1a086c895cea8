/*! \file splitter_tree.hpp
 *  \brief Optimal fanout-tree construction for clocked buffer/splitter insertion.
 *
 * A multi-fanout signal must reach its consumers through a tree of splitters
 * (fanout up to X) and buffers, with every hop spanning between 1 and `span`
 * levels.  The planner below minimizes, in lexicographic order,
 * (maximum charged delay, total charged delay, inserted node count), where
 * "charged" delay is the amount by which a consumer must be postponed beyond
 * both its current level and its available downstream slack.
 *
 * Two modes:
 *  - `initial`: consumers may be postponed arbitrarily; postponement beyond
 *    the recorded slack is charged into the first two cost components.
 *  - `reconstruct`: postponement beyond the recorded slack is forbidden
 *    (such placements are infeasible).
 */

#pragma once

#include "netlist.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aqfp
{

/*! \brief One consumer of the signal whose fanout tree is being planned.
 *
 * `delay` is the free room between source and consumer: L(consumer) -
 * L(source) - 1 (so 0 means the consumer sits on the very next level).
 * `slack` is how far the consumer may be postponed without charge.
 */
struct fanout_leaf
{
  node_id node = null_node;
  int32_t delay = 0;
  int32_t slack = 0;
};

enum class dp_mode
{
  initial,
  reconstruct
};

/*! \brief Lexicographic plan cost: (max charged, total charged, nodes). */
struct cost_tuple
{
  int32_t max_extra = 0;
  int32_t total_extra = 0;
  int32_t bs_count = 0;

  static constexpr int32_t infeasible_mark = INT32_MAX / 4;

  [[nodiscard]] static cost_tuple infeasible()
  {
    return cost_tuple{ infeasible_mark, infeasible_mark, infeasible_mark };
  }
  [[nodiscard]] bool is_infeasible() const { return max_extra >= infeasible_mark; }

  friend bool operator==( cost_tuple const& a, cost_tuple const& b )
  {
    return a.max_extra == b.max_extra && a.total_extra == b.total_extra && a.bs_count == b.bs_count;
  }
  /*! \brief Full lexicographic order (used for final plan comparison). */
  friend bool operator<( cost_tuple const& a, cost_tuple const& b )
  {
    if ( a.max_extra != b.max_extra )
      return a.max_extra < b.max_extra;
    if ( a.total_extra != b.total_extra )
      return a.total_extra < b.total_extra;
    return a.bs_count < b.bs_count;
  }
};

/*! \brief Decoding record for one table state.
 *
 * `split == -2`: none (base state).  `split == -1`: a node was placed; it has
 * `branches` outputs and sits at depth `depth`.  Otherwise the leaf range was
 * divided after position `split` with `branches` wires on the left side.
 */
struct pivot_entry
{
  int16_t split = -2;
  int16_t branches = 0;
  int16_t depth = 0;
};

/*! \brief Minimum buffers to reach a consumer `delta` levels below the wire.
 *
 * `delta` is consumer delay minus wire depth (0 = the consumer sits on the
 * very next level); the gap to bridge is `delta + 1` levels with every hop
 * spanning at most `span`, so the answer is floor(delta / span).
 */
[[nodiscard]] int32_t leaf_connection_cost( int32_t delta, int32_t span );

/*! \brief A decoded fanout tree: inserted nodes plus consumer attachments. */
struct splitter_tree
{
  struct tree_node
  {
    bool is_splitter = false;
    int32_t depth = 0;   /*!< levels below the source */
    int32_t parent = -1; /*!< index into nodes, or -1 = the source itself */
  };
  struct attachment
  {
    node_id leaf = null_node;
    int32_t parent = -1; /*!< index into nodes, or -1 = the source itself */
    int32_t extra = 0;   /*!< levels the consumer must be postponed by */
  };

  std::vector<tree_node> nodes;
  std::vector<attachment> leaves;

  [[nodiscard]] int32_t splitter_count() const;
  [[nodiscard]] int32_t buffer_count() const;
};

/*! \brief Fanout-tree planning tables.
 *
 * State (l, r, b, d), with 1-based leaf indices: serve sorted leaves l..r
 * from b parallel wires available at depth d below the source.  The answer
 * for the whole fanout is state (1, n, 1, 0).  Leaves are sorted by
 * (delay + slack, delay, id) ascending — postponement charges are a function
 * of depth minus (delay + slack), which makes that the due date ordering —
 * and contiguous ranges of it are assigned to subtrees.
 *
 * Serving contiguous ranges of *any* fixed order is provably not optimal
 * once slacks differ between consumers (free-placement windows of different
 * lengths admit no universal sort).  To keep the optimality contract, small
 * fanouts (n ≤ 10, bounded depth) with nonzero slack additionally run an
 * exact search over consumer subsets; root() and backtracking then use the
 * exact plan whenever it beats the range tables.  Larger fanouts fall back
 * to the range tables, which are exact for the slack-free case.
 */
class splitter_dp
{
public:
  splitter_dp( std::vector<fanout_leaf> leaves, int max_fanout, int span, dp_mode mode );

  [[nodiscard]] cost_tuple at( int l, int r, int b, int d ) const;
  [[nodiscard]] pivot_entry pivot_at( int l, int r, int b, int d ) const;
  /*! \brief Best known plan cost (exact subset search when engaged). */
  [[nodiscard]] cost_tuple root() const
  {
    return exact_tree_ ? exact_root_ : at( 1, num_leaves(), 1, 0 );
  }
  /*! \brief True when the exact subset search supplies the plan. */
  [[nodiscard]] bool used_exact_search() const { return exact_tree_.has_value(); }

  [[nodiscard]] int num_leaves() const { return static_cast<int>( leaves_.size() ); }
  [[nodiscard]] int depth_limit() const { return depth_limit_; }
  [[nodiscard]] int max_fanout() const { return max_fanout_; }
  [[nodiscard]] int span() const { return span_; }
  [[nodiscard]] dp_mode mode() const { return mode_; }
  [[nodiscard]] std::vector<fanout_leaf> const& leaves() const { return leaves_; }

  /*! \brief Writes the (l, r) cost matrix for one (b, d) slice (debug aid). */
  void dump_slice( std::ostream& os, int b, int d ) const;

private:
  friend splitter_tree backtrack_tree( splitter_dp const& dp );

  [[nodiscard]] size_t index( int l, int r, int b, int d ) const;
  void fill_pass( int32_t charge_cap );
  [[nodiscard]] cost_tuple base_cost( int leaf, int d, int32_t charge_cap ) const;
  void run_exact_search();

  std::vector<fanout_leaf> leaves_;
  int max_fanout_;
  int span_;
  dp_mode mode_;
  int depth_limit_ = 0;
  int branch_limit_ = 0;
  std::vector<cost_tuple> dp_;
  std::vector<pivot_entry> pt_;
  std::optional<splitter_tree> exact_tree_;
  cost_tuple exact_root_ = cost_tuple::infeasible();
};

/*! \brief Decodes the optimal plan (exact-search plan when that is better). */
[[nodiscard]] splitter_tree backtrack_tree( splitter_dp const& dp );

/*! \brief Outcome of materializing a plan into the netlist. */
struct apply_result
{
  std::vector<node_id> created;                    /*!< new buffer/splitter nodes */
  std::vector<std::pair<node_id, int32_t>> pushed; /*!< consumers moved down, with amount */
};

/*! \brief Materializes a fanout tree under `source`, rewiring its consumers.
 *
 * Existing source->consumer edges are removed; inserted nodes get levels
 * L(source) + depth; the final hop to each consumer keeps the original edge
 * polarity.  Consumers with a positive `extra` have their level increased;
 * the caller is responsible for relaxing any downstream levels afterwards.
 */
apply_result apply_tree( netlist& net, levels& lv, node_id source, splitter_tree const& tree );

} // namespace aqfp
