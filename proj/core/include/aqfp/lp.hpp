/*! \file lp.hpp
 *  \brief Sparse bounded-variable linear programming with a small exact-ILP helper.
 *
 * The solver is a two-phase revised simplex over bounded variables with a
 * product-form basis inverse and periodic reinversion.  It is deterministic:
 * identical models produce identical pivot sequences and results on every
 * platform.  No exceptions are used for solver outcomes; inspect
 * `lp_result::status`.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace aqfp
{

enum class lp_status
{
  optimal,
  infeasible,
  unbounded,
  resource_limit
};

/*! \brief Positive/negative infinity markers for variable bounds. */
inline constexpr double lp_inf = 1e100;

/*! \brief Minimization model: min c.x  s.t.  rows, lb <= x <= ub. */
class linear_program
{
public:
  /*! \brief Adds a variable and returns its index. */
  uint32_t add_variable( double lb, double ub, double objective, bool integral = false, std::string name = {} );

  /*! \brief Adds `sum(term) sense rhs` with sense one of '<', '>', '=' (inclusive). */
  void add_constraint( std::vector<std::pair<uint32_t, double>> terms, char sense, double rhs );

  [[nodiscard]] uint32_t num_variables() const { return static_cast<uint32_t>( lb_.size() ); }
  [[nodiscard]] uint32_t num_constraints() const { return static_cast<uint32_t>( rhs_.size() ); }
  [[nodiscard]] uint64_t num_nonzeros() const { return nonzeros_; }

  [[nodiscard]] double lower_bound( uint32_t j ) const { return lb_[j]; }
  [[nodiscard]] double upper_bound( uint32_t j ) const { return ub_[j]; }
  [[nodiscard]] double objective_coeff( uint32_t j ) const { return obj_[j]; }
  [[nodiscard]] bool is_integral( uint32_t j ) const { return integral_[j] != 0; }
  [[nodiscard]] std::string variable_name( uint32_t j ) const;

  void set_bounds( uint32_t j, double lb, double ub )
  {
    lb_[j] = lb;
    ub_[j] = ub;
  }

  struct row
  {
    std::vector<std::pair<uint32_t, double>> terms;
    char sense;
    double rhs;
  };
  [[nodiscard]] row const& constraint( uint32_t i ) const { return rows_[i]; }

private:
  std::vector<double> lb_, ub_, obj_;
  std::vector<uint8_t> integral_;
  std::vector<std::string> names_;
  std::vector<row> rows_;
  std::vector<double> rhs_;
  uint64_t nonzeros_ = 0;
};

struct lp_options
{
  double feas_tol = 1e-6;     /*!< absolute feasibility tolerance */
  double opt_tol = 1e-6;      /*!< relative optimality tolerance */
  uint64_t pivot_limit = 0;   /*!< 0 = scale with model size */

  /*! \brief Optional starting point for the structural variables.
   *
   * When sized to the variable count, each finite entry anchors its variable
   * there (clamped into its bounds; NaN/infinite entries keep the default
   * anchor).  A point that satisfies every row makes the slack basis feasible
   * and phase 1 is skipped entirely; any violated rows fall back to the usual
   * artificial treatment, so an inexact start never affects correctness.
   */
  std::vector<double> start;
};

struct lp_result
{
  lp_status status = lp_status::resource_limit;
  double objective = 0.0;
  std::vector<double> x; /*!< structural variable values (empty unless optimal) */
  uint64_t pivots = 0;
};

/*! \brief Solves the continuous relaxation (integrality flags are ignored). */
[[nodiscard]] lp_result solve_lp( linear_program const& lp, lp_options const& options = {} );

struct ilp_options
{
  lp_options lp;
  uint64_t node_limit = 200000; /*!< branch-and-bound node budget */
};

/*! \brief Branch-and-bound to integer optimality over the flagged variables.
 *
 * Intended for models with at most a few thousand branchings; returns
 * `resource_limit` when the node budget is exhausted before optimality is
 * proven (the incumbent, if any, is still reported).
 */
[[nodiscard]] lp_result solve_ilp_small( linear_program const& lp, ilp_options const& options = {} );

/*! \brief Writes the model in a human-readable LP text format (debug aid). */
void write_lp_format( linear_program const& lp, std::ostream& os );

} // namespace aqfp
