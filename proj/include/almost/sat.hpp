/*!
  \file sat.hpp
  \brief Minimal DPLL solver with two watched literals

  Chronological backtracking, no clause learning.  Intended for equivalence
  checking of moderately sized miters under a conflict budget.
*/

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace almost
{

/// Solver literal: 2 * var + negated.
struct SatLit
{
  uint32_t raw;

  static SatLit pos( uint32_t var ) { return { var << 1 }; }
  static SatLit neg( uint32_t var ) { return { ( var << 1 ) | 1u }; }
  uint32_t var() const { return raw >> 1; }
  bool negated() const { return raw & 1u; }
  SatLit operator!() const { return { raw ^ 1u }; }
  bool operator==( const SatLit& ) const = default;
};

enum class SatResult
{
  sat,
  unsat,
  unknown
};

class SatSolver
{
public:
  uint32_t new_var();
  uint32_t num_vars() const { return static_cast<uint32_t>( assign_.size() ); }
  void add_clause( std::span<const SatLit> lits );
  void add_clause( std::initializer_list<SatLit> lits ) { add_clause( std::span<const SatLit>( lits.begin(), lits.size() ) ); }

  /// Returns `unknown` when more than `conflict_budget` conflicts occur.
  SatResult solve( uint64_t conflict_budget );
  uint64_t conflicts() const { return conflicts_; }

  /// Model value after `sat`.
  bool value( uint32_t var ) const { return assign_[var] == 1; }

private:
  int8_t lit_value( SatLit l ) const
  {
    const auto a = assign_[l.var()];
    return a < 0 ? -1 : ( ( a == 1 ) != l.negated() ? 1 : 0 );
  }
  bool enqueue( SatLit l );
  bool propagate();
  void undo_to( std::size_t trail_size );

  struct Decision
  {
    std::size_t trail_pos;
    SatLit lit;
    bool flipped;
  };

  std::vector<std::vector<SatLit>> clauses_;
  std::vector<std::vector<uint32_t>> watches_; // by literal: clauses watching it
  std::vector<int8_t> assign_;                 // -1 unassigned, 0 false, 1 true
  std::vector<SatLit> trail_;
  std::vector<Decision> decisions_;
  std::size_t qhead_ = 0;
  bool empty_clause_ = false;
  std::vector<SatLit> pending_units_;
  uint64_t conflicts_ = 0;
};

} // namespace almost
