#include "almost/sat.hpp"

#include <algorithm>

namespace almost
{

uint32_t SatSolver::new_var()
{
  assign_.push_back( -1 );
  watches_.emplace_back();
  watches_.emplace_back();
  return num_vars() - 1;
}

void SatSolver::add_clause( std::span<const SatLit> lits )
{
  std::vector<SatLit> c( lits.begin(), lits.end() );
  std::sort( c.begin(), c.end(), []( SatLit a, SatLit b ) { return a.raw < b.raw; } );
  c.erase( std::unique( c.begin(), c.end() ), c.end() );
  for ( std::size_t i = 1; i < c.size(); ++i )
    if ( c[i].var() == c[i - 1].var() )
      return; // tautology
  if ( c.empty() )
  {
    empty_clause_ = true;
    return;
  }
  if ( c.size() == 1 )
  {
    pending_units_.push_back( c[0] );
    return;
  }
  const auto idx = static_cast<uint32_t>( clauses_.size() );
  watches_[c[0].raw].push_back( idx );
  watches_[c[1].raw].push_back( idx );
  clauses_.push_back( std::move( c ) );
}

bool SatSolver::enqueue( SatLit l )
{
  const auto v = lit_value( l );
  if ( v == 0 )
    return false;
  if ( v == 1 )
    return true;
  assign_[l.var()] = l.negated() ? 0 : 1;
  trail_.push_back( l );
  return true;
}

bool SatSolver::propagate()
{
  while ( qhead_ < trail_.size() )
  {
    const SatLit p = trail_[qhead_++];
    const SatLit false_lit = !p;
    auto& ws = watches_[false_lit.raw];
    std::size_t keep = 0;
    bool conflict = false;
    for ( std::size_t i = 0; i < ws.size(); ++i )
    {
      const auto ci = ws[i];
      if ( conflict )
      {
        ws[keep++] = ci;
        continue;
      }
      auto& c = clauses_[ci];
      if ( c[0] == false_lit )
        std::swap( c[0], c[1] );
      if ( lit_value( c[0] ) == 1 )
      {
        ws[keep++] = ci;
        continue;
      }
      bool moved = false;
      for ( std::size_t k = 2; k < c.size(); ++k )
      {
        if ( lit_value( c[k] ) != 0 )
        {
          std::swap( c[1], c[k] );
          watches_[c[1].raw].push_back( ci );
          moved = true;
          break;
        }
      }
      if ( moved )
        continue;
      ws[keep++] = ci;
      if ( !enqueue( c[0] ) )
        conflict = true;
    }
    ws.resize( keep );
    if ( conflict )
      return false;
  }
  return true;
}

void SatSolver::undo_to( std::size_t trail_size )
{
  while ( trail_.size() > trail_size )
  {
    assign_[trail_.back().var()] = -1;
    trail_.pop_back();
  }
  qhead_ = std::min( qhead_, trail_size );
}

SatResult SatSolver::solve( uint64_t conflict_budget )
{
  if ( empty_clause_ )
    return SatResult::unsat;
  undo_to( 0 );
  decisions_.clear();
  for ( auto u : pending_units_ )
    if ( !enqueue( u ) )
      return SatResult::unsat;
  if ( !propagate() )
    return SatResult::unsat;

  uint32_t next_var = 0;
  for ( ;; )
  {
    while ( next_var < num_vars() && assign_[next_var] >= 0 )
      ++next_var;
    if ( next_var == num_vars() )
      return SatResult::sat;

    decisions_.push_back( { trail_.size(), SatLit::neg( next_var ), false } );
    enqueue( SatLit::neg( next_var ) );

    while ( !propagate() )
    {
      if ( ++conflicts_ > conflict_budget )
        return SatResult::unknown;
      while ( !decisions_.empty() && decisions_.back().flipped )
        decisions_.pop_back();
      if ( decisions_.empty() )
        return SatResult::unsat;
      auto& d = decisions_.back();
      undo_to( d.trail_pos );
      d.flipped = true;
      d.lit = !d.lit;
      enqueue( d.lit );
      next_var = 0;
    }
  }
}

} // namespace almost
