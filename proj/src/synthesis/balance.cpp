#include "almost/synthesis.hpp"

#include "rebuild.hpp"

#include <queue>

namespace almost
{

/*
 * Each maximal fanout-free AND tree (a "supergate") is collected into its
 * leaf literals and rebuilt by repeatedly combining the two operands with the
 * lowest level.  Leaves are ordered by (level, literal) so the result is
 * deterministic.
 */
Aig balance( const Aig& g )
{
  const auto refs = g.fanout_counts();
  std::vector<bool> absorbed( g.size(), false );
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
    for ( auto f : { g.fanin0( n ), g.fanin1( n ) } )
      if ( !f.complemented() && g.is_and( f.node() ) && refs[f.node()] == 1 )
        absorbed[f.node()] = true;

  detail::Rebuild rb( g );
  auto& b = rb.builder();
  std::vector<uint32_t> level( b.size(), 0 );
  auto level_of = [&]( Literal l ) { return level[l.node()]; };

  std::vector<Literal> leaves;
  std::vector<uint32_t> stack;
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
  {
    if ( absorbed[n] )
      continue;

    leaves.clear();
    stack.assign( { n } );
    while ( !stack.empty() )
    {
      const auto m = stack.back();
      stack.pop_back();
      for ( auto f : { g.fanin1( m ), g.fanin0( m ) } )
      {
        if ( !f.complemented() && absorbed[f.node()] )
          stack.push_back( f.node() );
        else
          leaves.push_back( rb.mapped( f ) );
      }
    }

    std::sort( leaves.begin(), leaves.end() );
    leaves.erase( std::unique( leaves.begin(), leaves.end() ), leaves.end() );
    bool is_zero = false;
    for ( std::size_t i = 1; i < leaves.size(); ++i )
      if ( leaves[i] == !leaves[i - 1] )
        is_zero = true;
    if ( is_zero || ( !leaves.empty() && leaves.front() == lit_false ) )
    {
      rb.set( n, lit_false );
      continue;
    }
    std::erase( leaves, lit_true );
    if ( leaves.empty() )
    {
      rb.set( n, lit_true );
      continue;
    }

    using Item = std::pair<uint32_t, uint32_t>; // (level, literal)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for ( auto l : leaves )
      heap.emplace( level_of( l ), l.raw() );
    while ( heap.size() > 1 )
    {
      const auto a = Literal( heap.top().second );
      heap.pop();
      const auto c = Literal( heap.top().second );
      heap.pop();
      const auto r = b.and_( a, c );
      if ( level.size() < b.size() )
        level.resize( b.size(), 0 );
      if ( b.is_and( r.node() ) && level[r.node()] == 0 )
        level[r.node()] = 1 + std::max( level_of( a ), level_of( c ) );
      heap.emplace( level_of( r ), r.raw() );
    }
    rb.set( n, Literal( heap.top().second ) );
  }
  return rb.finish();
}

} // namespace almost
