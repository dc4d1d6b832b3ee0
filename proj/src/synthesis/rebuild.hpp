// Shared machinery for the synthesis passes.
//
// Every pass reads an immutable source graph in topological order and writes
// a new structurally hashed graph.  `map[n]` is the new literal computing the
// same function as source node `n`.  Replacement decisions compare the
// source-side maximum fanout-free cone (nodes that become dead) against the
// number of nodes a candidate structure would add to the new graph.

#pragma once

#include "almost/aig.hpp"
#include "almost/truth_table.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

namespace almost::detail
{

class Rebuild
{
public:
  explicit Rebuild( const Aig& src ) : src_( src ), map_( src.size(), lit_false )
  {
    for ( uint32_t i = 0; i < src.num_inputs(); ++i )
      map_[src.input_node( i )] = b_.add_input( src.input_name( i ) );
  }

  const Aig& src() const { return src_; }
  AigBuilder& builder() { return b_; }
  const AigBuilder& builder() const { return b_; }

  Literal mapped( Literal old ) const { return map_[old.node()] ^ old.complemented(); }
  void set( uint32_t node, Literal lit ) { map_[node] = lit; }
  Literal get( uint32_t node ) const { return map_[node]; }

  /// Literal of the plain copy of `node`, if it needs no new AND node.
  std::optional<Literal> copy_lookup( uint32_t node ) const
  {
    return b_.lookup_and( mapped( src_.fanin0( node ) ), mapped( src_.fanin1( node ) ) );
  }
  Literal copy( uint32_t node ) { return b_.and_( mapped( src_.fanin0( node ) ), mapped( src_.fanin1( node ) ) ); }

  Aig finish()
  {
    for ( uint32_t i = 0; i < src_.num_outputs(); ++i )
      b_.add_output( mapped( src_.output( i ) ), src_.output_name( i ) );
    return cleanup( std::move( b_ ).build() );
  }

private:
  const Aig& src_;
  AigBuilder b_;
  std::vector<Literal> map_;
};

/// Reference counts of the source graph for maximum fanout-free cone queries.
class MffcCounter
{
public:
  explicit MffcCounter( const Aig& g ) : g_( g ), refs_( g.fanout_counts() ) {}

  /// Nodes of the MFFC of `root` bounded by `leaves` (root included, leaves excluded).
  std::vector<uint32_t> collect( uint32_t root, std::span<const uint32_t> leaves )
  {
    leaves_ = leaves;
    std::vector<uint32_t> out{ root };
    deref( root, out );
    ref( root );
    return out;
  }

private:
  bool stop( uint32_t n ) const
  {
    return !g_.is_and( n ) || std::find( leaves_.begin(), leaves_.end(), n ) != leaves_.end();
  }
  void deref( uint32_t n, std::vector<uint32_t>& out )
  {
    for ( auto f : { g_.fanin0( n ).node(), g_.fanin1( n ).node() } )
    {
      if ( stop( f ) )
        continue;
      if ( --refs_[f] == 0 )
      {
        out.push_back( f );
        deref( f, out );
      }
    }
  }
  void ref( uint32_t n )
  {
    for ( auto f : { g_.fanin0( n ).node(), g_.fanin1( n ).node() } )
    {
      if ( stop( f ) )
        continue;
      if ( refs_[f]++ == 0 )
        ref( f );
    }
  }

  const Aig& g_;
  std::vector<uint32_t> refs_;
  std::span<const uint32_t> leaves_;
};

/// Result of a dry run: nodes that would be added and, if nothing is added, the resulting literal.
struct DryRun
{
  uint32_t added = 0;
  std::optional<Literal> existing;
};

/*! \brief Counts the nodes `structure` would add when built over `inputs`.
 *
 * `dead` holds new-graph nodes expected to be freed by the replacement; a
 * structure node that hashes onto one of them keeps it (and its dead
 * fanin cone) alive, so those count as added.
 */
inline DryRun dry_run( const AigBuilder& b, const Aig& structure, std::span<const Literal> inputs,
                       std::unordered_set<uint32_t> dead )
{
  DryRun r;
  auto revive = [&]( uint32_t node, auto&& self ) -> void {
    if ( !dead.erase( node ) )
      return;
    ++r.added;
    const auto& nd = b.and_node( node );
    for ( auto f : { nd.fanin0.node(), nd.fanin1.node() } )
      if ( b.is_and( f ) )
        self( f, self );
  };

  std::vector<std::optional<Literal>> map( structure.size() );
  map[0] = lit_false;
  for ( uint32_t i = 0; i < structure.num_inputs(); ++i )
    map[structure.input_node( i )] = inputs[i];
  for ( uint32_t n = structure.first_and(); n < structure.size(); ++n )
  {
    const auto f0 = structure.fanin0( n ), f1 = structure.fanin1( n );
    const auto& a = map[f0.node()];
    const auto& c = map[f1.node()];
    if ( !a || !c )
    {
      ++r.added;
      continue;
    }
    auto hit = b.lookup_and( *a ^ f0.complemented(), *c ^ f1.complemented() );
    if ( !hit )
    {
      ++r.added;
      continue;
    }
    if ( b.is_and( hit->node() ) )
      revive( hit->node(), revive );
    map[n] = hit;
  }
  const auto o = structure.output( 0 );
  if ( map[o.node()] )
  {
    // the output may hash onto a dead node without any AND being visited
    if ( b.is_and( map[o.node()]->node() ) )
      revive( map[o.node()]->node(), revive );
    if ( r.added == 0 )
      r.existing = *map[o.node()] ^ o.complemented();
  }
  return r;
}

inline Literal instantiate( AigBuilder& b, const Aig& structure, std::span<const Literal> inputs )
{
  std::vector<Literal> map( structure.size(), lit_false );
  for ( uint32_t i = 0; i < structure.num_inputs(); ++i )
    map[structure.input_node( i )] = inputs[i];
  for ( uint32_t n = structure.first_and(); n < structure.size(); ++n )
  {
    const auto f0 = structure.fanin0( n ), f1 = structure.fanin1( n );
    map[n] = b.and_( map[f0.node()] ^ f0.complemented(), map[f1.node()] ^ f1.complemented() );
  }
  const auto o = structure.output( 0 );
  return map[o.node()] ^ o.complemented();
}

/// New-graph AND nodes that correspond to the given source nodes.
inline std::unordered_set<uint32_t> dead_set( const Rebuild& rb, std::span<const uint32_t> mffc, uint32_t root )
{
  std::unordered_set<uint32_t> dead;
  for ( auto m : mffc )
  {
    if ( m == root )
      continue;
    const auto node = rb.get( m ).node();
    if ( rb.builder().is_and( node ) )
      dead.insert( node );
  }
  return dead;
}

/*! \brief Reconvergence-driven cut of at most `max_leaves` leaves.
 *
 * Starting from the fanins of `root`, repeatedly expands the leaf whose
 * fanins add the fewest new leaves (ties: highest id) while the size limit
 * holds.  `cone` receives the interior nodes including `root`, in id order.
 */
inline std::vector<uint32_t> reconvergence_cut( const Aig& g, uint32_t root, uint32_t max_leaves,
                                                std::vector<uint32_t>& cone )
{
  std::vector<uint32_t> leaves;
  cone.assign( { root } );
  auto in_set = []( const std::vector<uint32_t>& v, uint32_t x ) {
    return std::find( v.begin(), v.end(), x ) != v.end();
  };
  for ( auto f : { g.fanin0( root ).node(), g.fanin1( root ).node() } )
    if ( f != 0 && !in_set( leaves, f ) && !in_set( cone, f ) )
      leaves.push_back( f );

  for ( ;; )
  {
    int best_cost = 100;
    std::size_t best = leaves.size();
    for ( std::size_t i = 0; i < leaves.size(); ++i )
    {
      const auto l = leaves[i];
      if ( !g.is_and( l ) )
        continue;
      int cost = -1;
      for ( auto f : { g.fanin0( l ).node(), g.fanin1( l ).node() } )
        if ( f != 0 && !in_set( leaves, f ) && !in_set( cone, f ) )
          ++cost;
      if ( cost < best_cost || ( cost == best_cost && best < leaves.size() && l > leaves[best] ) )
      {
        best_cost = cost;
        best = i;
      }
    }
    if ( best == leaves.size() || leaves.size() + best_cost > max_leaves )
      break;
    const auto l = leaves[best];
    leaves.erase( leaves.begin() + static_cast<std::ptrdiff_t>( best ) );
    cone.push_back( l );
    for ( auto f : { g.fanin0( l ).node(), g.fanin1( l ).node() } )
      if ( f != 0 && !in_set( leaves, f ) && !in_set( cone, f ) )
        leaves.push_back( f );
  }
  std::sort( leaves.begin(), leaves.end() );
  std::sort( cone.begin(), cone.end() );
  return leaves;
}

/// Truth tables of `cone` nodes (id order) over `leaves`; entry i belongs to cone[i].
inline std::vector<TruthTable> cone_tables( const Aig& g, std::span<const uint32_t> leaves, std::span<const uint32_t> cone )
{
  const auto nv = static_cast<uint32_t>( leaves.size() );
  std::vector<TruthTable> tts( cone.size() );
  auto value = [&]( Literal l ) -> TruthTable {
    const auto n = l.node();
    TruthTable t;
    if ( n == 0 )
      t = TruthTable::constant( nv, false );
    else if ( auto it = std::lower_bound( leaves.begin(), leaves.end(), n ); it != leaves.end() && *it == n )
      t = TruthTable::nth_var( nv, static_cast<uint32_t>( it - leaves.begin() ) );
    else
    {
      auto c = std::lower_bound( cone.begin(), cone.end(), n );
      t = tts[static_cast<std::size_t>( c - cone.begin() )];
    }
    return l.complemented() ? ~t : t;
  };
  for ( std::size_t i = 0; i < cone.size(); ++i )
    tts[i] = value( g.fanin0( cone[i] ) ) & value( g.fanin1( cone[i] ) );
  return tts;
}

} // namespace almost::detail
