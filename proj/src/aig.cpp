#include "almost/aig.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <unordered_set>

namespace almost
{

std::string Aig::node_name( uint32_t node ) const
{
  if ( is_input( node ) && !input_names_[input_index( node )].empty() )
    return input_names_[input_index( node )];
  return "n" + std::to_string( node );
}

std::optional<uint32_t> Aig::find_input( std::string_view name ) const
{
  for ( uint32_t i = 0; i < num_inputs_; ++i )
    if ( input_names_[i] == name )
      return i;
  return std::nullopt;
}

std::vector<uint32_t> Aig::fanout_counts() const
{
  std::vector<uint32_t> refs( size(), 0u );
  for ( const auto& n : ands_ )
  {
    ++refs[n.fanin0.node()];
    ++refs[n.fanin1.node()];
  }
  for ( const auto& o : outputs_ )
    ++refs[o.node()];
  return refs;
}

bool Aig::operator==( const Aig& other ) const
{
  if ( num_inputs_ != other.num_inputs_ || ands_.size() != other.ands_.size() || outputs_ != other.outputs_ )
    return false;
  for ( size_t i = 0; i < ands_.size(); ++i )
    if ( ands_[i].fanin0 != other.ands_[i].fanin0 || ands_[i].fanin1 != other.ands_[i].fanin1 )
      return false;
  return true;
}

Literal AigBuilder::add_input( std::string name )
{
  if ( !ands_.empty() )
    throw std::logic_error( "AigBuilder: inputs must be created before AND nodes" );
  ++num_inputs_;
  input_names_.push_back( std::move( name ) );
  return Literal( num_inputs_, false );
}

void AigBuilder::add_output( Literal lit, std::string name )
{
  outputs_.push_back( lit );
  output_names_.push_back( std::move( name ) );
}

std::optional<Literal> AigBuilder::lookup_and( Literal a, Literal b ) const
{
  if ( a > b )
    std::swap( a, b );
  if ( a == lit_false )
    return lit_false;
  if ( a == lit_true )
    return b;
  if ( a == b )
    return a;
  if ( a == !b )
    return lit_false;
  if ( auto it = table_.find( key( a, b ) ); it != table_.end() )
    return Literal( it->second, false );
  return std::nullopt;
}

Literal AigBuilder::and_( Literal a, Literal b )
{
  if ( auto hit = lookup_and( a, b ) )
    return *hit;
  if ( a > b )
    std::swap( a, b );
  assert( a.node() < size() && b.node() < size() );
  const uint32_t node = size();
  ands_.push_back( { a, b } );
  table_.emplace( key( a, b ), node );
  return Literal( node, false );
}

Literal AigBuilder::xor_( Literal a, Literal b )
{
  return !and_( !and_( a, !b ), !and_( !a, b ) );
}

Literal AigBuilder::mux_( Literal sel, Literal then_lit, Literal else_lit )
{
  return or_( and_( sel, then_lit ), and_( !sel, else_lit ) );
}

Aig AigBuilder::build() &&
{
  Aig g;
  g.num_inputs_ = num_inputs_;
  g.ands_ = std::move( ands_ );
  g.outputs_ = std::move( outputs_ );
  g.input_names_ = std::move( input_names_ );
  g.output_names_ = std::move( output_names_ );
  table_.clear();
  return g;
}

Aig AigBuilder::build() const&
{
  Aig g;
  g.num_inputs_ = num_inputs_;
  g.ands_ = ands_;
  g.outputs_ = outputs_;
  g.input_names_ = input_names_;
  g.output_names_ = output_names_;
  return g;
}

std::vector<uint32_t> levels( const Aig& g )
{
  std::vector<uint32_t> lv( g.size(), 0u );
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
    lv[n] = 1u + std::max( lv[g.fanin0( n ).node()], lv[g.fanin1( n ).node()] );
  return lv;
}

uint32_t depth( const Aig& g )
{
  const auto lv = levels( g );
  uint32_t d = 0;
  for ( auto o : g.outputs() )
    d = std::max( d, lv[o.node()] );
  return d;
}

Aig cleanup( const Aig& g )
{
  std::vector<bool> live( g.size(), false );
  for ( auto o : g.outputs() )
    live[o.node()] = true;
  for ( uint32_t n = g.size(); n-- > g.first_and(); )
  {
    if ( !live[n] )
      continue;
    live[g.fanin0( n ).node()] = true;
    live[g.fanin1( n ).node()] = true;
  }

  AigBuilder b;
  std::vector<Literal> map( g.size(), lit_false );
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
    map[g.input_node( i )] = b.add_input( g.input_name( i ) );
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
  {
    if ( !live[n] )
      continue;
    const auto f0 = g.fanin0( n ), f1 = g.fanin1( n );
    map[n] = b.and_( map[f0.node()] ^ f0.complemented(), map[f1.node()] ^ f1.complemented() );
  }
  for ( uint32_t i = 0; i < g.num_outputs(); ++i )
  {
    const auto o = g.output( i );
    b.add_output( map[o.node()] ^ o.complemented(), g.output_name( i ) );
  }
  return std::move( b ).build();
}

bool is_structurally_hashed( const Aig& g )
{
  std::unordered_set<uint64_t> seen;
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
  {
    const auto f0 = g.fanin0( n ), f1 = g.fanin1( n );
    if ( !( f0 < f1 ) || f0.is_constant() || f1.node() >= n )
      return false;
    if ( !seen.insert( ( uint64_t( f0.raw() ) << 32 ) | f1.raw() ).second )
      return false;
  }
  return true;
}

} // namespace almost
