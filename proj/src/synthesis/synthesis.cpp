#include "almost/synthesis.hpp"

#include "almost/errors.hpp"
#include "almost/rng.hpp"

#include <sstream>
#include <stdexcept>

namespace almost
{

namespace
{

struct TransformInfo
{
  TransformId id;
  std::string_view mnemonic;
  std::string_view abc;
};

constexpr std::array<TransformInfo, 7> transform_table = { {
    { TransformId::balance, "b", "balance" },
    { TransformId::rewrite, "rw", "rewrite" },
    { TransformId::rewrite_z, "rwz", "rewrite -z" },
    { TransformId::refactor, "rf", "refactor" },
    { TransformId::refactor_z, "rfz", "refactor -z" },
    { TransformId::resub, "rs", "resub" },
    { TransformId::resub_z, "rsz", "resub -z" },
} };

const TransformInfo& info( TransformId t ) { return transform_table[static_cast<std::size_t>( t )]; }

std::string_view trim( std::string_view s )
{
  const auto b = s.find_first_not_of( " \t\r" );
  if ( b == std::string_view::npos )
    return {};
  const auto e = s.find_last_not_of( " \t\r" );
  return s.substr( b, e - b + 1 );
}

Aig run_pass( const Aig& g, TransformId t )
{
  switch ( t )
  {
  case TransformId::balance:
    return balance( g );
  case TransformId::rewrite:
    return rewrite( g, false );
  case TransformId::rewrite_z:
    return rewrite( g, true );
  case TransformId::refactor:
    return refactor( g, false );
  case TransformId::refactor_z:
    return refactor( g, true );
  case TransformId::resub:
    return resub( g, false );
  case TransformId::resub_z:
    return resub( g, true );
  }
  return g;
}

} // namespace

std::string_view mnemonic( TransformId t ) { return info( t ).mnemonic; }

std::string_view abc_command( TransformId t ) { return info( t ).abc; }

std::optional<TransformId> parse_mnemonic( std::string_view m )
{
  for ( const auto& e : transform_table )
    if ( e.mnemonic == m )
      return e.id;
  return std::nullopt;
}

std::string Recipe::to_string() const
{
  std::string s;
  for ( std::size_t i = 0; i < steps.size(); ++i )
  {
    if ( i )
      s += '.';
    s += mnemonic( steps[i] );
  }
  return s;
}

Recipe Recipe::from_string( std::string_view dotted )
{
  Recipe r;
  dotted = trim( dotted );
  if ( dotted.empty() )
    return r;
  std::size_t pos = 0;
  for ( ;; )
  {
    const auto dot = dotted.find( '.', pos );
    const auto tok = dotted.substr( pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos );
    const auto t = parse_mnemonic( tok );
    if ( !t )
      throw DataError( "unknown transform '" + std::string( tok ) + "'" );
    r.steps.push_back( *t );
    if ( dot == std::string_view::npos )
      break;
    pos = dot + 1;
  }
  return r;
}

Recipe resyn2_baseline()
{
  using T = TransformId;
  return Recipe{ { T::balance, T::rewrite, T::refactor, T::balance, T::rewrite, T::rewrite_z, T::balance,
                   T::refactor_z, T::rewrite_z, T::balance } };
}

Recipe random_recipe( std::size_t length, uint64_t seed )
{
  if ( length == 0 )
    throw std::invalid_argument( "recipe length must be positive" );
  Rng rng( seed );
  Recipe r;
  for ( std::size_t i = 0; i < length; ++i )
    r.steps.push_back( all_transform_ids[rng.uniform( all_transform_ids.size() )] );
  return r;
}

uint64_t recipe_space_size( uint64_t num_transforms, uint64_t length )
{
  uint64_t s = 1;
  for ( uint64_t i = 0; i < length; ++i )
  {
    if ( num_transforms != 0 && s > ~uint64_t{ 0 } / num_transforms )
      throw std::overflow_error( "recipe space size exceeds 64 bits" );
    s *= num_transforms;
  }
  return s;
}

Recipe parse_recipe_file( std::string_view text )
{
  Recipe r;
  std::size_t line_no = 0, pos = 0;
  while ( pos <= text.size() )
  {
    const auto nl = text.find( '\n', pos );
    auto line = text.substr( pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos );
    ++line_no;
    if ( const auto hash = line.find( '#' ); hash != std::string_view::npos )
      line = line.substr( 0, hash );
    line = trim( line );
    if ( !line.empty() )
    {
      const auto t = parse_mnemonic( line );
      if ( !t )
        throw ParseError( "unknown transform '" + std::string( line ) + "'", line_no );
      r.steps.push_back( *t );
    }
    if ( nl == std::string_view::npos )
      break;
    pos = nl + 1;
  }
  return r;
}

std::string write_recipe_file( const Recipe& r )
{
  std::string s;
  for ( auto t : r.steps )
  {
    s += mnemonic( t );
    s += '\n';
  }
  return s;
}

std::string emit_abc_script( const Recipe& r )
{
  std::ostringstream os;
  os << "strash\n";
  for ( auto t : r.steps )
    os << abc_command( t ) << '\n';
  os << "print_stats\n";
  return os.str();
}

/*
 * Area passes never return a larger graph and balance never returns a deeper
 * one; a pass that would regress hands back its input unchanged.
 */
std::pair<Aig, SynthStats> apply_transform( const Aig& g, TransformId t )
{
  auto out = run_pass( g, t );
  const auto nodes_in = node_count( g ), depth_in = depth( g );
  auto nodes_out = node_count( out ), depth_out = depth( out );
  const bool regress = t == TransformId::balance ? depth_out > depth_in : nodes_out > nodes_in;
  if ( regress )
  {
    out = g;
    nodes_out = nodes_in;
    depth_out = depth_in;
  }
  SynthStats s{ nodes_in, nodes_out, depth_in, depth_out, {} };
  s.steps.push_back( { t, nodes_in, nodes_out, depth_in, depth_out } );
  return { std::move( out ), std::move( s ) };
}

std::pair<Aig, SynthStats> apply_recipe( const Aig& g, const Recipe& r )
{
  SynthStats total;
  total.nodes_before = total.nodes_after = node_count( g );
  total.depth_before = total.depth_after = depth( g );
  Aig cur = g;
  for ( auto t : r.steps )
  {
    auto [next, s] = apply_transform( cur, t );
    cur = std::move( next );
    total.nodes_after = s.nodes_after;
    total.depth_after = s.depth_after;
    total.steps.push_back( s.steps.front() );
  }
  return { std::move( cur ), std::move( total ) };
}

} // namespace almost
