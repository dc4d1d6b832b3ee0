#include "almost/npn.hpp"

#include "almost/errors.hpp"
#include "almost/io.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace almost
{

uint16_t apply_npn( const NpnTransform& t, uint16_t rep )
{
  uint16_t g = 0;
  for ( uint32_t x = 0; x < 16; ++x )
  {
    uint32_t y = 0;
    for ( uint32_t j = 0; j < 4; ++j )
      y |= ( ( ( x >> t.perm[j] ) ^ ( t.input_neg >> j ) ) & 1u ) << j;
    const bool bit = ( ( rep >> y ) & 1u ) != t.output_neg;
    g |= uint16_t( bit ) << x;
  }
  return g;
}

std::array<Literal, 4> transform_leaves( const NpnTransform& t, std::span<const Literal, 4> leaves )
{
  std::array<Literal, 4> out;
  for ( uint32_t j = 0; j < 4; ++j )
    out[j] = leaves[t.perm[j]] ^ bool( ( t.input_neg >> j ) & 1u );
  return out;
}

namespace
{

std::vector<NpnTransform> all_transforms()
{
  std::vector<NpnTransform> ts;
  std::array<uint8_t, 4> perm{ 0, 1, 2, 3 };
  do
  {
    for ( uint8_t neg = 0; neg < 16; ++neg )
      for ( bool out : { false, true } )
        ts.push_back( { perm, neg, out } );
  } while ( std::next_permutation( perm.begin(), perm.end() ) );
  return ts;
}

constexpr uint16_t var_tt[4] = { 0xaaaa, 0xcccc, 0xf0f0, 0xff00 };

/// Minimum AND-tree for every 4-input function up to a node budget.
struct TreeTable
{
  std::vector<int8_t> cost = std::vector<int8_t>( 65536, -1 );
  std::vector<uint16_t> left = std::vector<uint16_t>( 65536, 0 );
  std::vector<uint16_t> right = std::vector<uint16_t>( 65536, 0 );
  std::vector<bool> negated = std::vector<bool>( 65536, false );

  Literal build( AigBuilder& b, uint16_t f, const std::array<Literal, 4>& leaves ) const
  {
    if ( f == 0 )
      return lit_false;
    if ( f == 0xffff )
      return lit_true;
    for ( uint32_t j = 0; j < 4; ++j )
    {
      if ( f == var_tt[j] )
        return leaves[j];
      if ( f == uint16_t( ~var_tt[j] ) )
        return !leaves[j];
    }
    if ( negated[f] )
      return !build( b, uint16_t( ~f ), leaves );
    return b.and_( build( b, left[f], leaves ), build( b, right[f], leaves ) );
  }
};

TreeTable enumerate_trees( uint32_t max_cost )
{
  TreeTable t;
  std::vector<std::vector<uint16_t>> by_cost( max_cost + 1 );
  auto add = [&]( uint16_t f, uint32_t c ) {
    t.cost[f] = static_cast<int8_t>( c );
    by_cost[c].push_back( f );
  };
  add( 0x0000, 0 );
  add( 0xffff, 0 );
  for ( auto v : var_tt )
  {
    add( v, 0 );
    add( uint16_t( ~v ), 0 );
  }
  for ( uint32_t c = 1; c <= max_cost; ++c )
  {
    for ( uint32_t a = 0; 2 * a <= c - 1; ++a )
    {
      const uint32_t bc = c - 1 - a;
      for ( auto f : by_cost[a] )
        for ( auto g : by_cost[bc] )
        {
          const uint16_t h = f & g;
          if ( t.cost[h] >= 0 )
            continue;
          add( h, c );
          t.left[h] = f;
          t.right[h] = g;
          const uint16_t nh = ~h;
          if ( t.cost[nh] < 0 )
          {
            add( nh, c );
            t.negated[nh] = true;
          }
        }
    }
  }
  return t;
}

} // namespace

void NpnLibrary::classify()
{
  canon_.assign( 65536, 0 );
  transform_.assign( 65536, NpnTransform{} );
  classes_.clear();
  std::vector<bool> done( 65536, false );
  const auto ts = all_transforms();
  for ( uint32_t f = 0; f < 65536; ++f )
  {
    if ( done[f] )
      continue;
    // f is the smallest member of its orbit, since smaller tables are already classified
    const auto rep = static_cast<uint16_t>( f );
    classes_.push_back( rep );
    for ( const auto& t : ts )
    {
      const auto g = apply_npn( t, rep );
      if ( done[g] )
        continue;
      done[g] = true;
      canon_[g] = rep;
      transform_[g] = t;
    }
  }
}

NpnLibrary NpnLibrary::build()
{
  NpnLibrary lib;
  lib.classify();
  const auto trees = enumerate_trees( max_structure_size );
  for ( auto rep : lib.classes_ )
  {
    if ( trees.cost[rep] < 0 )
      continue;
    AigBuilder b;
    std::array<Literal, 4> leaves;
    for ( auto& l : leaves )
      l = b.add_input();
    b.add_output( trees.build( b, rep, leaves ) );
    lib.structures_.emplace( rep, std::move( b ).build() );
  }
  return lib;
}

const NpnLibrary& NpnLibrary::instance()
{
  static const NpnLibrary lib = build();
  return lib;
}

std::size_t NpnLibrary::num_structures() const { return structures_.size(); }

const Aig* NpnLibrary::structure( uint16_t rep ) const
{
  auto it = structures_.find( rep );
  return it == structures_.end() ? nullptr : &it->second;
}

std::optional<uint32_t> NpnLibrary::size_of( uint16_t tt ) const
{
  if ( const auto* s = structure( canon_[tt] ) )
    return s->num_ands();
  return std::nullopt;
}

std::optional<Literal> NpnLibrary::instantiate( AigBuilder& b, uint16_t tt, std::span<const Literal, 4> leaves ) const
{
  const auto* s = structure( canon_[tt] );
  if ( !s )
    return std::nullopt;
  const auto& t = transform_[tt];
  const auto in = transform_leaves( t, leaves );
  std::vector<Literal> map( s->size(), lit_false );
  for ( uint32_t j = 0; j < 4; ++j )
    map[s->input_node( j )] = in[j];
  for ( uint32_t n = s->first_and(); n < s->size(); ++n )
  {
    const auto f0 = s->fanin0( n ), f1 = s->fanin1( n );
    map[n] = b.and_( map[f0.node()] ^ f0.complemented(), map[f1.node()] ^ f1.complemented() );
  }
  const auto o = s->output( 0 );
  return ( map[o.node()] ^ o.complemented() ) ^ t.output_neg;
}

std::string NpnLibrary::serialize() const
{
  std::ostringstream os;
  os << "ALMOST-NPN v1\n";
  os << "# <class truth table> <output literal> <AND fanin pairs over inputs 2,4,6,8>\n";
  std::vector<uint16_t> reps;
  for ( const auto& [rep, s] : structures_ )
    reps.push_back( rep );
  std::sort( reps.begin(), reps.end() );
  for ( auto rep : reps )
  {
    const auto& s = structures_.at( rep );
    char hex[8];
    std::snprintf( hex, sizeof( hex ), "%04x", rep );
    os << hex << ' ' << s.output( 0 ).raw();
    for ( uint32_t n = s.first_and(); n < s.size(); ++n )
      os << ' ' << s.fanin0( n ).raw() << ':' << s.fanin1( n ).raw();
    os << '\n';
  }
  return os.str();
}

NpnLibrary NpnLibrary::parse( std::string_view text )
{
  NpnLibrary lib;
  lib.classify();
  std::istringstream is{ std::string( text ) };
  std::string line;
  std::size_t line_no = 0;
  if ( !std::getline( is, line ) || line != "ALMOST-NPN v1" )
    throw ParseError( "missing 'ALMOST-NPN v1' header", 1 );
  ++line_no;
  while ( std::getline( is, line ) )
  {
    ++line_no;
    if ( line.empty() || line[0] == '#' )
      continue;
    std::istringstream ls( line );
    std::string hex;
    uint32_t out = 0;
    if ( !( ls >> hex >> out ) )
      throw ParseError( "expected '<hex> <output>'", line_no );
    const auto rep = static_cast<uint16_t>( std::stoul( hex, nullptr, 16 ) );
    if ( lib.canon_[rep] != rep )
      throw ParseError( "'" + hex + "' is not a class representative", line_no );
    AigBuilder b;
    std::vector<Literal> map{ lit_false };
    for ( int j = 0; j < 4; ++j )
      map.push_back( b.add_input() );
    std::string pair;
    while ( ls >> pair )
    {
      const auto colon = pair.find( ':' );
      if ( colon == std::string::npos )
        throw ParseError( "expected '<lit>:<lit>'", line_no );
      const auto a = static_cast<uint32_t>( std::stoul( pair.substr( 0, colon ) ) );
      const auto c = static_cast<uint32_t>( std::stoul( pair.substr( colon + 1 ) ) );
      if ( ( a >> 1 ) >= map.size() || ( c >> 1 ) >= map.size() )
        throw ParseError( "literal out of range", line_no );
      map.push_back( b.and_( map[a >> 1] ^ bool( a & 1 ), map[c >> 1] ^ bool( c & 1 ) ) );
    }
    if ( ( out >> 1 ) >= map.size() )
      throw ParseError( "output literal out of range", line_no );
    b.add_output( map[out >> 1] ^ bool( out & 1 ) );
    lib.structures_.insert_or_assign( rep, std::move( b ).build() );
  }
  return lib;
}

NpnLibrary NpnLibrary::load_or_build( const std::filesystem::path& cache )
{
  if ( std::filesystem::exists( cache ) )
    return parse( read_file( cache ) );
  auto lib = build();
  write_file( cache, lib.serialize() );
  return lib;
}

} // namespace almost
