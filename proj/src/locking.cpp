#include "almost/locking.hpp"

#include "almost/errors.hpp"
#include "almost/rng.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace almost
{

namespace
{

/// Functional inputs, AND nodes, and existing key-gate wires; never key inputs or the constant.
std::vector<uint32_t> candidate_wires( const Aig& g, uint32_t num_functional_inputs )
{
  std::vector<uint32_t> wires;
  for ( uint32_t i = 0; i < num_functional_inputs; ++i )
    wires.push_back( g.input_node( i ) );
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
    wires.push_back( n );
  return wires;
}

struct NewGate
{
  uint32_t host;
  bool bit;
};

/// Rebuilds `ld` with additional key-gates; new key inputs follow the existing ones.
LockedDesign insert_gates( const LockedDesign& ld, const std::vector<NewGate>& gates, Provenance prov, uint64_t seed )
{
  const auto& g = ld.aig;
  AigBuilder b;
  std::vector<Literal> map( g.size(), lit_false );
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
    map[g.input_node( i )] = b.add_input( g.input_name( i ) );

  std::vector<Literal> keys;
  for ( std::size_t i = 0; i < gates.size(); ++i )
    keys.push_back( b.add_input( "keyinput" + std::to_string( ld.key.size() + i ) ) );

  std::vector<int> gate_of( g.size(), -1 );
  for ( std::size_t i = 0; i < gates.size(); ++i )
    gate_of[gates[i].host] = static_cast<int>( i );

  LockedDesign out;
  out.num_functional_inputs = ld.num_functional_inputs;
  out.key = ld.key;
  out.key_gates = ld.key_gates;
  out.lock_seed = seed;
  std::vector<KeyGateRecord> added( gates.size() );

  auto gate = [&]( uint32_t n ) {
    const auto i = static_cast<std::size_t>( gate_of[n] );
    const auto host = map[n];
    const auto k = keys[i] ^ gates[i].bit;
    map[n] = b.xor_( host, k );
    added[i] = { keys[i].node(), gates[i].bit, host, map[n], prov };
  };

  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
    if ( gate_of[g.input_node( i )] >= 0 )
      gate( g.input_node( i ) );
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
  {
    map[n] = b.and_( map[g.fanin0( n ).node()] ^ g.fanin0( n ).complemented(),
                     map[g.fanin1( n ).node()] ^ g.fanin1( n ).complemented() );
    if ( gate_of[n] >= 0 )
      gate( n );
  }
  for ( uint32_t o = 0; o < g.num_outputs(); ++o )
    b.add_output( map[g.output( o ).node()] ^ g.output( o ).complemented(), g.output_name( o ) );

  out.aig = std::move( b ).build();
  for ( std::size_t i = 0; i < gates.size(); ++i )
  {
    out.key.push_back( gates[i].bit );
    out.key_gates.push_back( added[i] );
  }
  return out;
}

LockedDesign add_random_gates( const LockedDesign& ld, uint32_t count, uint64_t seed, Provenance prov )
{
  auto wires = candidate_wires( ld.aig, ld.num_functional_inputs );
  if ( count > wires.size() )
    throw std::invalid_argument( "key size " + std::to_string( count ) + " exceeds " + std::to_string( wires.size() ) +
                                 " available wires" );
  Rng rng( seed );
  // partial Fisher-Yates: the first `count` entries are a uniform sample without replacement
  for ( uint32_t i = 0; i < count; ++i )
    std::swap( wires[i], wires[i + rng.uniform( wires.size() - i )] );
  std::vector<NewGate> gates;
  for ( uint32_t i = 0; i < count; ++i )
    gates.push_back( { wires[i], rng.coin() } );
  return insert_gates( ld, gates, prov, seed );
}

} // namespace

std::string_view to_string( Provenance p ) { return p == Provenance::original ? "orig" : "relock"; }

LockedDesign LockedDesign::with_aig( Aig g ) const
{
  LockedDesign d = *this;
  d.aig = std::move( g );
  return d;
}

LockedDesign lock_rll( const Aig& g, uint32_t key_size, uint64_t seed )
{
  if ( key_size == 0 )
    throw std::invalid_argument( "key size must be positive" );
  LockedDesign plain;
  plain.aig = g;
  plain.num_functional_inputs = g.num_inputs();
  return add_random_gates( plain, key_size, seed, Provenance::original );
}

LockedDesign relock( const LockedDesign& ld, uint32_t extra_key_size, uint64_t seed )
{
  if ( extra_key_size == 0 )
    return ld;
  auto out = add_random_gates( ld, extra_key_size, seed, Provenance::relock );
  out.lock_seed = ld.lock_seed;
  return out;
}

Aig apply_key( const LockedDesign& ld, const Key& key )
{
  if ( key.size() != ld.key.size() )
    throw std::invalid_argument( "key has " + std::to_string( key.size() ) + " bits, design expects " +
                                 std::to_string( ld.key.size() ) );
  const auto& g = ld.aig;
  AigBuilder b;
  std::vector<Literal> map( g.size(), lit_false );
  for ( uint32_t i = 0; i < ld.num_functional_inputs; ++i )
    map[g.input_node( i )] = b.add_input( g.input_name( i ) );
  for ( uint32_t i = 0; i < ld.key_size(); ++i )
    map[ld.key_input_node( i )] = key[i] ? lit_true : lit_false;
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
    map[n] = b.and_( map[g.fanin0( n ).node()] ^ g.fanin0( n ).complemented(),
                     map[g.fanin1( n ).node()] ^ g.fanin1( n ).complemented() );
  for ( uint32_t o = 0; o < g.num_outputs(); ++o )
    b.add_output( map[g.output( o ).node()] ^ g.output( o ).complemented(), g.output_name( o ) );
  return cleanup( std::move( b ).build() );
}

std::string write_key_file( const LockedDesign& ld )
{
  std::ostringstream os;
  os << "ALMOST-KEY v1 seed " << ld.lock_seed << '\n';
  for ( const auto& r : ld.key_gates )
    os << "key_input " << ld.aig.node_name( r.key_input ) << " bit " << ( r.bit ? 1 : 0 ) << " host "
       << ld.aig.node_name( r.host.node() ) << " provenance " << to_string( r.provenance ) << '\n';
  return os.str();
}

LockedDesign read_locked( Aig aig, std::string_view key_text )
{
  std::istringstream is{ std::string( key_text ) };
  std::string line;
  std::size_t line_no = 1;
  if ( !std::getline( is, line ) )
    throw ParseError( "empty key file", 1 );
  LockedDesign ld;
  {
    std::istringstream hs( line );
    std::string magic, version, seed_kw;
    if ( !( hs >> magic >> version >> seed_kw >> ld.lock_seed ) || magic != "ALMOST-KEY" || version != "v1" ||
         seed_kw != "seed" )
      throw ParseError( "expected header 'ALMOST-KEY v1 seed <n>'", 1 );
  }

  auto node_of = [&]( const std::string& name, std::size_t ln ) -> uint32_t {
    if ( auto idx = aig.find_input( name ) )
      return aig.input_node( *idx );
    if ( name.size() > 1 && name[0] == 'n' && std::all_of( name.begin() + 1, name.end(), ::isdigit ) )
    {
      const auto n = static_cast<uint32_t>( std::stoul( name.substr( 1 ) ) );
      if ( n < aig.size() )
        return n;
    }
    throw ParseError( "unknown signal '" + name + "'", ln );
  };

  while ( std::getline( is, line ) )
  {
    ++line_no;
    if ( line.find_first_not_of( " \t\r" ) == std::string::npos )
      continue;
    std::istringstream ls( line );
    std::string kw_key, key_name, kw_bit, kw_host, host_name, kw_prov, prov;
    int bit = -1;
    if ( !( ls >> kw_key >> key_name >> kw_bit >> bit >> kw_host >> host_name >> kw_prov >> prov ) ||
         kw_key != "key_input" || kw_bit != "bit" || kw_host != "host" || kw_prov != "provenance" ||
         ( bit != 0 && bit != 1 ) || ( prov != "orig" && prov != "relock" ) )
      throw ParseError( "malformed key line", line_no );
    KeyGateRecord r;
    r.key_input = node_of( key_name, line_no );
    if ( !aig.is_input( r.key_input ) )
      throw ParseError( "key '" + key_name + "' is not an input", line_no );
    r.bit = bit == 1;
    r.host = Literal( node_of( host_name, line_no ), false );
    r.root = lit_false;
    r.provenance = prov == "orig" ? Provenance::original : Provenance::relock;
    ld.key.push_back( r.bit );
    ld.key_gates.push_back( r );
  }
  if ( ld.key.size() > aig.num_inputs() )
    throw DataError( "key file lists more keys than the graph has inputs" );
  ld.num_functional_inputs = aig.num_inputs() - static_cast<uint32_t>( ld.key.size() );
  for ( uint32_t i = 0; i < ld.key.size(); ++i )
    if ( ld.key_gates[i].key_input != aig.input_node( ld.num_functional_inputs + i ) )
      throw DataError( "key inputs must be the trailing inputs, in key order" );
  ld.aig = std::move( aig );
  return ld;
}

} // namespace almost
