#include "almost/locality.hpp"

#include "almost/errors.hpp"
#include "almost/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace almost
{

namespace
{

constexpr uint64_t hash_combine( uint64_t h, uint64_t v ) { return mix_seed( h ^ ( v + 0x9e3779b97f4a7c15ull + ( h << 6 ) + ( h >> 2 ) ) ); }

class Extractor
{
public:
  Extractor( const Aig& g, uint32_t num_functional_inputs )
      : g_( g ), num_functional_( num_functional_inputs ), fanouts_( g.size() ), is_output_( g.size(), false ),
        dist_( g.size(), unvisited )
  {
    for ( uint32_t n = g.first_and(); n < g.size(); ++n )
      for ( auto f : { g.fanin0( n ), g.fanin1( n ) } )
        fanouts_[f.node()].push_back( { n, f.complemented() } );
    for ( auto o : g.outputs() )
      is_output_[o.node()] = true;
  }

  Locality extract( uint32_t center, uint32_t hops )
  {
    std::vector<uint32_t> order{ center };
    dist_[center] = 0;
    for ( std::size_t i = 0; i < order.size(); ++i )
    {
      const auto n = order[i];
      if ( dist_[n] == hops )
        continue;
      auto visit = [&]( uint32_t m ) {
        if ( m != 0 && dist_[m] == unvisited )
        {
          dist_[m] = dist_[n] + 1;
          order.push_back( m );
        }
      };
      if ( g_.is_and( n ) )
      {
        visit( g_.fanin0( n ).node() );
        visit( g_.fanin1( n ).node() );
      }
      for ( const auto& fo : fanouts_[n] )
        visit( fo.node );
    }

    Locality loc;
    std::vector<uint32_t> index_of( order.size() );
    for ( const auto n : order )
    {
      LocalityNode ln;
      ln.node = n;
      ln.hop = dist_[n];
      ln.is_output = is_output_[n];
      if ( g_.is_input( n ) )
        ln.kind = g_.input_index( n ) >= num_functional_ ? LocalityKind::key_input : LocalityKind::input;
      else
        ln.complemented_fanins =
            static_cast<uint8_t>( int( g_.fanin0( n ).complemented() ) + int( g_.fanin1( n ).complemented() ) );
      for ( const auto& fo : fanouts_[n] )
      {
        ( fo.complemented ? ln.fanout_complemented : ln.fanout_plain )++;
        const auto other = g_.fanin0( fo.node ).node() == n ? g_.fanin1( fo.node ) : g_.fanin0( fo.node );
        ln.fanout_mixed += other.complemented() != fo.complemented;
      }
      loc.nodes.push_back( ln );
    }
    // local index lookup through the distance array (reset below)
    for ( uint32_t i = 0; i < order.size(); ++i )
      local_[order[i]] = i;
    for ( uint32_t i = 0; i < order.size(); ++i )
    {
      const auto n = order[i];
      if ( !g_.is_and( n ) )
        continue;
      for ( auto f : { g_.fanin0( n ), g_.fanin1( n ) } )
        if ( auto it = local_.find( f.node() ); it != local_.end() )
          loc.edges.push_back( { it->second, i, f.complemented() } );
    }
    for ( const auto n : order )
      dist_[n] = unvisited;
    local_.clear();
    return loc;
  }

private:
  static constexpr uint32_t unvisited = ~0u;
  struct Fanout
  {
    uint32_t node;
    bool complemented;
  };

  const Aig& g_;
  uint32_t num_functional_;
  std::vector<std::vector<Fanout>> fanouts_;
  std::vector<bool> is_output_;
  std::vector<uint32_t> dist_;
  std::unordered_map<uint32_t, uint32_t> local_;
};

std::string format_double( double v )
{
  char buf[32];
  std::snprintf( buf, sizeof buf, "%.17g", v );
  return buf;
}

} // namespace

void EmbedConfig::validate() const
{
  if ( hops < 1 )
    throw std::invalid_argument( "embedding hops must be at least 1" );
  if ( dimension <= num_stats || ( dimension & ( dimension - 1 ) ) != 0 )
    throw std::invalid_argument( "embedding dimension must be a power of two above " + std::to_string( num_stats ) );
}

std::string EmbedConfig::fingerprint() const
{
  return "h" + std::to_string( hops ) + "-r" + std::to_string( wl_iterations ) + "-d" + std::to_string( dimension ) +
         "-s" + std::to_string( hash_seed );
}

EmbedConfig EmbedConfig::from_fingerprint( std::string_view fp )
{
  EmbedConfig c;
  unsigned long long h = 0, r = 0, d = 0, s = 0;
  const std::string text( fp );
  if ( std::sscanf( text.c_str(), "h%llu-r%llu-d%llu-s%llu", &h, &r, &d, &s ) != 4 )
    throw DataError( "malformed embedding fingerprint '" + text + "'" );
  c.hops = static_cast<uint32_t>( h );
  c.wl_iterations = static_cast<uint32_t>( r );
  c.dimension = static_cast<uint32_t>( d );
  c.hash_seed = s;
  if ( c.fingerprint() != text )
    throw DataError( "malformed embedding fingerprint '" + text + "'" );
  return c;
}

Locality extract_locality( const Aig& g, uint32_t center, uint32_t hops, uint32_t num_functional_inputs )
{
  if ( center == 0 || center >= g.size() )
    throw std::out_of_range( "locality center " + std::to_string( center ) + " is not a node" );
  return Extractor( g, num_functional_inputs ).extract( center, hops );
}

Locality extract_locality( const LockedDesign& ld, uint32_t key_index, uint32_t hops )
{
  if ( key_index >= ld.key_size() )
    throw std::out_of_range( "key index " + std::to_string( key_index ) + " out of range" );
  return extract_locality( ld.aig, ld.key_input_node( key_index ), hops, ld.num_functional_inputs );
}

FeatureVector embed( const Locality& loc, const EmbedConfig& cfg )
{
  const uint32_t bins = cfg.dimension - EmbedConfig::num_stats;
  FeatureVector v( cfg.dimension, 0.0 );
  const auto n = loc.nodes.size();

  std::vector<uint64_t> label( n );
  for ( std::size_t i = 0; i < n; ++i )
  {
    const auto& nd = loc.nodes[i];
    uint64_t h = mix_seed( cfg.hash_seed );
    for ( uint64_t f : { uint64_t( nd.kind ), uint64_t( nd.is_output ), uint64_t( nd.complemented_fanins ),
                         uint64_t( std::min( nd.fanout_plain, 3u ) ), uint64_t( std::min( nd.fanout_complemented, 3u ) ),
                         uint64_t( std::min( nd.fanout_mixed, 3u ) ), uint64_t( nd.hop ) } )
      h = hash_combine( h, f );
    label[i] = h;
  }

  std::vector<std::vector<std::pair<uint32_t, uint8_t>>> adj( n ); // (neighbor, direction << 1 | polarity)
  for ( const auto& e : loc.edges )
  {
    adj[e.to].push_back( { e.from, uint8_t( 0u | e.complemented ) } );
    adj[e.from].push_back( { e.to, uint8_t( 2u | e.complemented ) } );
  }

  auto count_labels = [&]( uint32_t round ) {
    for ( auto l : label )
      v[hash_combine( l, round ) % bins] += 1.0;
  };
  count_labels( 0 );
  std::vector<uint64_t> next( n ), multiset;
  for ( uint32_t r = 1; r <= cfg.wl_iterations; ++r )
  {
    for ( std::size_t i = 0; i < n; ++i )
    {
      multiset.clear();
      for ( const auto& [m, tag] : adj[i] )
        multiset.push_back( hash_combine( label[m], tag ) );
      std::sort( multiset.begin(), multiset.end() );
      uint64_t h = hash_combine( label[i], r );
      for ( auto x : multiset )
        h = hash_combine( h, x );
      next[i] = h;
    }
    label.swap( next );
    count_labels( r );
  }

  // statistics: size, edge count, longest fanin path, hop histogram (hops 0..4, last bin open)
  // longest fanin path inside the locality, by Kahn's order over the edges
  std::vector<uint32_t> depth( n, 0 ), pending( n, 0 ), ready;
  for ( const auto& e : loc.edges )
    ++pending[e.to];
  for ( uint32_t i = 0; i < n; ++i )
    if ( pending[i] == 0 )
      ready.push_back( i );
  while ( !ready.empty() )
  {
    const auto i = ready.back();
    ready.pop_back();
    for ( const auto& [m, tag] : adj[i] )
      if ( tag & 2u )
      {
        depth[m] = std::max( depth[m], depth[i] + 1 );
        if ( --pending[m] == 0 )
          ready.push_back( m );
      }
  }
  const auto max_depth = n ? *std::max_element( depth.begin(), depth.end() ) : 0u;

  double* stats = v.data() + bins;
  stats[0] = std::log1p( double( n ) );
  stats[1] = std::log1p( double( loc.edges.size() ) );
  stats[2] = std::log1p( double( max_depth ) );
  for ( const auto& nd : loc.nodes )
    stats[3 + std::min( nd.hop, 4u )] += 1.0 / double( n );

  double norm = 0.0;
  for ( auto x : v )
    norm += x * x;
  if ( norm > 0.0 )
  {
    norm = std::sqrt( norm );
    for ( auto& x : v )
      x /= norm;
  }
  return v;
}

void Dataset::append( const Dataset& other )
{
  if ( !other.empty() && !empty() && other.embed_fingerprint != embed_fingerprint )
    throw DataError( "cannot merge datasets with embeddings " + embed_fingerprint + " and " + other.embed_fingerprint );
  if ( empty() )
    embed_fingerprint = other.embed_fingerprint;
  samples.insert( samples.end(), other.samples.begin(), other.samples.end() );
}

Dataset embed_key_gates( const LockedDesign& ld, Provenance which, const EmbedConfig& cfg, std::string_view design,
                         std::string_view recipe )
{
  cfg.validate();
  Dataset d;
  d.embed_fingerprint = cfg.fingerprint();
  Extractor ex( ld.aig, ld.num_functional_inputs );
  for ( uint32_t i = 0; i < ld.key_size(); ++i )
  {
    if ( ld.key_gates[i].provenance != which )
      continue;
    LabeledSample s;
    s.feature = embed( ex.extract( ld.key_input_node( i ), cfg.hops ), cfg );
    s.label = ld.key[i] ? 1 : 0;
    s.prov = { std::string( design ), std::string( recipe ), i, which };
    d.samples.push_back( std::move( s ) );
  }
  return d;
}

Dataset build_dataset( const LockedDesign& ld, const std::vector<Recipe>& recipes, uint32_t relock_size,
                       uint32_t per_recipe_samples, const EmbedConfig& cfg, uint64_t seed, std::string_view design )
{
  if ( per_recipe_samples > relock_size )
    throw std::invalid_argument( "per-recipe samples exceed the relock size" );
  cfg.validate();
  Dataset out;
  out.embed_fingerprint = cfg.fingerprint();
  for ( std::size_t r = 0; r < recipes.size(); ++r )
  {
    const auto re = relock( ld, relock_size, derive_seed( seed, 2 * r ) );
    const auto synth = re.with_aig( apply_recipe( re.aig, recipes[r] ).first );
    auto all = embed_key_gates( synth, Provenance::relock, cfg, design, recipes[r].to_string() );
    Rng rng( derive_seed( seed, 2 * r + 1 ) );
    rng.shuffle( all.samples.begin(), all.samples.end() );
    all.samples.resize( per_recipe_samples );
    std::sort( all.samples.begin(), all.samples.end(),
               []( const LabeledSample& a, const LabeledSample& b ) { return a.prov.key_gate < b.prov.key_gate; } );
    out.append( all );
  }
  return out;
}

std::string write_dataset( const Dataset& d )
{
  std::string s = "ALMOST-DATA v1\nembed " + d.embed_fingerprint + "\n";
  for ( const auto& x : d.samples )
  {
    s += "label " + std::to_string( x.label ) + " prov " + x.prov.design + ":" + x.prov.recipe + ":" +
         std::to_string( x.prov.key_gate ) + ":" + std::string( to_string( x.prov.kind ) ) + " vec";
    for ( auto v : x.feature )
      s += " " + format_double( v );
    s += '\n';
  }
  return s;
}

Dataset parse_dataset( std::string_view text )
{
  std::istringstream is{ std::string( text ) };
  std::string line;
  if ( !std::getline( is, line ) || line != "ALMOST-DATA v1" )
    throw ParseError( "expected header 'ALMOST-DATA v1'", 1 );
  Dataset d;
  std::size_t line_no = 1, dim = 0;
  while ( std::getline( is, line ) )
  {
    ++line_no;
    if ( line.empty() )
      continue;
    std::istringstream ls( line );
    std::string kw;
    ls >> kw;
    if ( kw == "embed" )
    {
      ls >> d.embed_fingerprint;
      EmbedConfig::from_fingerprint( d.embed_fingerprint );
      continue;
    }
    LabeledSample s;
    std::string prov, vec_kw;
    if ( kw != "label" || !( ls >> s.label >> kw >> prov >> vec_kw ) || kw != "prov" || vec_kw != "vec" ||
         ( s.label != 0 && s.label != 1 ) )
      throw ParseError( "malformed sample line", line_no );
    // design:recipe:gate:kind, split from the right so designs may contain ':'
    const auto p3 = prov.rfind( ':' );
    const auto p2 = p3 == std::string::npos || p3 == 0 ? std::string::npos : prov.rfind( ':', p3 - 1 );
    const auto p1 = p2 == std::string::npos || p2 == 0 ? std::string::npos : prov.rfind( ':', p2 - 1 );
    if ( p1 == std::string::npos )
      throw ParseError( "malformed provenance '" + prov + "'", line_no );
    s.prov.design = prov.substr( 0, p1 );
    s.prov.recipe = prov.substr( p1 + 1, p2 - p1 - 1 );
    const auto gate = prov.substr( p2 + 1, p3 - p2 - 1 );
    const auto kind = prov.substr( p3 + 1 );
    if ( gate.empty() || !std::all_of( gate.begin(), gate.end(), ::isdigit ) || ( kind != "orig" && kind != "relock" ) )
      throw ParseError( "malformed provenance '" + prov + "'", line_no );
    s.prov.key_gate = static_cast<uint32_t>( std::stoul( gate ) );
    s.prov.kind = kind == "orig" ? Provenance::original : Provenance::relock;
    std::string tok;
    while ( ls >> tok )
    {
      char* end = nullptr;
      const double v = std::strtod( tok.c_str(), &end );
      if ( *end != '\0' || !std::isfinite( v ) )
        throw ParseError( "bad feature value '" + tok + "'", line_no );
      s.feature.push_back( v );
    }
    if ( dim == 0 )
      dim = s.feature.size();
    if ( s.feature.empty() || s.feature.size() != dim )
      throw ParseError( "inconsistent feature dimension", line_no );
    d.samples.push_back( std::move( s ) );
  }
  return d;
}

std::pair<Dataset, Dataset> split_dataset( const Dataset& d, double validation_fraction, uint64_t seed )
{
  if ( !( validation_fraction > 0.0 && validation_fraction < 1.0 ) )
    throw std::invalid_argument( "validation fraction must lie in (0, 1)" );
  std::vector<std::size_t> idx( d.size() );
  for ( std::size_t i = 0; i < idx.size(); ++i )
    idx[i] = i;
  Rng rng( seed );
  rng.shuffle( idx.begin(), idx.end() );
  const auto nval = static_cast<std::size_t>( std::llround( double( d.size() ) * validation_fraction ) );
  Dataset train, val;
  train.embed_fingerprint = val.embed_fingerprint = d.embed_fingerprint;
  for ( std::size_t k = 0; k < idx.size(); ++k )
    ( k < nval ? val : train ).samples.push_back( d.samples[idx[k]] );
  return { std::move( train ), std::move( val ) };
}

} // namespace almost
