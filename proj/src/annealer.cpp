#include "almost/annealer.hpp"

#include "almost/errors.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace almost
{

namespace
{

std::string fmt( double v )
{
  char buf[32];
  std::snprintf( buf, sizeof buf, "%.17g", v );
  return buf;
}

double parse_double( const std::string& s, std::size_t line )
{
  char* end = nullptr;
  const double v = std::strtod( s.c_str(), &end );
  if ( s.empty() || *end != '\0' )
    throw ParseError( "bad number '" + s + "'", line );
  return v;
}

} // namespace

std::string_view to_string( EnergyRole r )
{
  switch ( r )
  {
  case EnergyRole::defense:
    return "defense";
  case EnergyRole::adversarial:
    return "adversarial";
  case EnergyRole::area:
    return "area";
  case EnergyRole::delay:
    return "delay";
  }
  return "?";
}

void AnnealerConfig::validate() const
{
  if ( !( initial_temperature > 0.0 ) )
    throw std::invalid_argument( "initial temperature must be positive" );
  if ( !( cooling > 0.0 && cooling < 1.0 ) )
    throw std::invalid_argument( "cooling factor must lie in (0, 1)" );
  if ( max_iterations < 1 )
    throw std::invalid_argument( "annealing needs at least one iteration" );
  if ( !( acceptance_scale > 0.0 ) )
    throw std::invalid_argument( "acceptance scale must be positive" );
}

AnnealerConfig AnnealerConfig::defense()
{
  AnnealerConfig c;
  c.stop_threshold = 0.005;
  return c;
}

AnnealerConfig AnnealerConfig::adversarial()
{
  AnnealerConfig c;
  c.max_iterations = 20;
  return c;
}

Recipe neighbor( const Recipe& r, Rng& rng )
{
  Recipe out = r;
  if ( r.steps.empty() )
    return out;
  const auto pos = rng.uniform( r.size() );
  // a uniform pick among the six other transforms
  auto idx = rng.uniform( all_transform_ids.size() - 1 );
  if ( idx >= static_cast<uint64_t>( r.steps[pos] ) )
    ++idx;
  out.steps[pos] = all_transform_ids[idx];
  return out;
}

double acceptance_probability( double delta_energy, double temperature, double scale )
{
  if ( delta_energy <= 0.0 )
    return 1.0;
  return std::exp( -delta_energy * scale / temperature );
}

AnnealResult anneal( const Recipe& initial, const EnergyFn& energy, const AnnealerConfig& cfg )
{
  cfg.validate();
  Rng rng( cfg.seed );
  std::map<std::string, double> memo;
  auto evaluate = [&]( const Recipe& r, uint32_t iteration ) {
    const auto key = r.to_string();
    if ( auto it = memo.find( key ); it != memo.end() )
      return it->second;
    const double e = energy( r );
    if ( !std::isfinite( e ) )
      throw DataError( "non-finite energy at iteration " + std::to_string( iteration ) + " for recipe " + key );
    memo.emplace( key, e );
    return e;
  };

  AnnealResult res;
  Recipe current = initial;
  double current_e = evaluate( current, 0 );
  res.best = current;
  res.best_energy = current_e;
  res.trace.records.push_back( { 0, current, current_e, true, current_e, cfg.initial_temperature } );

  double temperature = cfg.initial_temperature;
  for ( uint32_t it = 1; it <= cfg.max_iterations && res.best_energy > cfg.stop_threshold; ++it )
  {
    temperature *= cfg.cooling;
    const auto cand = neighbor( current, rng );
    const double e = evaluate( cand, it );
    const double u = rng.uniform_real();
    const bool accepted = u < acceptance_probability( e - current_e, temperature, cfg.acceptance_scale );
    if ( accepted )
    {
      current = cand;
      current_e = e;
    }
    if ( e < res.best_energy )
    {
      res.best = cand;
      res.best_energy = e;
    }
    res.trace.records.push_back( { it, cand, e, accepted, res.best_energy, temperature } );
  }
  return res;
}

EnergyFn defense_energy( const LockedDesign& ld, const ModelParams& m, const EmbedConfig& cfg )
{
  if ( !m.embed_fingerprint.empty() && m.embed_fingerprint != cfg.fingerprint() )
    throw DataError( "model embedding " + m.embed_fingerprint + " does not match " + cfg.fingerprint() );
  auto design = std::make_shared<const LockedDesign>( ld );
  auto model = std::make_shared<const ModelParams>( m );
  return { EnergyRole::defense, [design, model, cfg]( const Recipe& r ) {
            const auto synth = design->with_aig( apply_recipe( design->aig, r ).first );
            const auto data = embed_key_gates( synth, Provenance::original, cfg, "defense", r.to_string() );
            return std::abs( accuracy( *model, data ) - 0.5 );
          } };
}

EnergyFn adversarial_energy( const LockedDesign& ld, const ModelParams& m, const EmbedConfig& cfg, uint32_t relock_size,
                             uint64_t seed )
{
  if ( !m.embed_fingerprint.empty() && m.embed_fingerprint != cfg.fingerprint() )
    throw DataError( "model embedding " + m.embed_fingerprint + " does not match " + cfg.fingerprint() );
  auto design = std::make_shared<const LockedDesign>( relock( ld, relock_size, seed ) );
  auto model = std::make_shared<const ModelParams>( m );
  return { EnergyRole::adversarial, [design, model, cfg]( const Recipe& r ) {
            const auto synth = design->with_aig( apply_recipe( design->aig, r ).first );
            const auto data = embed_key_gates( synth, Provenance::relock, cfg, "adversarial", r.to_string() );
            return -mean_loss( *model, data );
          } };
}

EnergyFn ppa_energy( const Aig& g, PpaObjective objective )
{
  auto graph = std::make_shared<const Aig>( g );
  auto measure = [objective]( const Aig& a ) {
    return double( objective == PpaObjective::area ? node_count( a ) : depth( a ) );
  };
  const double base = std::max( 1.0, measure( apply_recipe( g, resyn2_baseline() ).first ) );
  return { objective == PpaObjective::area ? EnergyRole::area : EnergyRole::delay,
           [graph, measure, base]( const Recipe& r ) { return measure( apply_recipe( *graph, r ).first ) / base; } };
}

std::string write_trace_csv( const AnnealTrace& t )
{
  std::string s = "iter,recipe,energy,accepted,best_energy,temperature\n";
  for ( const auto& r : t.records )
    s += std::to_string( r.iteration ) + "," + r.recipe.to_string() + "," + fmt( r.energy ) + "," +
         ( r.accepted ? "1" : "0" ) + "," + fmt( r.best_energy ) + "," + fmt( r.temperature ) + "\n";
  return s;
}

AnnealTrace parse_trace_csv( std::string_view text )
{
  std::istringstream is{ std::string( text ) };
  std::string line;
  if ( !std::getline( is, line ) || line != "iter,recipe,energy,accepted,best_energy,temperature" )
    throw ParseError( "expected trace header", 1 );
  AnnealTrace t;
  std::size_t line_no = 1;
  while ( std::getline( is, line ) )
  {
    ++line_no;
    if ( line.empty() )
      continue;
    std::vector<std::string> f;
    std::stringstream ls( line );
    std::string cell;
    while ( std::getline( ls, cell, ',' ) )
      f.push_back( cell );
    if ( f.size() != 6 || ( f[3] != "0" && f[3] != "1" ) )
      throw ParseError( "expected 6 trace fields", line_no );
    AnnealRecord r;
    r.iteration = static_cast<uint32_t>( parse_double( f[0], line_no ) );
    try
    {
      r.recipe = Recipe::from_string( f[1] );
    }
    catch ( const DataError& e )
    {
      throw ParseError( e.what(), line_no );
    }
    r.energy = parse_double( f[2], line_no );
    r.accepted = f[3] == "1";
    r.best_energy = parse_double( f[4], line_no );
    r.temperature = parse_double( f[5], line_no );
    t.records.push_back( std::move( r ) );
  }
  return t;
}

} // namespace almost
