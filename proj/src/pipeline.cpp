#include "almost/pipeline.hpp"

#include "almost/errors.hpp"
#include "almost/rng.hpp"
#include "almost/simulate.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace almost
{

namespace
{

std::string trim( std::string_view s )
{
  const auto b = s.find_first_not_of( " \t\r" );
  if ( b == std::string_view::npos )
    return {};
  const auto e = s.find_last_not_of( " \t\r" );
  return std::string( s.substr( b, e - b + 1 ) );
}

template<typename T>
T parse_uint( const std::string& v, std::size_t line )
{
  T x{};
  const auto [p, ec] = std::from_chars( v.data(), v.data() + v.size(), x );
  if ( v.empty() || ec != std::errc{} || p != v.data() + v.size() )
    throw ParseError( "bad integer '" + v + "'", line );
  return x;
}

double parse_real( const std::string& v, std::size_t line )
{
  if ( v == "-inf" )
    return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double x = std::strtod( v.c_str(), &end );
  if ( v.empty() || *end != '\0' )
    throw ParseError( "bad number '" + v + "'", line );
  return x;
}

std::string fmt17( double v )
{
  if ( std::isinf( v ) )
    return v < 0 ? "-inf" : "inf";
  char buf[32];
  std::snprintf( buf, sizeof buf, "%.17g", v );
  return buf;
}

std::string fmt6( double v )
{
  char buf[48];
  std::snprintf( buf, sizeof buf, "%.6f", v );
  return buf;
}

using Setter = std::function<void( PipelineConfig&, const std::string&, std::size_t )>;

template<typename T>
Setter uint_field( T PipelineConfig::*field )
{
  return [field]( PipelineConfig& c, const std::string& v, std::size_t l ) { c.*field = parse_uint<T>( v, l ); };
}

void anneal_fields( std::map<std::string, Setter>& t, const std::string& section, AnnealerConfig PipelineConfig::*a )
{
  t[section + ".initial_temperature"] = [a]( PipelineConfig& c, const std::string& v, std::size_t l ) {
    ( c.*a ).initial_temperature = parse_real( v, l );
  };
  t[section + ".max_iterations"] = [a]( PipelineConfig& c, const std::string& v, std::size_t l ) {
    ( c.*a ).max_iterations = parse_uint<uint32_t>( v, l );
  };
  t[section + ".acceptance_scale"] = [a]( PipelineConfig& c, const std::string& v, std::size_t l ) {
    ( c.*a ).acceptance_scale = parse_real( v, l );
  };
  t[section + ".cooling"] = [a]( PipelineConfig& c, const std::string& v, std::size_t l ) {
    ( c.*a ).cooling = parse_real( v, l );
  };
  t[section + ".stop_threshold"] = [a]( PipelineConfig& c, const std::string& v, std::size_t l ) {
    ( c.*a ).stop_threshold = parse_real( v, l );
  };
  t[section + ".seed"] = [a]( PipelineConfig& c, const std::string& v, std::size_t l ) {
    ( c.*a ).seed = parse_uint<uint64_t>( v, l );
  };
}

const std::map<std::string, Setter>& config_fields()
{
  static const auto table = [] {
    std::map<std::string, Setter> t;
    t["lock.key_size"] = uint_field( &PipelineConfig::key_size );
    t["lock.seed"] = uint_field( &PipelineConfig::lock_seed );
    t["embed.hops"] = []( PipelineConfig& c, const std::string& v, std::size_t l ) {
      c.embed.hops = parse_uint<uint32_t>( v, l );
    };
    t["embed.wl_iterations"] = []( PipelineConfig& c, const std::string& v, std::size_t l ) {
      c.embed.wl_iterations = parse_uint<uint32_t>( v, l );
    };
    t["embed.dimension"] = []( PipelineConfig& c, const std::string& v, std::size_t l ) {
      c.embed.dimension = parse_uint<uint32_t>( v, l );
    };
    t["embed.hash_seed"] = []( PipelineConfig& c, const std::string& v, std::size_t l ) {
      c.embed.hash_seed = parse_uint<uint64_t>( v, l );
    };
    t["train.epochs"] = []( PipelineConfig& c, const std::string& v, std::size_t l ) {
      c.train.epochs = parse_uint<uint32_t>( v, l );
    };
    t["train.batch_size"] = []( PipelineConfig& c, const std::string& v, std::size_t l ) {
      c.train.batch_size = parse_uint<uint32_t>( v, l );
    };
    t["train.learning_rate"] = []( PipelineConfig& c, const std::string& v, std::size_t l ) {
      c.train.learning_rate = parse_real( v, l );
    };
    t["train.validation_fraction"] = []( PipelineConfig& c, const std::string& v, std::size_t l ) {
      c.train.validation_fraction = parse_real( v, l );
    };
    t["train.hidden"] = []( PipelineConfig& c, const std::string& v, std::size_t l ) {
      c.train.hidden = parse_uint<uint32_t>( v, l );
    };
    t["train.seed"] = []( PipelineConfig& c, const std::string& v, std::size_t l ) {
      c.train.seed = parse_uint<uint64_t>( v, l );
    };
    anneal_fields( t, "anneal.defense", &PipelineConfig::defense );
    anneal_fields( t, "anneal.adversarial", &PipelineConfig::adversarial );
    t["pipeline.period"] = uint_field( &PipelineConfig::period );
    t["pipeline.initial_samples"] = uint_field( &PipelineConfig::initial_samples );
    t["pipeline.augment_size"] = uint_field( &PipelineConfig::augment_size );
    t["pipeline.relock_size"] = uint_field( &PipelineConfig::relock_size );
    t["pipeline.samples_per_relock"] = uint_field( &PipelineConfig::samples_per_relock );
    t["pipeline.data_seed"] = uint_field( &PipelineConfig::data_seed );
    t["pipeline.eval_recipes"] = uint_field( &PipelineConfig::eval_recipes );
    t["pipeline.toggle_pairs"] = uint_field( &PipelineConfig::toggle_pairs );
    t["pipeline.seed"] = []( PipelineConfig& c, const std::string& v, std::size_t l ) {
      c.set_seed( parse_uint<uint64_t>( v, l ) );
    };
    return t;
  }();
  return table;
}

void check_fingerprint( const ModelParams& m, const EmbedConfig& cfg )
{
  if ( !m.embed_fingerprint.empty() && m.embed_fingerprint != cfg.fingerprint() )
    throw DataError( "model embedding " + m.embed_fingerprint + " does not match " + cfg.fingerprint() );
}

} // namespace

void PipelineConfig::validate() const
{
  if ( key_size < 1 )
    throw std::invalid_argument( "key size must be positive" );
  embed.validate();
  train.validate();
  defense.validate();
  adversarial.validate();
  if ( period < 1 )
    throw std::invalid_argument( "adversarial period must be positive" );
  if ( augment_size < 1 )
    throw std::invalid_argument( "augment size must be positive" );
  if ( initial_samples < 2 )
    throw std::invalid_argument( "need at least two initial samples" );
  if ( samples_per_relock < 1 || samples_per_relock > relock_size )
    throw std::invalid_argument( "samples per relock must lie in [1, relock size]" );
  if ( eval_recipes < 1 )
    throw std::invalid_argument( "transfer evaluation needs at least one recipe" );
  if ( toggle_pairs < 1 )
    throw std::invalid_argument( "toggle proxy needs at least one vector pair" );
}

void PipelineConfig::set_seed( uint64_t seed )
{
  lock_seed = seed;
  data_seed = derive_seed( seed, 1 );
  train.seed = derive_seed( seed, 2 );
  defense.seed = derive_seed( seed, 3 );
  adversarial.seed = derive_seed( seed, 4 );
}

PipelineConfig PipelineConfig::seeded( uint64_t seed )
{
  PipelineConfig c;
  c.set_seed( seed );
  return c;
}

PipelineConfig parse_config( std::string_view text, PipelineConfig base )
{
  static const std::vector<std::string> sections = { "lock", "embed", "train", "anneal.defense", "anneal.adversarial",
                                                     "pipeline" };
  std::istringstream is{ std::string( text ) };
  std::string raw, section;
  std::size_t line = 0;
  while ( std::getline( is, raw ) )
  {
    ++line;
    if ( const auto hash = raw.find( '#' ); hash != std::string::npos )
      raw.erase( hash );
    const auto s = trim( raw );
    if ( s.empty() )
      continue;
    if ( s.front() == '[' )
    {
      if ( s.back() != ']' )
        throw ParseError( "unterminated section header", line );
      section = trim( std::string_view( s ).substr( 1, s.size() - 2 ) );
      if ( std::find( sections.begin(), sections.end(), section ) == sections.end() )
        throw ParseError( "unknown section [" + section + "]", line );
      continue;
    }
    const auto eq = s.find( '=' );
    if ( eq == std::string::npos )
      throw ParseError( "expected key = value", line );
    if ( section.empty() )
      throw ParseError( "key outside of a section", line );
    const auto key = trim( std::string_view( s ).substr( 0, eq ) );
    const auto value = trim( std::string_view( s ).substr( eq + 1 ) );
    const auto it = config_fields().find( section + "." + key );
    if ( it == config_fields().end() )
      throw ParseError( "unknown key '" + key + "' in [" + section + "]", line );
    it->second( base, value, line );
  }
  try
  {
    base.validate();
  }
  catch ( const std::invalid_argument& e )
  {
    throw DataError( std::string( "invalid config: " ) + e.what() );
  }
  return base;
}

std::string write_config( const PipelineConfig& c )
{
  std::ostringstream os;
  os << "[lock]\nkey_size = " << c.key_size << "\nseed = " << c.lock_seed << "\n\n";
  os << "[embed]\nhops = " << c.embed.hops << "\nwl_iterations = " << c.embed.wl_iterations
     << "\ndimension = " << c.embed.dimension << "\nhash_seed = " << c.embed.hash_seed << "\n\n";
  os << "[train]\nepochs = " << c.train.epochs << "\nbatch_size = " << c.train.batch_size
     << "\nlearning_rate = " << fmt17( c.train.learning_rate ) << "\nvalidation_fraction = "
     << fmt17( c.train.validation_fraction ) << "\nhidden = " << c.train.hidden << "\nseed = " << c.train.seed
     << "\n\n";
  for ( const auto& [name, a] : { std::pair{ "anneal.defense", &c.defense }, std::pair{ "anneal.adversarial", &c.adversarial } } )
    os << "[" << name << "]\ninitial_temperature = " << fmt17( a->initial_temperature )
       << "\nmax_iterations = " << a->max_iterations << "\nacceptance_scale = " << fmt17( a->acceptance_scale )
       << "\ncooling = " << fmt17( a->cooling ) << "\nstop_threshold = " << fmt17( a->stop_threshold )
       << "\nseed = " << a->seed << "\n\n";
  os << "[pipeline]\nperiod = " << c.period << "\ninitial_samples = " << c.initial_samples
     << "\naugment_size = " << c.augment_size << "\nrelock_size = " << c.relock_size
     << "\nsamples_per_relock = " << c.samples_per_relock << "\ndata_seed = " << c.data_seed
     << "\neval_recipes = " << c.eval_recipes << "\ntoggle_pairs = " << c.toggle_pairs << "\n";
  return os.str();
}

std::vector<Recipe> random_recipes( uint32_t count, uint64_t seed )
{
  std::vector<Recipe> rs;
  for ( uint32_t i = 0; i < count; ++i )
    rs.push_back( random_recipe( 10, derive_seed( seed, i ) ) );
  return rs;
}

Dataset self_referencing_samples( const LockedDesign& ld, const std::vector<Recipe>& recipes, uint32_t count,
                                  const PipelineConfig& cfg, uint64_t seed, std::string_view design )
{
  if ( recipes.empty() )
    throw std::invalid_argument( "self-referencing samples need at least one recipe" );
  const uint32_t per = cfg.samples_per_relock;
  const uint32_t full = count / per, rest = count % per;
  std::vector<Recipe> cycle;
  for ( uint32_t i = 0; i < full; ++i )
    cycle.push_back( recipes[i % recipes.size()] );
  Dataset d = build_dataset( ld, cycle, cfg.relock_size, per, cfg.embed, seed, design );
  if ( rest > 0 )
    d.append( build_dataset( ld, { recipes[full % recipes.size()] }, cfg.relock_size, rest, cfg.embed,
                             derive_seed( seed, 0x7e57 ), design ) );
  d.embed_fingerprint = cfg.embed.fingerprint();
  return d;
}

AdversarialResult adversarial_train( const LockedDesign& ld, const PipelineConfig& cfg, std::string_view design )
{
  cfg.validate();
  const auto initial = self_referencing_samples( ld, random_recipes( cfg.initial_samples / cfg.samples_per_relock + 1,
                                                                     derive_seed( cfg.data_seed, 1 ) ),
                                                 cfg.initial_samples, cfg, derive_seed( cfg.data_seed, 2 ), design );
  auto [train_part, val_part] = split_dataset( initial, cfg.train.validation_fraction, derive_seed( cfg.data_seed, 3 ) );
  if ( train_part.empty() || val_part.empty() )
    throw DataError( "initial split leaves an empty training or validation part" );

  AdversarialResult res;
  res.history.initial_size = initial.size();
  res.model = init_params( cfg.embed.dimension, cfg.train.hidden, derive_seed( cfg.train.seed, ~uint64_t{ 0 } ),
                           cfg.embed.fingerprint() );

  uint32_t round = 0;
  while ( res.model.epochs_trained < cfg.train.epochs )
  {
    const uint32_t segment = std::min( cfg.period, cfg.train.epochs - res.model.epochs_trained );
    const auto losses = train_epochs( res.model, train_part, cfg.train, segment );
    res.history.epoch_loss.insert( res.history.epoch_loss.end(), losses.begin(), losses.end() );
    if ( segment < cfg.period )
      break;

    AdversarialRound r;
    r.epoch = res.model.epochs_trained;
    r.validation_accuracy = accuracy( res.model, val_part );
    auto acfg = cfg.adversarial;
    acfg.seed = derive_seed( cfg.adversarial.seed, round );
    const auto energy =
        adversarial_energy( ld, res.model, cfg.embed, cfg.relock_size, derive_seed( cfg.data_seed, 100 + round ) );
    const auto found = anneal( resyn2_baseline(), energy, acfg );
    r.recipe = found.best;
    r.energy = found.best_energy;
    train_part.append( self_referencing_samples( ld, { found.best }, cfg.augment_size, cfg,
                                                 derive_seed( cfg.data_seed, 200 + round ), design ) );
    r.dataset_size = train_part.size() + val_part.size();
    res.history.rounds.push_back( std::move( r ) );
    ++round;
  }
  res.history.final_validation_accuracy = accuracy( res.model, val_part );
  res.train = std::move( train_part );
  res.validation = std::move( val_part );
  return res;
}

std::string_view to_string( ModelVariant v )
{
  switch ( v )
  {
  case ModelVariant::resyn2:
    return "resyn2";
  case ModelVariant::random:
    return "random";
  case ModelVariant::adversarial:
    return "adversarial";
  }
  return "?";
}

std::optional<ModelVariant> parse_variant( std::string_view s )
{
  for ( auto v : { ModelVariant::resyn2, ModelVariant::random, ModelVariant::adversarial } )
    if ( to_string( v ) == s )
      return v;
  return std::nullopt;
}

VariantResult train_variant( const LockedDesign& ld, ModelVariant v, const PipelineConfig& cfg, std::string_view design )
{
  cfg.validate();
  VariantResult out;
  if ( v == ModelVariant::adversarial )
  {
    auto res = adversarial_train( ld, cfg, design );
    out.model = std::move( res.model );
    out.validation_accuracy = res.history.final_validation_accuracy;
    out.data = std::move( res.train );
    out.data.append( res.validation );
    return out;
  }
  const uint32_t budget = cfg.final_samples();
  const auto recipes = v == ModelVariant::resyn2
                           ? std::vector<Recipe>{ resyn2_baseline() }
                           : random_recipes( budget / cfg.samples_per_relock + 1, derive_seed( cfg.data_seed, 1 ) );
  out.data = self_referencing_samples( ld, recipes, budget, cfg, derive_seed( cfg.data_seed, 2 ), design );
  auto res = train( out.data, cfg.train );
  out.model = std::move( res.model );
  out.validation_accuracy = res.validation_accuracy;
  return out;
}

double recipe_accuracy( const ModelParams& m, const LockedDesign& ld, const Recipe& r, const EmbedConfig& cfg )
{
  const auto synth = ld.with_aig( apply_recipe( ld.aig, r ).first );
  return accuracy( m, embed_key_gates( synth, Provenance::original, cfg, "eval", r.to_string() ) );
}

TransferResult evaluate_transfer( const ModelParams& m, const LockedDesign& ld, const std::vector<Recipe>& recipes,
                                  const EmbedConfig& cfg )
{
  if ( recipes.empty() )
    throw std::invalid_argument( "transfer evaluation needs at least one recipe" );
  check_fingerprint( m, cfg );
  TransferResult t;
  t.baseline_accuracy = recipe_accuracy( m, ld, resyn2_baseline(), cfg );
  double sum = 0.0;
  for ( const auto& r : recipes )
  {
    const double a = r == resyn2_baseline() ? t.baseline_accuracy : recipe_accuracy( m, ld, r, cfg );
    t.per_recipe.emplace_back( r, a );
    sum += a;
  }
  t.mean_accuracy = sum / static_cast<double>( recipes.size() );
  t.gap = std::abs( t.baseline_accuracy - t.mean_accuracy );
  return t;
}

AnnealResult almost_search( const LockedDesign& ld, const ModelParams& m, const PipelineConfig& cfg )
{
  return anneal( resyn2_baseline(), defense_energy( ld, m, cfg.embed ), cfg.defense );
}

PpaProxy ppa_proxy( const Aig& g, uint64_t seed, uint32_t pairs )
{
  if ( pairs < 1 )
    throw std::invalid_argument( "toggle proxy needs at least one vector pair" );
  PpaProxy p;
  p.nodes = node_count( g );
  p.depth = depth( g );
  const uint32_t signals = g.num_ands() + g.num_outputs();
  if ( signals == 0 )
    return p;

  const uint32_t words = ( pairs + 63 ) / 64;
  const auto a = simulate_nodes( g, random_batch( g.num_inputs(), words, derive_seed( seed, 0 ) ) );
  const auto b = simulate_nodes( g, random_batch( g.num_inputs(), words, derive_seed( seed, 1 ) ) );
  const uint64_t tail = pairs % 64 == 0 ? ~uint64_t{ 0 } : ( uint64_t{ 1 } << ( pairs % 64 ) ) - 1;
  auto toggles = [&]( uint32_t node ) {
    uint64_t n = 0;
    for ( uint32_t w = 0; w < words; ++w )
    {
      auto diff = a[std::size_t( node ) * words + w] ^ b[std::size_t( node ) * words + w];
      if ( w + 1 == words )
        diff &= tail;
      n += std::popcount( diff );
    }
    return static_cast<double>( n ) / pairs;
  };
  double sum = 0.0;
  for ( uint32_t n = g.num_inputs() + 1; n < g.size(); ++n )
    sum += toggles( n );
  // complementing a signal does not change its toggles
  for ( auto o : g.outputs() )
    sum += toggles( o.node() );
  p.toggles = sum / signals;
  return p;
}

double delta_pct( double value, double base )
{
  if ( base == 0.0 )
    return value == 0.0 ? 0.0 : 100.0;
  return 100.0 * ( value - base ) / base;
}

std::vector<ReportRow> evaluate_defense( std::string_view bench, const LockedDesign& ld, const Recipe& s_almost,
                                         const std::vector<NamedModel>& models, const PipelineConfig& cfg )
{
  const auto base = ld.with_aig( apply_recipe( ld.aig, resyn2_baseline() ).first );
  const auto almost = ld.with_aig( apply_recipe( ld.aig, s_almost ).first );
  const auto pb = ppa_proxy( base.aig, cfg.data_seed, cfg.toggle_pairs );
  const auto pa = ppa_proxy( almost.aig, cfg.data_seed, cfg.toggle_pairs );
  const auto base_data = embed_key_gates( base, Provenance::original, cfg.embed, bench, resyn2_baseline().to_string() );
  const auto almost_data = embed_key_gates( almost, Provenance::original, cfg.embed, bench, s_almost.to_string() );
  std::vector<ReportRow> rows;
  for ( const auto& nm : models )
  {
    ReportRow r;
    r.bench = bench;
    r.keysize = ld.key_size();
    r.model = nm.name;
    r.recipe = s_almost.to_string();
    r.acc_base = accuracy( nm.model, base_data );
    r.acc_almost = accuracy( nm.model, almost_data );
    r.nodes_delta_pct = delta_pct( pa.nodes, pb.nodes );
    r.depth_delta_pct = delta_pct( pa.depth, pb.depth );
    r.toggles_delta_pct = delta_pct( pa.toggles, pb.toggles );
    rows.push_back( std::move( r ) );
  }
  return rows;
}

std::string write_report( std::vector<ReportRow> rows )
{
  std::sort( rows.begin(), rows.end(), []( const ReportRow& a, const ReportRow& b ) {
    return std::tie( a.bench, a.keysize, a.model, a.recipe ) < std::tie( b.bench, b.keysize, b.model, b.recipe );
  } );
  std::string s = "ALMOST-REPORT v1\n";
  for ( const auto& r : rows )
    s += "bench=" + r.bench + " keysize=" + std::to_string( r.keysize ) + " model=" + r.model + " recipe=" + r.recipe +
         " acc_base=" + fmt6( r.acc_base ) + " acc_almost=" + fmt6( r.acc_almost ) +
         " nodes_delta_pct=" + fmt6( r.nodes_delta_pct ) + " depth_delta_pct=" + fmt6( r.depth_delta_pct ) +
         " toggles_delta_pct=" + fmt6( r.toggles_delta_pct ) + "\n";
  return s;
}

std::vector<ReportRow> parse_report( std::string_view text )
{
  static const std::vector<std::string> keys = { "bench",    "keysize",         "model",           "recipe",
                                                 "acc_base", "acc_almost",      "nodes_delta_pct", "depth_delta_pct",
                                                 "toggles_delta_pct" };
  std::istringstream is{ std::string( text ) };
  std::string line;
  if ( !std::getline( is, line ) || trim( line ) != "ALMOST-REPORT v1" )
    throw ParseError( "expected ALMOST-REPORT v1 header", 1 );
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while ( std::getline( is, line ) )
  {
    ++line_no;
    if ( trim( line ).empty() )
      continue;
    std::istringstream ls( line );
    std::string tok;
    std::map<std::string, std::string> f;
    while ( ls >> tok )
    {
      const auto eq = tok.find( '=' );
      if ( eq == std::string::npos || eq == 0 )
        throw ParseError( "expected key=value, got '" + tok + "'", line_no );
      const auto key = tok.substr( 0, eq );
      if ( std::find( keys.begin(), keys.end(), key ) == keys.end() )
        throw ParseError( "unknown report field '" + key + "'", line_no );
      if ( !f.emplace( key, tok.substr( eq + 1 ) ).second )
        throw ParseError( "duplicate report field '" + key + "'", line_no );
    }
    for ( const auto& k : keys )
      if ( !f.count( k ) )
        throw ParseError( "missing report field '" + k + "'", line_no );
    ReportRow r;
    r.bench = f["bench"];
    r.keysize = parse_uint<uint32_t>( f["keysize"], line_no );
    r.model = f["model"];
    r.recipe = f["recipe"];
    r.acc_base = parse_real( f["acc_base"], line_no );
    r.acc_almost = parse_real( f["acc_almost"], line_no );
    r.nodes_delta_pct = parse_real( f["nodes_delta_pct"], line_no );
    r.depth_delta_pct = parse_real( f["depth_delta_pct"], line_no );
    r.toggles_delta_pct = parse_real( f["toggles_delta_pct"], line_no );
    if ( !( r.acc_base >= 0.0 && r.acc_base <= 1.0 && r.acc_almost >= 0.0 && r.acc_almost <= 1.0 ) )
      throw ParseError( "accuracy outside [0, 1]", line_no );
    rows.push_back( std::move( r ) );
  }
  return rows;
}

std::string merge_reports( const std::vector<std::string>& reports )
{
  std::map<std::tuple<std::string, uint32_t, std::string>, ReportRow> merged;
  for ( const auto& text : reports )
    for ( auto& r : parse_report( text ) )
      merged[{ r.bench, r.keysize, r.model }] = std::move( r );
  std::vector<ReportRow> rows;
  for ( auto& [k, r] : merged )
    rows.push_back( std::move( r ) );
  return write_report( std::move( rows ) );
}

std::optional<double> pearson( const std::vector<double>& x, const std::vector<double>& y )
{
  if ( x.size() != y.size() )
    throw std::invalid_argument( "correlation series differ in length" );
  const auto n = static_cast<double>( x.size() );
  if ( x.size() < 2 )
    return std::nullopt;
  const double mx = std::accumulate( x.begin(), x.end(), 0.0 ) / n;
  const double my = std::accumulate( y.begin(), y.end(), 0.0 ) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for ( std::size_t i = 0; i < x.size(); ++i )
  {
    sxy += ( x[i] - mx ) * ( y[i] - my );
    sxx += ( x[i] - mx ) * ( x[i] - mx );
    syy += ( y[i] - my ) * ( y[i] - my );
  }
  if ( sxx <= 1e-24 * n || syy <= 1e-24 * n )
    return std::nullopt;
  return std::clamp( sxy / std::sqrt( sxx * syy ), -1.0, 1.0 );
}

ProbeResult resynthesis_probe( const LockedDesign& ld_almost, const ModelParams& m, PpaObjective objective,
                               const PipelineConfig& cfg )
{
  check_fingerprint( m, cfg.embed );
  const auto measure = [objective]( const Aig& g ) {
    return static_cast<double>( objective == PpaObjective::area ? node_count( g ) : depth( g ) );
  };
  const double base = std::max( 1.0, measure( apply_recipe( ld_almost.aig, resyn2_baseline() ).first ) );
  auto acc = std::make_shared<std::map<std::string, double>>();
  const EnergyFn energy{ objective == PpaObjective::area ? EnergyRole::area : EnergyRole::delay,
                         [&, acc]( const Recipe& r ) {
                           const auto synth = ld_almost.with_aig( apply_recipe( ld_almost.aig, r ).first );
                           ( *acc )[r.to_string()] = accuracy(
                               m, embed_key_gates( synth, Provenance::original, cfg.embed, "probe", r.to_string() ) );
                           return measure( synth.aig ) / base;
                         } };
  auto acfg = cfg.defense;
  acfg.stop_threshold = -std::numeric_limits<double>::infinity();
  ProbeResult p;
  p.trace = anneal( resyn2_baseline(), energy, acfg ).trace;
  std::vector<double> energies;
  for ( const auto& r : p.trace.records )
  {
    p.accuracy.push_back( acc->at( r.recipe.to_string() ) );
    energies.push_back( r.energy );
  }
  const auto c = pearson( p.accuracy, energies );
  p.degenerate = !c.has_value();
  p.correlation = c.value_or( 0.0 );
  return p;
}

std::string write_probe_csv( const ProbeResult& p )
{
  std::string s = "iter,recipe,energy,accuracy\n";
  for ( std::size_t i = 0; i < p.trace.records.size(); ++i )
  {
    const auto& r = p.trace.records[i];
    s += std::to_string( r.iteration ) + "," + r.recipe.to_string() + "," + fmt17( r.energy ) + "," +
         fmt17( p.accuracy[i] ) + "\n";
  }
  return s;
}

} // namespace almost
