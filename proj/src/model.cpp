#include "almost/model.hpp"

#include "almost/errors.hpp"
#include "almost/rng.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace almost
{

namespace
{

double sigmoid( double z )
{
  if ( z >= 0 )
    return 1.0 / ( 1.0 + std::exp( -z ) );
  const double e = std::exp( z );
  return e / ( 1.0 + e );
}

/// softplus(z) - y z, i.e. -log p(y | z).
double bce_from_logit( double z, int y ) { return std::max( z, 0.0 ) - ( y ? z : 0.0 ) + std::log1p( std::exp( -std::abs( z ) ) ); }

void check_dim( const ModelParams& m, const FeatureVector& x )
{
  if ( x.size() != m.input_dim )
    throw DataError( "feature dimension " + std::to_string( x.size() ) + " does not match model input " +
                     std::to_string( m.input_dim ) );
}

void check_data( const ModelParams& m, const Dataset& d )
{
  if ( d.empty() )
    throw DataError( "empty dataset" );
  if ( !m.embed_fingerprint.empty() && !d.embed_fingerprint.empty() && m.embed_fingerprint != d.embed_fingerprint )
    throw DataError( "dataset embedding " + d.embed_fingerprint + " does not match model embedding " +
                     m.embed_fingerprint );
}

/// Hidden pre-activations.
void hidden_layer( const ModelParams& m, const FeatureVector& x, std::vector<double>& a )
{
  a.resize( m.hidden );
  for ( uint32_t h = 0; h < m.hidden; ++h )
  {
    const double* row = m.w1.data() + std::size_t( h ) * m.input_dim;
    double s = m.b1[h];
    for ( uint32_t d = 0; d < m.input_dim; ++d )
      s += row[d] * x[d];
    a[h] = s;
  }
}

double output_logit( const ModelParams& m, const std::vector<double>& a )
{
  double z = m.b2;
  for ( uint32_t h = 0; h < m.hidden; ++h )
    z += m.w2[h] * std::max( a[h], 0.0 );
  return z;
}

std::string fmt( double v )
{
  char buf[32];
  std::snprintf( buf, sizeof buf, "%.17g", v );
  return buf;
}

} // namespace

void TrainConfig::validate() const
{
  if ( epochs < 1 )
    throw std::invalid_argument( "epochs must be at least 1" );
  if ( batch_size < 1 )
    throw std::invalid_argument( "batch size must be at least 1" );
  if ( !( learning_rate > 0.0 ) || !std::isfinite( learning_rate ) )
    throw std::invalid_argument( "learning rate must be positive" );
  if ( !( validation_fraction > 0.0 && validation_fraction < 1.0 ) )
    throw std::invalid_argument( "validation fraction must lie in (0, 1)" );
  if ( hidden < 1 )
    throw std::invalid_argument( "hidden width must be at least 1" );
}

double& ModelParams::param( std::size_t i )
{
  if ( i < w1.size() )
    return w1[i];
  i -= w1.size();
  if ( i < b1.size() )
    return b1[i];
  i -= b1.size();
  if ( i < w2.size() )
    return w2[i];
  return b2;
}

double ModelParams::param( std::size_t i ) const { return const_cast<ModelParams*>( this )->param( i ); }

ModelParams init_params( uint32_t input_dim, uint32_t hidden, uint64_t seed, std::string embed_fingerprint )
{
  ModelParams m;
  m.input_dim = input_dim;
  m.hidden = hidden;
  m.embed_fingerprint = std::move( embed_fingerprint );
  m.train_seed = seed;
  Rng rng( seed );
  const double s1 = std::sqrt( 2.0 / input_dim ), s2 = std::sqrt( 2.0 / hidden );
  m.w1.resize( std::size_t( input_dim ) * hidden );
  for ( auto& w : m.w1 )
    w = rng.normal() * s1;
  m.b1.assign( hidden, 0.0 );
  m.w2.resize( hidden );
  for ( auto& w : m.w2 )
    w = rng.normal() * s2;
  return m;
}

double logit( const ModelParams& m, const FeatureVector& x )
{
  check_dim( m, x );
  std::vector<double> a;
  hidden_layer( m, x, a );
  return output_logit( m, a );
}

double forward( const ModelParams& m, const FeatureVector& x ) { return sigmoid( logit( m, x ) ); }

int predict( const ModelParams& m, const FeatureVector& x ) { return forward( m, x ) > 0.5 ? 1 : 0; }

double sample_loss( const ModelParams& m, const FeatureVector& x, int label ) { return bce_from_logit( logit( m, x ), label ); }

double sample_gradient( const ModelParams& m, const FeatureVector& x, int label, std::vector<double>& grad )
{
  check_dim( m, x );
  grad.assign( m.num_params(), 0.0 );
  std::vector<double> a;
  hidden_layer( m, x, a );
  const double z = output_logit( m, a );
  const double dz = sigmoid( z ) - label;

  const std::size_t off_b1 = m.w1.size(), off_w2 = off_b1 + m.hidden, off_b2 = off_w2 + m.hidden;
  for ( uint32_t h = 0; h < m.hidden; ++h )
  {
    grad[off_w2 + h] = dz * std::max( a[h], 0.0 );
    if ( a[h] <= 0.0 )
      continue;
    const double da = dz * m.w2[h];
    grad[off_b1 + h] = da;
    double* row = grad.data() + std::size_t( h ) * m.input_dim;
    for ( uint32_t d = 0; d < m.input_dim; ++d )
      row[d] = da * x[d];
  }
  grad[off_b2] = dz;
  return bce_from_logit( z, label );
}

double accuracy( const ModelParams& m, const Dataset& d )
{
  check_data( m, d );
  std::size_t correct = 0;
  for ( const auto& s : d.samples )
    correct += predict( m, s.feature ) == s.label;
  return double( correct ) / double( d.size() );
}

double mean_loss( const ModelParams& m, const Dataset& d )
{
  check_data( m, d );
  double sum = 0.0;
  for ( const auto& s : d.samples )
    sum += sample_loss( m, s.feature, s.label );
  return sum / double( d.size() );
}

std::vector<double> train_epochs( ModelParams& m, const Dataset& train, const TrainConfig& cfg, uint32_t epochs )
{
  check_data( m, train );
  std::vector<double> losses;
  std::vector<std::size_t> order( train.size() );
  std::vector<double> grad, acc( m.num_params() );
  m.batch_size = cfg.batch_size;
  m.learning_rate = cfg.learning_rate;
  m.train_seed = cfg.seed;

  for ( uint32_t e = 0; e < epochs; ++e )
  {
    for ( std::size_t i = 0; i < order.size(); ++i )
      order[i] = i;
    Rng rng( derive_seed( cfg.seed, m.epochs_trained ) );
    rng.shuffle( order.begin(), order.end() );

    double epoch_loss = 0.0;
    for ( std::size_t start = 0; start < order.size(); start += cfg.batch_size )
    {
      const auto end = std::min( order.size(), start + cfg.batch_size );
      std::fill( acc.begin(), acc.end(), 0.0 );
      for ( auto k = start; k < end; ++k )
      {
        const auto& s = train.samples[order[k]];
        epoch_loss += sample_gradient( m, s.feature, s.label, grad );
        for ( std::size_t p = 0; p < acc.size(); ++p )
          acc[p] += grad[p];
      }
      const double step = cfg.learning_rate / double( end - start );
      for ( std::size_t p = 0; p < acc.size(); ++p )
        m.param( p ) -= step * acc[p];
    }
    epoch_loss /= double( order.size() );
    if ( !std::isfinite( epoch_loss ) )
      throw DataError( "non-finite training loss at epoch " + std::to_string( m.epochs_trained ) );
    losses.push_back( epoch_loss );
    ++m.epochs_trained;
  }
  return losses;
}

TrainResult train( const Dataset& data, const TrainConfig& cfg, ModelParams start )
{
  cfg.validate();
  if ( data.empty() )
    throw DataError( "empty dataset" );
  auto [tr, val] = split_dataset( data, cfg.validation_fraction, cfg.seed );
  if ( tr.empty() || val.empty() )
    throw DataError( "dataset too small for a train/validation split" );
  TrainResult r;
  r.model = std::move( start );
  if ( r.model.embed_fingerprint.empty() )
    r.model.embed_fingerprint = data.embed_fingerprint;
  r.epoch_loss = train_epochs( r.model, tr, cfg, cfg.epochs );
  r.train_accuracy = accuracy( r.model, tr );
  r.validation_accuracy = accuracy( r.model, val );
  return r;
}

TrainResult train( const Dataset& data, const TrainConfig& cfg )
{
  if ( data.empty() )
    throw DataError( "empty dataset" );
  const auto dim = static_cast<uint32_t>( data.samples.front().feature.size() );
  return train( data, cfg, init_params( dim, cfg.hidden, derive_seed( cfg.seed, ~uint64_t{ 0 } ), data.embed_fingerprint ) );
}

std::string write_model( const ModelParams& m )
{
  std::string s = "ALMOST-MODEL v1\n";
  s += "embed " + ( m.embed_fingerprint.empty() ? std::string( "-" ) : m.embed_fingerprint ) + "\n";
  s += "shape " + std::to_string( m.input_dim ) + " " + std::to_string( m.hidden ) + "\n";
  s += "train seed " + std::to_string( m.train_seed ) + " epochs " + std::to_string( m.epochs_trained ) + " batch " +
       std::to_string( m.batch_size ) + " lr " + fmt( m.learning_rate ) + "\n";
  for ( uint32_t h = 0; h < m.hidden; ++h )
  {
    s += "w1";
    for ( uint32_t d = 0; d < m.input_dim; ++d )
      s += " " + fmt( m.w1[std::size_t( h ) * m.input_dim + d] );
    s += "\n";
  }
  auto row = [&]( const char* name, const std::vector<double>& v ) {
    s += name;
    for ( auto x : v )
      s += " " + fmt( x );
    s += "\n";
  };
  row( "b1", m.b1 );
  row( "w2", m.w2 );
  s += "b2 " + fmt( m.b2 ) + "\n";
  return s;
}

ModelParams parse_model( std::string_view text )
{
  std::istringstream is{ std::string( text ) };
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]( const char* what ) {
    if ( !std::getline( is, line ) )
      throw ParseError( std::string( "unexpected end of model file, expected " ) + what, line_no + 1 );
    ++line_no;
    return std::istringstream( line );
  };
  auto read_values = [&]( std::istringstream& ls, std::size_t count, std::vector<double>& out ) {
    std::string tok;
    while ( ls >> tok )
    {
      char* end = nullptr;
      const double v = std::strtod( tok.c_str(), &end );
      if ( *end != '\0' || !std::isfinite( v ) )
        throw ParseError( "bad weight '" + tok + "'", line_no );
      out.push_back( v );
    }
    if ( out.size() != count )
      throw ParseError( "expected " + std::to_string( count ) + " values", line_no );
  };

  if ( next_line( "header" ); line != "ALMOST-MODEL v1" )
    throw ParseError( "expected header 'ALMOST-MODEL v1'", 1 );
  ModelParams m;
  std::string kw;
  {
    auto ls = next_line( "embed line" );
    if ( !( ls >> kw >> m.embed_fingerprint ) || kw != "embed" )
      throw ParseError( "expected 'embed <fingerprint>'", line_no );
    if ( m.embed_fingerprint == "-" )
      m.embed_fingerprint.clear();
  }
  {
    auto ls = next_line( "shape line" );
    if ( !( ls >> kw >> m.input_dim >> m.hidden ) || kw != "shape" || m.input_dim == 0 || m.hidden == 0 )
      throw ParseError( "expected 'shape <inputs> <hidden>'", line_no );
  }
  {
    auto ls = next_line( "train line" );
    std::string k1, k2, k3, k4, lr;
    if ( !( ls >> kw >> k1 >> m.train_seed >> k2 >> m.epochs_trained >> k3 >> m.batch_size >> k4 >> lr ) ||
         kw != "train" || k1 != "seed" || k2 != "epochs" || k3 != "batch" || k4 != "lr" )
      throw ParseError( "expected 'train seed <n> epochs <n> batch <n> lr <x>'", line_no );
    m.learning_rate = std::strtod( lr.c_str(), nullptr );
  }
  for ( uint32_t h = 0; h < m.hidden; ++h )
  {
    auto ls = next_line( "w1 row" );
    if ( !( ls >> kw ) || kw != "w1" )
      throw ParseError( "expected 'w1' row", line_no );
    std::vector<double> row;
    read_values( ls, m.input_dim, row );
    m.w1.insert( m.w1.end(), row.begin(), row.end() );
  }
  for ( auto [name, vec] : { std::pair{ "b1", &m.b1 }, std::pair{ "w2", &m.w2 } } )
  {
    auto ls = next_line( name );
    if ( !( ls >> kw ) || kw != name )
      throw ParseError( std::string( "expected '" ) + name + "' row", line_no );
    read_values( ls, m.hidden, *vec );
  }
  {
    auto ls = next_line( "b2" );
    std::vector<double> b;
    if ( !( ls >> kw ) || kw != "b2" )
      throw ParseError( "expected 'b2'", line_no );
    read_values( ls, 1, b );
    m.b2 = b[0];
  }
  return m;
}

} // namespace almost
