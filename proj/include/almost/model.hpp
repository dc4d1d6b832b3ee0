/*!
  \file model.hpp
  \brief Proxy attack model: one-hidden-layer network over locality embeddings
*/

#pragma once

#include "almost/locality.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace almost
{

struct TrainConfig
{
  uint32_t epochs = 350;
  uint32_t batch_size = 32;
  double learning_rate = 0.01;
  double validation_fraction = 0.1;
  uint32_t hidden = 32;
  uint64_t seed = 1;

  /// Throws std::invalid_argument when out of range.
  void validate() const;
};

/*! \brief Parameters of `p = sigmoid(w2 . relu(W1 x + b1) + b2)`.
 *
 * `w1` is row-major with one row of `input_dim` weights per hidden unit.
 */
struct ModelParams
{
  uint32_t input_dim = 0;
  uint32_t hidden = 0;
  std::vector<double> w1, b1, w2;
  double b2 = 0.0;

  std::string embed_fingerprint;
  uint64_t train_seed = 0;
  uint32_t epochs_trained = 0;
  uint32_t batch_size = 0;
  double learning_rate = 0.0;

  std::size_t num_params() const { return w1.size() + b1.size() + w2.size() + 1; }
  /// Flat view order: w1, b1, w2, b2.
  double& param( std::size_t i );
  double param( std::size_t i ) const;
  bool operator==( const ModelParams& ) const = default;
};

/// He-initialized weights (variance 2 / fan-in), zero biases.
ModelParams init_params( uint32_t input_dim, uint32_t hidden, uint64_t seed, std::string embed_fingerprint = {} );

/// Pre-sigmoid output. Throws DataError on dimension mismatch.
double logit( const ModelParams& m, const FeatureVector& x );
double forward( const ModelParams& m, const FeatureVector& x );

/// Binary cross-entropy of one sample, computed from the logit without overflow.
double sample_loss( const ModelParams& m, const FeatureVector& x, int label );

/// Gradient of `sample_loss` in `param` order; returns the loss.
double sample_gradient( const ModelParams& m, const FeatureVector& x, int label, std::vector<double>& grad );

/// 1 iff probability > 0.5.
int predict( const ModelParams& m, const FeatureVector& x );

/// Fraction of correct predictions. Throws DataError on an empty dataset or fingerprint mismatch.
double accuracy( const ModelParams& m, const Dataset& d );
double mean_loss( const ModelParams& m, const Dataset& d );

/*! \brief Mini-batch SGD on the mean cross-entropy for `epochs` epochs.
 *
 * Batches follow a shuffle seeded by (cfg.seed, global epoch index), so
 * training in segments gives the same result as one call.  Returns the mean
 * training loss of each epoch.  Throws DataError on an empty dataset or a
 * non-finite loss.
 */
std::vector<double> train_epochs( ModelParams& m, const Dataset& train, const TrainConfig& cfg, uint32_t epochs );

struct TrainResult
{
  ModelParams model;
  std::vector<double> epoch_loss;
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;
};

/// Splits off the validation fraction, trains `cfg.epochs` from `start`, and scores both parts.
TrainResult train( const Dataset& data, const TrainConfig& cfg, ModelParams start );

/// Fresh He-initialized model trained on `data`.
TrainResult train( const Dataset& data, const TrainConfig& cfg );

/// "ALMOST-MODEL v1" text format with full-precision decimals.
std::string write_model( const ModelParams& m );
ModelParams parse_model( std::string_view text );

} // namespace almost
