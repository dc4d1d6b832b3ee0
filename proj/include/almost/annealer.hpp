/*!
  \file annealer.hpp
  \brief Simulated annealing over synthesis recipes and the energies it minimizes
*/

#pragma once

#include "almost/locality.hpp"
#include "almost/locking.hpp"
#include "almost/model.hpp"
#include "almost/rng.hpp"
#include "almost/synthesis.hpp"

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace almost
{

enum class EnergyRole : uint8_t
{
  defense,
  adversarial,
  area,
  delay
};

std::string_view to_string( EnergyRole r );

/// Pure recipe evaluation; lower is better.
struct EnergyFn
{
  EnergyRole role = EnergyRole::defense;
  std::function<double( const Recipe& )> eval;

  double operator()( const Recipe& r ) const { return eval( r ); }
};

struct AnnealerConfig
{
  double initial_temperature = 120.0;
  uint32_t max_iterations = 100;
  double acceptance_scale = 1.8;
  double cooling = 0.95;
  /// Stop as soon as a candidate reaches this energy.
  double stop_threshold = -std::numeric_limits<double>::infinity();
  uint64_t seed = 1;

  /// Throws std::invalid_argument when out of range.
  void validate() const;

  /// 100 iterations, stop at energy 0.005 (accuracy within half a point of chance).
  static AnnealerConfig defense();
  /// 20 iterations, no stop threshold.
  static AnnealerConfig adversarial();
};

struct AnnealRecord
{
  uint32_t iteration = 0;
  Recipe recipe;
  double energy = 0.0;
  bool accepted = false;
  double best_energy = 0.0;
  double temperature = 0.0;
};

struct AnnealTrace
{
  std::vector<AnnealRecord> records;
};

struct AnnealResult
{
  Recipe best;
  double best_energy = 0.0;
  AnnealTrace trace;
};

/// One uniformly chosen position replaced by a uniformly chosen different transform.
Recipe neighbor( const Recipe& r, Rng& rng );

/// Metropolis rule: 1 for dE <= 0, else exp(-dE * scale / T).
double acceptance_probability( double delta_energy, double temperature, double scale );

/*! \brief Metropolis search from `initial`.
 *
 * Record 0 holds the initial recipe; record i > 0 the candidate of iteration
 * i at temperature T0 * cooling^i.  Returns the best recipe seen (earliest on
 * ties).  Throws DataError on a non-finite energy.
 */
AnnealResult anneal( const Recipe& initial, const EnergyFn& energy, const AnnealerConfig& cfg );

/// |accuracy - 0.5| of `m` on the original key-gates of the synthesized design.
EnergyFn defense_energy( const LockedDesign& ld, const ModelParams& m, const EmbedConfig& cfg );

/// Negated mean loss of `m` on a fixed relock of `ld`, synthesized with the candidate recipe.
EnergyFn adversarial_energy( const LockedDesign& ld, const ModelParams& m, const EmbedConfig& cfg, uint32_t relock_size,
                             uint64_t seed );

enum class PpaObjective : uint8_t
{
  area,
  delay
};

/// Node count (area) or depth (delay) after the recipe, relative to the baseline recipe's result.
EnergyFn ppa_energy( const Aig& g, PpaObjective objective );

/// CSV: iter,recipe,energy,accepted,best_energy,temperature
std::string write_trace_csv( const AnnealTrace& t );
AnnealTrace parse_trace_csv( std::string_view text );

} // namespace almost
