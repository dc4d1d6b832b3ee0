/*!
  \file pipeline.hpp
  \brief Adversarial attack training, the defense recipe search, evaluation and reporting
*/

#pragma once

#include "almost/annealer.hpp"
#include "almost/locality.hpp"
#include "almost/locking.hpp"
#include "almost/model.hpp"
#include "almost/synthesis.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace almost
{

struct PipelineConfig
{
  /// Key-gates inserted by the defender.
  uint32_t key_size = 64;
  uint64_t lock_seed = 1;
  EmbedConfig embed;
  /// `train.epochs` is the total epoch budget, `train.seed` the training seed.
  TrainConfig train;
  AnnealerConfig defense = AnnealerConfig::defense();
  AnnealerConfig adversarial = AnnealerConfig::adversarial();
  /// Epochs between adversarial rounds.
  uint32_t period = 50;
  uint32_t initial_samples = 1000;
  uint32_t augment_size = 200;
  /// Fresh key-gates per self-referencing relock and how many of them become samples.
  uint32_t relock_size = 64;
  uint32_t samples_per_relock = 50;
  uint64_t data_seed = 1;
  /// Random recipes in transfer evaluations.
  uint32_t eval_recipes = 40;
  /// Random vector pairs for the toggle proxy.
  uint32_t toggle_pairs = 10000;

  /// Throws std::invalid_argument when out of range.
  void validate() const;

  /// Adversarial rounds completed by a full run: floor(epochs / period).
  uint32_t num_rounds() const { return train.epochs / period; }
  /// Samples after all rounds: initial + augment * rounds.
  uint32_t final_samples() const { return initial_samples + augment_size * num_rounds(); }

  /// Defaults with every seed derived from one base seed.
  static PipelineConfig seeded( uint64_t seed );
  /// Re-derives all seeds from `seed`.
  void set_seed( uint64_t seed );
};

/*! \brief Line-oriented `key = value` config with section headers.
 *
 * Sections: [lock] [embed] [train] [anneal.defense] [anneal.adversarial]
 * [pipeline].  `#` starts a comment.  Keys not given keep the values of
 * `base`.  Throws ParseError on unknown sections or keys and bad values.
 */
PipelineConfig parse_config( std::string_view text, PipelineConfig base = {} );
std::string write_config( const PipelineConfig& cfg );

/*! \brief Self-referencing samples: `count` samples from relocks of `ld`,
 * cycling through `recipes`, `cfg.samples_per_relock` per relock.
 */
Dataset self_referencing_samples( const LockedDesign& ld, const std::vector<Recipe>& recipes, uint32_t count,
                                  const PipelineConfig& cfg, uint64_t seed, std::string_view design = "design" );

/// The seeded random recipes used for initial training data and transfer sets.
std::vector<Recipe> random_recipes( uint32_t count, uint64_t seed );

struct AdversarialRound
{
  /// Epochs trained before the round.
  uint32_t epoch = 0;
  Recipe recipe;
  /// Best adversarial energy found (negated mean loss).
  double energy = 0.0;
  /// Validation accuracy of the model the round attacked.
  double validation_accuracy = 0.0;
  /// Total samples after augmentation.
  std::size_t dataset_size = 0;
};

struct AdversarialHistory
{
  std::size_t initial_size = 0;
  std::vector<AdversarialRound> rounds;
  std::vector<double> epoch_loss;
  double final_validation_accuracy = 0.0;
};

struct AdversarialResult
{
  ModelParams model;
  AdversarialHistory history;
  /// Training and fixed validation parts; their sizes add up to the final sample count.
  Dataset train;
  Dataset validation;
};

/*! \brief Adversarial data augmentation.
 *
 * Builds the initial samples with random recipes and splits them once.  Each
 * `period` epochs the adversarial annealer searches the recipe that
 * maximizes the current model's loss and `augment_size` samples synthesized
 * with it join the training part.  A period longer than the epoch budget
 * degenerates to plain training.
 */
AdversarialResult adversarial_train( const LockedDesign& ld, const PipelineConfig& cfg, std::string_view design = "design" );

enum class ModelVariant : uint8_t
{
  resyn2,
  random,
  adversarial
};

std::string_view to_string( ModelVariant v );
std::optional<ModelVariant> parse_variant( std::string_view s );

struct VariantResult
{
  ModelParams model;
  double validation_accuracy = 0.0;
  Dataset data;
};

/*! \brief Trains one attack model variant.
 *
 * resyn2 and random use `cfg.final_samples()` samples (the adversarial
 * variant's final budget) from the baseline recipe or fresh random recipes.
 */
VariantResult train_variant( const LockedDesign& ld, ModelVariant v, const PipelineConfig& cfg,
                             std::string_view design = "design" );

struct TransferResult
{
  std::vector<std::pair<Recipe, double>> per_recipe;
  double baseline_accuracy = 0.0;
  double mean_accuracy = 0.0;
  /// |baseline_accuracy - mean_accuracy|
  double gap = 0.0;
};

/// Accuracy on the original key-gates after each recipe and after the baseline recipe.
TransferResult evaluate_transfer( const ModelParams& m, const LockedDesign& ld, const std::vector<Recipe>& recipes,
                                  const EmbedConfig& cfg );

/// Accuracy of `m` on the original key-gates of `ld` synthesized with `r`.
double recipe_accuracy( const ModelParams& m, const LockedDesign& ld, const Recipe& r, const EmbedConfig& cfg );

/// Defense annealing from the baseline recipe; returns the best recipe within the budget.
AnnealResult almost_search( const LockedDesign& ld, const ModelParams& m, const PipelineConfig& cfg );

struct PpaProxy
{
  uint32_t nodes = 0;
  uint32_t depth = 0;
  /// Mean toggle rate of AND nodes and outputs over random vector pairs.
  double toggles = 0.0;
};

PpaProxy ppa_proxy( const Aig& g, uint64_t seed, uint32_t pairs = 10000 );

struct ReportRow
{
  std::string bench;
  uint32_t keysize = 0;
  std::string model;
  std::string recipe;
  double acc_base = 0.0;
  double acc_almost = 0.0;
  double nodes_delta_pct = 0.0;
  double depth_delta_pct = 0.0;
  double toggles_delta_pct = 0.0;

  bool operator==( const ReportRow& ) const = default;
};

/// 100 * (value - base) / base; 0 when both are 0, 100 when only the base is 0.
double delta_pct( double value, double base );

struct NamedModel
{
  std::string name;
  ModelParams model;
};

/// One row per model: accuracy after the baseline and the ALMOST recipe, proxy deltas of the locked netlists.
std::vector<ReportRow> evaluate_defense( std::string_view bench, const LockedDesign& ld, const Recipe& s_almost,
                                         const std::vector<NamedModel>& models, const PipelineConfig& cfg );

/// "ALMOST-REPORT v1" followed by rows sorted by (bench, keysize, model, recipe).
std::string write_report( std::vector<ReportRow> rows );
std::vector<ReportRow> parse_report( std::string_view text );
/// Merges reports; a later row replaces an earlier one with the same (bench, keysize, model).
std::string merge_reports( const std::vector<std::string>& reports );

/// Pearson correlation, or nullopt when either series has zero variance.
std::optional<double> pearson( const std::vector<double>& x, const std::vector<double>& y );

struct ProbeResult
{
  AnnealTrace trace;
  /// Attack accuracy for each trace record.
  std::vector<double> accuracy;
  /// Pearson coefficient between accuracy and energy; 0 when undefined.
  double correlation = 0.0;
  bool degenerate = false;
};

/*! \brief Attacker re-synthesis for area or delay.
 *
 * Anneals `ppa_energy` on the ALMOST netlist with the defense schedule but no
 * stop threshold and scores the model on every visited netlist.
 */
ProbeResult resynthesis_probe( const LockedDesign& ld_almost, const ModelParams& m, PpaObjective objective,
                               const PipelineConfig& cfg );

/// CSV: iter,recipe,energy,accuracy
std::string write_probe_csv( const ProbeResult& p );

} // namespace almost
