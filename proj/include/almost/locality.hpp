/*!
  \file locality.hpp
  \brief Key-gate localities, Weisfeiler-Lehman embeddings and labeled datasets
*/

#pragma once

#include "almost/aig.hpp"
#include "almost/locking.hpp"
#include "almost/synthesis.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace almost
{

struct EmbedConfig
{
  uint32_t hops = 2;
  uint32_t wl_iterations = 2;
  /// Total vector length (hashed label bins plus `num_stats` statistics); a power of two.
  uint32_t dimension = 256;
  uint64_t hash_seed = 0x5eed;

  static constexpr uint32_t num_stats = 8;

  /// Throws std::invalid_argument when out of range.
  void validate() const;
  /// Compact text identifying every parameter, e.g. "h2-r2-d256-s24301".
  std::string fingerprint() const;
  static EmbedConfig from_fingerprint( std::string_view fp );
};

enum class LocalityKind : uint8_t
{
  input,
  key_input,
  gate
};

struct LocalityNode
{
  uint32_t node = 0;
  LocalityKind kind = LocalityKind::gate;
  bool is_output = false;
  /// Complemented fanins (gates only), 0..2.
  uint8_t complemented_fanins = 0;
  /// Fanout edges in the whole graph, split by polarity.
  uint32_t fanout_plain = 0, fanout_complemented = 0;
  uint32_t hop = 0;
  /// Fanout edges whose polarity differs from the consumer's other fanin.
  uint32_t fanout_mixed = 0;
};

/// Fanin edge `from -> to` between locality members (indices into `nodes`).
struct LocalityEdge
{
  uint32_t from = 0, to = 0;
  bool complemented = false;
};

struct Locality
{
  /// nodes[0] is the center.
  std::vector<LocalityNode> nodes;
  std::vector<LocalityEdge> edges;
};

/*! \brief Nodes within `hops` undirected steps of `center` (fanin and fanout edges).
 *
 * Inputs with index >= `num_functional_inputs` are marked as key inputs.
 */
Locality extract_locality( const Aig& g, uint32_t center, uint32_t hops, uint32_t num_functional_inputs );

/// Locality around key input `key_index` of `ld`. Throws std::out_of_range for a bad index.
Locality extract_locality( const LockedDesign& ld, uint32_t key_index, uint32_t hops );

using FeatureVector = std::vector<double>;

/// WL label bag hashed into `dimension - num_stats` bins, then statistics; L2-normalized.
FeatureVector embed( const Locality& loc, const EmbedConfig& cfg );

struct SampleProvenance
{
  std::string design;
  std::string recipe;
  uint32_t key_gate = 0;
  Provenance kind = Provenance::relock;

  bool operator==( const SampleProvenance& ) const = default;
};

struct LabeledSample
{
  FeatureVector feature;
  int label = 0;
  SampleProvenance prov;
};

struct Dataset
{
  std::string embed_fingerprint;
  std::vector<LabeledSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  void append( const Dataset& other );
};

/// Embeds the key-gates of `ld` with the given provenance (labels from the recorded bits).
Dataset embed_key_gates( const LockedDesign& ld, Provenance which, const EmbedConfig& cfg, std::string_view design,
                         std::string_view recipe );

/*! \brief Self-referencing training data.
 *
 * For recipe i: relock `ld` with `relock_size` fresh bits, synthesize with the
 * recipe, and embed `per_recipe_samples` of the new key-gates (a seeded
 * random subset).  Throws std::invalid_argument if per_recipe_samples >
 * relock_size.
 */
Dataset build_dataset( const LockedDesign& ld, const std::vector<Recipe>& recipes, uint32_t relock_size,
                       uint32_t per_recipe_samples, const EmbedConfig& cfg, uint64_t seed,
                       std::string_view design = "design" );

/// "ALMOST-DATA v1" text format.
std::string write_dataset( const Dataset& d );
Dataset parse_dataset( std::string_view text );

/// Deterministic split: first `round(n * validation_fraction)` samples of a seeded shuffle go to validation.
std::pair<Dataset, Dataset> split_dataset( const Dataset& d, double validation_fraction, uint64_t seed );

} // namespace almost
