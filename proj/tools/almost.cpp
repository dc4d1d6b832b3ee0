// Command-line front end: locking, synthesis, attack training, defense search and reporting.

#include "almost/errors.hpp"
#include "almost/io.hpp"
#include "almost/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace almost;
namespace fs = std::filesystem;

namespace
{

/// Bad flag values detected after CLI parsing.
struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct Globals
{
  std::optional<uint64_t> seed;
  std::string config;
  std::string out = ".";
};

uint64_t parse_seed_text( const std::string& s, const std::string& what )
{
  try
  {
    std::size_t used = 0;
    const auto v = std::stoull( s, &used );
    if ( used == s.size() )
      return v;
  }
  catch ( const std::exception& )
  {
  }
  throw UsageError( what + ": expected a non-negative integer, got '" + s + "'" );
}

/// Defaults, then ALMOST_SEED, then the config file, then --seed.
PipelineConfig resolve_config( const Globals& g )
{
  PipelineConfig c;
  if ( const char* env = std::getenv( "ALMOST_SEED" ); env && *env )
    c.set_seed( parse_seed_text( env, "ALMOST_SEED" ) );
  if ( !g.config.empty() )
    c = parse_config( read_file( g.config ), c );
  if ( g.seed )
    c.set_seed( *g.seed );
  return c;
}

fs::path out_file( const Globals& g, const std::string& name )
{
  fs::create_directories( g.out );
  return fs::path( g.out ) / name;
}

/// A recipe file, or dotted mnemonics given on the command line.
Recipe load_recipe( const std::string& arg, const std::string& flag )
{
  if ( fs::exists( arg ) )
    return parse_recipe_file( read_file( arg ) );
  try
  {
    return Recipe::from_string( arg );
  }
  catch ( const DataError& e )
  {
    throw UsageError( flag + ": " + e.what() );
  }
}

LockedDesign load_locked( const std::string& netlist, const std::string& key )
{
  return read_locked( read_netlist( netlist ), read_file( key ) );
}

ModelParams load_model( const std::string& path ) { return parse_model( read_file( path ) ); }

void note( const std::string& line ) { std::cout << line << '\n'; }

std::string fmt( double v )
{
  char buf[32];
  std::snprintf( buf, sizeof buf, "%.6f", v );
  return buf;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Synthesis-based logic locking defense and oracle-less attack toolkit" };
  app.require_subcommand( 1 );
  app.fallthrough();

  Globals g;
  std::string seed_text;
  app.add_option( "--seed", seed_text, "Base seed for every random choice" );
  app.add_option( "--config", g.config, "Config file with [lock] [embed] [train] [anneal.*] [pipeline] sections" )
      ->check( CLI::ExistingFile );
  app.add_option( "--out", g.out, "Output directory" );

  // lock
  auto* lock = app.add_subcommand( "lock", "Insert random XOR/XNOR key-gates" );
  std::string lock_in;
  std::optional<uint32_t> key_size;
  lock->add_option( "netlist", lock_in, "BENCH or AAG netlist" )->required()->check( CLI::ExistingFile );
  lock->add_option( "--key-size", key_size, "Number of key-gates" );

  // synth
  auto* synth = app.add_subcommand( "synth", "Apply a synthesis recipe" );
  std::string synth_in, synth_recipe = "b.rw.rf.b.rw.rwz.b.rfz.rwz.b";
  synth->add_option( "netlist", synth_in, "BENCH or AAG netlist" )->required()->check( CLI::ExistingFile );
  synth->add_option( "--recipe", synth_recipe, "Recipe file or dotted mnemonics" );

  // dataset
  auto* dataset = app.add_subcommand( "dataset", "Build self-referencing training samples" );
  std::string ds_net, ds_key;
  std::vector<std::string> ds_recipes;
  std::optional<uint32_t> ds_samples;
  dataset->add_option( "locked", ds_net, "Locked netlist" )->required()->check( CLI::ExistingFile );
  dataset->add_option( "key", ds_key, "Key file" )->required()->check( CLI::ExistingFile );
  dataset->add_option( "--recipe", ds_recipes, "Recipes to cycle through (default: random recipes)" );
  dataset->add_option( "--samples", ds_samples, "Sample count (default: initial_samples)" );

  // train
  auto* train_cmd = app.add_subcommand( "train", "Train the attack model on a dataset file" );
  std::string tr_data;
  train_cmd->add_option( "dataset", tr_data, "Dataset file" )->required()->check( CLI::ExistingFile );

  // adv-train
  auto* adv = app.add_subcommand( "adv-train", "Train an attack model variant on a locked design" );
  std::string adv_net, adv_key, adv_variant = "adversarial";
  adv->add_option( "locked", adv_net, "Locked netlist" )->required()->check( CLI::ExistingFile );
  adv->add_option( "key", adv_key, "Key file" )->required()->check( CLI::ExistingFile );
  adv->add_option( "--variant", adv_variant, "adversarial, resyn2 or random" )
      ->check( CLI::IsMember( { "adversarial", "resyn2", "random" } ) );

  // search
  auto* search = app.add_subcommand( "search", "Search a recipe that drives the attack to chance" );
  std::string se_net, se_key, se_model;
  search->add_option( "locked", se_net, "Locked netlist" )->required()->check( CLI::ExistingFile );
  search->add_option( "key", se_key, "Key file" )->required()->check( CLI::ExistingFile );
  search->add_option( "--model", se_model, "Attack model file" )->required()->check( CLI::ExistingFile );

  // evaluate
  auto* evaluate = app.add_subcommand( "evaluate", "Score models on baseline and ALMOST netlists" );
  std::string ev_net, ev_key, ev_recipe, ev_bench;
  std::vector<std::string> ev_models;
  bool ev_transfer = false;
  evaluate->add_option( "locked", ev_net, "Locked netlist" )->required()->check( CLI::ExistingFile );
  evaluate->add_option( "key", ev_key, "Key file" )->required()->check( CLI::ExistingFile );
  evaluate->add_option( "--model", ev_models, "name=path of a model file (repeatable)" )->required();
  evaluate->add_option( "--recipe", ev_recipe, "ALMOST recipe file or dotted mnemonics" )->required();
  evaluate->add_option( "--bench", ev_bench, "Benchmark id for the report" );
  evaluate->add_flag( "--transfer", ev_transfer, "Also score each model on random recipes" );

  // probe-resynth
  auto* probe = app.add_subcommand( "probe-resynth", "Re-synthesize an ALMOST netlist for area or delay" );
  std::string pr_net, pr_key, pr_model, pr_recipe, pr_objective = "area";
  probe->add_option( "locked", pr_net, "Locked netlist" )->required()->check( CLI::ExistingFile );
  probe->add_option( "key", pr_key, "Key file" )->required()->check( CLI::ExistingFile );
  probe->add_option( "--model", pr_model, "Attack model file" )->required()->check( CLI::ExistingFile );
  probe->add_option( "--recipe", pr_recipe, "ALMOST recipe file or dotted mnemonics" )->required();
  probe->add_option( "--objective", pr_objective, "area or delay" )->check( CLI::IsMember( { "area", "delay" } ) );

  // ppa
  auto* ppa = app.add_subcommand( "ppa", "Node, depth and toggle proxies" );
  std::string ppa_in;
  ppa->add_option( "netlist", ppa_in, "BENCH or AAG netlist" )->required()->check( CLI::ExistingFile );

  // emit-abc
  auto* emit = app.add_subcommand( "emit-abc", "Write an equivalent ABC script" );
  std::string emit_recipe;
  emit->add_option( "recipe", emit_recipe, "Recipe file or dotted mnemonics" )->required();

  // report
  auto* report = app.add_subcommand( "report", "Merge report files" );
  std::vector<std::string> reports;
  report->add_option( "reports", reports, "Report files" )->required()->check( CLI::ExistingFile );

  try
  {
    app.parse( argc, argv );
  }
  catch ( const CLI::ParseError& e )
  {
    return app.exit( e ) == 0 ? 0 : 1;
  }

  try
  {
    if ( !seed_text.empty() )
      g.seed = parse_seed_text( seed_text, "--seed" );
    auto cfg = resolve_config( g );

    if ( *lock )
    {
      if ( key_size )
        cfg.key_size = *key_size;
      const auto ld = lock_rll( read_netlist( lock_in ), cfg.key_size, cfg.lock_seed );
      write_file( out_file( g, "locked.aag" ), write_aiger_ascii( ld.aig ) );
      write_file( out_file( g, "locked.key" ), write_key_file( ld ) );
      note( "locked " + std::to_string( ld.key_size() ) + " key-gates, " + std::to_string( ld.aig.num_ands() ) +
            " ANDs" );
    }
    else if ( *synth )
    {
      const auto recipe = load_recipe( synth_recipe, "--recipe" );
      const auto [out, stats] = apply_recipe( read_netlist( synth_in ), recipe );
      write_file( out_file( g, "synth.aag" ), write_aiger_ascii( out ) );
      note( recipe.to_string() + ": " + std::to_string( out.num_ands() ) + " ANDs, depth " +
            std::to_string( depth( out ) ) );
    }
    else if ( *dataset )
    {
      const auto ld = load_locked( ds_net, ds_key );
      std::vector<Recipe> recipes;
      for ( const auto& r : ds_recipes )
        recipes.push_back( load_recipe( r, "--recipe" ) );
      const uint32_t n = ds_samples.value_or( cfg.initial_samples );
      if ( recipes.empty() )
        recipes = random_recipes( n / cfg.samples_per_relock + 1, derive_seed( cfg.data_seed, 1 ) );
      const auto d = self_referencing_samples( ld, recipes, n, cfg, derive_seed( cfg.data_seed, 2 ),
                                               fs::path( ds_net ).stem().string() );
      write_file( out_file( g, "dataset.txt" ), write_dataset( d ) );
      note( std::to_string( d.size() ) + " samples" );
    }
    else if ( *train_cmd )
    {
      const auto d = parse_dataset( read_file( tr_data ) );
      if ( d.embed_fingerprint != cfg.embed.fingerprint() )
        throw DataError( "dataset embedding " + d.embed_fingerprint + " does not match config " +
                         cfg.embed.fingerprint() );
      const auto res = train( d, cfg.train );
      write_file( out_file( g, "model.txt" ), write_model( res.model ) );
      std::string csv = "epoch,loss\n";
      for ( std::size_t i = 0; i < res.epoch_loss.size(); ++i )
        csv += std::to_string( i + 1 ) + "," + fmt( res.epoch_loss[i] ) + "\n";
      write_file( out_file( g, "loss.csv" ), csv );
      note( "train accuracy " + fmt( res.train_accuracy ) + ", validation accuracy " +
            fmt( res.validation_accuracy ) );
    }
    else if ( *adv )
    {
      const auto ld = load_locked( adv_net, adv_key );
      const auto design = fs::path( adv_net ).stem().string();
      const auto variant = *parse_variant( adv_variant );
      if ( variant == ModelVariant::adversarial )
      {
        const auto res = adversarial_train( ld, cfg, design );
        auto all = res.train;
        all.append( res.validation );
        write_file( out_file( g, "model.txt" ), write_model( res.model ) );
        write_file( out_file( g, "dataset.txt" ), write_dataset( all ) );
        std::string csv = "round,epoch,recipe,energy,validation_accuracy,dataset_size\n";
        for ( std::size_t i = 0; i < res.history.rounds.size(); ++i )
        {
          const auto& r = res.history.rounds[i];
          csv += std::to_string( i ) + "," + std::to_string( r.epoch ) + "," + r.recipe.to_string() + "," +
                 fmt( r.energy ) + "," + fmt( r.validation_accuracy ) + "," + std::to_string( r.dataset_size ) +
                 "\n";
        }
        write_file( out_file( g, "history.csv" ), csv );
        note( std::to_string( res.history.rounds.size() ) + " adversarial rounds, " + std::to_string( all.size() ) +
              " samples, validation accuracy " + fmt( res.history.final_validation_accuracy ) );
      }
      else
      {
        const auto res = train_variant( ld, variant, cfg, design );
        write_file( out_file( g, "model.txt" ), write_model( res.model ) );
        write_file( out_file( g, "dataset.txt" ), write_dataset( res.data ) );
        note( std::string( to_string( variant ) ) + " model, " + std::to_string( res.data.size() ) +
              " samples, validation accuracy " + fmt( res.validation_accuracy ) );
      }
    }
    else if ( *search )
    {
      const auto ld = load_locked( se_net, se_key );
      const auto res = almost_search( ld, load_model( se_model ), cfg );
      write_file( out_file( g, "almost.recipe" ), write_recipe_file( res.best ) );
      write_file( out_file( g, "trace.csv" ), write_trace_csv( res.trace ) );
      write_file( out_file( g, "almost.aag" ), write_aiger_ascii( apply_recipe( ld.aig, res.best ).first ) );
      note( res.best.to_string() + " energy " + fmt( res.best_energy ) + " after " +
            std::to_string( res.trace.records.size() - 1 ) + " iterations" );
    }
    else if ( *evaluate )
    {
      const auto ld = load_locked( ev_net, ev_key );
      std::vector<NamedModel> models;
      for ( const auto& spec : ev_models )
      {
        const auto eq = spec.find( '=' );
        if ( eq == std::string::npos || eq == 0 )
          throw UsageError( "--model: expected name=path, got '" + spec + "'" );
        models.push_back( { spec.substr( 0, eq ), load_model( spec.substr( eq + 1 ) ) } );
      }
      const auto bench = ev_bench.empty() ? fs::path( ev_net ).stem().string() : ev_bench;
      const auto rows = evaluate_defense( bench, ld, load_recipe( ev_recipe, "--recipe" ), models, cfg );
      write_file( out_file( g, "report.txt" ), write_report( rows ) );
      for ( const auto& r : rows )
        note( r.model + ": baseline " + fmt( r.acc_base ) + ", ALMOST " + fmt( r.acc_almost ) );
      if ( ev_transfer )
      {
        std::string csv = "model,recipe,accuracy\n";
        const auto recipes = random_recipes( cfg.eval_recipes, derive_seed( cfg.data_seed, 9 ) );
        for ( const auto& nm : models )
        {
          const auto t = evaluate_transfer( nm.model, ld, recipes, cfg.embed );
          for ( const auto& [r, a] : t.per_recipe )
            csv += nm.name + "," + r.to_string() + "," + fmt( a ) + "\n";
          note( nm.name + ": random-set mean " + fmt( t.mean_accuracy ) + ", gap " + fmt( t.gap ) );
        }
        write_file( out_file( g, "transfer.csv" ), csv );
      }
    }
    else if ( *probe )
    {
      const auto ld = load_locked( pr_net, pr_key );
      const auto almost = ld.with_aig( apply_recipe( ld.aig, load_recipe( pr_recipe, "--recipe" ) ).first );
      const auto res = resynthesis_probe( almost, load_model( pr_model ),
                                          pr_objective == "area" ? PpaObjective::area : PpaObjective::delay, cfg );
      write_file( out_file( g, "probe.csv" ), write_probe_csv( res ) );
      note( "correlation " + fmt( res.correlation ) + ( res.degenerate ? " (undefined: constant series)" : "" ) );
    }
    else if ( *ppa )
    {
      const auto p = ppa_proxy( read_netlist( ppa_in ), cfg.data_seed, cfg.toggle_pairs );
      note( "nodes " + std::to_string( p.nodes ) + " depth " + std::to_string( p.depth ) + " toggles " +
            fmt( p.toggles ) );
    }
    else if ( *emit )
    {
      const auto script = emit_abc_script( load_recipe( emit_recipe, "recipe" ) );
      if ( app.get_option( "--out" )->count() > 0 )
        write_file( out_file( g, "script.abc" ), script );
      else
        std::cout << script;
    }
    else if ( *report )
    {
      std::vector<std::string> texts;
      for ( const auto& r : reports )
        texts.push_back( read_file( r ) );
      const auto merged = merge_reports( texts );
      if ( app.get_option( "--out" )->count() > 0 )
        write_file( out_file( g, "report.txt" ), merged );
      else
        std::cout << merged;
    }
    return 0;
  }
  catch ( const UsageError& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  catch ( const std::invalid_argument& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  catch ( const std::exception& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
