#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmix/aligner.hpp"
#include "cmix/assembly.hpp"
#include "cmix/error.hpp"
#include "cmix/generator.hpp"
#include "cmix/noise.hpp"
#include "cmix/translit.hpp"
#include "cmix/variant.hpp"

namespace cmix {

/// Configuration problems, all of them, one per line.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct PipelineConfig {
  std::filesystem::path source;  ///< tagged matrix-language side, "token<TAB>POS"
  std::filesystem::path target;  ///< plain embedded-language side
  std::string matrix_lang = "hi";
  std::string embedded_lang = "en";
  std::optional<std::filesystem::path> inclusion;
  std::optional<std::filesystem::path> overrides;
  std::optional<std::filesystem::path> scheme;
  std::optional<std::filesystem::path> scores;  ///< external perplexities; skips the LM
  std::filesystem::path out_dir;

  AlignerSettings aligner;
  FilterSpec filter;
  std::size_t sample_cap = 64;
  int lm_order = 3;
  NoiseSpec noise;
  bool schwa_deletion = true;

  std::string recipe = "rcmt_roman";
  std::optional<std::size_t> assembly_sample;
  /// Extra corpora for recipes that need more than the pipeline produces.
  std::vector<std::pair<std::string, CorpusPaths>> extra_corpora;

  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

/// Parses a pipeline INI file and validates it. Relative paths resolve
/// against the file's directory. Throws ConfigError listing every problem.
PipelineConfig load_pipeline_config(const std::string& path);
/// Every problem with `cfg`, naming the offending field or path.
std::vector<std::string> validate_config(const PipelineConfig& cfg);

/// Key/value run report with input and output content hashes.
class RunReport {
 public:
  explicit RunReport(std::string command);

  void input(const std::filesystem::path& path);
  void output(const std::filesystem::path& path);
  template <typename T>
  void set(const std::string& key, const T& value) {
    rows_.emplace_back(key, to_text(value));
  }
  /// Writes the rows, then a final "elapsed_ms" line.
  void write(const std::filesystem::path& path) const;

 private:
  static std::string to_text(const std::string& s) { return s; }
  static std::string to_text(const char* s) { return s; }
  static std::string to_text(double d);
  template <typename T>
  static std::string to_text(const T& v) {
    return std::to_string(v);
  }

  std::vector<std::pair<std::string, std::string>> rows_;
  std::chrono::steady_clock::time_point start_;
};

// --- stages shared by the subcommands and the pipeline -----------------------

std::vector<ParallelPair> load_tagged_bitext(const std::filesystem::path& source,
                                             const std::filesystem::path& target,
                                             const LangTag& matrix, const LangTag& embedded);

/// Romanizes Devanagari matrix tokens and the danda of every record.
void transliterate_records(std::vector<CMRecord>& records, const TranslitScheme& scheme,
                           const OverrideMap* overrides, TranslitStats& stats);

/// Writes `prefix`.src (code-mixed text) and `prefix`.tgt (targets).
void write_plain_pair(const std::vector<CMRecord>& records, const std::filesystem::path& prefix);

void write_cm_tsv_file(const std::filesystem::path& path, const std::vector<CMRecord>& records);

struct PipelineSummary {
  std::size_t pairs = 0;
  std::size_t bootstrap_variants = 0;
  std::size_t variants = 0;
  NoiseReport noise;
  std::size_t assembled_lines = 0;
};

/// align -> dict -> bootstrap generate -> LM -> generate -> translit -> noise
/// -> assemble -> stats, writing every artifact under cfg.out_dir.
PipelineSummary run_pipeline(const PipelineConfig& cfg, std::ostream& log);

}  // namespace cmix
