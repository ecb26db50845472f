#include "cmix/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cmix/corpus.hpp"
#include "cmix/fluency.hpp"
#include "cmix/inclusion.hpp"
#include "cmix/io.hpp"
#include "cmix/metrics.hpp"

namespace cmix {

namespace fs = std::filesystem;

namespace {

std::string join_lines(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += '\n';
    out += s;
  }
  return out;
}

bool valid_iso(const std::string& s) {
  return s.size() == 2 && s[0] >= 'a' && s[0] <= 'z' && s[1] >= 'a' && s[1] <= 'z';
}

// Collects typed values from the INI tree, recording problems instead of throwing.
class IniReader {
 public:
  IniReader(const boost::property_tree::ptree& tree, fs::path base, std::vector<std::string>& problems)
      : tree_(tree), base_(std::move(base)), problems_(problems) {}

  std::optional<std::string> str(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    const auto sec = tree_.get_child_optional(boost::property_tree::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(boost::property_tree::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return *v;
  }

  std::optional<fs::path> path(const std::string& section, const std::string& key) {
    const auto v = str(section, key);
    if (!v) return std::nullopt;
    const fs::path p(*v);
    return p.is_absolute() || base_.empty() ? p : base_ / p;
  }

  template <typename T>
  void number(const std::string& section, const std::string& key, T& into) {
    const auto v = str(section, key);
    if (!v) return;
    try {
      std::size_t used = 0;
      if constexpr (std::is_floating_point_v<T>) {
        into = static_cast<T>(std::stod(*v, &used));
      } else if constexpr (std::is_signed_v<T>) {
        into = static_cast<T>(std::stoll(*v, &used));
      } else {
        if (!v->empty() && (*v)[0] == '-') throw std::invalid_argument("");
        into = static_cast<T>(std::stoull(*v, &used));
      }
      if (used != v->size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      problems_.push_back(section + "." + key + ": '" + *v + "' is not a valid number");
    }
  }

  void boolean(const std::string& section, const std::string& key, bool& into) {
    const auto v = str(section, key);
    if (!v) return;
    if (*v == "true" || *v == "1") into = true;
    else if (*v == "false" || *v == "0") into = false;
    else problems_.push_back(section + "." + key + ": expected true or false");
  }

  void mark(const std::string& full_key) { used_.insert(full_key); }

  /// Reports keys nobody asked for; catches typos in option names.
  void report_unknown() {
    for (const auto& [section, body] : tree_) {
      if (section.rfind("corpus.", 0) == 0) continue;
      for (const auto& [key, value] : body) {
        if (!used_.count(section + "." + key)) problems_.push_back(section + "." + key + ": unknown option");
      }
      if (body.empty() && !body.data().empty()) problems_.push_back(section + ": value outside a section");
    }
  }

 private:
  const boost::property_tree::ptree& tree_;
  fs::path base_;
  std::vector<std::string>& problems_;
  std::set<std::string> used_;
};

std::string fmt(double d, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, d);
  return buf;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(join_lines(problems)), problems_(std::move(problems)) {}

PipelineConfig load_pipeline_config(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(strip_inline_comments(read_file(path)));
    pt::read_ini(in, tree);
  } catch (const IoError& e) {
    throw ConfigError({e.what()});
  } catch (const pt::ini_parser_error& e) {
    if (e.line() == 0) throw ConfigError({path + ": " + e.message()});
    throw ConfigError({path + ":" + std::to_string(e.line()) + ": " + e.message()});
  }

  std::vector<std::string> problems;
  PipelineConfig cfg;
  IniReader ini(tree, fs::path(path).parent_path(), problems);

  if (auto p = ini.path("input", "source")) cfg.source = *p;
  if (auto p = ini.path("input", "target")) cfg.target = *p;
  if (auto v = ini.str("input", "matrix")) cfg.matrix_lang = *v;
  if (auto v = ini.str("input", "embedded")) cfg.embedded_lang = *v;
  cfg.inclusion = ini.path("input", "inclusion");
  cfg.overrides = ini.path("input", "overrides");
  cfg.scheme = ini.path("input", "scheme");
  cfg.scores = ini.path("input", "scores");
  if (auto p = ini.path("output", "dir")) cfg.out_dir = *p;

  if (ini.str("run", "seed")) {
    std::uint64_t seed = 0;
    const std::size_t before = problems.size();
    ini.number("run", "seed", seed);
    if (problems.size() == before) cfg.seed = seed;
  }
  ini.number("run", "threads", cfg.threads);

  ini.number("aligner", "iterations", cfg.aligner.iterations);
  if (auto v = ini.str("aligner", "tension")) {
    if (*v == "none") {
      cfg.aligner.tension.reset();
    } else {
      double t = 0.0;
      ini.number("aligner", "tension", t);
      cfg.aligner.tension = t;
    }
  }

  ini.number("filter", "cmi_min", cfg.filter.cmi_lo);
  ini.number("filter", "cmi_max", cfg.filter.cmi_hi);
  ini.number("filter", "spf_min", cfg.filter.spf_lo);
  ini.number("filter", "spf_max", cfg.filter.spf_hi);
  ini.number("filter", "cap", cfg.filter.cap);
  ini.number("filter", "sample_cap", cfg.sample_cap);
  if (ini.str("filter", "ppl_max")) {
    double v = 0.0;
    ini.number("filter", "ppl_max", v);
    cfg.filter.ppl_max = v;
  }

  ini.number("lm", "order", cfg.lm_order);

  if (auto rates = ini.str("noise", "rates")) {
    try {
      const NoiseSpec parsed = NoiseSpec::parse_rates(*rates);
      cfg.noise.rate_switch = parsed.rate_switch;
      cfg.noise.rate_omission = parsed.rate_omission;
      cfg.noise.rate_typo = parsed.rate_typo;
      cfg.noise.rate_shuffle = parsed.rate_shuffle;
    } catch (const Error& e) {
      problems.push_back(std::string("noise.rates: ") + e.what());
    }
  }
  if (auto el = ini.str("noise", "eligibility")) {
    if (*el == "transliterated") cfg.noise.eligibility = NoiseEligibility::TransliteratedMatrix;
    else if (*el == "latin") cfg.noise.eligibility = NoiseEligibility::AllLatin;
    else problems.push_back("noise.eligibility: expected transliterated or latin");
  }
  ini.number("noise", "min_len_switch", cfg.noise.min_len_switch);
  ini.number("noise", "min_len_omission", cfg.noise.min_len_omission);
  ini.number("noise", "min_len_typo", cfg.noise.min_len_typo);
  ini.number("noise", "min_len_shuffle", cfg.noise.min_len_shuffle);

  ini.boolean("translit", "schwa_deletion", cfg.schwa_deletion);

  if (auto r = ini.str("assembly", "recipe")) cfg.recipe = *r;
  if (auto s = ini.str("assembly", "sample"); s && *s != "all") {
    std::size_t n = 0;
    ini.number("assembly", "sample", n);
    cfg.assembly_sample = n;
  }

  for (const auto& [section, body] : tree) {
    if (section.rfind("corpus.", 0) != 0) continue;
    const std::string name = section.substr(7);
    CorpusPaths c;
    const auto src = ini.path(section, "source");
    const auto tgt = ini.path(section, "target");
    if (!src) problems.push_back(section + ".source: missing");
    if (!tgt) problems.push_back(section + ".target: missing");
    if (src) c.source = src->string();
    if (tgt) c.target = tgt->string();
    if (auto s = ini.str(section, "sample"); s && *s != "all") {
      std::size_t n = 0;
      ini.number(section, "sample", n);
      c.sample = n;
    }
    cfg.extra_corpora.emplace_back(name, std::move(c));
  }

  ini.report_unknown();
  for (auto& p : validate_config(cfg)) problems.push_back(std::move(p));
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

std::vector<std::string> validate_config(const PipelineConfig& cfg) {
  std::vector<std::string> problems;
  auto must_exist = [&](const std::string& field, const fs::path& p) {
    if (p.empty()) {
      problems.push_back(field + ": missing");
    } else if (!fs::is_regular_file(p)) {
      problems.push_back(field + ": " + p.string() + " does not exist");
    }
  };
  must_exist("input.source", cfg.source);
  must_exist("input.target", cfg.target);
  if (cfg.inclusion) must_exist("input.inclusion", *cfg.inclusion);
  if (cfg.overrides) must_exist("input.overrides", *cfg.overrides);
  if (cfg.scheme) must_exist("input.scheme", *cfg.scheme);
  if (cfg.scores) must_exist("input.scores", *cfg.scores);
  if (!valid_iso(cfg.matrix_lang)) problems.push_back("input.matrix: expected a two-letter language code");
  if (!valid_iso(cfg.embedded_lang)) problems.push_back("input.embedded: expected a two-letter language code");
  if (cfg.out_dir.empty()) problems.push_back("output.dir: missing");
  if (!cfg.seed) problems.push_back("run.seed: missing (there is no clock-based default)");
  if (cfg.threads < 1) problems.push_back("run.threads: must be at least 1");
  if (cfg.aligner.iterations < 1) problems.push_back("aligner.iterations: must be at least 1");
  if (cfg.aligner.tension && !(*cfg.aligner.tension > 0.0)) {
    problems.push_back("aligner.tension: must be positive (or \"none\")");
  }
  try {
    cfg.filter.validate();
  } catch (const Error& e) {
    problems.push_back(std::string("filter: ") + e.what());
  }
  if (cfg.sample_cap < cfg.filter.cap) problems.push_back("filter.sample_cap: smaller than filter.cap");
  if (cfg.lm_order < 1) problems.push_back("lm.order: must be at least 1");
  try {
    cfg.noise.validate();
  } catch (const Error& e) {
    problems.push_back(std::string("noise: ") + e.what());
  }
  if (std::find(std::begin(kRecipeNames), std::end(kRecipeNames), cfg.recipe) == std::end(kRecipeNames)) {
    problems.push_back("assembly.recipe: '" + cfg.recipe + "' is not one of zcmt, rcmt_roman, rcmt_roman_devan");
  } else if (cfg.recipe == "zcmt") {
    for (const char* name : {"bn", "bn_r"}) {
      bool found = false;
      for (const auto& [n, c] : cfg.extra_corpora) found = found || n == name;
      if (!found) problems.push_back(std::string("corpus.") + name + ": required by recipe zcmt");
    }
  }
  for (const auto& [name, c] : cfg.extra_corpora) {
    if (!c.source.empty()) must_exist("corpus." + name + ".source", c.source);
    if (!c.target.empty()) must_exist("corpus." + name + ".target", c.target);
  }
  return problems;
}

RunReport::RunReport(std::string command) : start_(std::chrono::steady_clock::now()) {
  rows_.emplace_back("command", std::move(command));
}

std::string RunReport::to_text(double d) { return fmt(d); }

void RunReport::input(const fs::path& path) {
  rows_.emplace_back("input", path.filename().string() + "\t" + sha256_file(path));
}

void RunReport::output(const fs::path& path) {
  rows_.emplace_back("output", path.filename().string() + "\t" + sha256_file(path));
}

void RunReport::write(const fs::path& path) const {
  std::ostringstream out;
  for (const auto& [k, v] : rows_) out << k << '\t' << v << '\n';
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_);
  out << "elapsed_ms\t" << ms.count() << '\n';
  write_file_atomic(path, out.str());
}

std::vector<ParallelPair> load_tagged_bitext(const fs::path& source, const fs::path& target,
                                             const LangTag& matrix, const LangTag& embedded) {
  auto src = load_tagged(source.string(), matrix);
  auto tgt = load_plain(target.string(), embedded);
  return zip_pairs(std::move(src), std::move(tgt));
}

void transliterate_records(std::vector<CMRecord>& records, const TranslitScheme& scheme,
                           const OverrideMap* overrides, TranslitStats& stats) {
  for (auto& rec : records) {
    for (auto& tok : rec.variant.cm_tokens) {
      if (tok.lang.kind == Lang::Neutral) {
        if (tok.surface == "।") tok.surface = ".";
        continue;
      }
      if (tok.lang.kind != Lang::Matrix) continue;
      const std::u32string cps = to_u32(tok.surface);
      if (std::none_of(cps.begin(), cps.end(), is_devanagari)) continue;
      tok.surface = transliterate(tok.surface, scheme, overrides, &stats);
      tok.transliterated = true;
    }
  }
}

void write_plain_pair(const std::vector<CMRecord>& records, const fs::path& prefix) {
  AtomicFile src(prefix.string() + ".src");
  AtomicFile tgt(prefix.string() + ".tgt");
  for (const auto& r : records) {
    src.stream() << r.variant.text() << '\n';
    tgt.stream() << r.target.text() << '\n';
  }
  src.commit();
  tgt.commit();
}

void write_cm_tsv_file(const fs::path& path, const std::vector<CMRecord>& records) {
  AtomicFile f(path);
  write_cm_tsv(f.stream(), records);
  f.commit();
}

namespace {

std::vector<CMRecord> generate_records(const std::vector<ParallelPair>& pairs,
                                       const std::vector<SubstitutionTable>& tables,
                                       const InclusionList& inclusion, const GeneratorSettings& settings,
                                       const FluencyScorer* scorer, GenerationReport& report) {
  std::vector<CMRecord> out;
  report = generate_cm_corpus(pairs, tables, inclusion, settings, scorer,
                              [&](const CMVariant& v, const Sentence& target) { out.push_back({v, target}); });
  return out;
}

void add_generation_rows(RunReport& rep, const GenerationReport& g) {
  rep.set("pairs", g.pairs);
  rep.set("pairs_without_candidates", g.pairs_without_candidates);
  rep.set("pairs_without_survivors", g.pairs_without_survivors);
  rep.set("pairs_oversized", g.pairs_oversized);
  rep.set("variants_sampled", g.variants_sampled);
  rep.set("variants_emitted", g.variants_emitted);
}

void write_stats_file(const fs::path& path, const std::vector<CMRecord>& records, const std::string& label) {
  AtomicFile f(path);
  write_stats_report(f.stream(), corpus_stats(records), label);
  f.commit();
}

}  // namespace

PipelineSummary run_pipeline(const PipelineConfig& cfg, std::ostream& log) {
  if (auto problems = validate_config(cfg); !problems.empty()) throw ConfigError(std::move(problems));
  const std::uint64_t seed = *cfg.seed;
  const fs::path out = cfg.out_dir;
  fs::create_directories(out);
  const LangTag matrix = LangTag::matrix(cfg.matrix_lang);
  const LangTag embedded = LangTag::embedded(cfg.embedded_lang);
  PipelineSummary summary;
  RunReport pipeline_report("pipeline");
  pipeline_report.set("seed", seed);

  // align
  RunReport align_rep("align");
  const auto pairs = load_tagged_bitext(cfg.source, cfg.target, matrix, embedded);
  summary.pairs = pairs.size();
  align_rep.input(cfg.source);
  align_rep.input(cfg.target);
  AlignerSettings aligner = cfg.aligner;
  aligner.threads = cfg.threads;
  TranslationTable forward;
  const auto links = align_symmetric(pairs, aligner, &forward);
  {
    AtomicFile f(out / "align.pharaoh");
    for (const auto& l : links) f.stream() << to_pharaoh(l) << '\n';
    f.commit();
    AtomicFile lex(out / "lex.f2e.tsv");
    forward.dump(lex.stream());
    lex.commit();
  }
  std::size_t link_count = 0;
  for (const auto& l : links) link_count += l.size();
  align_rep.set("pairs", pairs.size());
  align_rep.set("iterations", aligner.iterations);
  align_rep.set("tension", aligner.tension ? fmt(*aligner.tension, "%g") : std::string("none"));
  align_rep.set("links", link_count);
  align_rep.output(out / "align.pharaoh");
  align_rep.output(out / "lex.f2e.tsv");
  align_rep.write(out / "align.report.tsv");
  log << "align: " << pairs.size() << " pairs, " << link_count << " links\n";

  // dict
  RunReport dict_rep("dict");
  const InclusionList inclusion = cfg.inclusion ? InclusionList::load(cfg.inclusion->string())
                                                : InclusionList::defaults();
  if (cfg.inclusion) dict_rep.input(*cfg.inclusion);
  std::vector<SubstitutionTable> tables;
  tables.reserve(pairs.size());
  std::size_t entries = 0;
  {
    AtomicFile f(out / "dict.jsonl");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      tables.push_back(extract_substitution_table(pairs[i], links[i], inclusion));
      entries += tables.back().entries.size();
      f.stream() << to_jsonl(tables.back()) << '\n';
    }
    f.commit();
  }
  dict_rep.set("tables", tables.size());
  dict_rep.set("entries", entries);
  dict_rep.output(out / "dict.jsonl");
  dict_rep.write(out / "dict.report.tsv");
  log << "dict: " << entries << " substitution entries\n";

  // generate: an unfiltered first pass trains the fluency model for the second
  RunReport gen_rep("generate");
  gen_rep.set("seed", seed);
  GeneratorSettings settings;
  settings.sample_cap = cfg.sample_cap;
  settings.seed = seed;
  settings.embedded = embedded;
  settings.threads = cfg.threads;
  settings.filter = FilterSpec::permissive(cfg.sample_cap);
  GenerationReport boot_report;
  const auto bootstrap = generate_records(pairs, tables, inclusion, settings, nullptr, boot_report);
  summary.bootstrap_variants = bootstrap.size();
  write_cm_tsv_file(out / "generate.bootstrap.tsv", bootstrap);
  gen_rep.output(out / "generate.bootstrap.tsv");
  gen_rep.set("bootstrap_variants", bootstrap.size());

  std::optional<NgramLM> lm;
  std::unique_ptr<FluencyScorer> scorer;
  if (cfg.scores) {
    scorer = std::make_unique<ExternalScorer>(ExternalScorer::load(cfg.scores->string()));
    gen_rep.input(*cfg.scores);
  } else {
    if (bootstrap.empty()) throw Error("generate: the unfiltered pass produced no variants to train the fluency model");
    std::vector<std::vector<std::string>> lm_corpus;
    lm_corpus.reserve(bootstrap.size());
    for (const auto& r : bootstrap) lm_corpus.push_back(variant_words(r.variant));
    lm = NgramLM::train(lm_corpus, cfg.lm_order);
    lm->save((out / "lm.bin").string());
    gen_rep.output(out / "lm.bin");
    gen_rep.set("lm_order", cfg.lm_order);
    gen_rep.set("lm_vocab", lm->vocab_size());
    scorer = std::make_unique<LmScorer>(*lm);
  }

  settings.filter = cfg.filter;
  GenerationReport gen_report;
  const auto generated = generate_records(pairs, tables, inclusion, settings, scorer.get(), gen_report);
  summary.variants = generated.size();
  write_cm_tsv_file(out / "generate.tsv", generated);
  write_plain_pair(generated, out / "hi_c");
  add_generation_rows(gen_rep, gen_report);
  gen_rep.output(out / "generate.tsv");
  gen_rep.output(out / "hi_c.src");
  gen_rep.output(out / "hi_c.tgt");
  gen_rep.write(out / "generate.report.tsv");
  log << "generate: " << bootstrap.size() << " unfiltered, " << generated.size() << " kept\n";

  // translit
  RunReport tr_rep("translit");
  TranslitScheme scheme = cfg.scheme ? TranslitScheme::load(cfg.scheme->string())
                                     : TranslitScheme::default_devanagari();
  scheme.set_schwa_deletion(cfg.schwa_deletion);
  std::optional<OverrideMap> overrides;
  if (cfg.overrides) {
    overrides = load_override_map(cfg.overrides->string());
    tr_rep.input(*cfg.overrides);
  }
  if (cfg.scheme) tr_rep.input(*cfg.scheme);
  auto romanized = generated;
  TranslitStats tstats;
  transliterate_records(romanized, scheme, overrides ? &*overrides : nullptr, tstats);
  write_cm_tsv_file(out / "translit.tsv", romanized);
  write_plain_pair(romanized, out / "hi_cr");
  tr_rep.set("tokens", tstats.tokens);
  tr_rep.set("overridden", tstats.overridden);
  tr_rep.set("unknown_codepoints", tstats.unknown_codepoints);
  tr_rep.set("non_ascii_outputs", tstats.non_ascii_outputs);
  tr_rep.output(out / "translit.tsv");
  tr_rep.write(out / "translit.report.tsv");
  log << "translit: " << tstats.tokens << " tokens romanized\n";

  // noise
  RunReport noise_rep("noise");
  NoiseSpec nspec = cfg.noise;
  nspec.seed = seed;
  auto noisy = romanized;
  summary.noise = inject_noise(noisy, nspec);
  write_cm_tsv_file(out / "noise.tsv", noisy);
  write_plain_pair(noisy, out / "hi_crn");
  {
    AtomicFile f(out / "noise.counts.tsv");
    summary.noise.write(f.stream(), nspec);
    f.commit();
  }
  noise_rep.set("seed", seed);
  noise_rep.set("eligible", summary.noise.eligible);
  noise_rep.set("perturbed", summary.noise.perturbed());
  for (NoiseType t : kNoiseTypes) {
    const auto k = static_cast<std::size_t>(t);
    noise_rep.set(std::string(noise_type_name(t)) + "_applied", summary.noise.applied[k]);
    noise_rep.set(std::string(noise_type_name(t)) + "_fallback", summary.noise.fallback[k]);
  }
  noise_rep.output(out / "noise.tsv");
  noise_rep.output(out / "noise.counts.tsv");
  noise_rep.write(out / "noise.report.tsv");
  log << "noise: " << summary.noise.perturbed() << " of " << summary.noise.eligible << " eligible tokens perturbed\n";

  // assemble
  RunReport asm_rep("assemble");
  RecipeConfig recipe;
  recipe.recipe = cfg.recipe;
  for (const char* name : {"hi_c", "hi_cr", "hi_crn"}) {
    recipe.corpora[name] = {(out / (std::string(name) + ".src")).string(),
                            (out / (std::string(name) + ".tgt")).string(), cfg.assembly_sample};
  }
  for (const auto& [name, c] : cfg.extra_corpora) recipe.corpora[name] = c;
  const auto directions = recipe_directions(recipe);
  const JointCorpus joint = assemble_joint(directions, seed);
  write_joint(joint, (out / "train.src").string(), (out / "train.tgt").string());
  summary.assembled_lines = joint.source.size();
  asm_rep.set("recipe", cfg.recipe);
  asm_rep.set("seed", seed);
  for (const auto& d : joint.directions) {
    asm_rep.set("direction", d.name + "\t" + d.proxy + "\t" + std::to_string(d.lines_in) + "\t" +
                                 std::to_string(d.lines_out));
  }
  asm_rep.output(out / "train.src");
  asm_rep.output(out / "train.tgt");
  asm_rep.write(out / "assemble.report.tsv");
  log << "assemble: " << directions.size() << " directions, " << joint.source.size() << " lines\n";

  // stats
  write_stats_file(out / "stats.hi_c.tsv", generated, "hi_c");
  write_stats_file(out / "stats.hi_cr.tsv", romanized, "hi_cr");
  write_stats_file(out / "stats.hi_crn.tsv", noisy, "hi_crn");

  pipeline_report.set("pairs", summary.pairs);
  pipeline_report.set("bootstrap_variants", summary.bootstrap_variants);
  pipeline_report.set("variants", summary.variants);
  pipeline_report.set("assembled_lines", summary.assembled_lines);
  pipeline_report.write(out / "pipeline.report.tsv");
  return summary;
}

}  // namespace cmix
