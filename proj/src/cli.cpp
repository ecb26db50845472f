#include "cmix/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "cmix/aligner.hpp"
#include "cmix/assembly.hpp"
#include "cmix/corpus.hpp"
#include "cmix/data_tables.hpp"
#include "cmix/fluency.hpp"
#include "cmix/inclusion.hpp"
#include "cmix/io.hpp"
#include "cmix/metrics.hpp"
#include "cmix/noise.hpp"
#include "cmix/pipeline.hpp"
#include "cmix/translit.hpp"

#ifndef CMIX_VERSION
#define CMIX_VERSION "0.0.0"
#endif

namespace cmix {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSubcommands[] = {"align", "translit", "dict",  "generate", "noise",
                                        "assemble", "stats", "bleu", "pipeline"};

std::string usage() {
  return "usage: cmix <command> [options]\n"
         "commands:\n"
         "  align      word-align a tagged bitext (Pharaoh output)\n"
         "  dict       extract per-sentence substitution tables\n"
         "  generate   produce code-mixed variants\n"
         "  translit   romanize Devanagari tokens of a code-mixed corpus\n"
         "  noise      inject word-level noise into a romanized corpus\n"
         "  assemble   build a joint-training corpus from a recipe\n"
         "  stats      corpus statistics of a code-mixed corpus\n"
         "  bleu       corpus BLEU of hypotheses against references\n"
         "  pipeline   run every stage from one config file\n"
         "run 'cmix <command> --help' for options\n";
}

std::string report_path(const std::string& given, const std::string& out) {
  return given.empty() ? out + ".report.tsv" : given;
}

struct Langs {
  std::string matrix = "hi";
  std::string embedded = "en";
  void add(CLI::App* cmd) {
    cmd->add_option("--matrix", matrix, "matrix language code")->capture_default_str();
    cmd->add_option("--embedded", embedded, "embedded language code")->capture_default_str();
  }
};

struct AlignArgs {
  std::string source, target, out, table, report;
  Langs langs;
  int iterations = 5;
  double tension = 4.0;
  bool model1 = false;
  unsigned threads = 1;
};

struct DictArgs {
  std::string source, target, alignments, inclusion, out, report;
  Langs langs;
};

struct GenerateArgs {
  std::string source, target, dict, inclusion, out, plain, report, lm, scores, save_lm;
  Langs langs;
  std::optional<std::uint64_t> seed;
  FilterSpec filter;
  std::optional<double> ppl_max;
  std::size_t sample_cap = 64;
  bool bootstrap_lm = false;
  int lm_order = 3;
  unsigned threads = 1;
};

struct TranslitArgs {
  std::string in, out, plain, overrides, scheme, report;
  Langs langs;
  bool no_schwa = false;
};

struct NoiseArgs {
  std::string in, out, plain, counts, report;
  std::string rates = "switch=0.30,omission=0.12,typo=0.12,shuffle=0.06";
  std::string eligibility = "transliterated";
  Langs langs;
  std::optional<std::uint64_t> seed;
};

struct AssembleArgs {
  std::string config, out_src, out_tgt, report;
  std::optional<std::uint64_t> seed;
  bool shuffle = false;
};

struct StatsArgs {
  std::string in, out, label = "corpus";
  Langs langs;
};

struct BleuArgs {
  std::string hyp, ref;
};

struct PipelineArgs {
  std::string config, out_dir;
};

std::vector<CMRecord> collect(const std::vector<ParallelPair>& pairs, const std::vector<SubstitutionTable>& tables,
                              const InclusionList& inclusion, const GeneratorSettings& settings,
                              const FluencyScorer* scorer, GenerationReport& report) {
  std::vector<CMRecord> out;
  report = generate_cm_corpus(pairs, tables, inclusion, settings, scorer,
                              [&](const CMVariant& v, const Sentence& t) { out.push_back({v, t}); });
  return out;
}

int do_align(const AlignArgs& a, std::ostream& out) {
  RunReport rep("align");
  const auto pairs = load_tagged_bitext(a.source, a.target, LangTag::matrix(a.langs.matrix),
                                        LangTag::embedded(a.langs.embedded));
  rep.input(a.source);
  rep.input(a.target);
  AlignerSettings s;
  s.iterations = a.iterations;
  s.tension = a.model1 ? std::nullopt : std::optional<double>(a.tension);
  s.threads = a.threads;
  if (s.iterations < 1) throw Error("--iterations must be at least 1");
  if (s.tension && !(*s.tension > 0.0)) throw Error("--tension must be positive");
  TranslationTable forward;
  const auto links = align_symmetric(pairs, s, &forward);
  AtomicFile f(a.out);
  std::size_t n = 0;
  for (const auto& l : links) {
    f.stream() << to_pharaoh(l) << '\n';
    n += l.size();
  }
  f.commit();
  rep.output(a.out);
  if (!a.table.empty()) {
    AtomicFile t(a.table);
    forward.dump(t.stream());
    t.commit();
    rep.output(a.table);
  }
  rep.set("pairs", pairs.size());
  rep.set("links", n);
  rep.write(report_path(a.report, a.out));
  out << "aligned " << pairs.size() << " pairs, " << n << " links\n";
  return 0;
}

int do_dict(const DictArgs& a, std::ostream& out) {
  RunReport rep("dict");
  const auto pairs = load_tagged_bitext(a.source, a.target, LangTag::matrix(a.langs.matrix),
                                        LangTag::embedded(a.langs.embedded));
  const auto links = load_pharaoh(a.alignments);
  if (links.size() != pairs.size()) {
    throw Error(a.alignments + ": " + std::to_string(links.size()) + " alignment lines for " +
                std::to_string(pairs.size()) + " sentence pairs");
  }
  const InclusionList inclusion = a.inclusion.empty() ? InclusionList::defaults() : InclusionList::load(a.inclusion);
  rep.input(a.source);
  rep.input(a.target);
  rep.input(a.alignments);
  if (!a.inclusion.empty()) rep.input(a.inclusion);
  AtomicFile f(a.out);
  std::size_t entries = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto table = extract_substitution_table(pairs[i], links[i], inclusion);
    entries += table.entries.size();
    f.stream() << to_jsonl(table) << '\n';
  }
  f.commit();
  rep.output(a.out);
  rep.set("tables", pairs.size());
  rep.set("entries", entries);
  rep.write(report_path(a.report, a.out));
  out << "wrote " << entries << " substitution entries\n";
  return 0;
}

int do_generate(const GenerateArgs& a, std::ostream& out) {
  RunReport rep("generate");
  if (!a.seed) throw Error("--seed is required");
  const int sources = !a.lm.empty() + !a.scores.empty() + a.bootstrap_lm;
  if (sources > 1) throw Error("--lm, --scores and --bootstrap-lm are mutually exclusive");
  GeneratorSettings settings;
  settings.filter = a.filter;
  settings.filter.ppl_max = a.ppl_max;
  settings.filter.validate();
  settings.sample_cap = a.sample_cap;
  settings.seed = *a.seed;
  settings.embedded = LangTag::embedded(a.langs.embedded);
  settings.threads = a.threads;

  const auto pairs = load_tagged_bitext(a.source, a.target, LangTag::matrix(a.langs.matrix), settings.embedded);
  const auto tables = load_substitution_tables(a.dict);
  const InclusionList inclusion = a.inclusion.empty() ? InclusionList::defaults() : InclusionList::load(a.inclusion);
  rep.input(a.source);
  rep.input(a.target);
  rep.input(a.dict);
  rep.set("seed", *a.seed);

  std::optional<NgramLM> lm;
  std::unique_ptr<FluencyScorer> scorer;
  if (!a.lm.empty()) {
    lm = NgramLM::load(a.lm);
    rep.input(a.lm);
  } else if (!a.scores.empty()) {
    scorer = std::make_unique<ExternalScorer>(ExternalScorer::load(a.scores));
    rep.input(a.scores);
  } else if (a.bootstrap_lm) {
    GeneratorSettings first = settings;
    first.filter = FilterSpec::permissive(settings.sample_cap);
    GenerationReport boot;
    const auto unfiltered = collect(pairs, tables, inclusion, first, nullptr, boot);
    if (unfiltered.empty()) throw Error("the unfiltered pass produced no variants to train on");
    std::vector<std::vector<std::string>> corpus;
    for (const auto& r : unfiltered) corpus.push_back(variant_words(r.variant));
    lm = NgramLM::train(corpus, a.lm_order);
    rep.set("bootstrap_variants", unfiltered.size());
  }
  if (lm) {
    scorer = std::make_unique<LmScorer>(*lm);
    if (!a.save_lm.empty()) {
      lm->save(a.save_lm);
      rep.output(a.save_lm);
    }
  }

  GenerationReport g;
  const auto records = collect(pairs, tables, inclusion, settings, scorer.get(), g);
  write_cm_tsv_file(a.out, records);
  rep.output(a.out);
  if (!a.plain.empty()) write_plain_pair(records, a.plain);
  rep.set("pairs", g.pairs);
  rep.set("pairs_without_candidates", g.pairs_without_candidates);
  rep.set("pairs_without_survivors", g.pairs_without_survivors);
  rep.set("variants_sampled", g.variants_sampled);
  rep.set("variants_emitted", g.variants_emitted);
  rep.write(report_path(a.report, a.out));
  out << "generated " << records.size() << " variants from " << g.pairs << " pairs\n";
  return 0;
}

int do_translit(const TranslitArgs& a, std::ostream& out) {
  RunReport rep("translit");
  auto records = read_cm_tsv(a.in, LangTag::matrix(a.langs.matrix), LangTag::embedded(a.langs.embedded));
  rep.input(a.in);
  TranslitScheme scheme = a.scheme.empty() ? TranslitScheme::default_devanagari() : TranslitScheme::load(a.scheme);
  scheme.set_schwa_deletion(!a.no_schwa);
  std::optional<OverrideMap> overrides;
  if (!a.overrides.empty()) {
    overrides = load_override_map(a.overrides);
    rep.input(a.overrides);
  }
  TranslitStats stats;
  transliterate_records(records, scheme, overrides ? &*overrides : nullptr, stats);
  write_cm_tsv_file(a.out, records);
  rep.output(a.out);
  if (!a.plain.empty()) write_plain_pair(records, a.plain);
  rep.set("tokens", stats.tokens);
  rep.set("overridden", stats.overridden);
  rep.set("unknown_codepoints", stats.unknown_codepoints);
  rep.set("non_ascii_outputs", stats.non_ascii_outputs);
  rep.write(report_path(a.report, a.out));
  out << "romanized " << stats.tokens << " tokens\n";
  return 0;
}

int do_noise(const NoiseArgs& a, std::ostream& out) {
  RunReport rep("noise");
  if (!a.seed) throw Error("--seed is required");
  NoiseSpec spec = NoiseSpec::parse_rates(a.rates, *a.seed);
  if (a.eligibility == "latin") spec.eligibility = NoiseEligibility::AllLatin;
  else if (a.eligibility != "transliterated") throw Error("--eligibility must be transliterated or latin");
  auto records = read_cm_tsv(a.in, LangTag::matrix(a.langs.matrix), LangTag::embedded(a.langs.embedded));
  rep.input(a.in);
  const NoiseReport nr = inject_noise(records, spec);
  write_cm_tsv_file(a.out, records);
  rep.output(a.out);
  if (!a.plain.empty()) write_plain_pair(records, a.plain);
  const std::string counts = a.counts.empty() ? a.out + ".counts.tsv" : a.counts;
  {
    AtomicFile f(counts);
    nr.write(f.stream(), spec);
    f.commit();
  }
  rep.output(counts);
  rep.set("seed", *a.seed);
  rep.set("eligible", nr.eligible);
  rep.set("perturbed", nr.perturbed());
  for (NoiseType t : kNoiseTypes) {
    const auto k = static_cast<std::size_t>(t);
    rep.set(std::string(noise_type_name(t)) + "_applied", nr.applied[k]);
    rep.set(std::string(noise_type_name(t)) + "_fallback", nr.fallback[k]);
  }
  rep.write(report_path(a.report, a.out));
  out << "perturbed " << nr.perturbed() << " of " << nr.eligible << " eligible tokens\n";
  return 0;
}

int do_assemble(const AssembleArgs& a, std::ostream& out) {
  RunReport rep("assemble");
  const RecipeConfig cfg = load_recipe_config(a.config);
  const auto seed = a.seed ? a.seed : cfg.seed;
  if (!seed) throw Error(a.config + ": no seed ([recipe] seed or --seed)");
  const auto directions = recipe_directions(cfg);
  const JointCorpus joint = assemble_joint(directions, *seed, a.shuffle || cfg.shuffle);
  write_joint(joint, a.out_src, a.out_tgt);
  rep.input(a.config);
  rep.set("recipe", cfg.recipe);
  rep.set("seed", *seed);
  for (const auto& d : joint.directions) {
    rep.set("direction", d.name + "\t" + d.proxy + "\t" + std::to_string(d.lines_in) + "\t" +
                             std::to_string(d.lines_out));
  }
  rep.output(a.out_src);
  rep.output(a.out_tgt);
  rep.write(report_path(a.report, a.out_src));
  out << "assembled " << directions.size() << " directions, " << joint.source.size() << " lines\n";
  return 0;
}

int do_stats(const StatsArgs& a, std::ostream& out) {
  const auto records = read_cm_tsv(a.in, LangTag::matrix(a.langs.matrix), LangTag::embedded(a.langs.embedded));
  const CorpusStats stats = corpus_stats(records);
  if (a.out.empty()) {
    write_stats_report(out, stats, a.label);
  } else {
    AtomicFile f(a.out);
    write_stats_report(f.stream(), stats, a.label);
    f.commit();
  }
  return 0;
}

int do_bleu(const BleuArgs& a, std::ostream& out) {
  const auto hyps = load_plain(a.hyp, LangTag::embedded("xx"));
  const auto refs = load_plain(a.ref, LangTag::embedded("xx"));
  out << bleu(hyps, refs).summary() << '\n';
  return 0;
}

int do_pipeline(const PipelineArgs& a, std::ostream& out) {
  PipelineConfig cfg = load_pipeline_config(a.config);
  if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
  const auto summary = run_pipeline(cfg, out);
  out << "pipeline: " << summary.variants << " code-mixed variants, " << summary.assembled_lines
      << " training lines\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (argc < 2) {
    err << usage();
    return 2;
  }
  const std::string first = argv[1];
  if (first == "--version" || first == "-V") {
    out << "cmix " << CMIX_VERSION << " (tables " << data::tables_version() << ")\n";
    return 0;
  }
  if (first == "--help" || first == "-h" || first == "help") {
    out << usage();
    return 0;
  }
  if (std::find(std::begin(kSubcommands), std::end(kSubcommands), first) == std::end(kSubcommands)) {
    err << "cmix: unknown command '" << first << "'\n" << usage();
    return 2;
  }

  CLI::App app{"code-mixed corpus toolkit", "cmix"};
  app.require_subcommand(1);

  AlignArgs align;
  auto* c = app.add_subcommand("align", "word-align a tagged bitext");
  c->add_option("--source", align.source, "tagged source file (token<TAB>POS)")->required();
  c->add_option("--target", align.target, "plain target file")->required();
  c->add_option("--out", align.out, "Pharaoh alignment output")->required();
  c->add_option("--table", align.table, "forward lexical table output");
  c->add_option("--iterations", align.iterations)->capture_default_str();
  c->add_option("--tension", align.tension, "diagonal prior tension")->capture_default_str();
  c->add_flag("--model1", align.model1, "plain Model 1 without the diagonal prior");
  c->add_option("--threads", align.threads)->capture_default_str();
  c->add_option("--report", align.report);
  align.langs.add(c);

  DictArgs dict;
  c = app.add_subcommand("dict", "extract substitution tables");
  c->add_option("--source", dict.source)->required();
  c->add_option("--target", dict.target)->required();
  c->add_option("--alignments", dict.alignments, "Pharaoh alignments")->required();
  c->add_option("--inclusion", dict.inclusion, "POS tags eligible for switching, one per line");
  c->add_option("--out", dict.out, "JSONL output")->required();
  c->add_option("--report", dict.report);
  dict.langs.add(c);

  GenerateArgs gen;
  c = app.add_subcommand("generate", "produce code-mixed variants");
  c->add_option("--source", gen.source)->required();
  c->add_option("--target", gen.target)->required();
  c->add_option("--dict", gen.dict, "substitution tables (JSONL)")->required();
  c->add_option("--inclusion", gen.inclusion);
  c->add_option("--out", gen.out, "code-mixed TSV output")->required();
  c->add_option("--plain", gen.plain, "also write PREFIX.src and PREFIX.tgt");
  c->add_option("--seed", gen.seed)->required();
  c->add_option("--cmi-min", gen.filter.cmi_lo)->capture_default_str();
  c->add_option("--cmi-max", gen.filter.cmi_hi)->capture_default_str();
  c->add_option("--spf-min", gen.filter.spf_lo)->capture_default_str();
  c->add_option("--spf-max", gen.filter.spf_hi)->capture_default_str();
  c->add_option("--ppl-max", gen.ppl_max);
  c->add_option("--cap", gen.filter.cap, "variants kept per pair")->capture_default_str();
  c->add_option("--sample-cap", gen.sample_cap, "subsets drawn per pair")->capture_default_str();
  c->add_option("--lm", gen.lm, "n-gram model file");
  c->add_option("--scores", gen.scores, "external id<TAB>variant<TAB>ppl file");
  c->add_flag("--bootstrap-lm", gen.bootstrap_lm, "train the n-gram model on an unfiltered first pass");
  c->add_option("--lm-order", gen.lm_order)->capture_default_str();
  c->add_option("--save-lm", gen.save_lm);
  c->add_option("--threads", gen.threads)->capture_default_str();
  c->add_option("--report", gen.report);
  gen.langs.add(c);

  TranslitArgs tr;
  c = app.add_subcommand("translit", "romanize a code-mixed corpus");
  c->add_option("--in", tr.in)->required();
  c->add_option("--out", tr.out)->required();
  c->add_option("--plain", tr.plain);
  c->add_option("--overrides", tr.overrides, "devanagari<TAB>roman exceptions");
  c->add_option("--scheme", tr.scheme, "rule table replacing the built-in one");
  c->add_flag("--no-schwa-deletion", tr.no_schwa);
  c->add_option("--report", tr.report);
  tr.langs.add(c);

  NoiseArgs noise;
  c = app.add_subcommand("noise", "inject word-level noise");
  c->add_option("--in", noise.in)->required();
  c->add_option("--out", noise.out)->required();
  c->add_option("--plain", noise.plain);
  c->add_option("--noise", noise.rates, "per-type rates")->capture_default_str();
  c->add_option("--eligibility", noise.eligibility, "transliterated or latin")->capture_default_str();
  c->add_option("--seed", noise.seed)->required();
  c->add_option("--counts", noise.counts, "per-type count TSV");
  c->add_option("--report", noise.report);
  noise.langs.add(c);

  AssembleArgs as;
  c = app.add_subcommand("assemble", "build a joint-training corpus");
  c->add_option("--config", as.config, "recipe INI file")->required();
  c->add_option("--out-src", as.out_src)->required();
  c->add_option("--out-tgt", as.out_tgt)->required();
  c->add_option("--seed", as.seed);
  c->add_flag("--shuffle", as.shuffle);
  c->add_option("--report", as.report);

  StatsArgs st;
  c = app.add_subcommand("stats", "corpus statistics");
  c->add_option("--in", st.in)->required();
  c->add_option("--out", st.out, "report path (stdout when omitted)");
  c->add_option("--label", st.label)->capture_default_str();
  st.langs.add(c);

  BleuArgs bl;
  c = app.add_subcommand("bleu", "corpus BLEU");
  c->add_option("--hyp", bl.hyp)->required();
  c->add_option("--ref", bl.ref)->required();

  PipelineArgs pl;
  c = app.add_subcommand("pipeline", "run every stage");
  c->add_option("--config", pl.config)->required();
  c->add_option("--out-dir", pl.out_dir, "overrides output.dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "align") return do_align(align, out);
    if (cmd == "dict") return do_dict(dict, out);
    if (cmd == "generate") return do_generate(gen, out);
    if (cmd == "translit") return do_translit(tr, out);
    if (cmd == "noise") return do_noise(noise, out);
    if (cmd == "assemble") return do_assemble(as, out);
    if (cmd == "stats") return do_stats(st, out);
    if (cmd == "bleu") return do_bleu(bl, out);
    if (cmd == "pipeline") return do_pipeline(pl, out);
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) err << "cmix: " << p << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "cmix: " << e.what() << '\n';
    return 1;
  }
  err << usage();
  return 2;
}

}  // namespace cmix
