#include "cmix/assembly.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <regex>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cmix/corpus.hpp"
#include "cmix/error.hpp"
#include "cmix/io.hpp"

namespace cmix {

namespace fs = std::filesystem;

bool valid_proxy(std::string_view token) {
  static const std::regex re(R"(^\[2[a-z]{2}\]$)");
  return std::regex_match(token.begin(), token.end(), re);
}

std::vector<std::size_t> undersample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k > n) {
    throw Error("cannot sample " + std::to_string(k) + " lines from " + std::to_string(n));
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

JointCorpus assemble_joint(const std::vector<Direction>& directions, std::uint64_t seed, bool shuffle) {
  JointCorpus out;
  for (std::size_t d = 0; d < directions.size(); ++d) {
    const Direction& dir = directions[d];
    if (!valid_proxy(dir.proxy)) {
      throw Error("direction " + dir.name + ": proxy token '" + dir.proxy + "' is not of the form [2xx]");
    }
    const auto src = read_lines(dir.source_path);
    const auto tgt = read_lines(dir.target_path);
    if (src.size() != tgt.size()) {
      throw Error("direction " + dir.name + ": " + std::to_string(src.size()) + " source lines but " +
                  std::to_string(tgt.size()) + " target lines");
    }
    std::vector<std::size_t> keep;
    if (dir.sample) {
      if (*dir.sample > src.size()) {
        throw Error("direction " + dir.name + ": sample " + std::to_string(*dir.sample) +
                    " exceeds its " + std::to_string(src.size()) + " lines");
      }
      keep = undersample_indices(src.size(), *dir.sample, derive_seed({seed, d}));
    } else {
      keep.resize(src.size());
      std::iota(keep.begin(), keep.end(), std::size_t{0});
    }
    for (std::size_t i : keep) {
      out.source.push_back(dir.proxy + " " + src[i]);
      out.target.push_back(tgt[i]);
    }
    out.directions.push_back({dir.name, dir.proxy, src.size(), keep.size()});
  }
  if (shuffle && out.source.size() > 1) {
    Rng rng(derive_seed({seed, 0x5348u}));
    std::vector<std::size_t> perm(out.source.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<std::string> s, t;
    s.reserve(perm.size());
    t.reserve(perm.size());
    for (std::size_t i : perm) {
      s.push_back(std::move(out.source[i]));
      t.push_back(std::move(out.target[i]));
    }
    out.source = std::move(s);
    out.target = std::move(t);
  }
  return out;
}

void write_joint(const JointCorpus& corpus, const std::string& source_path,
                 const std::string& target_path) {
  AtomicFile src(source_path);
  AtomicFile tgt(target_path);
  for (const auto& l : corpus.source) src.stream() << l << '\n';
  for (const auto& l : corpus.target) tgt.stream() << l << '\n';
  src.commit();
  tgt.commit();
}

RecipeConfig load_recipe_config(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(strip_inline_comments(read_file(path)));
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(path, e.line(), e.message());
  }
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path fp(p);
    return (fp.is_absolute() || base.empty() ? fp : base / fp).string();
  };

  RecipeConfig cfg;
  const auto recipe = tree.get_child_optional("recipe");
  if (!recipe) throw Error(path + ": missing [recipe] section");
  cfg.recipe = recipe->get<std::string>("name", "");
  if (std::find(std::begin(kRecipeNames), std::end(kRecipeNames), cfg.recipe) == std::end(kRecipeNames)) {
    throw Error(path + ": [recipe] name '" + cfg.recipe + "' is not one of zcmt, rcmt_roman, rcmt_roman_devan");
  }
  if (auto seed = recipe->get_optional<std::string>("seed")) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(*seed, &used);
      if (used != seed->size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw Error(path + ": [recipe] seed '" + *seed + "' is not an unsigned integer");
    }
  }
  if (auto sh = recipe->get_optional<std::string>("shuffle")) {
    if (*sh == "true" || *sh == "1") cfg.shuffle = true;
    else if (*sh == "false" || *sh == "0") cfg.shuffle = false;
    else throw Error(path + ": [recipe] shuffle must be true or false");
  }

  for (const auto& [name, section] : tree) {
    if (name == "recipe") continue;
    CorpusPaths c;
    const auto src = section.get_optional<std::string>("source");
    const auto tgt = section.get_optional<std::string>("target");
    const auto sample = section.get_optional<std::string>("sample");
    if (!src) throw Error(path + ": [" + name + "] missing source");
    if (!tgt) throw Error(path + ": [" + name + "] missing target");
    if (!sample) throw Error(path + ": [" + name + "] missing sample (a line count or \"all\")");
    c.source = resolve(*src);
    c.target = resolve(*tgt);
    if (*sample != "all") {
      try {
        std::size_t used = 0;
        c.sample = std::stoull(*sample, &used);
        if (used != sample->size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw Error(path + ": [" + name + "] sample '" + *sample + "' is not a line count or \"all\"");
      }
    }
    cfg.corpora[name] = std::move(c);
  }
  return cfg;
}

std::vector<Direction> recipe_directions(const RecipeConfig& config) {
  std::vector<Direction> out;
  auto need = [&](const std::string& name) -> const CorpusPaths& {
    const auto it = config.corpora.find(name);
    if (it == config.corpora.end()) {
      throw Error("recipe " + config.recipe + " needs corpus [" + name + "]");
    }
    return it->second;
  };
  auto both = [&](const std::string& name, const std::string& iso) {
    const CorpusPaths& c = need(name);
    out.push_back({name + "->en", c.source, c.target, proxy_for("en"), c.sample});
    out.push_back({"en->" + name, c.target, c.source, proxy_for(iso), c.sample});
  };
  auto one_way = [&](const std::string& name) {
    const CorpusPaths& c = need(name);
    out.push_back({name + "->en", c.source, c.target, proxy_for("en"), c.sample});
  };

  if (config.recipe == "zcmt") {
    both("hi_c", "hi");
    both("hi_cr", "hi");
    one_way("hi_crn");
    both("bn", "bn");
    both("bn_r", "bn");
  } else if (config.recipe == "rcmt_roman") {
    both("hi_cr", "hi");
    one_way("hi_crn");
  } else if (config.recipe == "rcmt_roman_devan") {
    both("hi_c", "hi");
    both("hi_cr", "hi");
    one_way("hi_crn");
  } else {
    throw Error("unknown recipe '" + config.recipe + "'");
  }
  return out;
}

}  // namespace cmix
