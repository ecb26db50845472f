#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cmix/corpus.hpp"
#include "test_util.hpp"

namespace cmix::testing {

inline std::vector<ParallelPair> toy_corpus() {
  return {make_pair(0, "das haus", "the house"), make_pair(1, "das buch", "the book"),
          make_pair(2, "ein buch", "a book")};
}

// Brute-force EM: enumerates every alignment vector a in {0..m}^n of each
// pair, so it shares nothing with the factorized E-step under test.
struct OracleEm {
  std::map<std::pair<std::string, std::string>, double> t;  // (f, e) -> t(e|f)
  std::vector<double> lls;

  OracleEm(const std::vector<ParallelPair>& pairs, int iterations, std::optional<double> tension) {
    std::map<std::string, std::set<std::string>> cooc;
    for (const auto& p : pairs) {
      for (const auto& e : p.target.tokens) {
        cooc["<null>"].insert(e.surface);
        for (const auto& f : p.source.tokens) cooc[f.surface].insert(e.surface);
      }
    }
    for (const auto& [f, es] : cooc)
      for (const auto& e : es) t[{f, e}] = 1.0 / static_cast<double>(es.size());

    for (int it = 0; it <= iterations; ++it) {
      std::map<std::pair<std::string, std::string>, double> counts;
      double ll = 0.0;
      for (const auto& p : pairs) {
        std::vector<std::string> f{"<null>"};
        for (const auto& tok : p.source.tokens) f.push_back(tok.surface);
        const std::size_t m = p.source.size();
        const std::size_t n = p.target.size();
        std::vector<std::size_t> a(n, 0);
        std::vector<std::pair<std::vector<std::size_t>, double>> joint;
        double z = 0.0;
        for (;;) {
          double w = 1.0;
          for (std::size_t j = 0; j < n; ++j) {
            const auto it_t = t.find({f[a[j]], p.target.tokens[j].surface});
            const double tp = it_t == t.end() ? 0.0 : it_t->second;
            w *= prior(a[j], j + 1, m, n, tension) * tp;
          }
          joint.emplace_back(a, w);
          z += w;
          std::size_t k = 0;
          while (k < n && ++a[k] > m) a[k++] = 0;
          if (k == n) break;
        }
        ll += std::log(z);
        for (const auto& [av, w] : joint)
          for (std::size_t j = 0; j < n; ++j) counts[{f[av[j]], p.target.tokens[j].surface}] += w / z;
      }
      lls.push_back(ll);
      if (it == iterations) break;
      std::map<std::string, double> totals;
      for (const auto& [k, c] : counts) totals[k.first] += c;
      for (auto& [k, v] : t) v = counts[k] / totals[k.first];
    }
  }

  static double prior(std::size_t i, std::size_t j, std::size_t m, std::size_t n, std::optional<double> tension) {
    if (!tension || i == 0) return 1.0 / static_cast<double>(m + 1);
    double z = 0.0;
    for (std::size_t k = 1; k <= m; ++k) z += std::exp(-*tension * std::abs(double(k) / m - double(j) / n));
    return double(m) / (m + 1) * std::exp(-*tension * std::abs(double(i) / m - double(j) / n)) / z;
  }
};

}  // namespace cmix::testing
