// Brute-force metric oracle: n-grams are materialised as token vectors and
// combined with explicit Counter-style operations. Shares no code with the
// library's metric implementation; only tokenized inputs are passed in.
#ifndef REWRITEKIT_TESTS_METRIC_ORACLE_HPP
#define REWRITEKIT_TESTS_METRIC_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "oracle/sequence_oracle.hpp"

namespace oracle {

using Gram = std::vector<std::string>;
using Counter = std::map<Gram, long>;

inline std::vector<Gram> grams(const Words& w, std::size_t n) {
  std::vector<Gram> out;
  for (std::size_t i = 0; i + n <= w.size(); ++i) out.emplace_back(w.begin() + i, w.begin() + i + n);
  return out;
}

inline Counter count(const std::vector<Gram>& gs) {
  Counter c;
  for (const auto& g : gs) c[g] += 1;
  return c;
}

inline long get(const Counter& c, const Gram& g) {
  auto it = c.find(g);
  return it == c.end() ? 0 : it->second;
}

// Python Counter semantics: & is min, - is subtraction; both drop
// non-positive results.
inline Counter intersect(const Counter& a, const Counter& b) {
  Counter out;
  for (const auto& [g, v] : a) {
    const long m = std::min(v, get(b, g));
    if (m > 0) out[g] = m;
  }
  return out;
}

inline Counter subtract(const Counter& a, const Counter& b) {
  Counter out;
  for (const auto& [g, v] : a) {
    const long m = v - get(b, g);
    if (m > 0) out[g] = m;
  }
  return out;
}

inline Counter scale(const Counter& a, long k) {
  Counter out;
  for (const auto& [g, v] : a) out[g] = v * k;
  return out;
}

inline double f1(double p, double r) { return (p > 0 || r > 0) ? 2 * p * r / (p + r) : 0.0; }

struct SariParts {
  double keep = 0, del = 0, add = 0;
};

inline SariParts sari_ngram(const std::vector<Gram>& s, const std::vector<Gram>& c,
                            const std::vector<std::vector<Gram>>& refs, bool all_f1) {
  const long numref = static_cast<long>(refs.size());
  Counter r;
  for (const auto& rg : refs)
    for (const auto& g : rg) r[g] += 1;
  const Counter s_rep = scale(count(s), numref);
  const Counter c_rep = scale(count(c), numref);

  const Counter keep_rep = intersect(s_rep, c_rep);
  const Counter keep_good = intersect(keep_rep, r);
  const Counter keep_all = intersect(s_rep, r);
  double k1 = 0, k2 = 0, all_total = 0;
  for (const auto& [g, v] : keep_rep) {
    k1 += static_cast<double>(get(keep_good, g)) / static_cast<double>(v);
    k2 += static_cast<double>(get(keep_good, g));
  }
  for (const auto& [g, v] : keep_all) all_total += static_cast<double>(v);
  const double keep_p = keep_rep.empty() ? 1.0 : k1 / static_cast<double>(keep_rep.size());
  const double keep_r = keep_all.empty() ? 1.0 : k2 / all_total;

  const Counter del_rep = subtract(s_rep, c_rep);
  const Counter del_good = subtract(del_rep, r);
  const Counter del_all = subtract(s_rep, r);
  double d1 = 0, d2 = 0;
  for (const auto& [g, v] : del_rep) {
    d1 += static_cast<double>(get(del_good, g)) / static_cast<double>(v);
    if (get(del_all, g) > 0) {
      d2 += static_cast<double>(get(del_good, g)) / static_cast<double>(get(del_all, g));
    }
  }
  const double del_p = del_rep.empty() ? 1.0 : d1 / static_cast<double>(del_rep.size());
  const double del_r = del_all.empty() ? 1.0 : d2 / static_cast<double>(del_all.size());

  std::set<Gram> sset, cset, rset;
  for (const auto& g : s) sset.insert(g);
  for (const auto& g : c) cset.insert(g);
  for (const auto& [g, v] : r) rset.insert(g);
  std::set<Gram> added, added_good, addable;
  for (const auto& g : cset)
    if (!sset.count(g)) added.insert(g);
  for (const auto& g : added)
    if (rset.count(g)) added_good.insert(g);
  for (const auto& g : rset)
    if (!sset.count(g)) addable.insert(g);
  const double add_p = added.empty() ? 1.0 : double(added_good.size()) / double(added.size());
  const double add_r = addable.empty() ? 1.0 : double(added_good.size()) / double(addable.size());

  return {f1(keep_p, keep_r), all_f1 ? f1(del_p, del_r) : del_p, f1(add_p, add_r)};
}

inline double sari(const Words& src, const Words& pred, const std::vector<Words>& refs,
                   bool all_f1 = false) {
  double keep = 0, del = 0, add = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<std::vector<Gram>> rg;
    for (const auto& r : refs) rg.push_back(grams(r, n));
    const SariParts p = sari_ngram(grams(src, n), grams(pred, n), rg, all_f1);
    keep += p.keep;
    del += p.del;
    add += p.add;
  }
  return (keep / 4 + del / 4 + add / 4) / 3 * 100;
}

inline long clipped(const Words& pred, const Words& other, std::size_t n) {
  const Counter a = count(grams(pred, n));
  const Counter b = count(grams(other, n));
  long total = 0;
  for (const auto& [g, v] : a) total += std::min(v, get(b, g));
  return total;
}

inline double smoothed_geomean(const std::vector<std::pair<long, long>>& num_den) {
  double log_sum = 0;
  for (std::size_t i = 0; i < num_den.size(); ++i) {
    const auto [num, den] = num_den[i];
    if (num == 0 && i == 0) return 0.0;
    const double p = num > 0 ? double(num) / double(den) : 1.0 / double(den + 1);
    log_sum += std::log(p);
  }
  return num_den.empty() ? 0.0 : std::exp(log_sum / double(num_den.size()));
}

inline double bp(std::size_t c, std::size_t r) {
  if (c > r) return 1.0;
  return std::exp(1.0 - double(r) / double(c));
}

inline double gleu(const Words& src, const Words& pred, const std::vector<Words>& refs) {
  if (pred.empty()) return 0.0;
  std::vector<double> vals;
  for (const auto& ref : refs) {
    std::vector<std::pair<long, long>> nd;
    for (std::size_t n = 1; n <= std::min<std::size_t>(4, pred.size()); ++n) {
      const long mr = clipped(pred, ref, n);
      const long ms = clipped(pred, src, n);
      const long num = std::max(0L, mr - std::max(0L, ms - mr));
      nd.emplace_back(num, static_cast<long>(pred.size() - n + 1));
    }
    vals.push_back(100 * bp(pred.size(), ref.size()) * smoothed_geomean(nd));
  }
  std::sort(vals.begin(), vals.end());
  double total = 0;
  for (double v : vals) total += v;
  return total / double(vals.size());
}

inline double bleu(const Words& pred, const std::vector<Words>& refs) {
  if (pred.empty()) return 0.0;
  std::vector<std::pair<long, long>> nd;
  for (std::size_t n = 1; n <= std::min<std::size_t>(4, pred.size()); ++n) {
    const Counter p = count(grams(pred, n));
    Counter best;
    for (const auto& r : refs)
      for (const auto& [g, v] : count(grams(r, n))) best[g] = std::max(best[g], v);
    long match = 0;
    for (const auto& [g, v] : p) match += std::min(v, get(best, g));
    nd.emplace_back(match, static_cast<long>(pred.size() - n + 1));
  }
  std::size_t closest = refs.front().size();
  auto dist = [&](std::size_t len) { return std::abs(long(len) - long(pred.size())); };
  for (const auto& r : refs) {
    if (dist(r.size()) < dist(closest) || (dist(r.size()) == dist(closest) && r.size() < closest)) {
      closest = r.size();
    }
  }
  return 100 * bp(pred.size(), closest) * smoothed_geomean(nd);
}

inline double rouge_f(const Words& pred, const Words& ref, bool lcs) {
  if (pred.empty() && ref.empty()) return 100.0;
  if (pred.empty() || ref.empty()) return 0.0;
  const double overlap = lcs ? double(lcs_length(pred, ref)) : double(clipped(pred, ref, 1));
  const double p = overlap / double(pred.size());
  const double r = overlap / double(ref.size());
  return 100 * f1(p, r);
}

// Update-ROUGE from pre-split, pre-normalised sentences.
struct Sentences {
  std::vector<std::string> normalized;
  std::vector<Words> tokens;
};

inline double update_rouge(const Sentences& src, const Sentences& pred, const Sentences& ref) {
  const std::set<std::string> base(src.normalized.begin(), src.normalized.end());
  auto updated = [&](const Sentences& s, bool& any) {
    Words out;
    any = false;
    for (std::size_t i = 0; i < s.normalized.size(); ++i) {
      if (base.count(s.normalized[i])) continue;
      any = true;
      out.insert(out.end(), s.tokens[i].begin(), s.tokens[i].end());
    }
    return out;
  };
  bool pred_any = false, ref_any = false;
  const Words p = updated(pred, pred_any);
  const Words r = updated(ref, ref_any);
  if (!pred_any && !ref_any) return 100.0;
  if (!pred_any) return 0.0;
  return rouge_f(p, r, true);
}

}  // namespace oracle

#endif
