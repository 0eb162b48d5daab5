#include "rewritekit/nliclient.hpp"

#include <cmath>

#include <json.hpp>

#include "rewritekit/corpusio.hpp"
#include "rewritekit/textops.hpp"

namespace rewritekit {

std::string_view to_string(NliOrigin origin) {
  switch (origin) {
    case NliOrigin::Remote: return "REMOTE";
    case NliOrigin::Cache: return "CACHE";
    case NliOrigin::Stub: return "STUB";
  }
  return "UNKNOWN";
}

NliScore nli_score(std::string_view premise, std::string_view hypothesis, NliBackend& backend) {
  std::vector<NliPair> pairs{{std::string(premise), std::string(hypothesis)}};
  return backend.score_batch(pairs).front();
}

NliScore reversed_nli_score(std::string_view premise, std::string_view hypothesis,
                            NliBackend& backend) {
  return nli_score(hypothesis, premise, backend);
}

const std::vector<std::string>& default_nli_stopwords() {
  static const std::vector<std::string> words = {
      "a", "an", "and", "or", "but", "of", "to", "in", "on", "at", "by", "for", "with",
      "is", "are", "was", "were", "be", "been", "it", "its", "as", "that", "this"};
  return words;
}

StubNli::StubNli() : StubNli(default_nli_stopwords()) {}

StubNli::StubNli(const std::vector<std::string>& stopwords)
    : stopwords_(stopwords.begin(), stopwords.end()) {}

double StubNli::containment(std::string_view premise, std::string_view hypothesis) const {
  const auto hyp = content_words(tokenize(hypothesis), stopwords_);
  const std::unordered_set<std::string> hyp_set(hyp.begin(), hyp.end());
  if (hyp_set.empty()) return 1.0;
  const auto prem = content_words(tokenize(premise), stopwords_);
  const std::unordered_set<std::string> prem_set(prem.begin(), prem.end());
  std::size_t shared = 0;
  for (const auto& w : hyp_set) shared += prem_set.count(w);
  return static_cast<double>(shared) / static_cast<double>(hyp_set.size());
}

std::vector<NliScore> StubNli::score_batch(const std::vector<NliPair>& pairs) {
  std::vector<NliScore> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back({p.premise, p.hypothesis, containment(p.premise, p.hypothesis), NliOrigin::Stub});
  }
  return out;
}

HttpNli::HttpNli(HttpNliOptions options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw std::invalid_argument("NLI endpoint is empty");
  if (options_.batch_size == 0) options_.batch_size = 1;
}

std::vector<double> HttpNli::request(const std::vector<NliPair>& pairs) {
  Json body;
  body["pairs"] = Json::array();
  for (const auto& p : pairs) body["pairs"].push_back({{"premise", p.premise}, {"hypothesis", p.hypothesis}});
  const HttpResponse res = post_json(options_.endpoint, "/v1/nli", body.dump(), options_.retry);

  Json parsed;
  try {
    parsed = Json::parse(res.body);
  } catch (const Json::parse_error& e) {
    throw ProtocolError(std::string("NLI response is not JSON: ") + e.what());
  }
  const auto scores = parsed.find("scores");
  if (!parsed.is_object() || scores == parsed.end() || !scores->is_array()) {
    throw ProtocolError("NLI response lacks a 'scores' array");
  }
  if (scores->size() != pairs.size()) {
    throw ProtocolError("NLI response has " + std::to_string(scores->size()) + " scores for " +
                        std::to_string(pairs.size()) + " pairs");
  }
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& s : *scores) {
    if (!s.is_number()) throw ProtocolError("NLI score is not a number");
    const double v = s.get<double>();
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw ProtocolError("NLI score outside [0,1]: " + s.dump());
    }
    out.push_back(v);
  }

  std::lock_guard<std::mutex> lock(mutex_);
  ++requests_;
  const auto header = res.headers.find("x-scorer-id");
  const std::string id = header != res.headers.end() ? header->second : "http:" + options_.endpoint;
  if (scorer_id_ && *scorer_id_ != id) {
    throw ProtocolError("scorer id changed mid-session: " + *scorer_id_ + " -> " + id);
  }
  scorer_id_ = id;
  return out;
}

std::string HttpNli::scorer_id() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (scorer_id_) return *scorer_id_;
  }
  request({});
  std::lock_guard<std::mutex> lock(mutex_);
  return *scorer_id_;
}

std::vector<NliScore> HttpNli::score_batch(const std::vector<NliPair>& pairs) {
  std::vector<NliScore> out;
  out.reserve(pairs.size());
  for (std::size_t start = 0; start < pairs.size(); start += options_.batch_size) {
    const std::size_t end = std::min(pairs.size(), start + options_.batch_size);
    const std::vector<NliPair> chunk(pairs.begin() + static_cast<long>(start),
                                     pairs.begin() + static_cast<long>(end));
    const auto scores = request(chunk);
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      out.push_back({chunk[i].premise, chunk[i].hypothesis, scores[i], NliOrigin::Remote});
    }
  }
  return out;
}

std::size_t HttpNli::requests_sent() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return requests_;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

CachedNli::CachedNli(std::shared_ptr<NliBackend> inner, std::string sidecar_path)
    : inner_(std::move(inner)), sidecar_path_(std::move(sidecar_path)) {
  if (!inner_) throw std::invalid_argument("CachedNli needs a backend");
  if (sidecar_path_.empty()) return;
  if (std::ifstream probe(sidecar_path_); probe) {
    JsonLineReader reader(sidecar_path_, false);
    while (auto j = reader.next()) {
      const auto id = j->find("scorer_id");
      const auto p = j->find("premise_hash");
      const auto h = j->find("hypothesis_hash");
      const auto s = j->find("score");
      if (id == j->end() || p == j->end() || h == j->end() || s == j->end() || !s->is_number()) {
        continue;
      }
      entries_[id->get<std::string>() + "|" + p->get<std::string>() + "|" + h->get<std::string>()] =
          s->get<double>();
    }
  }
  sidecar_.open(sidecar_path_, std::ios::app | std::ios::binary);
  if (!sidecar_) throw IoError("cannot open NLI cache " + sidecar_path_);
}

std::string CachedNli::key(const std::string& scorer, const NliPair& pair) const {
  return scorer + "|" + fnv1a_hex(pair.premise) + "|" + fnv1a_hex(pair.hypothesis);
}

std::vector<NliScore> CachedNli::score_batch(const std::vector<NliPair>& pairs) {
  const std::string scorer = inner_->scorer_id();
  std::vector<NliScore> out(pairs.size());
  std::vector<std::size_t> missing;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto it = entries_.find(key(scorer, pairs[i]));
      if (it == entries_.end()) {
        missing.push_back(i);
        ++misses_;
      } else {
        out[i] = {pairs[i].premise, pairs[i].hypothesis, it->second, NliOrigin::Cache};
        ++hits_;
      }
    }
  }
  if (missing.empty()) return out;

  std::vector<NliPair> todo;
  todo.reserve(missing.size());
  for (std::size_t i : missing) todo.push_back(pairs[i]);
  const auto fresh = inner_->score_batch(todo);

  std::lock_guard<std::mutex> lock(mutex_);
  for (std::size_t k = 0; k < missing.size(); ++k) {
    out[missing[k]] = fresh[k];
    const std::string kk = key(scorer, todo[k]);
    if (!entries_.emplace(kk, fresh[k].score).second) continue;
    if (sidecar_.is_open()) {
      OrderedJson line;
      line["scorer_id"] = scorer;
      line["premise_hash"] = fnv1a_hex(todo[k].premise);
      line["hypothesis_hash"] = fnv1a_hex(todo[k].hypothesis);
      line["score"] = fresh[k].score;
      sidecar_ << line.dump() << '\n';
    }
  }
  if (sidecar_.is_open()) {
    sidecar_.flush();
    if (!sidecar_) throw IoError("write failed on NLI cache " + sidecar_path_);
  }
  return out;
}

std::size_t CachedNli::hits() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return hits_;
}

std::size_t CachedNli::misses() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return misses_;
}

std::size_t CachedNli::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

}  // namespace rewritekit
