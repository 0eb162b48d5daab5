#include "rewritekit/corpusio.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace rewritekit {

namespace {

std::string required_string(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::string optional_string_or_empty(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

long required_integer(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  if (!it->is_number_integer()) throw DataError(std::string("field '") + key + "' must be an integer");
  return it->get<long>();
}

// Ids may be given as numbers in hand-written files.
std::string id_field(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw DataError(std::string("field '") + key + "' must be a string");
}

std::string trim_copy(std::string_view s) {
  const auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  std::size_t b = 0, e = s.size();
  while (b < e && is_ws(s[b])) ++b;
  while (e > b && is_ws(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string_view to_string(Schema schema) {
  switch (schema) {
    case Schema::Rewrite: return "rewrite";
    case Schema::Candidate: return "candidate";
    case Schema::Pair: return "pair";
    case Schema::Revision: return "revision";
  }
  return "unknown";
}

Schema parse_schema(std::string_view text) {
  if (text == "rewrite") return Schema::Rewrite;
  if (text == "candidate") return Schema::Candidate;
  if (text == "pair") return Schema::Pair;
  if (text == "revision") return Schema::Revision;
  throw std::invalid_argument("unknown schema: " + std::string(text));
}

RewriteRecord RecordCodec<RewriteRecord>::from_json(const Json& j) {
  if (!j.is_object()) throw DataError("record must be a JSON object");
  RewriteRecord r;
  r.id = id_field(j, "id");
  r.instruction = optional_string_or_empty(j, "instruction");
  r.source = optional_string_or_empty(j, "source");
  r.target = optional_string(j, "target");
  r.prediction = optional_string(j, "prediction");
  if (const auto meta = j.find("meta"); meta != j.end() && !meta->is_null()) {
    if (!meta->is_object()) throw DataError("field 'meta' must be an object");
    for (const auto& [key, value] : meta->items()) {
      r.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  static const std::set<std::string> known = {"id", "instruction", "source", "target",
                                              "prediction", "meta"};
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) != 0) continue;
    r.meta.emplace(key, value.is_string() ? value.get<std::string>() : value.dump());
  }
  return r;
}

OrderedJson RecordCodec<RewriteRecord>::to_json(const RewriteRecord& r) {
  OrderedJson j;
  j["id"] = r.id;
  j["instruction"] = r.instruction;
  j["source"] = r.source;
  if (r.target) j["target"] = *r.target;
  if (r.prediction) j["prediction"] = *r.prediction;
  if (!r.meta.empty()) {
    OrderedJson meta = OrderedJson::object();
    for (const auto& [k, v] : r.meta) meta[k] = v;
    j["meta"] = std::move(meta);
  }
  return j;
}

CandidateSet RecordCodec<CandidateSet>::from_json(const Json& j) {
  if (!j.is_object()) throw DataError("record must be a JSON object");
  CandidateSet s;
  s.id = id_field(j, "id");
  s.instruction = optional_string_or_empty(j, "instruction");
  s.source = optional_string_or_empty(j, "source");
  const auto it = j.find("candidates");
  if (it == j.end() || !it->is_array()) throw DataError("field 'candidates' must be an array");
  long position = 0;
  for (const auto& c : *it) {
    Candidate cand;
    if (c.is_string()) {
      cand.text = c.get<std::string>();
      cand.rank = position;
    } else if (c.is_object()) {
      cand.text = required_string(c, "text");
      cand.rank = c.contains("rank") ? required_integer(c, "rank") : position;
      if (const auto lp = c.find("logprob"); lp != c.end() && !lp->is_null()) {
        if (!lp->is_number()) throw DataError("candidate 'logprob' must be a number");
        cand.logprob = lp->get<double>();
      }
    } else {
      throw DataError("candidate must be an object or string");
    }
    if (cand.rank < 0) throw DataError("candidate 'rank' must be non-negative");
    s.candidates.push_back(std::move(cand));
    ++position;
  }
  return s;
}

OrderedJson RecordCodec<CandidateSet>::to_json(const CandidateSet& s) {
  OrderedJson j;
  j["id"] = s.id;
  j["instruction"] = s.instruction;
  j["source"] = s.source;
  OrderedJson candidates = OrderedJson::array();
  for (const auto& c : s.candidates) {
    OrderedJson cj;
    cj["text"] = c.text;
    cj["rank"] = c.rank;
    if (c.logprob) cj["logprob"] = *c.logprob;
    candidates.push_back(std::move(cj));
  }
  j["candidates"] = std::move(candidates);
  return j;
}

ComparisonPair RecordCodec<ComparisonPair>::from_json(const Json& j) {
  if (!j.is_object()) throw DataError("record must be a JSON object");
  ComparisonPair p;
  p.id = id_field(j, "id");
  p.instruction = optional_string_or_empty(j, "instruction");
  p.source = required_string(j, "source");
  p.t_good = required_string(j, "t_good");
  p.t_bad = required_string(j, "t_bad");
  p.good_rank = j.contains("good_rank") ? required_integer(j, "good_rank") : 0;
  p.bad_rank = j.contains("bad_rank") ? required_integer(j, "bad_rank") : 0;
  return p;
}

OrderedJson RecordCodec<ComparisonPair>::to_json(const ComparisonPair& p) {
  OrderedJson j;
  j["id"] = p.id;
  j["instruction"] = p.instruction;
  j["source"] = p.source;
  j["t_good"] = p.t_good;
  j["t_bad"] = p.t_bad;
  j["good_rank"] = p.good_rank;
  j["bad_rank"] = p.bad_rank;
  return j;
}

RevisionRecord RecordCodec<RevisionRecord>::from_json(const Json& j) {
  if (!j.is_object()) throw DataError("record must be a JSON object");
  RevisionRecord r;
  r.page_id = id_field(j, "page_id");
  r.rev_id = id_field(j, "rev_id");
  r.parent_rev_id = j.contains("parent_rev_id") && !j["parent_rev_id"].is_null()
                        ? id_field(j, "parent_rev_id")
                        : std::string();
  r.source_block = optional_string_or_empty(j, "source_block");
  r.target_block = optional_string_or_empty(j, "target_block");
  r.comment = optional_string_or_empty(j, "comment");
  r.timestamp = optional_string_or_empty(j, "timestamp");
  return r;
}

OrderedJson RecordCodec<RevisionRecord>::to_json(const RevisionRecord& r) {
  OrderedJson j;
  j["page_id"] = r.page_id;
  j["rev_id"] = r.rev_id;
  j["parent_rev_id"] = r.parent_rev_id;
  j["source_block"] = r.source_block;
  j["target_block"] = r.target_block;
  j["comment"] = r.comment;
  j["timestamp"] = r.timestamp;
  return j;
}

JsonLineReader::JsonLineReader(const std::string& path, bool strict)
    : path_(path), in_(path, std::ios::binary), strict_(strict) {
  if (!in_) throw IoError("cannot open " + path);
}

std::optional<Json> JsonLineReader::next() {
  while (std::getline(in_, buffer_)) {
    ++line_;
    if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
    if (trim_copy(buffer_).empty()) continue;
    try {
      Json j = Json::parse(buffer_);
      if (!j.is_object()) throw DataError("line is not a JSON object");
      return j;
    } catch (const Json::parse_error& e) {
      reject_current(std::string("invalid JSON: ") + e.what());
    } catch (const DataError& e) {
      reject_current(e.what());
    }
  }
  if (in_.bad()) throw IoError("read failure in " + path_);
  return std::nullopt;
}

void JsonLineReader::reject_current(const std::string& message) {
  if (strict_) {
    throw DataError(path_ + ":" + std::to_string(line_) + ": " + message);
  }
  errors_.push_back({line_, message});
}

JsonlWriter::JsonlWriter(const std::string& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open " + path + " for writing");
}

void JsonlWriter::write_line(std::string_view line) {
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.put('\n');
  if (!out_) {
    throw IoError("write failed on " + path_ + " after " + std::to_string(count_) + " records");
  }
  ++count_;
}

void JsonlWriter::close() {
  out_.flush();
  if (!out_) {
    throw IoError("write failed on " + path_ + " after " + std::to_string(count_) + " records");
  }
  out_.close();
}

std::vector<std::string> validate_record(const RewriteRecord& r) {
  std::vector<std::string> violations;
  if (trim_copy(r.id).empty()) violations.emplace_back("id: empty");
  if (trim_copy(r.instruction).empty()) violations.emplace_back("instruction: empty");
  if (trim_copy(r.source).empty()) violations.emplace_back("source: empty");
  if (!r.target && !r.prediction) {
    violations.emplace_back("target/prediction: neither present");
  }
  return violations;
}

std::vector<std::string> validate_candidate_set(const CandidateSet& s) {
  std::vector<std::string> violations;
  if (s.candidates.empty()) {
    violations.emplace_back("candidates: empty");
    return violations;
  }
  std::set<long> ranks;
  for (const auto& c : s.candidates) {
    if (!ranks.insert(c.rank).second) {
      violations.push_back("candidates: duplicate rank " + std::to_string(c.rank));
    }
  }
  std::vector<const Candidate*> by_rank;
  for (const auto& c : s.candidates) by_rank.push_back(&c);
  std::stable_sort(by_rank.begin(), by_rank.end(),
                   [](const Candidate* a, const Candidate* b) { return a->rank < b->rank; });
  for (std::size_t i = 1; i < by_rank.size(); ++i) {
    const auto& prev = by_rank[i - 1]->logprob;
    const auto& cur = by_rank[i]->logprob;
    if (prev && cur && *cur > *prev) {
      violations.push_back("candidates: logprob increases at rank " +
                           std::to_string(by_rank[i]->rank));
    }
  }
  return violations;
}

std::vector<std::string> duplicate_ids(const std::vector<RewriteRecord>& records) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> dups;
  for (const auto& r : records) {
    if (!seen.insert(r.id).second) dups.push_back(r.id);
  }
  return dups;
}

}  // namespace rewritekit
