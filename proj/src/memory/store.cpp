#include "pgr/memory/store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "pgr/core/error.hpp"
#include "pgr/simd/kernels.hpp"

namespace pgr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void insert_sorted_unique(std::vector<std::string>& v, const std::string& value) {
  auto it = std::lower_bound(v.begin(), v.end(), value);
  if (it == v.end() || *it != value) v.insert(it, value);
}

void write_file_atomically(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

// Dots and squared norms of grid vectors are exact multiples of 2^-40, so
// cosines against one query can be ranked exactly by comparing
// sign(d) * d^2 / n as integers. Mathematically equal cosines that the
// floating-point score splits by an ulp then still tie.
using u128 = unsigned __int128;

struct Wide {  // value = hi * 2^64 + lo
  u128 hi;
  std::uint64_t lo;
  auto operator<=>(const Wide&) const = default;
};

std::uint64_t grid_units(double v) { return static_cast<std::uint64_t>(std::ldexp(std::fabs(v), 40)); }

Wide square_times(std::uint64_t d, std::uint64_t n) {
  u128 sq = static_cast<u128>(d) * d;
  u128 p0 = static_cast<u128>(static_cast<std::uint64_t>(sq)) * n;
  u128 p1 = static_cast<u128>(static_cast<std::uint64_t>(sq >> 64)) * n;
  return {(p0 >> 64) + p1, static_cast<std::uint64_t>(p0)};
}

// <0, 0, >0 as cos(q, a) is below, equal to, above cos(q, b).
int compare_cosine(double dot_a, double norm_a, double dot_b, double norm_b) {
  if (norm_a == 0.0) dot_a = 0.0, norm_a = 1.0;
  if (norm_b == 0.0) dot_b = 0.0, norm_b = 1.0;
  int sa = (dot_a > 0) - (dot_a < 0), sb = (dot_b > 0) - (dot_b < 0);
  if (sa != sb) return sa < sb ? -1 : 1;
  if (sa == 0) return 0;
  auto lhs = square_times(grid_units(dot_a), grid_units(norm_b));
  auto rhs = square_times(grid_units(dot_b), grid_units(norm_a));
  int mag = lhs < rhs ? -1 : (lhs == rhs ? 0 : 1);
  return sa > 0 ? mag : -mag;
}

template <class Fn>
void read_jsonl(const fs::path& path, Fn&& on_record) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::CorruptRecord, where);
    try {
      on_record(j);
    } catch (const json::exception&) {
      throw Error(ErrorCode::CorruptRecord, where);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DuplicateId) throw;
      throw Error(ErrorCode::CorruptRecord, where + " (" + e.what() + ")");
    }
  }
}

}  // namespace

MemoryStore::MemoryStore(std::shared_ptr<const Embedder> embedder) : embedder_(std::move(embedder)) {
  if (!embedder_) throw Error(ErrorCode::InvalidConfig, "store needs an embedder");
}

// ---------------------------------------------------------------------------
// Conversations

std::string MemoryStore::add_conversation(ConversationLog log) {
  if (log.conversation_id.empty()) throw Error(ErrorCode::InvalidArgument, "empty conversation id");
  if (log.turns.empty()) throw Error(ErrorCode::InvalidArgument, "conversation " + log.conversation_id + " has no turns");
  std::unique_lock lock(mu_);
  if (log_index_.contains(log.conversation_id)) throw Error(ErrorCode::DuplicateId, log.conversation_id);
  std::string id = log.conversation_id;
  log_index_.emplace(id, logs_.size());
  logs_.push_back(std::move(log));
  pending_.push_back(id);
  return id;
}

std::vector<std::string> MemoryStore::pending_conversations() const {
  std::shared_lock lock(mu_);
  return pending_;
}

void MemoryStore::clear_pending(const std::vector<std::string>& ids) {
  std::unique_lock lock(mu_);
  std::erase_if(pending_, [&](const std::string& p) {
    return std::find(ids.begin(), ids.end(), p) != ids.end();
  });
}

// ---------------------------------------------------------------------------
// Facts

std::string MemoryStore::fresh_fid_locked() {
  while (true) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "f%06llu", static_cast<unsigned long long>(next_fid_++));
    if (!fact_index_.contains(buf)) return buf;
  }
}

void MemoryStore::publish_locked(FactPtr fact) {
  const std::size_t dim = embedder_->dimension();
  if (fact->embedding.dimension() != dim) {
    throw Error(ErrorCode::EmbedderMismatch, "fact " + fact->fid + " has embedding dimension " +
                                                 std::to_string(fact->embedding.dimension()));
  }
  auto it = fact_index_.find(fact->fid);
  if (it == fact_index_.end()) {
    fact_index_.emplace(fact->fid, facts_.size());
    matrix_.insert(matrix_.end(), fact->embedding.values().begin(), fact->embedding.values().end());
    sq_norms_.push_back(fact->embedding.squared_norm());
    facts_.push_back(std::move(fact));
  } else {
    const std::size_t row = it->second;
    std::copy(fact->embedding.values().begin(), fact->embedding.values().end(),
              matrix_.begin() + static_cast<std::ptrdiff_t>(row * dim));
    sq_norms_[row] = fact->embedding.squared_norm();
    facts_[row] = std::move(fact);
  }
}

void MemoryStore::rebuild_matrix_locked() {
  const std::size_t dim = embedder_->dimension();
  fact_index_.clear();
  matrix_.clear();
  sq_norms_.clear();
  matrix_.reserve(facts_.size() * dim);
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    fact_index_.emplace(facts_[i]->fid, i);
    matrix_.insert(matrix_.end(), facts_[i]->embedding.values().begin(), facts_[i]->embedding.values().end());
    sq_norms_.push_back(facts_[i]->embedding.squared_norm());
  }
}

UpsertReport MemoryStore::upsert_facts(const std::vector<FactDelta>& deltas,
                                       const std::string& source_conversation, Date date) {
  UpsertReport report;
  if (deltas.empty()) return report;

  std::unique_lock lock(mu_);
  if (!log_index_.contains(source_conversation)) {
    throw Error(ErrorCode::InvalidArgument, "unknown source conversation " + source_conversation);
  }

  // Validate everything and stage the new fact objects before any write.
  std::map<std::string, Fact> staged_updates;
  std::vector<Fact> staged_adds;
  std::vector<std::pair<std::string, std::string>> add_ids;  // temp id, (assigned later)
  std::vector<std::string> to_embed;
  std::vector<Fact*> embed_targets;

  for (const auto& d : deltas) {
    if (d.info.empty()) throw Error(ErrorCode::InvalidArgument, "delta " + d.fid + " has empty info");
    if (d.frequency < 1) throw Error(ErrorCode::InvalidArgument, "delta " + d.fid + " has frequency < 1");
    if (d.state == DeltaState::Update) {
      auto it = fact_index_.find(d.fid);
      if (it == fact_index_.end()) throw Error(ErrorCode::UnknownFid, d.fid);
      auto staged = staged_updates.find(d.fid);
      const Fact& current = staged != staged_updates.end() ? staged->second : *facts_[it->second];
      if (d.frequency <= current.frequency) {
        throw Error(ErrorCode::FrequencyRegression,
                    d.fid + ": " + std::to_string(d.frequency) + " <= " + std::to_string(current.frequency));
      }
      Fact next = current;
      next.frequency = d.frequency;
      next.related_entities = d.related_entities;
      next.fact_type = d.fact_type;
      insert_sorted_unique(next.conversation_ids, source_conversation);
      next.updated_date = std::max(date, next.created_date);
      const bool info_changed = next.info != d.info;
      next.info = d.info;
      staged_updates[d.fid] = std::move(next);
      if (info_changed) to_embed.push_back(d.fid);
    } else {
      Fact f;
      f.info = d.info;
      f.fact_type = d.fact_type;
      f.frequency = d.frequency;
      f.related_entities = d.related_entities;
      f.conversation_ids = {source_conversation};
      f.created_date = date;
      f.updated_date = date;
      staged_adds.push_back(std::move(f));
      add_ids.emplace_back(d.fid, std::string());
    }
  }

  // Embed outside of any partially written state; a gateway failure here
  // leaves the store untouched.
  std::vector<std::string> texts;
  for (const auto& fid : to_embed) texts.push_back(staged_updates[fid].info);
  for (const auto& f : staged_adds) texts.push_back(f.info);
  std::vector<EmbeddingVector> vectors;
  if (!texts.empty()) vectors = embedder_->embed(texts);

  std::size_t v = 0;
  for (const auto& fid : to_embed) staged_updates[fid].embedding = std::move(vectors[v++]);
  for (auto& f : staged_adds) f.embedding = std::move(vectors[v++]);

  for (auto& [fid, fact] : staged_updates) {
    publish_locked(std::make_shared<const Fact>(std::move(fact)));
    ++report.updated;
  }
  for (std::size_t i = 0; i < staged_adds.size(); ++i) {
    staged_adds[i].fid = fresh_fid_locked();
    report.assigned[add_ids[i].first] = staged_adds[i].fid;
    publish_locked(std::make_shared<const Fact>(std::move(staged_adds[i])));
    ++report.added;
    ++new_fact_counter_;
  }
  return report;
}

void MemoryStore::insert_fact(Fact fact) {
  if (fact.fid.empty()) throw Error(ErrorCode::InvalidArgument, "fact without fid");
  if (fact.conversation_ids.empty()) throw Error(ErrorCode::InvalidArgument, "fact " + fact.fid + " has no provenance");
  if (fact.frequency < 1) throw Error(ErrorCode::InvalidArgument, "fact " + fact.fid + " has frequency < 1");
  if (fact.updated_date < fact.created_date) throw Error(ErrorCode::InvalidArgument, "fact " + fact.fid + " updated before created");
  std::sort(fact.conversation_ids.begin(), fact.conversation_ids.end());
  fact.conversation_ids.erase(std::unique(fact.conversation_ids.begin(), fact.conversation_ids.end()),
                              fact.conversation_ids.end());
  if (fact.embedding.dimension() == 0) fact.embedding = embedder_->embed_one(fact.info);
  std::unique_lock lock(mu_);
  if (fact_index_.contains(fact.fid)) throw Error(ErrorCode::DuplicateId, fact.fid);
  for (const auto& cid : fact.conversation_ids) {
    if (!log_index_.contains(cid)) throw Error(ErrorCode::InvalidArgument, "unknown conversation " + cid);
  }
  // Keep generated fids clear of imported ones.
  if (fact.fid.size() > 1 && fact.fid[0] == 'f' &&
      fact.fid.find_first_not_of("0123456789", 1) == std::string::npos && fact.fid.size() <= 19) {
    next_fid_ = std::max<std::uint64_t>(next_fid_, std::stoull(fact.fid.substr(1)) + 1);
  }
  publish_locked(std::make_shared<const Fact>(std::move(fact)));
}

// ---------------------------------------------------------------------------
// Retrieval

std::vector<ScoredFact> MemoryStore::scan_locked(const EmbeddingVector& query,
                                                 const RetrievalParams& params) const {
  std::vector<ScoredFact> out;
  const std::size_t n = facts_.size();
  if (n == 0) return out;
  const std::size_t dim = embedder_->dimension();
  if (query.dimension() != dim) throw Error(ErrorCode::EmbedderMismatch, "query dimension mismatch");

  std::vector<double> dots(n);
  simd::active_kernels().dot_rows(query.values().data(), matrix_.data(), n, dim, dots.data());

  std::vector<std::size_t> hits;
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = cosine_from_dot(dots[i], query.squared_norm(), sq_norms_[i]);
    if (scores[i] >= params.tau) hits.push_back(i);
  }
  auto better = [&](std::size_t a, std::size_t b) {
    int c = compare_cosine(dots[a], sq_norms_[a], dots[b], sq_norms_[b]);
    if (c != 0) return c > 0;
    return facts_[a]->fid < facts_[b]->fid;
  };
  const std::size_t take = std::min<std::size_t>(hits.size(), static_cast<std::size_t>(params.k));
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(), better);
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({facts_[hits[i]], scores[hits[i]]});
  return out;
}

std::vector<ScoredFact> MemoryStore::retrieve(const std::string& query_text, const RetrievalParams& params) const {
  const bool blank = std::all_of(query_text.begin(), query_text.end(),
                                 [](unsigned char c) { return std::isspace(c); });
  if (blank) throw Error(ErrorCode::EmptyQuery, "");
  params.validate();
  {
    std::shared_lock lock(mu_);
    if (facts_.empty()) return {};
  }
  EmbeddingVector q = embedder_->embed_one(query_text);
  std::shared_lock lock(mu_);
  return scan_locked(q, params);
}

std::vector<ScoredFact> MemoryStore::retrieve(const EmbeddingVector& query, const RetrievalParams& params) const {
  params.validate();
  std::shared_lock lock(mu_);
  return scan_locked(query, params);
}

// ---------------------------------------------------------------------------
// Consolidation

MergeReport MemoryStore::consolidate(const ConsolidationParams& params, const FactMerger& merger) {
  MergeReport report;
  std::unique_lock lock(mu_);
  if (!params.force && new_fact_counter_ < params.trigger_count) return report;
  report.triggered = true;

  const std::size_t n = facts_.size();
  const std::size_t dim = embedder_->dimension();

  // Single-linkage clustering via union-find over all pairs at threshold.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<double> dots(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t rest = n - i - 1;
    simd::active_kernels().dot_rows(matrix_.data() + i * dim, matrix_.data() + (i + 1) * dim, rest, dim,
                                    dots.data());
    for (std::size_t r = 0; r < rest; ++r) {
      const std::size_t j = i + 1 + r;
      if (cosine_from_dot(dots[r], sq_norms_[i], sq_norms_[j]) >= params.similarity_threshold) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters[find(i)].push_back(i);

  // In-window subsets, ordered by their smallest fid for determinism.
  std::vector<std::vector<FactPtr>> groups;
  for (auto& [root, members] : clusters) {
    if (members.size() < 2) continue;
    Date newest = facts_[members.front()]->updated_date;
    for (auto m : members) newest = std::max(newest, facts_[m]->updated_date);
    std::vector<FactPtr> group;
    for (auto m : members) {
      if (days_between(facts_[m]->updated_date, newest) <= params.window_days) group.push_back(facts_[m]);
    }
    if (group.size() < 2) continue;
    std::sort(group.begin(), group.end(), [](const FactPtr& a, const FactPtr& b) { return a->fid < b->fid; });
    groups.push_back(std::move(group));
  }
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front()->fid < b.front()->fid; });

  std::set<std::string> removed;
  std::vector<FactPtr> merged_facts;
  for (const auto& group : groups) {
    std::vector<std::string> ids;
    for (const auto& f : group) ids.push_back(f->fid);
    MergeText text;
    try {
      text = merger(group);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MergePromptFailure && !is_gateway_failure(e.code())) throw;
      report.failed_groups.push_back(ids);
      continue;
    }
    Fact merged;
    merged.fid = ids.back();
    merged.info = text.info;
    merged.fact_type = text.fact_type;
    merged.related_entities = text.related_entities;
    merged.frequency = 0;
    merged.created_date = group.front()->created_date;
    merged.updated_date = group.front()->updated_date;
    for (const auto& f : group) {
      merged.frequency += f->frequency;
      for (const auto& c : f->conversation_ids) insert_sorted_unique(merged.conversation_ids, c);
      merged.created_date = std::min(merged.created_date, f->created_date);
      merged.updated_date = std::max(merged.updated_date, f->updated_date);
    }
    merged.merged_fids = ids;
    merged.embedding = embedder_->embed_one(merged.info);
    for (const auto& id : ids) removed.insert(id);
    report.merged.push_back({merged.fid, ids});
    report.facts_removed += static_cast<int>(ids.size());
    ++report.groups_merged;
    merged_facts.push_back(std::make_shared<const Fact>(std::move(merged)));
  }

  if (!removed.empty()) {
    std::erase_if(facts_, [&](const FactPtr& f) { return removed.contains(f->fid); });
    for (auto& f : merged_facts) facts_.push_back(std::move(f));
    rebuild_matrix_locked();
  }
  new_fact_counter_ = 0;
  return report;
}

// ---------------------------------------------------------------------------
// Accessors

std::size_t MemoryStore::fact_count() const {
  std::shared_lock lock(mu_);
  return facts_.size();
}

std::size_t MemoryStore::conversation_count() const {
  std::shared_lock lock(mu_);
  return logs_.size();
}

int MemoryStore::new_fact_counter() const {
  std::shared_lock lock(mu_);
  return new_fact_counter_;
}

std::vector<FactPtr> MemoryStore::facts() const {
  std::shared_lock lock(mu_);
  return facts_;
}

FactPtr MemoryStore::find_fact(const std::string& fid) const {
  std::shared_lock lock(mu_);
  auto it = fact_index_.find(fid);
  return it == fact_index_.end() ? nullptr : facts_[it->second];
}

std::optional<ConversationLog> MemoryStore::find_conversation(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = log_index_.find(id);
  if (it == log_index_.end()) return std::nullopt;
  return logs_[it->second];
}

std::vector<ConversationLog> MemoryStore::conversations() const {
  std::shared_lock lock(mu_);
  return logs_;
}

bool MemoryStore::same_contents(const MemoryStore& other) const {
  std::shared_lock a(mu_, std::defer_lock);
  std::shared_lock b(other.mu_, std::defer_lock);
  std::lock(a, b);
  if (facts_.size() != other.facts_.size()) return false;
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    if (!(*facts_[i] == *other.facts_[i])) return false;
  }
  return logs_ == other.logs_ && pending_ == other.pending_ && new_fact_counter_ == other.new_fact_counter_ &&
         next_fid_ == other.next_fid_;
}

// ---------------------------------------------------------------------------
// Persistence

void MemoryStore::save(const fs::path& dir) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  std::shared_lock lock(mu_);
  std::string facts_text;
  for (const auto& f : facts_) {
    facts_text += to_json(*f).dump();
    facts_text += '\n';
  }
  std::string logs_text;
  for (const auto& l : logs_) {
    logs_text += to_json(l).dump();
    logs_text += '\n';
  }
  json meta = {{"dimension", embedder_->dimension()},
               {"embedder_id", embedder_->id()},
               {"new_fact_counter", new_fact_counter_},
               {"next_fid", next_fid_},
               {"pending_conversations", pending_}};
  write_file_atomically(dir / "facts.jsonl", facts_text);
  write_file_atomically(dir / "conversations.jsonl", logs_text);
  write_file_atomically(dir / "meta.json", meta.dump(2) + "\n");
}

std::unique_ptr<MemoryStore> MemoryStore::load(const fs::path& dir, std::shared_ptr<const Embedder> embedder) {
  auto store = std::make_unique<MemoryStore>(std::move(embedder));
  std::ifstream meta_in(dir / "meta.json");
  if (!meta_in) throw Error(ErrorCode::IoError, "cannot open " + (dir / "meta.json").string());
  json meta = json::parse(meta_in, nullptr, false);
  if (meta.is_discarded() || !meta.is_object()) throw Error(ErrorCode::CorruptRecord, "meta.json:1");

  const std::size_t dim = meta.value("dimension", std::size_t{0});
  const std::string id = meta.value("embedder_id", std::string());
  if (dim != store->embedder_->dimension() || id != store->embedder_->id()) {
    throw Error(ErrorCode::EmbedderMismatch, "store built with " + id + "/" + std::to_string(dim) +
                                                 ", configured " + store->embedder_->id() + "/" +
                                                 std::to_string(store->embedder_->dimension()));
  }

  read_jsonl(dir / "conversations.jsonl", [&](const json& j) {
    ConversationLog log = conversation_from_json(j);
    if (store->log_index_.contains(log.conversation_id)) throw Error(ErrorCode::DuplicateId, log.conversation_id);
    store->log_index_.emplace(log.conversation_id, store->logs_.size());
    store->logs_.push_back(std::move(log));
  });
  read_jsonl(dir / "facts.jsonl", [&](const json& j) {
    Fact f = fact_from_json(j);
    if (f.embedding.dimension() != dim) throw Error(ErrorCode::CorruptRecord, "embedding dimension");
    if (store->fact_index_.contains(f.fid)) throw Error(ErrorCode::DuplicateId, f.fid);
    store->facts_.push_back(std::make_shared<const Fact>(std::move(f)));
    store->fact_index_.emplace(store->facts_.back()->fid, store->facts_.size() - 1);
  });
  store->rebuild_matrix_locked();

  store->new_fact_counter_ = meta.value("new_fact_counter", 0);
  store->next_fid_ = meta.value("next_fid", std::uint64_t{1});
  store->pending_ = meta.value("pending_conversations", std::vector<std::string>{});
  return store;
}

}  // namespace pgr
