#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hsevo/archive.hpp"
#include "hsevo/http_client.hpp"
#include "hsevo/normalizer.hpp"

namespace hsevo {

struct CodeEmbedding {
  std::vector<double> vector;
  IndividualId source_id{};
  std::string backend_tag;
};

enum class EmbedderBackend { remote_model, hash_fallback };

struct EmbedderConfig {
  EmbedderBackend backend = EmbedderBackend::hash_fallback;
  std::string endpoint;  // remote only
  std::string token;     // remote only
  int dimension = 256;
  std::optional<std::filesystem::path> cache_path;
  // Switch to hash_fallback when the remote backend keeps failing.
  bool degrade_to_hash = false;
  RetryPolicy retry{};

  void validate() const;
  // Fills endpoint/token from EMBED_ENDPOINT / EMBED_TOKEN when unset.
  EmbedderConfig with_environment() const;
};

// Maps normalized source text to a fixed-dimension vector. Deterministic
// per (backend, text).
class Embedder {
 public:
  explicit Embedder(int dimension) : dimension_(dimension) {}
  virtual ~Embedder() = default;
  Embedder(const Embedder&) = delete;
  Embedder& operator=(const Embedder&) = delete;

  CodeEmbedding embed(const NormalizedSource& src);
  std::vector<double> embed_text(std::string_view text);

  int dimension() const { return dimension_; }
  virtual std::string tag() const = 0;
  // Number of times the underlying model/hash was actually evaluated.
  virtual std::size_t backend_calls() const { return backend_calls_.load(); }

 protected:
  virtual std::vector<double> compute(std::string_view text) = 0;
  void count_call() { backend_calls_.fetch_add(1); }

 private:
  int dimension_;
  std::atomic<std::size_t> backend_calls_{0};
};

// Token 1..3-gram feature hashing into `dimension` buckets, L2-normalized.
class HashEmbedder : public Embedder {
 public:
  explicit HashEmbedder(int dimension = 256);
  std::string tag() const override;

 protected:
  std::vector<double> compute(std::string_view text) override;
};

// POSTs the raw text to an endpoint that answers with a flat JSON array.
class RemoteEmbedder : public Embedder {
 public:
  RemoteEmbedder(std::string endpoint, std::string token, int dimension, RetryPolicy retry = {});
  std::string tag() const override;

 protected:
  std::vector<double> compute(std::string_view text) override;

 private:
  std::string endpoint_;
  std::string token_;
  RetryPolicy retry_;
};

// Tries the primary backend; after its first failure every later request
// goes to the fallback.
class DegradingEmbedder : public Embedder {
 public:
  DegradingEmbedder(std::unique_ptr<Embedder> primary, std::unique_ptr<Embedder> fallback);
  std::string tag() const override;
  std::size_t backend_calls() const override;
  bool degraded() const { return degraded_.load(); }

 protected:
  std::vector<double> compute(std::string_view text) override;

 private:
  std::unique_ptr<Embedder> primary_;
  std::unique_ptr<Embedder> fallback_;
  std::atomic<bool> degraded_{false};
};

// Memoizes another embedder in memory and, optionally, on disk (one file
// per content hash, written atomically).
class CachingEmbedder : public Embedder {
 public:
  CachingEmbedder(std::unique_ptr<Embedder> inner, std::optional<std::filesystem::path> dir);
  std::string tag() const override { return inner_->tag(); }
  std::size_t backend_calls() const override { return inner_->backend_calls(); }

 protected:
  std::vector<double> compute(std::string_view text) override;

 private:
  std::string key_for(std::string_view text) const;

  std::unique_ptr<Embedder> inner_;
  std::optional<std::filesystem::path> dir_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::vector<double>> memory_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg);

// (a.b) / (|a||b|). Throws UndefinedSimilarityError for zero vectors and
// std::invalid_argument for mismatched dimensions.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const CodeEmbedding& a, const CodeEmbedding& b);

}  // namespace hsevo
