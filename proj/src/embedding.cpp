#include "hsevo/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hsevo/errors.hpp"
#include "hsevo/text_util.hpp"
#include "json.hpp"

namespace hsevo {

void EmbedderConfig::validate() const {
  if (dimension <= 0) throw ConfigError("embedding dimension must be positive");
  if (backend == EmbedderBackend::remote_model && endpoint.empty()) {
    throw ConfigError("remote embedding backend needs an endpoint (EMBED_ENDPOINT)");
  }
}

EmbedderConfig EmbedderConfig::with_environment() const {
  EmbedderConfig out = *this;
  if (out.endpoint.empty()) {
    if (const char* e = std::getenv("EMBED_ENDPOINT")) out.endpoint = e;
  }
  if (out.token.empty()) {
    if (const char* t = std::getenv("EMBED_TOKEN")) out.token = t;
  }
  return out;
}

CodeEmbedding Embedder::embed(const NormalizedSource& src) {
  return CodeEmbedding{embed_text(src.text), src.original_id, tag()};
}

std::vector<double> Embedder::embed_text(std::string_view text) {
  auto v = compute(text);
  if (v.size() != static_cast<std::size_t>(dimension_)) {
    throw BackendUnavailableError(tag() + " returned " + std::to_string(v.size()) +
                                  " components, expected " + std::to_string(dimension_));
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw BackendUnavailableError(tag() + " returned a non-finite component");
  }
  return v;
}

HashEmbedder::HashEmbedder(int dimension) : Embedder(dimension) {
  if (dimension <= 0) throw ConfigError("embedding dimension must be positive");
}

std::string HashEmbedder::tag() const { return "hash_fallback/" + std::to_string(dimension()); }

std::vector<double> HashEmbedder::compute(std::string_view text) {
  count_call();
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (std::isalnum(c) || c == '_' || c >= 0x80) {
      const auto b = i;
      while (i < text.size()) {
        const auto d = static_cast<unsigned char>(text[i]);
        if (!(std::isalnum(d) || d == '_' || d >= 0x80)) break;
        ++i;
      }
      tokens.push_back(text.substr(b, i - b));
    } else {
      tokens.push_back(text.substr(i, 1));
      ++i;
    }
  }
  if (tokens.empty()) tokens.push_back("<empty>");

  const auto dim = static_cast<std::uint64_t>(dimension());
  std::vector<double> v(dimension(), 0.0);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::size_t s = 0; s + n <= tokens.size(); ++s) {
      std::uint64_t h = fnv1a64(std::to_string(n));
      for (std::size_t k = 0; k < n; ++k) {
        h = fnv1a64("\x1f", h);
        h = fnv1a64(tokens[s + k], h);
      }
      v[h % dim] += 1.0;
    }
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint, std::string token, int dimension, RetryPolicy retry)
    : Embedder(dimension), endpoint_(std::move(endpoint)), token_(std::move(token)), retry_(retry) {}

std::string RemoteEmbedder::tag() const { return "remote_model/" + std::to_string(dimension()); }

std::vector<double> RemoteEmbedder::compute(std::string_view text) {
  count_call();
  Headers headers;
  if (!token_.empty()) headers.emplace_back("Authorization", "Bearer " + token_);
  HttpResponse res;
  try {
    res = http_post(endpoint_, std::string(text), "text/plain", headers, retry_);
  } catch (const TransportError& e) {
    throw BackendUnavailableError(std::string("embedding backend unavailable: ") + e.what());
  }
  if (res.status != 200) {
    throw BackendUnavailableError("embedding backend answered status " + std::to_string(res.status));
  }
  try {
    auto j = nlohmann::json::parse(res.body);
    if (!j.is_array()) throw BackendUnavailableError("embedding response is not a flat array");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& x : j) {
      if (!x.is_number()) throw BackendUnavailableError("embedding response holds a non-number");
      v.push_back(x.get<double>());
    }
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw BackendUnavailableError(std::string("malformed embedding response: ") + e.what());
  }
}

DegradingEmbedder::DegradingEmbedder(std::unique_ptr<Embedder> primary, std::unique_ptr<Embedder> fallback)
    : Embedder(primary->dimension()), primary_(std::move(primary)), fallback_(std::move(fallback)) {
  if (fallback_->dimension() != primary_->dimension()) {
    throw ConfigError("fallback embedder dimension differs from the primary");
  }
}

std::string DegradingEmbedder::tag() const { return degraded_ ? fallback_->tag() : primary_->tag(); }

std::size_t DegradingEmbedder::backend_calls() const {
  return primary_->backend_calls() + fallback_->backend_calls();
}

std::vector<double> DegradingEmbedder::compute(std::string_view text) {
  if (!degraded_) {
    try {
      return primary_->embed_text(text);
    } catch (const BackendUnavailableError&) {
      degraded_ = true;
    }
  }
  return fallback_->embed_text(text);
}

CachingEmbedder::CachingEmbedder(std::unique_ptr<Embedder> inner, std::optional<std::filesystem::path> dir)
    : Embedder(inner->dimension()), inner_(std::move(inner)), dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::string CachingEmbedder::key_for(std::string_view text) const {
  std::string material = inner_->tag();
  material.push_back('\n');
  material.append(text);
  return hex64(fnv1a64(material));
}

std::vector<double> CachingEmbedder::compute(std::string_view text) {
  const auto key = key_for(text);
  {
    std::lock_guard lock(mutex_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  }
  if (dir_) {
    const auto file = *dir_ / (key + ".vec");
    std::ifstream in(file);
    if (in) {
      std::vector<double> v;
      double x;
      while (in >> x) v.push_back(x);
      if (v.size() == static_cast<std::size_t>(dimension())) {
        std::lock_guard lock(mutex_);
        memory_.emplace(key, v);
        return v;
      }
    }
  }
  auto v = inner_->embed_text(text);
  if (dir_) {
    std::string content;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) content.push_back(' ');
      content += format_double(v[i]);
    }
    content.push_back('\n');
    write_file_atomic(*dir_ / (key + ".vec"), content);
  }
  std::lock_guard lock(mutex_);
  memory_.emplace(key, v);
  return v;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg) {
  cfg.validate();
  std::unique_ptr<Embedder> base;
  if (cfg.backend == EmbedderBackend::hash_fallback) {
    base = std::make_unique<HashEmbedder>(cfg.dimension);
  } else {
    base = std::make_unique<RemoteEmbedder>(cfg.endpoint, cfg.token, cfg.dimension, cfg.retry);
    if (cfg.degrade_to_hash) {
      base = std::make_unique<DegradingEmbedder>(std::move(base), std::make_unique<HashEmbedder>(cfg.dimension));
    }
  }
  return std::make_unique<CachingEmbedder>(std::move(base), cfg.cache_path);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw UndefinedSimilarityError("cosine similarity of a zero vector");
  const double s = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(s, -1.0, 1.0);
}

double cosine_similarity(const CodeEmbedding& a, const CodeEmbedding& b) {
  return cosine_similarity(a.vector, b.vector);
}

}  // namespace hsevo
