// Eigen must precede httplib: <resolv.h> defines a `_res` macro.
#include "tempora/embed.hpp"
#include "tempora/error.hpp"

#include <httplib.h>
#include <json.hpp>

namespace tempora {

namespace {

struct ParsedEndpoint {
  std::string host; // scheme://host[:port]
  std::string base_path;
};

ParsedEndpoint parse_endpoint(const std::string &endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error("remote embedder: endpoint '" + endpoint + "' lacks a scheme");
  }
  const auto path_begin = endpoint.find('/', scheme_end + 3);
  ParsedEndpoint p;
  p.host = endpoint.substr(0, path_begin);
  if (path_begin != std::string::npos) {
    p.base_path = endpoint.substr(path_begin);
    while (!p.base_path.empty() && p.base_path.back() == '/') {
      p.base_path.pop_back();
    }
  }
  return p;
}

} // namespace

std::vector<Eigen::VectorXd> remote_embed_batch(const std::vector<std::string> &texts,
                                                const RemoteOptions &options) {
  using nlohmann::json;
  if (texts.size() > options.batch_size) {
    throw Error("remote embedder: batch of " + std::to_string(texts.size()) +
                " exceeds embed_batch_size " + std::to_string(options.batch_size));
  }
  const auto endpoint = parse_endpoint(options.endpoint);
  httplib::Client client(endpoint.host);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const json request = {{"texts", texts}};
  const auto res = client.Post(endpoint.base_path + "/embed", request.dump(), "application/json");
  if (!res) {
    throw Error("remote embedder: transport error (" + httplib::to_string(res.error()) + ")");
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error("remote embedder: HTTP status " + std::to_string(res->status));
  }

  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::parse_error &e) {
    throw Error(std::string("remote embedder: response is not JSON (") + e.what() + ")");
  }
  const auto it = body.find("embeddings");
  if (it == body.end() || !it->is_array()) {
    throw Error("remote embedder: response lacks an 'embeddings' array");
  }
  if (it->size() != texts.size()) {
    throw Error("remote embedder: vector count mismatch (sent " + std::to_string(texts.size()) +
                " texts, received " + std::to_string(it->size()) + " vectors)");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(texts.size());
  for (const auto &row : *it) {
    if (!row.is_array()) {
      throw Error("remote embedder: embedding entry is not an array");
    }
    if (static_cast<Eigen::Index>(row.size()) != options.dim) {
      throw Error("remote embedder: dimension mismatch (expected " + std::to_string(options.dim) +
                  ", received " + std::to_string(row.size()) + ")");
    }
    Eigen::VectorXd v(options.dim);
    for (Eigen::Index k = 0; k < options.dim; ++k) {
      const auto &x = row[static_cast<std::size_t>(k)];
      if (!x.is_number()) {
        throw Error("remote embedder: non-numeric embedding value");
      }
      v[k] = x.get<double>();
    }
    const double norm = v.norm();
    if (!(norm > 0) || !std::isfinite(norm)) {
      throw Error("remote embedder: zero or non-finite embedding vector");
    }
    out.push_back(v / norm);
  }
  return out;
}

Eigen::MatrixXd RemoteEmbedder::embed(std::span<const Document> docs) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(docs.size()), options_.dim);
  for (std::size_t begin = 0; begin < docs.size(); begin += options_.batch_size) {
    const auto count = std::min(options_.batch_size, docs.size() - begin);
    std::vector<std::string> texts;
    texts.reserve(count);
    for (std::size_t i = begin; i < begin + count; ++i) {
      texts.push_back(docs[i].raw_text);
    }
    const auto vectors = remote_embed_batch(texts, options_);
    for (std::size_t i = 0; i < count; ++i) {
      out.row(static_cast<Eigen::Index>(begin + i)) = vectors[i].transpose();
    }
  }
  return out;
}

} // namespace tempora
