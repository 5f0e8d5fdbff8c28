#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "blockwatch/error.hpp"
#include "blockwatch/ingest.hpp"
#include "blockwatch/io.hpp"
#include "blockwatch/types.hpp"

namespace blockwatch {

/// Offline-friendly transaction fetcher. Every (account, cursor) page is
/// cached on disk as the raw response bytes, so a cached run replays without
/// the network. Requests against one endpoint are serialized; distinct
/// clients (accounts) may run concurrently.
class FetchClient {
 public:
  FetchClient(const std::string& endpoint, std::filesystem::path cache_dir, int page_size = 1000)
      : cache_dir_(std::move(cache_dir)), page_size_(page_size) {
    std::string rest = endpoint;
    const auto scheme = rest.find("://");
    if (scheme != std::string::npos) rest = rest.substr(scheme + 3);
    const auto slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : rest.substr(slash);
    const auto colon = hostport.find(':');
    host_ = colon == std::string::npos ? hostport : hostport.substr(0, colon);
    port_ = colon == std::string::npos ? 80 : std::atoi(hostport.c_str() + colon + 1);
    std::filesystem::create_directories(cache_dir_);
  }

  void set_offline(bool offline) { offline_ = offline; }
  void set_min_interval(std::chrono::milliseconds interval) { min_interval_ = interval; }
  int page_size() const { return page_size_; }

  /// One page, cache first. Throws NetworkError offline on a cache miss.
  std::vector<Transaction> fetch_page(const std::string& account, int cursor) {
    const std::filesystem::path cached = cache_path(account, cursor);
    std::string body;
    if (std::filesystem::exists(cached)) {
      body = io::read_file(cached);
    } else {
      if (offline_)
        throw Error(Errc::NetworkError, "offline and no cached page for (" + account + ", " +
                                            std::to_string(cursor) + ")");
      body = request(account, cursor);
      io::atomic_write_file(cached, body);
    }
    return parse_body(body);
  }

  /// All pages for an account, walking the cursor until a short page.
  std::vector<Transaction> fetch_all(const std::string& account) {
    std::vector<Transaction> all;
    for (int cursor = 0;; ++cursor) {
      std::vector<Transaction> page = fetch_page(account, cursor);
      const bool last = page.size() < static_cast<std::size_t>(page_size_);
      all.insert(all.end(), page.begin(), page.end());
      if (last) break;
    }
    return all;
  }

  std::filesystem::path cache_path(const std::string& account, int cursor) const {
    std::string key;
    for (char c : account) key.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return cache_dir_ / (key + "_" + std::to_string(cursor) + ".json");
  }

 private:
  std::string request(const std::string& account, int cursor) {
    std::lock_guard<std::mutex> lock(mutex_);  // one in-flight request per endpoint
    const auto now = std::chrono::steady_clock::now();
    if (last_request_.time_since_epoch().count() != 0 && now - last_request_ < min_interval_)
      std::this_thread::sleep_for(min_interval_ - (now - last_request_));
    last_request_ = std::chrono::steady_clock::now();

    httplib::Client client(host_, port_);
    const std::string url = path_ + "?account=" + account + "&cursor=" + std::to_string(cursor) +
                            "&limit=" + std::to_string(page_size_);
    auto res = client.Get(url.c_str());
    if (!res)
      throw Error(Errc::NetworkError, "request to " + host_ + ":" + std::to_string(port_) +
                                          " failed");
    if (res->status == 429) {
      Error err(Errc::RateLimited, "server rate-limited the request");
      if (res->has_header("Retry-After"))
        err.retry_after = std::atoi(res->get_header_value("Retry-After").c_str());
      throw err;
    }
    if (res->status != 200)
      throw Error(Errc::NetworkError, "HTTP " + std::to_string(res->status));
    return res->body;
  }

  std::vector<Transaction> parse_body(const std::string& body) const {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_array())
      throw Error(Errc::MalformedResponse, "expected a JSON array of transactions");
    std::vector<Transaction> txs;
    std::size_t line = 0;
    for (const auto& rec : j) {
      ++line;
      if (!rec.is_object()) throw Error(Errc::MalformedResponse, "non-object transaction record");
      txs.push_back(detail::transaction_from_fields(
          detail::json_field_as_string(rec, "block_number", line),
          rec.contains("tx_hash") ? detail::json_field_as_string(rec, "tx_hash", line)
                                  : std::string{},
          detail::json_field_as_string(rec, "source", line),
          detail::json_field_as_string(rec, "destination", line),
          detail::json_field_as_string(rec, "value", line),
          detail::json_field_as_string(rec, "gas", line),
          detail::json_field_as_string(rec, "gas_price", line), line));
    }
    return txs;
  }

  std::filesystem::path cache_dir_;
  std::string host_;
  std::string path_;
  int port_ = 80;
  int page_size_ = 1000;
  bool offline_ = false;
  std::chrono::milliseconds min_interval_{0};
  std::chrono::steady_clock::time_point last_request_{};
  std::mutex mutex_;
};

}  // namespace blockwatch
