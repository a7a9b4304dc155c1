#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace pogosim::fixtures {

/// Blocking WebSocket client for scripting the control endpoint.
class WsClient {
 public:
  WsClient();
  ~WsClient();

  void connect(const std::string& host, std::uint16_t port);
  void send_text(const std::string& text);
  /// Sends {type, seq, payload}.
  void send(const std::string& type, int seq, nlohmann::json payload = nlohmann::json::object());
  /// Next message, or nullopt after `timeout`.
  std::optional<nlohmann::json> read(std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));
  /// Reads until `pred` matches, skipping other messages.
  std::optional<nlohmann::json> read_until(const std::function<bool(const nlohmann::json&)>& pred,
                                           std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));
  /// Reply (ack or error) carrying `seq`.
  std::optional<nlohmann::json> reply(int seq, std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pogosim::fixtures
