#pragma once

#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "vltrack/localizer.hpp"

namespace vltrack {

/// Chat-completions endpoint settings. Environment fallbacks:
/// VLTRACK_ENDPOINT, VLTRACK_MODEL, VLTRACK_API_KEY.
struct EndpointConfig {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;
  double timeout_s = 120.0;
  int max_attempts = 3;
  double backoff_initial_s = 0.5;
  /// Sent as "temperature" when set.
  std::optional<double> temperature = 0.0;
  int max_in_flight = 4;

  static EndpointConfig from_env();
  /// Throws std::invalid_argument on missing URL/model or bad limits.
  void validate() const;
};

/// PNG-encodes `image` (lossless, fixed compression) as a data URL.
std::string png_data_url(const cv::Mat& image);

/// Request body: one user message holding the instruction text, then the
/// template image, then the frame image. Byte-stable for a given request.
std::string encode_request_payload(const LocalizerRequest& req, const EndpointConfig& cfg);

/// Pulls the first choice's text out of a chat-completion response body.
std::optional<std::string> extract_completion_text(const std::string& body);

/// Delay before retry number `retry` (1-based): initial * 2^(retry-1).
double backoff_delay_s(const EndpointConfig& cfg, int retry);

/// HTTP backend. Transport faults (connection errors, 5xx, 429) and
/// timeouts are retried up to max_attempts with exponential backoff;
/// parse failures are returned immediately.
class RemoteLocalizer : public Localizer {
 public:
  explicit RemoteLocalizer(EndpointConfig cfg);
  ~RemoteLocalizer() override;

  LocalizerResponse localize(const LocalizerRequest& req) override;

  const EndpointConfig& config() const { return cfg_; }

 private:
  EndpointConfig cfg_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace vltrack
