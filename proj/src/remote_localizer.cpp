#include "vltrack/remote_localizer.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

#include <openssl/evp.h>
#include <opencv2/imgcodecs.hpp>

#include "httplib.h"
#include "json.hpp"

namespace vltrack {

using nlohmann::json;
using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string{};
}

std::string base64(const std::vector<unsigned char>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

bool retryable_status(int status) { return status >= 500 || status == 429; }

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& s_;
};

}  // namespace

EndpointConfig EndpointConfig::from_env() {
  EndpointConfig cfg;
  cfg.base_url = env_or_empty("VLTRACK_ENDPOINT");
  cfg.model = env_or_empty("VLTRACK_MODEL");
  cfg.api_key = env_or_empty("VLTRACK_API_KEY");
  return cfg;
}

void EndpointConfig::validate() const {
  if (base_url.empty()) throw std::invalid_argument("endpoint URL is not set");
  if (model.empty()) throw std::invalid_argument("model name is not set");
  if (!(timeout_s > 0)) throw std::invalid_argument("timeout must be positive");
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  if (backoff_initial_s < 0) throw std::invalid_argument("backoff must be >= 0");
  if (max_in_flight < 1) throw std::invalid_argument("max_in_flight must be >= 1");
}

std::string png_data_url(const cv::Mat& image) {
  std::vector<unsigned char> png;
  if (!cv::imencode(".png", image, png, {cv::IMWRITE_PNG_COMPRESSION, 3})) {
    throw std::runtime_error("PNG encoding failed");
  }
  return "data:image/png;base64," + base64(png);
}

std::string encode_request_payload(const LocalizerRequest& req, const EndpointConfig& cfg) {
  ordered_json text;
  text["type"] = "text";
  text["text"] = req.instruction;
  auto image_part = [](const cv::Mat& img) {
    ordered_json part;
    part["type"] = "image_url";
    part["image_url"]["url"] = png_data_url(img);
    return part;
  };
  ordered_json message;
  message["role"] = "user";
  message["content"] = ordered_json::array(
      {text, image_part(req.template_image), image_part(req.frame)});

  ordered_json body;
  body["model"] = cfg.model;
  body["messages"] = ordered_json::array({message});
  if (cfg.temperature) body["temperature"] = *cfg.temperature;
  return body.dump();
}

std::optional<std::string> extract_completion_text(const std::string& body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) return std::nullopt;
  const auto& first = (*choices)[0];
  if (!first.is_object()) return std::nullopt;
  const auto msg = first.find("message");
  if (msg == first.end() || !msg->is_object()) return std::nullopt;
  const auto content = msg->find("content");
  if (content == msg->end()) return std::nullopt;
  if (content->is_string()) return content->get<std::string>();
  if (content->is_array()) {
    std::string text;
    for (const auto& part : *content) {
      if (part.is_object() && part.value("type", "") == "text" && part.contains("text") &&
          part["text"].is_string()) {
        text += part["text"].get<std::string>();
      }
    }
    return text;
  }
  return std::nullopt;
}

double backoff_delay_s(const EndpointConfig& cfg, int retry) {
  return cfg.backoff_initial_s * std::pow(2.0, retry - 1);
}

RemoteLocalizer::RemoteLocalizer(EndpointConfig cfg)
    : cfg_(std::move(cfg)),
      in_flight_(std::make_unique<std::counting_semaphore<>>(cfg_.max_in_flight)) {
  cfg_.validate();
}

RemoteLocalizer::~RemoteLocalizer() = default;

LocalizerResponse RemoteLocalizer::localize(const LocalizerRequest& req) {
  SlotGuard slot(*in_flight_);
  const auto start = Clock::now();
  const std::string payload = encode_request_payload(req, cfg_);

  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(cfg_.timeout_s));
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = timeout - secs;

  LocalizerResponse resp;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(
          std::chrono::duration<double>(backoff_delay_s(cfg_, attempt - 1)));
    }
    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    if (!cfg_.api_key.empty()) client.set_bearer_token_auth(cfg_.api_key);

    const auto attempt_start = Clock::now();
    auto res = client.Post(cfg_.path, payload, "application/json");
    const std::string where = " (attempt " + std::to_string(attempt) + "/" +
                              std::to_string(cfg_.max_attempts) + ")";

    if (!res) {
      const auto err = res.error();
      const bool timed_out =
          err == httplib::Error::ConnectionTimeout ||
          ((err == httplib::Error::Read || err == httplib::Error::Write) &&
           elapsed_ms(attempt_start) >= 0.95 * cfg_.timeout_s * 1000.0);
      resp.status = timed_out ? LocalizeStatus::timeout : LocalizeStatus::transport_error;
      resp.error = (timed_out ? std::string("request timed out") : httplib::to_string(err)) + where;
      resp.raw_text.clear();
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      resp.status = LocalizeStatus::transport_error;
      resp.error = "HTTP " + std::to_string(res->status) + where + ": " + res->body;
      resp.raw_text.clear();
      if (retryable_status(res->status)) continue;
      break;
    }
    const auto text = extract_completion_text(res->body);
    if (!text) {
      resp.status = LocalizeStatus::transport_error;
      resp.error = "malformed completion envelope" + where + ": " + res->body;
      break;
    }
    resp.raw_text = *text;
    resp.error.clear();
    resp.box = parse_box(resp.raw_text, req.frame_size);
    resp.status = resp.box ? LocalizeStatus::ok : LocalizeStatus::parse_failure;
    break;
  }
  resp.latency_ms = elapsed_ms(start);
  return resp;
}

}  // namespace vltrack
