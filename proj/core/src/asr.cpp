#include "speechlabel/asr.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "speechlabel/error.hpp"

namespace speechlabel {

nlohmann::json to_json(const TranscriptionResult& r) {
  nlohmann::json alts = nlohmann::json::array();
  for (const auto& a : r.alternatives) {
    nlohmann::json j{{"text", a.text}, {"rank", a.rank}};
    if (a.confidence) j["confidence"] = *a.confidence;
    alts.push_back(std::move(j));
  }
  nlohmann::json speech = nlohmann::json::array();
  for (const auto& s : r.speech) speech.push_back({s.start, s.end});
  nlohmann::json j{{"alternatives", std::move(alts)}, {"speech", std::move(speech)}};
  if (r.error) j["error"] = *r.error;
  return j;
}

void AsrConfig::validate() const {
  if (max_alternatives < 1) throw ConfigError("max_alternatives must be >= 1");
  if (language_tag.empty()) throw ConfigError("language tag must not be empty");
}

std::vector<TranscriptionAlternative> rank_alternatives(std::vector<TranscriptionAlternative> alts,
                                                        int max_alternatives) {
  std::stable_sort(alts.begin(), alts.end(),
                   [](const auto& a, const auto& b) { return a.rank < b.rank; });
  if (max_alternatives >= 0 && alts.size() > static_cast<std::size_t>(max_alternatives)) {
    alts.resize(static_cast<std::size_t>(max_alternatives));
  }
  for (std::size_t i = 0; i < alts.size(); ++i) alts[i].rank = static_cast<int>(i + 1);
  return alts;
}

std::vector<TranscriptionResult> batch_transcribe(const AsrGateway& gateway, std::span<const BatchJob> jobs,
                                                  const AsrConfig& config, int parallelism, RetryPolicy retry) {
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  config.validate();
  std::vector<TranscriptionResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;
  std::atomic<bool> stop{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size() || stop.load()) return;
      const BatchJob& job = jobs[i];
      const int attempts = std::max(1, retry.max_attempts);
      std::string last_error;
      bool done = false;
      for (int a = 0; a < attempts && !done; ++a) {
        try {
          results[i] = gateway.transcribe(job.audio, job.ref, config);
          results[i].segment = job.ref;
          done = true;
        } catch (const TransportError& e) {
          last_error = e.what();
          if (retry.backoff.count() > 0 && a + 1 < attempts) std::this_thread::sleep_for(retry.backoff * (a + 1));
        } catch (...) {
          std::lock_guard lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
          stop = true;
          return;
        }
      }
      if (!done) {
        results[i] = TranscriptionResult{};
        results[i].segment = job.ref;
        results[i].error = "transport failure after " + std::to_string(attempts) + " attempts: " + last_error;
      }
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(parallelism), jobs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);
  return results;
}

}  // namespace speechlabel
