/*
 * Copyright 2026 The DefVerify Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "defverify/remote_inference.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "httplib.h"
#include "json.hpp"

namespace defverify {
namespace {

constexpr absl::string_view kClassifyPath = "/v1/classify";
constexpr absl::string_view kHealthPath = "/v1/health";
constexpr size_t kEchoedTexts = 3;
constexpr size_t kEchoedTextLength = 80;

struct HttpReply {
  // 0 on transport failure.
  int status = 0;
  std::string body;
  std::string transport_error;
};

std::unique_ptr<httplib::Client> MakeClient(const Endpoint& endpoint,
                                            std::chrono::seconds timeout) {
  auto client = std::make_unique<httplib::Client>(endpoint.origin);
  client->set_connection_timeout(timeout);
  client->set_read_timeout(timeout);
  client->set_write_timeout(timeout);
  return client;
}

HttpReply Post(httplib::Client& client, const std::string& path,
               const std::string& body) {
  httplib::Result result = client.Post(path, body, "application/json");
  if (!result) return {0, "", httplib::to_string(result.error())};
  return {result->status, result->body, ""};
}

HttpReply Get(httplib::Client& client, const std::string& path) {
  httplib::Result result = client.Get(path);
  if (!result) return {0, "", httplib::to_string(result.error())};
  return {result->status, result->body, ""};
}

std::string TextsBody(const std::vector<std::string>& texts) {
  nlohmann::json body;
  body["texts"] = texts;
  return body.dump();
}

std::string EchoBatch(size_t batch_index, const std::vector<CaseText>& cases,
                      size_t begin, size_t end) {
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  for (size_t i = begin; i < end; ++i) {
    ids.push_back(cases[i].case_id);
    if (texts.size() < kEchoedTexts) {
      std::string text = cases[i].text.substr(0, kEchoedTextLength);
      if (cases[i].text.size() > kEchoedTextLength) text.append("...");
      texts.push_back(absl::StrCat("\"", text, "\""));
    }
  }
  return absl::StrCat("batch ", batch_index, " (case ids ",
                      absl::StrJoin(ids, ", "), "; texts ",
                      absl::StrJoin(texts, ", "),
                      end - begin > kEchoedTexts ? ", ..." : "", ")");
}

// Sends one batch with retries. Returns the parsed response or an error.
absl::StatusOr<ClassifyResponse> ClassifyBatch(
    httplib::Client& client, const std::string& path,
    const std::vector<std::string>& texts, const RetryPolicy& retry) {
  const std::string body = TextsBody(texts);
  std::chrono::milliseconds backoff = retry.initial_backoff;
  std::string last_failure;
  const int attempts = std::max(1, retry.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    const HttpReply reply = Post(client, path, body);
    if (reply.status == 0) {
      last_failure = absl::StrCat("transport error: ", reply.transport_error);
    } else {
      switch (ClassifyHttpStatus(reply.status)) {
        case HttpStatusClass::kSuccess: {
          absl::StatusOr<ClassifyResponse> parsed =
              ParseClassifyResponse(reply.body, texts.size());
          if (!parsed.ok()) {
            return absl::InvalidArgumentError(absl::StrCat(
                "contract violation: ", parsed.status().message()));
          }
          return parsed;
        }
        case HttpStatusClass::kTransient:
          last_failure = absl::StrCat("HTTP ", reply.status);
          break;
        case HttpStatusClass::kContractFailure:
          return absl::InvalidArgumentError(absl::StrCat(
              "contract violation: unexpected HTTP status ", reply.status));
      }
    }
    if (attempt < attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  return absl::UnavailableError(absl::StrCat("failed after ", attempts,
                                             " attempt(s): ", last_failure));
}

absl::StatusOr<std::vector<PredictionRecord>> ToRecords(
    const ClassifyResponse& response, const std::vector<CaseText>& cases,
    size_t begin, const RemoteOptions& options) {
  std::vector<PredictionRecord> records;
  for (size_t i = 0; i < response.labels.size(); ++i) {
    PredictionRecord record;
    record.case_id = cases[begin + i].case_id;
    record.raw_label = response.labels[i];
    record.seed_id = options.seed_id;
    record.model_id = options.model_id;
    if (response.scores.has_value() && response.label_names.has_value()) {
      std::map<std::string, double> scores;
      for (size_t j = 0; j < response.label_names->size(); ++j) {
        scores[(*response.label_names)[j]] = (*response.scores)[i][j];
      }
      record.scores = std::move(scores);
      if (absl::Status s = ValidatePredictionScores(record); !s.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("contract violation: row ", i, ": ", s.message()));
      }
    }
    if (record.raw_label.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("contract violation: row ", i, ": empty label"));
    }
    records.push_back(std::move(record));
  }
  return records;
}

ContractCheck Pass(std::string name, std::string detail = "") {
  return {std::move(name), CheckOutcome::kPass, std::move(detail)};
}
ContractCheck Fail(std::string name, std::string detail) {
  return {std::move(name), CheckOutcome::kFail, std::move(detail)};
}
ContractCheck Skip(std::string name, std::string detail) {
  return {std::move(name), CheckOutcome::kSkip, std::move(detail)};
}

ContractCheck ExpectStatus(httplib::Client& client, const std::string& path,
                           std::string name, const std::string& body,
                           int expected) {
  const HttpReply reply = Post(client, path, body);
  if (reply.status == expected) return Pass(std::move(name));
  if (reply.status == 0) {
    return Fail(std::move(name), absl::StrCat("transport error: ", reply.transport_error));
  }
  return Fail(std::move(name),
              absl::StrCat("expected HTTP ", expected, ", got ", reply.status));
}

size_t ArgMax(const std::vector<double>& row) {
  return static_cast<size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

ContractCheck CheckScores(const ClassifyResponse& response) {
  const std::string name = "score rows and argmax consistency";
  if (!response.scores.has_value()) {
    return Skip(name, "server returned no scores");
  }
  std::map<size_t, std::string> column_label;
  for (size_t i = 0; i < response.labels.size(); ++i) {
    const std::vector<double>& row = (*response.scores)[i];
    if (row.empty()) return Fail(name, absl::StrCat("row ", i, " is empty"));
    double sum = 0.0;
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) {
        return Fail(name, absl::StrCat("row ", i, " has a score outside [0, 1]"));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      return Fail(name, absl::StrCat("row ", i, " sums to ", sum));
    }
    const size_t best = ArgMax(row);
    if (response.label_names.has_value()) {
      if ((*response.label_names)[best] != response.labels[i]) {
        return Fail(name, absl::StrCat("row ", i, ": label \"", response.labels[i],
                                       "\" but argmax column is \"",
                                       (*response.label_names)[best], "\""));
      }
    } else {
      auto [it, inserted] = column_label.emplace(best, response.labels[i]);
      if (!inserted && it->second != response.labels[i]) {
        return Fail(name, absl::StrCat("argmax column ", best, " maps to both \"",
                                       it->second, "\" and \"",
                                       response.labels[i], "\""));
      }
    }
  }
  return Pass(name, response.label_names.has_value()
                        ? "checked against label_names"
                        : "label_names absent; checked column consistency");
}

}  // namespace

HttpStatusClass ClassifyHttpStatus(int status) {
  if (status == 200) return HttpStatusClass::kSuccess;
  switch (status) {
    case 408:
    case 425:
    case 429:
    case 500:
    case 502:
    case 503:
    case 504:
      return HttpStatusClass::kTransient;
    default:
      return HttpStatusClass::kContractFailure;
  }
}

absl::StatusOr<ClassifyResponse> ParseClassifyResponse(absl::string_view body,
                                                       size_t expected_count) {
  const nlohmann::json doc =
      nlohmann::json::parse(body.begin(), body.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("response is not a JSON object");
  }
  ClassifyResponse response;
  auto labels = doc.find("labels");
  if (labels == doc.end() || !labels->is_array()) {
    return absl::InvalidArgumentError("response has no \"labels\" array");
  }
  for (const auto& label : *labels) {
    if (!label.is_string()) {
      return absl::InvalidArgumentError("\"labels\" holds a non-string entry");
    }
    response.labels.push_back(label.get<std::string>());
  }
  if (response.labels.size() != expected_count) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", expected_count, " labels, got ",
                     response.labels.size()));
  }
  if (auto names = doc.find("label_names");
      names != doc.end() && !names->is_null()) {
    if (!names->is_array()) {
      return absl::InvalidArgumentError("\"label_names\" is not an array");
    }
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& name : *names) {
      if (!name.is_string() || !seen.insert(name.get<std::string>()).second) {
        return absl::InvalidArgumentError(
            "\"label_names\" must hold distinct strings");
      }
      out.push_back(name.get<std::string>());
    }
    response.label_names = std::move(out);
  }
  if (auto scores = doc.find("scores"); scores != doc.end() && !scores->is_null()) {
    if (!scores->is_array() || scores->size() != expected_count) {
      return absl::InvalidArgumentError(absl::StrCat(
          "\"scores\" must be an array of ", expected_count, " rows"));
    }
    std::vector<std::vector<double>> rows;
    for (const auto& row : *scores) {
      if (!row.is_array()) {
        return absl::InvalidArgumentError("\"scores\" row is not an array");
      }
      std::vector<double> values;
      for (const auto& v : row) {
        if (!v.is_number()) {
          return absl::InvalidArgumentError("\"scores\" holds a non-number");
        }
        values.push_back(v.get<double>());
      }
      if (!rows.empty() && values.size() != rows.front().size()) {
        return absl::InvalidArgumentError("\"scores\" rows differ in length");
      }
      rows.push_back(std::move(values));
    }
    if (response.label_names.has_value() && !rows.empty() &&
        rows.front().size() != response.label_names->size()) {
      return absl::InvalidArgumentError(
          "\"scores\" rows do not match \"label_names\" in length");
    }
    response.scores = std::move(rows);
  }
  return response;
}

absl::StatusOr<Endpoint> ParseEndpoint(absl::string_view url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == absl::string_view::npos) {
    return absl::InvalidArgumentError(
        absl::StrCat("endpoint \"", url, "\" has no scheme"));
  }
  if (url.substr(0, scheme_end) != "http") {
    return absl::InvalidArgumentError(
        absl::StrCat("endpoint \"", url, "\": only http is supported"));
  }
  absl::string_view rest = url.substr(scheme_end + 3);
  const size_t slash = rest.find('/');
  absl::string_view authority = rest.substr(0, slash);
  if (authority.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("endpoint \"", url, "\" has no host"));
  }
  Endpoint endpoint;
  endpoint.origin = absl::StrCat("http://", authority);
  if (slash != absl::string_view::npos) {
    absl::string_view path = rest.substr(slash);
    while (!path.empty() && path.back() == '/') path.remove_suffix(1);
    endpoint.base_path = std::string(path);
  }
  return endpoint;
}

absl::StatusOr<PredictionSet> InferRemote(absl::string_view endpoint_url,
                                          const std::vector<CaseText>& cases,
                                          const RemoteOptions& options) {
  if (options.batch_size < 1 || options.max_in_flight < 1) {
    return absl::InvalidArgumentError(
        "batch_size and max_in_flight must be at least 1");
  }
  absl::StatusOr<Endpoint> endpoint = ParseEndpoint(endpoint_url);
  if (!endpoint.ok()) return endpoint.status();
  const std::string path = endpoint->base_path + std::string(kClassifyPath);
  const size_t batches = (cases.size() + options.batch_size - 1) / options.batch_size;

  std::vector<std::vector<PredictionRecord>> results(batches);
  std::atomic<size_t> next_batch{0};
  std::atomic<bool> stop{false};
  std::mutex error_mu;
  std::optional<std::pair<size_t, absl::Status>> first_error;

  const auto worker = [&] {
    std::unique_ptr<httplib::Client> client = MakeClient(*endpoint, options.timeout);
    while (!stop.load()) {
      const size_t batch = next_batch.fetch_add(1);
      if (batch >= batches) return;
      const size_t begin = batch * options.batch_size;
      const size_t end = std::min(cases.size(), begin + options.batch_size);
      std::vector<std::string> texts;
      for (size_t i = begin; i < end; ++i) texts.push_back(cases[i].text);
      absl::StatusOr<std::vector<PredictionRecord>> records;
      absl::StatusOr<ClassifyResponse> response =
          ClassifyBatch(*client, path, texts, options.retry);
      if (response.ok()) {
        records = ToRecords(*response, cases, begin, options);
      } else {
        records = response.status();
      }
      if (!records.ok()) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error.has_value() || batch < first_error->first) {
          first_error.emplace(
              batch, absl::Status(records.status().code(),
                                  absl::StrCat(records.status().message(), "; ",
                                               EchoBatch(batch, cases, begin, end))));
        }
        stop.store(true);
        return;
      }
      results[batch] = *std::move(records);
    }
  };

  const size_t workers = std::min(options.max_in_flight, std::max<size_t>(batches, 1));
  std::vector<std::thread> threads;
  for (size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (first_error.has_value()) return first_error->second;

  std::vector<PredictionRecord> all;
  all.reserve(cases.size());
  for (auto& batch : results) {
    for (auto& record : batch) all.push_back(std::move(record));
  }
  return PredictionSet::Create(std::move(all));
}

absl::string_view CheckOutcomeName(CheckOutcome outcome) {
  switch (outcome) {
    case CheckOutcome::kPass:
      return "PASS";
    case CheckOutcome::kFail:
      return "FAIL";
    case CheckOutcome::kSkip:
      return "SKIP";
  }
  return "FAIL";
}

bool ContractReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const ContractCheck& c) {
    return c.outcome == CheckOutcome::kFail;
  });
}

ContractReport CheckClassifyContract(absl::string_view endpoint_url,
                                     const ContractOptions& options) {
  ContractReport report;
  absl::StatusOr<Endpoint> endpoint = ParseEndpoint(endpoint_url);
  if (!endpoint.ok()) {
    report.checks.push_back(Fail("endpoint", std::string(endpoint.status().message())));
    return report;
  }
  std::unique_ptr<httplib::Client> client = MakeClient(*endpoint, options.timeout);
  const std::string classify = endpoint->base_path + std::string(kClassifyPath);

  {
    const HttpReply reply = Get(*client, endpoint->base_path + std::string(kHealthPath));
    report.checks.push_back(
        reply.status == 200
            ? Pass("health")
            : Fail("health", reply.status == 0
                                 ? absl::StrCat("transport error: ", reply.transport_error)
                                 : absl::StrCat("GET /v1/health returned ", reply.status)));
  }

  const auto classify_ok = [&](const std::vector<std::string>& texts,
                               std::string* problem) -> std::optional<ClassifyResponse> {
    const HttpReply reply = Post(*client, classify, TextsBody(texts));
    if (reply.status != 200) {
      *problem = reply.status == 0
                     ? absl::StrCat("transport error: ", reply.transport_error)
                     : absl::StrCat("HTTP ", reply.status);
      return std::nullopt;
    }
    absl::StatusOr<ClassifyResponse> parsed =
        ParseClassifyResponse(reply.body, texts.size());
    if (!parsed.ok()) {
      *problem = std::string(parsed.status().message());
      return std::nullopt;
    }
    return *std::move(parsed);
  };

  std::string problem;
  report.checks.push_back(classify_ok({}, &problem).has_value()
                              ? Pass("empty batch")
                              : Fail("empty batch", problem));

  const std::vector<std::string> probe = {
      "I love my neighbours.",
      "Immigrants are a plague on this country.",
      "What a lovely day for a walk.",
      "Women should not be allowed to vote.",
      "That film was absolutely terrible.",
      "We should get rid of all of them.",
      "Thanks for the help yesterday!",
  };
  std::optional<ClassifyResponse> first = classify_ok(probe, &problem);
  if (!first.has_value()) {
    report.checks.push_back(Fail("parallel arrays", problem));
    report.checks.push_back(Skip("score rows and argmax consistency",
                                 "no valid classify response"));
    report.checks.push_back(Skip("determinism", "no valid classify response"));
  } else {
    report.checks.push_back(
        Pass("parallel arrays", absl::StrCat(probe.size(), " texts, ",
                                             first->labels.size(), " labels")));
    report.checks.push_back(CheckScores(*first));
    std::optional<ClassifyResponse> second = classify_ok(probe, &problem);
    if (!second.has_value()) {
      report.checks.push_back(Fail("determinism", problem));
    } else {
      report.checks.push_back(second->labels == first->labels
                                  ? Pass("determinism")
                                  : Fail("determinism",
                                         "identical requests gave different labels"));
    }
  }

  report.checks.push_back(
      ExpectStatus(*client, classify, "400 on malformed JSON", "{\"texts\": [", 400));
  report.checks.push_back(ExpectStatus(*client, classify, "400 on missing texts",
                                       "{\"text\": \"hello\"}", 400));
  report.checks.push_back(ExpectStatus(*client, classify, "400 on non-string text",
                                       "{\"texts\": [1, 2]}", 400));
  if (options.max_batch.has_value()) {
    const std::vector<std::string> oversized(*options.max_batch + 1, "hello");
    report.checks.push_back(ExpectStatus(*client, classify, "413 on oversized batch",
                                         TextsBody(oversized), 413));
  } else {
    report.checks.push_back(
        Skip("413 on oversized batch", "server max batch not given"));
  }
  return report;
}

}  // namespace defverify
