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

// Client side of the classify HTTP contract (docs/classify-contract.md):
//
//   POST <endpoint>/v1/classify   {"texts": [...]}
//   200 -> {"labels": [...], "scores": [[...], ...]?, "label_names": [...]?}
//
// `labels` and `scores` are parallel to `texts`; `label_names` names the
// score columns. Only plain http endpoints are supported.

#ifndef DEFVERIFY_REMOTE_INFERENCE_H_
#define DEFVERIFY_REMOTE_INFERENCE_H_

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "defverify/prediction.h"

namespace defverify {

enum class HttpStatusClass { kSuccess, kTransient, kContractFailure };

// 200 -> success; 408, 425, 429, 500, 502, 503, 504 -> transient (retried);
// anything else -> contract failure.
HttpStatusClass ClassifyHttpStatus(int status);

struct RetryPolicy {
  int max_attempts = 3;
  // Doubled after every failed attempt.
  std::chrono::milliseconds initial_backoff{250};
};

struct RemoteOptions {
  size_t batch_size = 32;
  size_t max_in_flight = 4;
  std::string seed_id = "s0";
  std::string model_id = "remote";
  RetryPolicy retry;
  std::chrono::seconds timeout{60};
};

struct CaseText {
  std::string case_id;
  std::string text;
};

struct ClassifyResponse {
  std::vector<std::string> labels;
  std::optional<std::vector<std::vector<double>>> scores;
  std::optional<std::vector<std::string>> label_names;
};

// Validates a 200 response body for a batch of `expected_count` texts:
// parallel arrays, score rows matching label_names in length.
absl::StatusOr<ClassifyResponse> ParseClassifyResponse(absl::string_view body,
                                                       size_t expected_count);

struct Endpoint {
  // "http://host:port"
  std::string origin;
  // Path prefix without a trailing slash, e.g. "" or "/model-a".
  std::string base_path;
};

absl::StatusOr<Endpoint> ParseEndpoint(absl::string_view url);

// Classifies every case, `batch_size` texts per request and at most
// `max_in_flight` requests at a time. One record per case, tagged with the
// options' seed and model ids. Transient failures are retried per
// `options.retry`; contract violations fail immediately and echo the batch.
absl::StatusOr<PredictionSet> InferRemote(absl::string_view endpoint,
                                          const std::vector<CaseText>& cases,
                                          const RemoteOptions& options);

enum class CheckOutcome { kPass, kFail, kSkip };
absl::string_view CheckOutcomeName(CheckOutcome outcome);

struct ContractCheck {
  std::string name;
  CheckOutcome outcome = CheckOutcome::kFail;
  std::string detail;
};

struct ContractReport {
  std::vector<ContractCheck> checks;
  // No check failed.
  bool passed() const;
};

struct ContractOptions {
  // The server's configured maximum batch; enables the 413 check.
  std::optional<size_t> max_batch;
  std::chrono::seconds timeout{30};
};

// Runs the conformance checks: health, empty batch, parallel arrays, score
// rows and argmax consistency, determinism, 400 on malformed requests and
// 413 on oversized batches.
ContractReport CheckClassifyContract(absl::string_view endpoint,
                                     const ContractOptions& options = {});

}  // namespace defverify

#endif  // DEFVERIFY_REMOTE_INFERENCE_H_
