// Copyright 2026 The umlsqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UMLSQA_ERROR_H_
#define UMLSQA_ERROR_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace umlsqa {

// Every failure raised by the library derives from Error. The subclasses map
// one-to-one onto the CLI exit codes (see tools/cli.cc).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input supplied by the caller (empty question, malformed CUI, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A file or payload did not parse. `raw` keeps the offending text for logs.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw = {})
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

// Duplicate ids, missing ids and similar corpus-level problems.
class DatasetError : public ValidationError {
 public:
  DatasetError(const std::string& what, std::vector<std::string> ids)
      : ValidationError(what), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

// A remote provider (LLM, UMLS, embedder) failed after retries.
class ProviderError : public Error {
 public:
  using Error::Error;
};

// The provider rejected our credentials. Never retried.
class CredentialError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// Local storage (cache, answer store, review store) failed.
class StorageError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Inputs that are individually valid but disagree with each other.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace umlsqa

#endif  // UMLSQA_ERROR_H_
