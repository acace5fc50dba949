# Copyright 2026 The umlsqa Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the umlsqa core library."""

from ._umlsqa import (
    ParseError,
    ValidationError,
    dedup_terms,
    extraction_prompt,
    greedy_match,
    largest_remainder_percent,
    lcs_length,
    load_corpus,
    parse_extraction_output,
    rouge_l,
    rouge_n,
    stub_bertscore,
    tokenize,
    win_rates,
)

__all__ = [
    "ParseError",
    "ValidationError",
    "dedup_terms",
    "extraction_prompt",
    "greedy_match",
    "largest_remainder_percent",
    "lcs_length",
    "load_corpus",
    "parse_extraction_output",
    "rouge_l",
    "rouge_n",
    "stub_bertscore",
    "tokenize",
    "win_rates",
]
