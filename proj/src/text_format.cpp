// Copyright 2026 The nfl-lab Authors.
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

#include "nfl/text_format.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "nfl/errors.hpp"

namespace nfl {

namespace {

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    auto field = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    out.push_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t to_index(std::string_view s) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return value;
}

std::vector<std::size_t> indices(const std::vector<std::string_view>& fields, std::size_t from) {
  std::vector<std::size_t> out;
  for (std::size_t i = from; i < fields.size(); ++i) out.push_back(to_index(fields[i]));
  return out;
}

std::vector<Rational> rationals(const std::vector<std::string_view>& fields, std::size_t from) {
  std::vector<Rational> out;
  for (std::size_t i = from; i < fields.size(); ++i) out.push_back(Rational::parse(fields[i]));
  return out;
}

const FiniteDomain& need_domain(const TextDocument& doc, std::string_view record) {
  if (!doc.domain) throw ParseError(std::string(record) + " record before any domain record");
  return *doc.domain;
}

void write_list(std::ostream& os, const std::vector<std::size_t>& values) {
  for (auto v : values) os << ',' << v;
}

void write_list(std::ostream& os, const std::vector<Rational>& values) {
  for (const auto& v : values) os << ',' << v.str();
}

}  // namespace

TextDocument read_text(std::istream& is) {
  TextDocument doc;
  std::vector<TargetFunction> prior_support;
  std::vector<Rational> prior_weights;
  std::vector<std::vector<Rational>> loss_rows;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      const auto fields = fields_of(std::string_view(line).substr(first));
      const auto kind = fields[0];
      if (kind == "domain") {
        if (fields.size() != 3) throw ParseError("domain expects 2 fields");
        if (doc.domain) throw ParseError("duplicate domain record");
        doc.domain.emplace(to_index(fields[1]), to_index(fields[2]));
      } else if (kind == "function") {
        doc.functions.emplace_back(need_domain(doc, kind), indices(fields, 1));
      } else if (kind == "dataset") {
        need_domain(doc, kind);
        if (fields.size() < 2 || fields.size() % 2 != 0) {
          throw ParseError("dataset expects a weight followed by x,y pairs");
        }
        const auto values = indices(fields, 2);
        std::vector<LabeledPoint> pairs;
        for (std::size_t i = 0; i < values.size(); i += 2) {
          if (values[i] >= doc.domain->x_size() || values[i + 1] >= doc.domain->y_size()) {
            throw ParseError("dataset pair outside the domain");
          }
          pairs.push_back({values[i], values[i + 1]});
        }
        doc.datasets.emplace_back(std::move(pairs), Rational::parse(fields[1]));
      } else if (kind == "prior") {
        if (fields.size() < 2) throw ParseError("prior expects a weight and outputs");
        prior_support.emplace_back(need_domain(doc, kind), indices(fields, 2));
        prior_weights.push_back(Rational::parse(fields[1]));
      } else if (kind == "sampling") {
        if (doc.sampling) throw ParseError("duplicate sampling record");
        auto weights = rationals(fields, 1);
        if (weights.size() != need_domain(doc, kind).x_size()) {
          throw ParseError("sampling expects one weight per input");
        }
        doc.sampling.emplace(std::move(weights));
      } else if (kind == "loss") {
        loss_rows.push_back(rationals(fields, 1));
      } else {
        throw ParseError("unknown record '" + std::string(kind) + "'");
      }
    } catch (const Error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  try {
    if (!prior_support.empty()) doc.prior.emplace(std::move(prior_support), std::move(prior_weights));
    if (!loss_rows.empty()) {
      LossFunction loss(std::move(loss_rows));
      if (doc.domain && loss.y_size() != doc.domain->y_size()) {
        throw ParseError("loss table size does not match |Y|");
      }
      doc.loss.emplace(std::move(loss));
    }
  } catch (const Error& e) {
    throw ParseError(std::string("end of input: ") + e.what());
  }
  return doc;
}

TextDocument read_text(const std::string& text) {
  std::istringstream is(text);
  return read_text(is);
}

void write_text(std::ostream& os, const TextDocument& doc) {
  if (doc.domain) os << "domain," << doc.domain->x_size() << ',' << doc.domain->y_size() << '\n';
  for (const auto& f : doc.functions) {
    os << "function";
    write_list(os, f.outputs());
    os << '\n';
  }
  for (const auto& d : doc.datasets) {
    os << "dataset," << d.weight().str();
    for (const auto& p : d.pairs()) os << ',' << p.x << ',' << p.y;
    os << '\n';
  }
  if (doc.prior) {
    for (std::size_t i = 0; i < doc.prior->size(); ++i) {
      os << "prior," << doc.prior->weights()[i].str();
      write_list(os, doc.prior->support()[i].outputs());
      os << '\n';
    }
  }
  if (doc.sampling) {
    os << "sampling";
    write_list(os, doc.sampling->weights());
    os << '\n';
  }
  if (doc.loss) {
    for (const auto& row : doc.loss->table()) {
      os << "loss";
      write_list(os, row);
      os << '\n';
    }
  }
}

std::string write_text(const TextDocument& doc) {
  std::ostringstream os;
  write_text(os, doc);
  return os.str();
}

}  // namespace nfl
