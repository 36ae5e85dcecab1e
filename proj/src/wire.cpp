// Copyright 2026 The ecoproxy Authors.
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

#include "ecoproxy/wire.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "ecoproxy/error.hpp"
#include "ecoproxy/genotype_io.hpp"
#include "json.hpp"

namespace ecoproxy {

using nlohmann::json;

namespace {

json parse_message(std::string_view line, const char* what) {
  if (line.size() > kMaxWireLine)
    throw Error(ErrorCode::kParse, std::string(what) + " exceeds the line length bound");
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error(ErrorCode::kParse, std::string(what) + " is not a JSON object");
  if (j.value("schema_version", kWireSchemaVersion) != kWireSchemaVersion)
    throw Error(ErrorCode::kParse, std::string(what) + " has an unsupported schema_version");
  return j;
}

}  // namespace

std::string encode_request(const WireRequest& r) {
  json j = {{"schema_version", kWireSchemaVersion},
            {"id", r.id},
            {"genotype", json::parse(r.genotype_document)},
            {"setting", r.setting},
            {"start_epoch", r.start_epoch},
            {"end_epoch", r.end_epoch}};
  if (r.resume_token) j["resume_token"] = *r.resume_token;
  return j.dump();
}

WireRequest decode_request(std::string_view line) {
  json j = parse_message(line, "request");
  WireRequest r;
  try {
    r.id = j.at("id").get<std::string>();
    const json& g = j.at("genotype");
    r.genotype_document = g.is_string() ? g.get<std::string>() : g.dump();
    r.setting = j.at("setting").get<std::string>();
    r.start_epoch = j.at("start_epoch").get<int>();
    r.end_epoch = j.at("end_epoch").get<int>();
    if (j.contains("resume_token") && !j["resume_token"].is_null())
      r.resume_token = j["resume_token"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("request: ") + e.what());
  }
  return r;
}

std::string encode_response(const WireResponse& r) {
  json j = {{"schema_version", kWireSchemaVersion}, {"id", r.id}};
  if (r.ok) {
    j["status"] = "ok";
    j["accuracy"] = r.accuracy;
    if (r.train_accuracy) j["train_accuracy"] = *r.train_accuracy;
    j["resume_token"] = r.resume_token;
  } else {
    j["status"] = "error";
    j["error"] = r.error;
  }
  return j.dump();
}

WireResponse decode_response(std::string_view line) {
  json j = parse_message(line, "response");
  WireResponse r;
  try {
    r.id = j.at("id").get<std::string>();
    const std::string status = j.at("status").get<std::string>();
    if (status == "ok") {
      r.ok = true;
      r.accuracy = j.at("accuracy").get<double>();
      if (j.contains("train_accuracy") && !j["train_accuracy"].is_null())
        r.train_accuracy = j["train_accuracy"].get<double>();
      r.resume_token = j.value("resume_token", std::string());
      if (!std::isfinite(r.accuracy)) throw Error(ErrorCode::kParse, "response: non-finite accuracy");
    } else if (status == "error") {
      r.error = j.value("error", std::string("unspecified error"));
    } else {
      throw Error(ErrorCode::kParse, "response: unknown status '" + status + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("response: ") + e.what());
  }
  return r;
}

std::size_t serve_evaluator(std::istream& in, std::ostream& out, Evaluator& evaluator) {
  std::size_t served = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    WireResponse response;
    try {
      const WireRequest request = decode_request(line);
      response.id = request.id;
      const Genotype genotype = decode(request.genotype_document);
      EvalRequest eval{&genotype, parse_label(request.setting), request.start_epoch,
                       request.end_epoch, request.resume_token};
      const EvalResult result = evaluator.evaluate(eval);
      response.ok = true;
      response.accuracy = result.accuracy;
      response.train_accuracy = result.train_accuracy;
      response.resume_token = result.resume_token;
    } catch (const std::exception& e) {
      response.ok = false;
      response.error = e.what();
    }
    out << encode_response(response) << '\n';
    out.flush();
    ++served;
  }
  return served;
}

}  // namespace ecoproxy
