#include "archsec/llm.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace archsec {

LlmPrompt build_llm_prompt(const CveRecord& cve, const std::vector<Technique>& catalog,
                           const std::vector<std::string>& hints) {
  if (catalog.empty()) throw EmptyCatalog();

  std::vector<const Technique*> sorted;
  sorted.reserve(catalog.size());
  for (const Technique& t : catalog) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(),
            [](const Technique* a, const Technique* b) { return a->id < b->id; });

  std::ostringstream body;
  body << "You are a security analyst. Map the vulnerability below to the adversary\n"
          "techniques it most plausibly enables.\n"
          "\n"
          "Vulnerability: " << cve.id << "\n"
          "Description: " << cve.description << "\n"
          "\n"
          "Candidate techniques:\n";
  for (const Technique* t : sorted) {
    body << t->id << ": " << t->name << "\n";
  }
  if (!hints.empty()) {
    body << "\nSuggested techniques from weakness analysis: ";
    for (size_t i = 0; i < hints.size(); ++i) {
      if (i) body << ", ";
      body << hints[i];
    }
    body << "\n";
  }
  body << "\nAnswer with a JSON array of at most 5 technique ids from the candidate list,\n"
          "ordered from most to least likely, for example [\"T1190\", \"T1059\"].\n";

  return {cve.id, body.str(), hints};
}

namespace {

// Finds the end of a balanced JSON array starting at `start` (which must be
// '['), honoring string literals and escapes. Returns npos when unbalanced.
size_t find_array_end(const std::string& text, size_t start) {
  int depth = 0;
  bool in_string = false;
  for (size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      if (--depth == 0) return i;
    }
  }
  return std::string::npos;
}

}  // namespace

std::vector<std::string> parse_llm_response(const std::string& text,
                                            const std::set<std::string>& catalog_ids) {
  for (size_t pos = text.find('['); pos != std::string::npos; pos = text.find('[', pos + 1)) {
    size_t end = find_array_end(text, pos);
    if (end == std::string::npos) continue;
    nlohmann::json array =
        nlohmann::json::parse(text.substr(pos, end - pos + 1), nullptr, false);
    if (array.is_discarded() || !array.is_array()) continue;

    std::vector<std::string> out;
    for (const auto& item : array) {
      if (!item.is_string()) continue;
      std::string id = item.get<std::string>();
      if (!is_technique_id(id)) continue;
      std::string parent = collapse_to_parent(id);
      if (!catalog_ids.count(parent)) continue;
      if (std::find(out.begin(), out.end(), parent) != out.end()) continue;
      out.push_back(parent);
      if (out.size() == 5) break;
    }
    return out;
  }
  throw NoParsableArray();
}

FileTransport::FileTransport(std::filesystem::path prompt_dir,
                             std::filesystem::path response_dir)
    : prompt_dir_(std::move(prompt_dir)), response_dir_(std::move(response_dir)) {}

std::optional<std::string> FileTransport::complete(const LlmPrompt& prompt) {
  std::filesystem::create_directories(prompt_dir_);
  {
    std::ofstream out(prompt_dir_ / (prompt.cve_id + ".txt"), std::ios::binary);
    out << prompt.body;
  }
  std::filesystem::path response = response_dir_ / (prompt.cve_id + ".txt");
  std::ifstream in(response, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream content;
  content << in.rdbuf();
  return content.str();
}

HttpTransport::HttpTransport(std::string base_url, std::string model)
    : base_url_(std::move(base_url)), model_(std::move(model)) {}

}  // namespace archsec

// The HTTP client pulls in cpp-httplib; kept at the bottom so the rest of
// the translation unit stays light.
#include <httplib.h>

namespace archsec {

std::optional<std::string> HttpTransport::complete(const LlmPrompt& prompt) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(10);
  client.set_read_timeout(120);

  nlohmann::json request{
      {"model", model_},
      {"messages", {{{"role", "user"}, {"content", prompt.body}}}}};
  auto response = client.Post("/v1/chat/completions", request.dump(), "application/json");
  if (!response) {
    last_error_ = "transport failure: " + httplib::to_string(response.error());
    return std::nullopt;
  }
  if (response->status != 200) {
    last_error_ = "status " + std::to_string(response->status);
    return std::nullopt;
  }
  nlohmann::json body = nlohmann::json::parse(response->body, nullptr, false);
  if (body.is_discarded() || !body.contains("choices") || body["choices"].empty()) {
    last_error_ = "response body has no choices";
    return std::nullopt;
  }
  const auto& first = body["choices"][0];
  if (!first.contains("message") || !first["message"].contains("content")) {
    last_error_ = "first choice has no message content";
    return std::nullopt;
  }
  return first["message"]["content"].get<std::string>();
}

}  // namespace archsec
