#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "archsec/kb.hpp"
#include "archsec/vuln.hpp"

namespace archsec {

struct EmptyCatalog : std::runtime_error {
  EmptyCatalog() : std::runtime_error("technique catalog is empty") {}
};

struct NoParsableArray : std::runtime_error {
  NoParsableArray() : std::runtime_error("no JSON array found in response") {}
};

struct LlmPrompt {
  std::string cve_id;
  std::string body;
  std::vector<std::string> hint_techniques;
};

/// Deterministic prompt: task instruction, CVE id and description, the
/// catalog as "id: name" lines in id order, an optional hint block, and an
/// output-format instruction asking for a JSON array of at most five
/// technique ids. Throws EmptyCatalog.
LlmPrompt build_llm_prompt(const CveRecord& cve, const std::vector<Technique>& catalog,
                           const std::vector<std::string>& hints);

/// Extracts the first JSON array from free-form response text (prose and
/// code fences tolerated), collapses sub-technique ids to parents, drops ids
/// not in the catalog, deduplicates keeping the first occurrence and
/// truncates to five. Throws NoParsableArray when no array parses.
std::vector<std::string> parse_llm_response(const std::string& text,
                                            const std::set<std::string>& catalog_ids);

class LlmTransport {
 public:
  virtual ~LlmTransport() = default;
  /// Returns the raw model response, or nullopt when none is available.
  virtual std::optional<std::string> complete(const LlmPrompt& prompt) = 0;
};

/// Hermetic transport: writes `<prompt_dir>/<cve_id>.txt` and reads
/// `<response_dir>/<cve_id>.txt` when present.
class FileTransport : public LlmTransport {
 public:
  FileTransport(std::filesystem::path prompt_dir, std::filesystem::path response_dir);
  std::optional<std::string> complete(const LlmPrompt& prompt) override;

 private:
  std::filesystem::path prompt_dir_;
  std::filesystem::path response_dir_;
};

/// Chat-completion client: POSTs {model, messages} to
/// <base_url>/v1/chat/completions and returns the first choice's text.
class HttpTransport : public LlmTransport {
 public:
  HttpTransport(std::string base_url, std::string model);
  std::optional<std::string> complete(const LlmPrompt& prompt) override;
  const std::string& last_error() const { return last_error_; }

 private:
  std::string base_url_;
  std::string model_;
  std::string last_error_;
};

}  // namespace archsec
