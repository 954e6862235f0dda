#pragma once

#include "gradarg/af_format.hpp"
#include "gradarg/analysis.hpp"
#include "gradarg/model.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace gradarg {

/// Scenario descriptor, a small TOML subset:
///
///   name = "..."            framework = "file.af"
///   toggles = ["A", ...]    risk = ["T1"]          prose_labels = [...]
///   [derived]       T1 = ["T2", "T3"]
///   [preferences]   cg = { R = "-", not_R = "+" }
///
/// Supported values: basic strings, arrays of strings (may span lines),
/// inline tables of strings. `#` comments.
struct ScenarioDescriptor {
  std::string name;
  std::string framework_file;
  std::vector<ArgumentId> toggles;
  std::vector<ArgumentId> risk;
  std::map<ArgumentId, std::vector<ArgumentId>> derived;
  std::vector<PreferenceEntry> preferences;
  std::set<ArgumentId> prose_labels;
};

/// Throws Error(Syntax) with "origin:line: message".
ScenarioDescriptor parse_descriptor(const SourceDocument& doc);

struct CorpusEntry {
  std::string name;
  SourceDocument document;
  ScenarioDescriptor descriptor;
  Framework framework;  // .af content with the descriptor's derived rules and preferences applied
  Scenario scenario;
  /// "prose" for labels taken from the case-study text, "placeholder" otherwise.
  std::map<ArgumentId, std::string> provenance;
};

/// GRADARG_CORPUS_DIR if set, otherwise the directory compiled into the library.
std::string corpus_dir();

/// Maps the short aliases frailty_s1 / frailty_s2 to their full names.
std::string canonical_corpus_name(const std::string& name);

/// Names of the descriptors found in `dir`, sorted.
std::vector<std::string> list_corpora(const std::string& dir = corpus_dir());

/// Loads `<dir>/<name>.toml` and the framework it names. Throws
/// Error(UnknownCorpus) for a missing descriptor, Error(InvalidAf) for a bad framework.
CorpusEntry load_corpus(const std::string& name, const std::string& dir = corpus_dir());

/// Wraps an uploaded framework: every non-option argument becomes a toggle.
CorpusEntry corpus_from_document(const SourceDocument& doc);

/// Either a corpus name (or alias) or a path to an .af file.
CorpusEntry load_corpus_or_file(const std::string& name_or_path, const std::string& dir = corpus_dir());

}  // namespace gradarg
