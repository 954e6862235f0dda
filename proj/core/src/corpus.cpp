#include "gradarg/corpus.hpp"

#include "gradarg/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>

#ifndef GRADARG_DEFAULT_CORPUS_DIR
#define GRADARG_DEFAULT_CORPUS_DIR "corpus"
#endif

namespace gradarg {

namespace fs = std::filesystem;

namespace {

class DescriptorReader {
public:
  explicit DescriptorReader(const SourceDocument& doc) : doc_(doc) {}

  ScenarioDescriptor run() {
    ScenarioDescriptor d;
    std::string section;
    while (!at_end()) {
      skip_blank();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        section = bare_key();
        expect(']');
        end_of_line();
        if (section != "derived" && section != "preferences") fail("unknown section [" + section + "]");
        continue;
      }
      const auto key = key_token();
      skip_spaces();
      expect('=');
      skip_spaces();
      if (section.empty()) {
        if (key == "name") {
          d.name = string_value();
        } else if (key == "framework") {
          d.framework_file = string_value();
        } else if (key == "toggles") {
          d.toggles = ids(string_array());
        } else if (key == "risk") {
          d.risk = ids(string_array());
        } else if (key == "prose_labels") {
          const auto list = ids(string_array());
          d.prose_labels.insert(list.begin(), list.end());
        } else {
          fail("unknown key '" + key + "'");
        }
      } else if (section == "derived") {
        d.derived[normalize_id(key)] = ids(string_array());
      } else {
        for (const auto& [option, sign] : inline_table()) {
          try {
            d.preferences.push_back({key, normalize_id(option), parse_sign(sign)});
          } catch (const Error& e) {
            fail(e.what());
          }
        }
      }
      end_of_line();
    }
    return d;
  }

private:
  bool at_end() const { return pos_ >= doc_.text.size(); }
  char peek() const { return at_end() ? '\0' : doc_.text[pos_]; }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::Syntax, doc_.origin + ":" + std::to_string(line_) + ": " + message);
  }

  void skip_spaces() {
    while (peek() == ' ' || peek() == '\t' || peek() == '\r') ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }

  // Whitespace, comments and newlines.
  void skip_blank() {
    for (;;) {
      skip_spaces();
      skip_comment();
      if (peek() != '\n') return;
      ++pos_;
      ++line_;
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (at_end()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "'");
    ++pos_;
    ++line_;
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string bare_key() {
    std::string key;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
      key += doc_.text[pos_++];
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::string key_token() { return peek() == '"' ? string_value() : bare_key(); }

  std::string string_value() {
    expect('"');
    std::string out;
    while (!at_end() && peek() != '"') {
      if (peek() == '\n') fail("unterminated string");
      if (peek() == '\\') {
        ++pos_;
        const char c = peek();
        if (c == 'n') {
          out += '\n';
        } else if (c == '"' || c == '\\') {
          out += c;
        } else {
          fail("unsupported escape");
        }
        ++pos_;
        continue;
      }
      out += doc_.text[pos_++];
    }
    expect('"');
    return out;
  }

  std::vector<std::string> string_array() {
    expect('[');
    std::vector<std::string> out;
    for (;;) {
      skip_blank();
      if (peek() == ']') break;
      out.push_back(string_value());
      skip_blank();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() != ']') fail("expected ',' or ']' in array");
    }
    ++pos_;
    return out;
  }

  std::vector<std::pair<std::string, std::string>> inline_table() {
    expect('{');
    std::vector<std::pair<std::string, std::string>> out;
    skip_spaces();
    while (peek() != '}') {
      auto key = key_token();
      skip_spaces();
      expect('=');
      skip_spaces();
      out.emplace_back(std::move(key), string_value());
      skip_spaces();
      if (peek() == ',') {
        ++pos_;
        skip_spaces();
      } else if (peek() != '}') {
        fail("expected ',' or '}' in inline table");
      }
    }
    ++pos_;
    return out;
  }

  static std::vector<ArgumentId> ids(const std::vector<std::string>& raw) {
    std::vector<ArgumentId> out;
    for (const auto& s : raw) out.push_back(normalize_id(s));
    return out;
  }

  const SourceDocument& doc_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

Framework apply_descriptor(const Framework& f, const ScenarioDescriptor& d) {
  auto args = f.argument_list();
  for (const auto& [id, sources] : d.derived) {
    auto it = std::find_if(args.begin(), args.end(), [&](const Argument& a) { return a.id == id; });
    if (it == args.end()) throw Error(ErrorCode::UnknownReference, "derived rule for unknown argument '" + id + "'");
    it->derived_active_from = sources;
  }
  PreferenceProfile prefs = f.preferences();
  for (const auto& p : d.preferences) prefs.set(p.user, p.option, p.sign);
  return Framework(std::move(args), f.relations(), f.options(), f.users(), std::move(prefs));
}

std::map<ArgumentId, std::string> provenance_of(const Framework& f, const std::set<ArgumentId>& prose) {
  std::map<ArgumentId, std::string> out;
  for (const auto& [id, a] : f.arguments()) {
    if (a.kind == ArgumentKind::Option) continue;
    out[id] = prose.count(id) ? "prose" : "placeholder";
  }
  return out;
}

}  // namespace

ScenarioDescriptor parse_descriptor(const SourceDocument& doc) { return DescriptorReader(doc).run(); }

std::string corpus_dir() {
  if (const char* env = std::getenv("GRADARG_CORPUS_DIR"); env && *env) return env;
  return GRADARG_DEFAULT_CORPUS_DIR;
}

std::string canonical_corpus_name(const std::string& name) {
  if (name == "frailty_s1") return "frailty_scenario1";
  if (name == "frailty_s2") return "frailty_scenario2";
  return name;
}

std::vector<std::string> list_corpora(const std::string& dir) {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".toml") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

CorpusEntry load_corpus(const std::string& raw_name, const std::string& dir) {
  const auto name = canonical_corpus_name(raw_name);
  const bool plain = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
  const fs::path descriptor_path = fs::path(dir) / (name + ".toml");
  if (!plain || !fs::exists(descriptor_path)) {
    throw Error(ErrorCode::UnknownCorpus, "no corpus named '" + raw_name + "' in " + dir);
  }
  CorpusEntry entry;
  entry.name = name;
  entry.descriptor = parse_descriptor(read_document(descriptor_path.string()));
  if (entry.descriptor.framework_file.empty()) entry.descriptor.framework_file = name + ".af";
  entry.document = read_document((fs::path(dir) / entry.descriptor.framework_file).string());
  entry.framework = apply_descriptor(parse_framework_or_throw(entry.document), entry.descriptor);
  entry.scenario.name = entry.descriptor.name.empty() ? name : entry.descriptor.name;
  entry.scenario.framework = entry.framework;
  entry.scenario.toggles = entry.descriptor.toggles;
  entry.scenario.risk = entry.descriptor.risk;
  for (const auto& t : entry.scenario.toggles) entry.framework.at(t);
  for (const auto& r : entry.scenario.risk) entry.framework.at(r);
  entry.provenance = provenance_of(entry.framework, entry.descriptor.prose_labels);
  return entry;
}

CorpusEntry corpus_from_document(const SourceDocument& doc) {
  CorpusEntry entry;
  entry.name = fs::path(doc.origin).stem().string();
  entry.document = doc;
  entry.framework = parse_framework_or_throw(doc);
  entry.scenario.name = entry.name;
  entry.scenario.framework = entry.framework;
  for (const auto& [id, a] : entry.framework.arguments()) {
    if (a.kind != ArgumentKind::Option) entry.scenario.toggles.push_back(id);
  }
  entry.provenance = provenance_of(entry.framework, {});
  return entry;
}

CorpusEntry load_corpus_or_file(const std::string& name_or_path, const std::string& dir) {
  if (fs::path(name_or_path).extension() == ".af" || name_or_path.find('/') != std::string::npos) {
    if (!fs::exists(name_or_path)) {
      // A bare corpus file name such as frailty_s2.af falls back to the bundled corpus.
      const auto stem = fs::path(name_or_path).stem().string();
      if (fs::exists(fs::path(dir) / (canonical_corpus_name(stem) + ".toml"))) return load_corpus(stem, dir);
    }
    return corpus_from_document(read_document(name_or_path));
  }
  return load_corpus(name_or_path, dir);
}

}  // namespace gradarg
