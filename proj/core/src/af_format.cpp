#include "gradarg/af_format.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>

namespace gradarg {

SourceDocument read_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return {ss.str(), path};
}

std::string format_error(const ParseError& e, const std::string& origin) {
  return origin + ":" + std::to_string(e.line) + ":" + std::to_string(e.column) + ": " +
         std::string(to_string(e.code)) + ": " + e.message;
}

namespace {

struct Token {
  std::string text;  // key=value tokens keep the raw key and unquoted value
  int column = 1;
  bool quoted = false;
};

struct Located {
  int line = 1;
  int column = 1;
};

struct ArgDecl {
  Argument arg;
  Located at;
  Located owner_at;
  std::vector<Located> derived_at;
};

struct RelDecl {
  Relation rel;
  Located at;
  Located source_at;
  Located target_at;
};

struct PrefDecl {
  PreferenceEntry entry;
  Located at;
  Located user_at;
  Located option_at;
};

class Parser {
public:
  explicit Parser(const SourceDocument& doc) : doc_(doc) {}

  ParseResult run() {
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= doc_.text.size()) {
      auto end = doc_.text.find('\n', pos);
      if (end == std::string::npos) end = doc_.text.size();
      std::string_view line(doc_.text.data() + pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no;
      parse_line(line, line_no);
      if (end == doc_.text.size()) break;
      pos = end + 1;
    }
    resolve();
    ParseResult result;
    if (errors_.empty()) build(result);
    result.errors = std::move(errors_);
    return result;
  }

private:
  void error(int line, int column, ErrorCode code, std::string message) {
    errors_.push_back({line, column, code, std::move(message)});
  }

  bool tokenize(std::string_view line, int line_no, std::vector<Token>& tokens) {
    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (c == ' ' || c == '\t') {
        ++i;
        continue;
      }
      if (c == '#') break;
      Token tok;
      tok.column = static_cast<int>(i) + 1;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
        if (line[i] == '"') {
          tok.quoted = true;
          ++i;
          bool closed = false;
          while (i < line.size()) {
            if (line[i] == '\\' && i + 1 < line.size()) {
              const char n = line[i + 1];
              tok.text += n == 'n' ? '\n' : n;
              i += 2;
            } else if (line[i] == '"') {
              closed = true;
              ++i;
              break;
            } else {
              tok.text += line[i++];
            }
          }
          if (!closed) {
            error(line_no, tok.column, ErrorCode::Syntax, "unterminated string");
            return false;
          }
        } else if (line[i] == '#' && !tok.quoted) {
          break;
        } else {
          tok.text += line[i++];
        }
      }
      tokens.push_back(std::move(tok));
      if (i < line.size() && line[i] == '#') break;
    }
    return true;
  }

  std::optional<ArgumentId> parse_id(const Token& tok, int line_no) {
    auto id = normalize_id(tok.text);
    if (!is_valid_id(id)) {
      error(line_no, tok.column, ErrorCode::Syntax, "invalid identifier '" + tok.text + "'");
      return std::nullopt;
    }
    return id;
  }

  std::optional<double> parse_score(std::string_view text, int line_no, int column) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) {
      error(line_no, column, ErrorCode::Syntax, "malformed number '" + std::string(text) + "'");
      return std::nullopt;
    }
    if (!(value >= 0.0 && value <= 1.0)) {
      error(line_no, column, ErrorCode::BadScore, "score " + std::string(text) + " outside [0,1]");
      return std::nullopt;
    }
    return value;
  }

  // Splits key=value attribute tokens; rejects unknown or repeated keys.
  bool attributes(const std::vector<Token>& tokens, std::size_t from, int line_no, const std::set<std::string>& allowed,
                  std::map<std::string, Token>& out) {
    bool ok = true;
    for (std::size_t i = from; i < tokens.size(); ++i) {
      const auto& tok = tokens[i];
      const auto eq = tok.text.find('=');
      if (eq == std::string::npos) {
        error(line_no, tok.column, ErrorCode::Syntax, "expected key=value, got '" + tok.text + "'");
        ok = false;
        continue;
      }
      std::string key = tok.text.substr(0, eq);
      if (!allowed.count(key)) {
        error(line_no, tok.column, ErrorCode::Syntax, "unknown attribute '" + key + "'");
        ok = false;
        continue;
      }
      Token value{tok.text.substr(eq + 1), tok.column + static_cast<int>(eq) + 1, tok.quoted};
      if (!out.emplace(key, value).second) {
        error(line_no, tok.column, ErrorCode::Syntax, "attribute '" + key + "' given twice");
        ok = false;
      }
    }
    return ok;
  }

  void declare(const ArgumentId& id, Located at) {
    if (!declared_.emplace(id, at).second) {
      error(at.line, at.column, ErrorCode::DuplicateId, "argument '" + id + "' already declared on line " +
                                                            std::to_string(declared_.at(id).line));
    }
  }

  void parse_line(std::string_view line, int line_no) {
    std::vector<Token> tokens;
    if (!tokenize(line, line_no, tokens) || tokens.empty()) return;
    const auto& head = tokens[0].text;
    auto arity_error = [&](const char* usage) {
      error(line_no, tokens[0].column, ErrorCode::Syntax, std::string("usage: ") + usage);
    };

    if (head == "option") {
      if (tokens.size() < 2) return arity_error("option <id> [label=\"...\"] [base=<float>]");
      auto id = parse_id(tokens[1], line_no);
      std::map<std::string, Token> attrs;
      const bool ok = attributes(tokens, 2, line_no, {"label", "base"}, attrs);
      if (!id) return;
      ArgDecl d;
      d.arg.id = *id;
      d.arg.kind = ArgumentKind::Option;
      d.arg.active = true;
      d.at = {line_no, tokens[1].column};
      if (attrs.count("label")) d.arg.label = attrs["label"].text;
      if (attrs.count("base")) {
        auto s = parse_score(attrs["base"].text, line_no, attrs["base"].column);
        if (s) d.arg.base_score = *s;
      }
      declare(*id, d.at);
      if (ok) options_.push_back(*id);
      args_.push_back(std::move(d));
    } else if (head == "arg") {
      if (tokens.size() < 2) return arity_error("arg <id> kind=<user|task> [owner=..] [base=..] [active=..]");
      auto id = parse_id(tokens[1], line_no);
      std::map<std::string, Token> attrs;
      attributes(tokens, 2, line_no, {"kind", "owner", "base", "active", "label", "derived_active_from"}, attrs);
      if (!id) return;
      ArgDecl d;
      d.arg.id = *id;
      d.at = {line_no, tokens[1].column};
      declare(*id, d.at);
      if (!attrs.count("kind")) {
        error(line_no, tokens[1].column, ErrorCode::Syntax, "argument '" + *id + "' needs kind=user or kind=task");
      } else if (attrs["kind"].text == "user") {
        d.arg.kind = ArgumentKind::User;
      } else if (attrs["kind"].text == "task") {
        d.arg.kind = ArgumentKind::Task;
      } else {
        error(line_no, attrs["kind"].column, ErrorCode::Syntax, "kind must be user or task");
      }
      if (attrs.count("owner")) {
        if (d.arg.kind != ArgumentKind::User) {
          error(line_no, attrs["owner"].column, ErrorCode::Syntax, "only user arguments take an owner");
        }
        d.arg.owner = attrs["owner"].text;
        d.owner_at = {line_no, attrs["owner"].column};
      } else if (d.arg.kind == ArgumentKind::User) {
        error(line_no, tokens[1].column, ErrorCode::Syntax, "user argument '" + *id + "' needs owner=<user>");
      }
      if (attrs.count("base")) {
        auto s = parse_score(attrs["base"].text, line_no, attrs["base"].column);
        if (s) d.arg.base_score = *s;
      }
      if (attrs.count("active")) {
        const auto& v = attrs["active"].text;
        if (v == "true") {
          d.arg.active = true;
        } else if (v != "false") {
          error(line_no, attrs["active"].column, ErrorCode::Syntax, "active must be true or false");
        }
      }
      if (attrs.count("label")) d.arg.label = attrs["label"].text;
      if (attrs.count("derived_active_from")) {
        const auto& tok = attrs["derived_active_from"];
        std::size_t start = 0;
        while (start <= tok.text.size()) {
          auto comma = tok.text.find(',', start);
          if (comma == std::string::npos) comma = tok.text.size();
          const int col = tok.column + static_cast<int>(start);
          auto ref = parse_id(Token{tok.text.substr(start, comma - start), col, false}, line_no);
          if (ref) {
            d.arg.derived_active_from.push_back(*ref);
            d.derived_at.push_back({line_no, col});
          }
          start = comma + 1;
        }
      }
      args_.push_back(std::move(d));
    } else if (head == "att" || head == "sup") {
      if (tokens.size() != 3) return arity_error("att|sup <source> <target>");
      auto s = parse_id(tokens[1], line_no);
      auto t = parse_id(tokens[2], line_no);
      if (!s || !t) return;
      RelDecl d;
      d.rel = {*s, *t, head == "att" ? Polarity::Attack : Polarity::Support};
      d.at = {line_no, tokens[0].column};
      d.source_at = {line_no, tokens[1].column};
      d.target_at = {line_no, tokens[2].column};
      rels_.push_back(std::move(d));
    } else if (head == "user") {
      if (tokens.size() != 2) return arity_error("user <id>");
      auto id = parse_id(tokens[1], line_no);
      if (!id) return;
      if (!users_.emplace(*id, Located{line_no, tokens[1].column}).second) {
        error(line_no, tokens[1].column, ErrorCode::DuplicateId, "user '" + *id + "' already declared");
      }
    } else if (head == "pref") {
      if (tokens.size() != 4) return arity_error("pref <user> <option> <+|-|0>");
      auto u = parse_id(tokens[1], line_no);
      auto o = parse_id(tokens[2], line_no);
      std::optional<PreferenceSign> sign;
      try {
        sign = parse_sign(tokens[3].text);
      } catch (const Error& e) {
        error(line_no, tokens[3].column, ErrorCode::Syntax, e.what());
      }
      if (!u || !o || !sign) return;
      prefs_.push_back({{*u, *o, *sign}, {line_no, tokens[0].column}, {line_no, tokens[1].column},
                        {line_no, tokens[2].column}});
    } else {
      error(line_no, tokens[0].column, ErrorCode::Syntax, "unknown directive '" + head + "'");
    }
  }

  void resolve() {
    std::set<ArgumentId> option_ids(options_.begin(), options_.end());
    for (const auto& d : args_) {
      if (d.arg.owner && !users_.count(*d.arg.owner)) {
        error(d.owner_at.line, d.owner_at.column, ErrorCode::UnknownReference,
              "owner '" + *d.arg.owner + "' is not a declared user");
      }
      for (std::size_t i = 0; i < d.arg.derived_active_from.size(); ++i) {
        const auto& ref = d.arg.derived_active_from[i];
        if (!declared_.count(ref)) {
          error(d.derived_at[i].line, d.derived_at[i].column, ErrorCode::UnknownReference,
                "derived_active_from names undeclared argument '" + ref + "'");
        }
      }
    }
    std::map<std::pair<ArgumentId, ArgumentId>, int> seen;
    for (const auto& d : rels_) {
      bool ok = true;
      if (!declared_.count(d.rel.source)) {
        error(d.source_at.line, d.source_at.column, ErrorCode::UnknownReference,
              "relation source '" + d.rel.source + "' is not declared");
        ok = false;
      }
      if (!declared_.count(d.rel.target)) {
        error(d.target_at.line, d.target_at.column, ErrorCode::UnknownReference,
              "relation target '" + d.rel.target + "' is not declared");
        ok = false;
      }
      if (d.rel.source == d.rel.target) {
        error(d.at.line, d.at.column, ErrorCode::Cycle, "argument '" + d.rel.source + "' relates to itself");
        ok = false;
      }
      auto [it, inserted] = seen.emplace(std::pair{d.rel.source, d.rel.target}, d.at.line);
      if (!inserted) {
        error(d.at.line, d.at.column, ErrorCode::DuplicateRelation,
              "relation " + d.rel.source + " -> " + d.rel.target + " already declared on line " +
                  std::to_string(it->second));
        ok = false;
      }
      if (ok) relation_lines_.emplace(std::pair{d.rel.source, d.rel.target}, d.at);
    }
    std::map<std::pair<UserId, OptionId>, PreferenceSign> signs;
    for (const auto& d : prefs_) {
      if (!users_.count(d.entry.user)) {
        error(d.user_at.line, d.user_at.column, ErrorCode::UnknownReference,
              "preference for undeclared user '" + d.entry.user + "'");
        continue;
      }
      if (!option_ids.count(d.entry.option)) {
        error(d.option_at.line, d.option_at.column, ErrorCode::UnknownReference,
              "'" + d.entry.option + "' is not a declared option");
        continue;
      }
      auto [it, inserted] = signs.emplace(std::pair{d.entry.user, d.entry.option}, d.entry.sign);
      if (!inserted && it->second != d.entry.sign) {
        error(d.at.line, d.at.column, ErrorCode::ConflictingSign,
              "user '" + d.entry.user + "' already has a different sign for '" + d.entry.option + "'");
      }
    }
  }

  void build(ParseResult& result) {
    std::vector<Argument> args;
    for (const auto& d : args_) args.push_back(d.arg);
    std::vector<Relation> rels;
    for (const auto& d : rels_) rels.push_back(d.rel);
    std::set<UserId> users;
    for (const auto& [u, _] : users_) users.insert(u);
    PreferenceProfile prefs;
    for (const auto& d : prefs_) prefs.set(d.entry.user, d.entry.option, d.entry.sign);

    std::optional<Framework> framework;
    try {
      framework.emplace(std::move(args), std::move(rels), options_, std::move(users), std::move(prefs));
    } catch (const Error& e) {
      error(1, 1, e.code(), e.what());
      return;
    }
    const auto report = validate_structure(*framework);
    for (const auto& issue : report.errors) {
      if (issue.code == "OPTION_HAS_OUTGOING") {
        const auto arrow = issue.subject.find("->");
        const auto key = std::pair{issue.subject.substr(0, arrow), issue.subject.substr(arrow + 2)};
        const auto at = relation_lines_.at(key);
        error(at.line, at.column, ErrorCode::OptionHasOutgoing, issue.message);
      } else {
        const auto at = declared_.at(issue.subject);
        error(at.line, at.column, ErrorCode::Cycle, issue.message);
      }
    }
    if (errors_.empty()) result.framework = std::move(framework);
  }

  const SourceDocument& doc_;
  std::vector<ParseError> errors_;
  std::map<ArgumentId, Located> declared_;
  std::vector<ArgDecl> args_;
  std::vector<ArgumentId> options_;
  std::vector<RelDecl> rels_;
  std::map<std::pair<ArgumentId, ArgumentId>, Located> relation_lines_;
  std::map<UserId, Located> users_;
  std::vector<PrefDecl> prefs_;
};

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

}  // namespace

ParseResult parse_framework(const SourceDocument& doc) { return Parser(doc).run(); }

Framework parse_framework_or_throw(const SourceDocument& doc) {
  auto result = parse_framework(doc);
  if (result.ok()) return std::move(*result.framework);
  std::string message;
  for (const auto& e : result.errors) {
    if (!message.empty()) message += '\n';
    message += format_error(e, doc.origin);
  }
  throw Error(ErrorCode::InvalidAf, message);
}

std::string serialize_framework(const Framework& f) {
  std::ostringstream out;
  for (const auto& id : f.options()) {
    const auto& a = f.at(id);
    out << "option " << id;
    if (!a.label.empty()) out << " label=" << quote(a.label);
    if (a.base_score != 0.5) out << " base=" << format_score(a.base_score);
    out << '\n';
  }
  for (const auto& u : f.users()) out << "user " << u << '\n';
  for (const auto& [id, a] : f.arguments()) {
    if (a.kind == ArgumentKind::Option) continue;
    out << "arg " << id << " kind=" << to_string(a.kind);
    if (a.owner) out << " owner=" << *a.owner;
    out << " base=" << format_score(a.base_score) << " active=" << (a.active ? "true" : "false");
    if (!a.derived_active_from.empty()) {
      out << " derived_active_from=";
      for (std::size_t i = 0; i < a.derived_active_from.size(); ++i) {
        out << (i ? "," : "") << a.derived_active_from[i];
      }
    }
    if (!a.label.empty()) out << " label=" << quote(a.label);
    out << '\n';
  }
  for (const auto& r : f.relations()) out << to_string(r.polarity) << ' ' << r.source << ' ' << r.target << '\n';
  for (const auto& [key, sign] : f.preferences().entries()) {
    out << "pref " << key.first << ' ' << key.second << ' ' << to_char(sign) << '\n';
  }
  return out.str();
}

}  // namespace gradarg
