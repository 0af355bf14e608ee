#include "synthsusp/report_gate.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

namespace synthsusp {

namespace {

const std::regex kHeaderLine(
    R"(^\s*(FINDINGS?|IMPRESSION|INDICATION|TECHNIQUE|COMPARISON)\s*:)",
    std::regex::icase);

std::string canonical_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (name == "FINDING") name = "FINDINGS";
  return name;
}

// Whitespace-normalized copy of text plus, for each normalized character,
// the offset of the source character it came from.
struct NormalizedText {
  std::string text;
  std::vector<std::size_t> source_offset;
};

NormalizedText normalize_whitespace(const std::string& raw, std::size_t base) {
  NormalizedText out;
  bool pending_space = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const unsigned char c = raw[i];
    if (std::isspace(c)) {
      pending_space = !out.text.empty();
      continue;
    }
    if (pending_space) {
      out.text.push_back(' ');
      out.source_offset.push_back(base + i);  // the char after the gap
      pending_space = false;
    }
    out.text.push_back(static_cast<char>(c));
    out.source_offset.push_back(base + i);
  }
  return out;
}

struct SectionMatch {
  bool matched = false;
  std::vector<EvidenceSpan> spans;
};

SectionMatch match_any(const std::string& section_name,
                       const ReportSection& section,
                       const std::vector<std::string>& patterns) {
  SectionMatch result;
  const NormalizedText norm = normalize_whitespace(section.body, section.begin);
  for (const std::string& pattern : patterns) {
    std::regex re(pattern, std::regex::icase);
    std::smatch m;
    if (std::regex_search(norm.text, m, re) && m[0].length() > 0) {
      result.matched = true;
      const std::size_t nb = static_cast<std::size_t>(m.position(0));
      const std::size_t ne = nb + static_cast<std::size_t>(m.length(0)) - 1;
      result.spans.push_back({section_name, norm.source_offset[nb],
                              norm.source_offset[ne] + 1});
    }
  }
  return result;
}

}  // namespace

const ReportSection* ReportDocument::find(const std::string& name) const {
  for (const auto& [key, section] : sections) {
    if (key == name) return &section;
  }
  return nullptr;
}

RuleSet default_rules() {
  return RuleSet{
      {R"(\bno suspicious (target|lesion|finding))"},
      {R"(\bno (more than )?(mildly )?suspicious)", R"(\bPI-?RADS\s*[12]\b)"},
      {R"(\bPI-?RADS\s*[345]\b)", R"(\b(moderately|highly) suspicious\b)"},
  };
}

RuleSet load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoFailure, "cannot open rules file " + path.string());
  }
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::InvalidArgument,
                "rules file is not a JSON object: " + path.string());
  }
  RuleSet rules;
  auto read_list = [&](const char* key, std::vector<std::string>& dst) {
    if (!j.contains(key) || !j[key].is_array()) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string("rules file missing array '") + key + "'");
    }
    for (const auto& p : j[key]) {
      if (!p.is_string()) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string("non-string pattern under '") + key + "'");
      }
      dst.push_back(p.get<std::string>());
      std::regex probe(dst.back(), std::regex::icase);  // validate eagerly
      (void)probe;
    }
  };
  read_list("findings_negative", rules.findings_negative);
  read_list("impression_negative", rules.impression_negative);
  read_list("positive_override", rules.positive_override);
  return rules;
}

ReportDocument split_sections(const std::string& raw) {
  ReportDocument doc;
  doc.raw_text = raw;

  struct Header {
    std::string name;
    std::size_t line_begin;  // start of the header line
    std::size_t body_begin;  // just past the ':'
  };
  std::vector<Header> headers;

  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t eol = raw.find('\n', pos);
    if (eol == std::string::npos) eol = raw.size();
    const std::string line = raw.substr(pos, eol - pos);
    std::smatch m;
    if (std::regex_search(line, m, kHeaderLine,
                          std::regex_constants::match_continuous)) {
      headers.push_back({canonical_name(m[1].str()), pos,
                         pos + static_cast<std::size_t>(m[0].length())});
    }
    if (eol == raw.size()) break;
    pos = eol + 1;
  }

  auto add_section = [&](const std::string& name, std::size_t begin,
                         std::size_t end) {
    ReportSection s;
    s.begin = begin;
    s.end = end;
    s.body = raw.substr(begin, end - begin);
    doc.sections.emplace_back(name, std::move(s));
  };

  if (headers.empty()) {
    add_section("PREAMBLE", 0, raw.size());
    return doc;
  }
  if (headers.front().line_begin > 0) {
    add_section("PREAMBLE", 0, headers.front().line_begin);
  }
  for (std::size_t i = 0; i < headers.size(); ++i) {
    const std::size_t body_end =
        (i + 1 < headers.size()) ? headers[i + 1].line_begin : raw.size();
    add_section(headers[i].name, headers[i].body_begin, body_end);
  }
  return doc;
}

NegativityVerdict classify(const ReportDocument& doc, const RuleSet& rules) {
  const ReportSection* findings = doc.find("FINDINGS");
  const ReportSection* impression = doc.find("IMPRESSION");
  if (!findings || !impression) {
    throw Error(ErrorCode::Unclassifiable,
                std::string("report lacks required section: ") +
                    (!findings ? "FINDINGS" : "IMPRESSION"));
  }

  NegativityVerdict v;
  const SectionMatch f =
      match_any("FINDINGS", *findings, rules.findings_negative);
  const SectionMatch neg =
      match_any("IMPRESSION", *impression, rules.impression_negative);
  const SectionMatch over =
      match_any("IMPRESSION", *impression, rules.positive_override);

  v.criterion_findings = f.matched;
  v.criterion_impression = neg.matched && !over.matched;
  v.is_negative = v.criterion_findings && v.criterion_impression;
  for (const auto& s : f.spans) v.evidence.push_back(s);
  for (const auto& s : neg.spans) v.evidence.push_back(s);
  for (const auto& s : over.spans) v.evidence.push_back(s);
  return v;
}

}  // namespace synthsusp
