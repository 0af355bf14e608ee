#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "synthsusp/error.hpp"

namespace synthsusp {

/// One recognized report section: canonical upper-case name plus the body
/// text and its [begin, end) offsets inside the raw report.
struct ReportSection {
  std::string body;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct ReportDocument {
  std::string raw_text;
  // Ordered by first appearance; canonical keys (FINDINGS, IMPRESSION, ...).
  std::vector<std::pair<std::string, ReportSection>> sections;

  const ReportSection* find(const std::string& name) const;
};

/// Span of matched evidence, as [begin, end) offsets into raw_text.
struct EvidenceSpan {
  std::string section;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct NegativityVerdict {
  bool is_negative = false;
  bool criterion_findings = false;
  bool criterion_impression = false;
  std::vector<EvidenceSpan> evidence;
};

/// The editable pattern sets driving classification. All patterns are
/// case-insensitive ECMAScript regexes applied to whitespace-normalized text.
struct RuleSet {
  std::vector<std::string> findings_negative;
  std::vector<std::string> impression_negative;
  std::vector<std::string> positive_override;
};

RuleSet default_rules();

/// Rules file: JSON {findings_negative:[regex], impression_negative:[regex],
/// positive_override:[regex]}.
RuleSet load_rules(const std::filesystem::path& path);

/// Splits on lines matching
/// ^\s*(FINDINGS?|IMPRESSION|INDICATION|TECHNIQUE|COMPARISON)\s*: (case-
/// insensitive). Text before the first header lands in PREAMBLE. FINDING is
/// canonicalized to FINDINGS.
ReportDocument split_sections(const std::string& raw);

/// Applies the two negativity criteria. Throws Unclassifiable when FINDINGS
/// or IMPRESSION is absent; that is distinct from a not-negative verdict.
NegativityVerdict classify(const ReportDocument& doc,
                           const RuleSet& rules = default_rules());

}  // namespace synthsusp
