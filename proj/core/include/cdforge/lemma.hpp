#pragma once

#include "cdforge/dterm.hpp"
#include "cdforge/term.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cdforge {

inline constexpr const char* kFormatTag = "cdforge/v1";

/// A unit lemma: a proof structure and its most general theorem.
struct LemmaRecord {
	DTerm dterm;
	Term formula;
	/// Always empty; kept so records can carry Horn lemmas later.
	std::vector<Term> body;
	std::optional<double> score;
};

/// One JSON object per line, preceded by a {"format": ...} header line.
void write_lemmas(std::ostream& out, const std::vector<LemmaRecord>& lemmas);
/// Accepts files with or without the header line. Throws std::invalid_argument
/// with the offending line number on malformed input.
std::vector<LemmaRecord> read_lemmas(std::istream& in);

std::vector<LemmaRecord> load_lemmas(const std::string& path);
void save_lemmas(const std::string& path, const std::vector<LemmaRecord>& lemmas);

} // namespace cdforge
