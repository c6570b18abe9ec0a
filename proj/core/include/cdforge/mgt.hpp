#pragma once

#include "cdforge/dterm.hpp"
#include "cdforge/term.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdforge {

using AxiomMap = std::map<std::string, Term>;

/// A CD problem: unit axioms under an implicit unary predicate, detachment,
/// and a ground goal.
struct Problem {
	std::string id;
	AxiomMap axioms;
	Term goal = Term::constant("true");
	std::map<std::string, std::string> metadata;

	/// Throws std::invalid_argument unless the goal is ground and there is at
	/// least one axiom.
	void validate() const;
};

/// A D-term leaf whose label is missing from the axiom map.
class UnmappedLeafError : public std::invalid_argument {
public:
	explicit UnmappedLeafError(const std::string& label)
		: std::invalid_argument("leaf label '" + label + "' has no axiom"), label_(label) {}
	const std::string& label() const noexcept { return label_; }

private:
	std::string label_;
};

/// One detachment step: from major i(A,B) and minor A' infer B under the mgu
/// of A and A'. Premises are renamed apart first; the result is canonical.
std::optional<Term> cd_step(const Term& major, const Term& minor);

/// Most general theorem of d, computed over its minimal DAG (one cd_step per
/// distinct compound subterm). nullopt if some step fails to unify.
std::optional<Term> mgt(const DTerm& d, const AxiomMap& axioms);

/// MGT of every distinct subterm of d, keyed by subterm. Entries are absent
/// for subterms without an MGT.
DTermMap<Term> mgt_table(const DTerm& d, const AxiomMap& axioms);

/// Most general m such that cd_step(major, m) subsumes conclusion.
std::optional<Term> infer_minor(const Term& major, const Term& conclusion);

struct VerificationReport {
	bool proved = false;
	std::optional<Term> mgt;
	DMeasures measures;
	/// D-terms of the innermost subproofs whose detachment step failed.
	std::vector<std::string> failures;

	std::string to_text() const;
	std::string to_json() const;
};

VerificationReport verify(const DTerm& d, const Problem& p);

} // namespace cdforge
