#pragma once

#include "cdforge/lemma.hpp"
#include "cdforge/mgt.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdforge {

/// Input outside the supported CNF fragment. `clause()` names the offending
/// statement when there is one.
class TptpError : public std::invalid_argument {
public:
	TptpError(const std::string& clause, const std::string& reason)
		: std::invalid_argument(clause.empty() ? reason : "clause '" + clause + "': " + reason), clause_(clause) {}
	const std::string& clause() const noexcept { return clause_; }

private:
	std::string clause_;
};

/// Reads `cnf(name, role, clause).` statements with `%` and block comments.
/// The detachment clause is recognized by shape under any literal order and
/// variable naming; its binary symbol becomes `i` internally. Axioms get the
/// labels 1..n in file order. Variables are lowercased (X to x) when that
/// yields valid variable names, else renamed canonically. Names of the
/// predicate, the implication symbol and the clauses are kept in
/// Problem::metadata for export.
Problem parse_tptp_cd(std::string_view text, const std::string& id = {});

/// Det clause, axioms in label order, the goal, then one
/// `cnf(lemma_<i>, axiom, P(...)).` per lemma with variables uppercased.
std::string export_tptp(const Problem& p, const std::vector<LemmaRecord>& lemmas = {});

/// Axiom labels ordered numerically where possible (1, 2, ..., 10, L1).
std::vector<std::string> ordered_axiom_labels(const AxiomMap& axioms);

} // namespace cdforge
