#pragma once

#include "cdforge/lemma.hpp"
#include "cdforge/mgt.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cdforge {

/// The 50 numeric features that form the model input, in model order.
const std::vector<std::string>& feature_roster();

struct FeatureVector {
	/// Roster order.
	std::vector<std::pair<std::string, double>> values;
	/// Proof-context features (lfp_*); empty without a containing proof.
	std::map<std::string, double> meta;
	std::string containing_proof;
	/// lf_hb_name; "zzz" when unnamed.
	std::string name = "zzz";

	/// Throws std::out_of_range for unknown names.
	double get(std::string_view feature) const;
	std::vector<double> numeric() const;
};

/// Well-known formulas recognized up to variable renaming.
class NameTable {
public:
	/// Contains Mingle and Syll.
	static NameTable builtin();
	void add(std::string name, Term formula);
	std::optional<std::string> lookup(const Term& formula) const;

private:
	std::vector<std::pair<std::string, Term>> entries_;
};

/// Formula compression ratios in [0,1]; smaller means more regular.
double compression_ratio_dag(const Term& t);
double compression_ratio_raw_deflate(const Term& t);
double compression_ratio_treerepair(const Term& t);

/// 0 when no proper subterm is a two-valued tautology, 2 otherwise.
/// Constants count as propositional variables; subterms using symbols other
/// than i/2 and n/1, or with more than 20 variables, are never tautologies.
int organic_status(const Term& t);
bool is_tautology(const Term& t);

/// Lemma features in the context of problem p. Proof-context metadata is
/// filled only when `containing_proof` is given; `proof_id` names it.
FeatureVector extract_features(const LemmaRecord& lemma, const Problem& p,
							   const std::optional<DTerm>& containing_proof = std::nullopt,
							   const NameTable& names = NameTable::builtin(), const std::string& proof_id = {});

} // namespace cdforge
