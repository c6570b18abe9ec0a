#pragma once

#include "cdforge/features.hpp"
#include "cdforge/model.hpp"
#include "cdforge/sgcd.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdforge {

/// One lemma per distinct compound subproof of a verified proof, in
/// post-order. Throws std::invalid_argument if the proof does not verify.
std::vector<LemmaRecord> extract_lemma_instances(const DTerm& proof, const Problem& p);

struct TrainingExample {
	std::string problem;
	LemmaRecord lemma;
	/// In [-1, 1].
	double utility;
	FeatureVector features;
};

/// The baseline search did not prove the problem within its limits.
class LabelingError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

struct LabelingResult {
	std::uint64_t baseline_inferences = 0;
	std::vector<TrainingExample> examples;
};

/// Reproves p with each lemma added as an axiom, limited to the baseline
/// inference count I0. Unsolved gives -1; otherwise the reduction
/// r = I0 - I is scaled by the best reduction r* when r* > 0 and by I0
/// when no lemma helps.
LabelingResult label_utilities(const Problem& p, const std::vector<LemmaRecord>& lemmas, const SearchConfig& cfg,
							   const std::optional<DTerm>& containing_proof = std::nullopt,
							   const NameTable& names = NameTable::builtin());

void write_examples(std::ostream& out, const std::vector<TrainingExample>& examples);
/// Re-reads features as stored; lemma formulas are parsed, not recomputed.
std::vector<TrainingExample> read_examples(std::istream& in);

LinearModel train_on_examples(const std::vector<TrainingExample>& data, const TrainParams& hp);

/// Scores every candidate in the context of p and returns the k best with
/// their scores set. Ties go to the smaller canonical formula text, then the
/// smaller D-term tree size, then D-term text.
std::vector<LemmaRecord> select_top_k(const LinearModel& model, const std::vector<LemmaRecord>& candidates,
									  const Problem& p, std::size_t k, const NameTable& names = NameTable::builtin());

/// Fallback without a model: the k best by (formula tsize, height, text).
std::vector<LemmaRecord> select_heuristic(const std::vector<LemmaRecord>& candidates, std::size_t k);

/// Subproof closure of the selected D-terms as lemma records (leaves
/// dropped), ordered by D-term tree size then text.
std::vector<LemmaRecord> close_and_export(const std::vector<LemmaRecord>& selected, const Problem& p);

struct UsageReport {
	std::size_t a = 0; ///< closed lemma count
	std::size_t b = 0; ///< proof csize
	std::size_t c = 0; ///< proof compounds found in the closed set
	double d = 0.0;	   ///< c / b
	std::size_t e = 0; ///< proof compounds found in the selected set
	double f = 0.0;	   ///< e / b

	std::string to_json() const;
};

/// For a proof with no compound subproofs (b = 0) the ratios are 1.
UsageReport analyze_usage(const DTerm& proof, const std::vector<LemmaRecord>& selected,
						  const std::vector<LemmaRecord>& closed);

} // namespace cdforge
