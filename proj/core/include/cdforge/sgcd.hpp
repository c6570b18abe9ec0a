#pragma once

#include "cdforge/lemma.hpp"
#include "cdforge/mgt.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cdforge {

enum class Generator { tsize, height, psp };
enum class LemmaMode { replace, axioms };

std::string to_string(Generator g);
Generator parse_generator(const std::string& s);
std::string to_string(LemmaMode m);
LemmaMode parse_lemma_mode(const std::string& s);

/// Formula measures usable in the cache ordering key.
enum class OrderField { tsize, height, csize, distinct_vars };

struct Triple {
	std::uint64_t level;
	DTerm dterm;
	Term formula;
};

struct SearchConfig {
	Generator generator = Generator::tsize;
	std::uint64_t max_level = 12;
	std::uint64_t pre_add_max_level = 0;
	std::size_t cache_limit = 1000;
	double formula_size_factor = 3.0;
	std::optional<std::uint64_t> inference_limit;
	std::optional<double> time_limit_seconds;
	bool subsumption_deletion = true;
	/// Compared lexicographically; canonical formula text and D-term text
	/// always follow as tie-breakers.
	std::vector<OrderField> ordering = {OrderField::tsize, OrderField::height};
	std::vector<LemmaRecord> seeds;
	LemmaMode lemma_mode = LemmaMode::replace;
};

struct SearchStats {
	std::uint64_t levels_completed = 0;
	std::uint64_t triples_generated = 0;
	std::uint64_t triples_cached = 0;
	std::uint64_t inferences = 0;
	double wall_time = 0.0;
};

struct SearchOutcome {
	enum class Status { proved, exhausted, limit_reached };
	Status status = Status::exhausted;
	std::optional<DTerm> proof;
	SearchStats stats;

	bool proved() const { return status == Status::proved; }
	std::string to_json() const;
};

std::string to_string(SearchOutcome::Status s);

struct SearchState {
	/// Level -> triples, each slot kept sorted by the ordering key.
	std::map<std::uint64_t, std::vector<Triple>> cache;
	std::vector<Triple> abandoned;
	std::uint64_t inferences = 0;
	std::uint64_t triples_generated = 0;

	std::size_t cache_size() const;
};

/// One SGCD run over a fixed problem. Not thread-safe; independent instances
/// may run concurrently.
class Search {
public:
	Search(Problem problem, SearchConfig cfg);
	~Search();
	Search(const Search&) = delete;
	Search& operator=(const Search&) = delete;

	/// Axiom-driven generation of one level from the current cache. Oversized
	/// formulas are moved to abandoned; the kept triples are returned.
	std::vector<Triple> generate_level(std::uint64_t level);
	/// Number of triples the last generate_level call abandoned for size.
	std::size_t last_oversized() const;

	void merge(std::vector<Triple> news);

	/// Goal-driven attempt: a D-term at `level` whose MGT subsumes the goal.
	std::optional<DTerm> goal_driven(std::uint64_t level);

	/// The full nested loop. May be called once.
	SearchOutcome run();

	const SearchState& state() const;
	const Problem& problem() const;
	/// Expands lemma leaves introduced in axioms mode.
	DTerm to_original(const DTerm& d) const;
	/// Upper bound on formula tsize for cached triples.
	std::uint64_t size_bound() const;

private:
	struct Impl;
	std::unique_ptr<Impl> impl_;
};

SearchOutcome sgcd_prove(const Problem& p, const SearchConfig& cfg);

/// Level of a D-term under a generator (psp uses tsize as an upper bound).
std::uint64_t generator_level(Generator g, const DTerm& d);

/// Orders triples best first under cfg.ordering.
bool triple_less(const Triple& a, const Triple& b, const std::vector<OrderField>& ordering);

struct CandidateResult {
	SearchOutcome outcome;
	/// Compound cache and abandoned entries, best first; when the goal was hit
	/// the proof is included and flagged by `proof`.
	std::vector<LemmaRecord> lemmas;
	std::optional<DTerm> proof;
};

/// Axiom-driven lemma generation (pre-add forced to 0).
CandidateResult generate_candidates(const Problem& p, SearchConfig cfg);

/// Replaces leaves labeled by `lemma_labels` with their D-terms.
DTerm expand_lemma_leaves(const DTerm& d, const std::map<std::string, DTerm>& lemma_labels);

} // namespace cdforge
