#pragma once

#include "cdforge/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cdforge {

struct LoopConfig {
	std::vector<Problem> corpus;
	/// At least 1; iteration 0 is the plain prover sweep.
	std::size_t iterations = 2;
	std::size_t k = 200;
	SearchConfig search;
	/// Search settings for the baseline and the reproofs during labeling.
	SearchConfig label_search;
	TrainParams train;
	/// Artifacts are written below this directory when set.
	std::optional<std::filesystem::path> out_dir;
	/// Problems processed concurrently; 0 and 1 both mean sequential.
	std::size_t workers = 1;
};

struct ProblemRun {
	std::string problem;
	SearchOutcome outcome;
	std::size_t candidates = 0;
	std::size_t selected = 0;
	std::size_t seeds = 0;
	/// Empty unless the problem failed with an error.
	std::string error;
};

struct IterationReport {
	std::size_t index = 0;
	std::vector<ProblemRun> runs;
	std::set<std::string> solved;
	std::size_t training_examples = 0;
	/// Set when no model was trained; selection then falls back to
	/// select_heuristic.
	std::optional<std::string> training_skipped;
	std::optional<double> final_loss;
};

struct LoopReport {
	std::vector<IterationReport> iterations;
	/// Problems solved by any iteration.
	std::set<std::string> solved_union;

	std::string to_json() const;
};

/// Iteration 0 runs the base prover on the corpus. Each later iteration
/// labels the lemma instances of every proof found so far (once per proof),
/// trains a fresh model on all examples, and reruns every problem in replace
/// mode seeded with the closed top-k candidates plus the lemma instances of
/// the problem's own earlier proof. Per-problem errors are recorded, never
/// thrown.
///
/// Layout under out_dir: iter_<i>/<problem>/{outcome.json, candidates.jsonl,
/// selected.jsonl, closed.jsonl, lemmas.jsonl, problem.p}, iter_<i>/
/// {training.jsonl, model.json}, report.json.
LoopReport run_loop(const LoopConfig& cfg);

} // namespace cdforge
