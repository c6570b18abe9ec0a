#include "cdforge/loop.hpp"

#include "cdforge/tptp.hpp"

#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <thread>

namespace cdforge {

namespace fs = std::filesystem;

namespace {

/// Runs fn(0..n-1) on up to `workers` threads. fn must not throw.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
	if (workers <= 1 || n <= 1) {
		for (std::size_t i = 0; i < n; ++i)
			fn(i);
		return;
	}
	std::atomic<std::size_t> next{0};
	std::vector<std::jthread> pool;
	for (std::size_t w = 0; w < std::min(workers, n); ++w)
		pool.emplace_back([&] {
			for (std::size_t i = next++; i < n; i = next++)
				fn(i);
		});
}

std::string safe_dir_name(const std::string& id) {
	std::string out;
	for (char c : id)
		out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
	return out.empty() || out == "." || out == ".." ? "_" + out : out;
}

void write_text(const fs::path& path, const std::string& text) {
	fs::create_directories(path.parent_path());
	std::ofstream out(path);
	if (!out)
		throw std::runtime_error("cannot write '" + path.string() + "'");
	out << text;
}

void write_lemma_file(const fs::path& path, const std::vector<LemmaRecord>& lemmas) {
	fs::create_directories(path.parent_path());
	save_lemmas(path.string(), lemmas);
}

std::vector<LemmaRecord> merge_seeds(const std::vector<LemmaRecord>& a, const std::vector<LemmaRecord>& b) {
	std::vector<LemmaRecord> out;
	DTermSet seen;
	for (const auto* v : {&a, &b})
		for (const auto& l : *v)
			if (seen.insert(l.dterm).second)
				out.push_back(l);
	return out;
}

nlohmann::json run_json(const ProblemRun& r) {
	nlohmann::json j = nlohmann::json::parse(r.outcome.to_json());
	j.erase("format");
	j["problem"] = r.problem;
	j["candidates"] = r.candidates;
	j["selected"] = r.selected;
	j["seeds"] = r.seeds;
	if (!r.error.empty())
		j["error"] = r.error;
	return j;
}

} // namespace

std::string LoopReport::to_json() const {
	nlohmann::json j;
	j["format"] = kFormatTag;
	j["kind"] = "loop_report";
	j["iterations"] = nlohmann::json::array();
	for (const auto& it : iterations) {
		nlohmann::json ij;
		ij["index"] = it.index;
		ij["solved"] = it.solved;
		ij["solved_count"] = it.solved.size();
		ij["training_examples"] = it.training_examples;
		ij["training_skipped"] = it.training_skipped ? nlohmann::json(*it.training_skipped) : nlohmann::json(nullptr);
		ij["final_loss"] = it.final_loss ? nlohmann::json(*it.final_loss) : nlohmann::json(nullptr);
		ij["runs"] = nlohmann::json::array();
		for (const auto& r : it.runs)
			ij["runs"].push_back(run_json(r));
		j["iterations"].push_back(std::move(ij));
	}
	j["union"] = solved_union;
	j["union_count"] = solved_union.size();
	return j.dump(2);
}

LoopReport run_loop(const LoopConfig& cfg) {
	if (cfg.corpus.empty())
		throw std::invalid_argument("loop corpus is empty");
	if (cfg.iterations == 0)
		throw std::invalid_argument("loop needs at least one iteration");
	const std::size_t n = cfg.corpus.size();
	auto dir_of = [&](std::size_t iter, std::size_t i) -> std::optional<fs::path> {
		if (!cfg.out_dir)
			return std::nullopt;
		return *cfg.out_dir / ("iter_" + std::to_string(iter)) / safe_dir_name(cfg.corpus[i].id);
	};

	LoopReport report;
	// Latest proof per problem, and which proofs have already been labeled.
	std::vector<std::optional<DTerm>> proofs(n);
	std::set<std::pair<std::size_t, std::string>> labeled;
	std::vector<TrainingExample> examples;

	for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
		IterationReport it;
		it.index = iter;
		std::optional<LinearModel> model;
		std::vector<std::vector<LemmaRecord>> own(n);

		if (iter > 0) {
			// Labeling: every proof found so far that has not been labeled yet.
			std::vector<std::size_t> todo;
			for (std::size_t i = 0; i < n; ++i)
				if (proofs[i] && !labeled.contains({i, to_string(*proofs[i])}))
					todo.push_back(i);
			std::vector<std::vector<TrainingExample>> fresh(todo.size());
			std::vector<std::string> errors(todo.size());
			parallel_for(todo.size(), cfg.workers, [&](std::size_t t) {
				std::size_t i = todo[t];
				try {
					auto lemmas = extract_lemma_instances(*proofs[i], cfg.corpus[i]);
					if (auto d = dir_of(iter, i))
						write_lemma_file(*d / "lemmas.jsonl", lemmas);
					fresh[t] = label_utilities(cfg.corpus[i], lemmas, cfg.label_search, proofs[i]).examples;
				} catch (const std::exception& e) {
					errors[t] = e.what();
				}
			});
			for (std::size_t t = 0; t < todo.size(); ++t) {
				labeled.insert({todo[t], to_string(*proofs[todo[t]])});
				for (auto& ex : fresh[t])
					examples.push_back(std::move(ex));
			}
			it.training_examples = examples.size();
			if (cfg.out_dir) {
				fs::path iter_dir = *cfg.out_dir / ("iter_" + std::to_string(iter));
				fs::create_directories(iter_dir);
				std::ofstream out(iter_dir / "training.jsonl");
				write_examples(out, examples);
			}
			if (examples.empty()) {
				std::string reason = "no training data: no problem has been solved yet";
				for (const auto& e : errors)
					if (!e.empty()) {
						reason = "no training data: " + e;
						break;
					}
				it.training_skipped = reason;
			} else {
				model = train_on_examples(examples, cfg.train);
				it.final_loss = model->final_loss();
				if (cfg.out_dir)
					model->save((*cfg.out_dir / ("iter_" + std::to_string(iter)) / "model.json").string());
			}
			for (std::size_t i = 0; i < n; ++i)
				if (proofs[i]) {
					try {
						own[i] = extract_lemma_instances(*proofs[i], cfg.corpus[i]);
					} catch (const std::exception&) {
						// A proof that stopped verifying contributes no seeds.
					}
				}
		}

		it.runs.resize(n);
		parallel_for(n, cfg.workers, [&](std::size_t i) {
			const Problem& p = cfg.corpus[i];
			ProblemRun& run = it.runs[i];
			run.problem = p.id;
			auto dir = dir_of(iter, i);
			try {
				if (dir)
					write_text(*dir / "problem.p", export_tptp(p));
				if (iter == 0) {
					run.outcome = sgcd_prove(p, cfg.search);
				} else {
					CandidateResult cand = generate_candidates(p, cfg.search);
					run.candidates = cand.lemmas.size();
					auto selected = model ? select_top_k(*model, cand.lemmas, p, cfg.k)
										  : select_heuristic(cand.lemmas, cfg.k);
					run.selected = selected.size();
					auto closed = close_and_export(selected, p);
					SearchConfig c = cfg.search;
					c.seeds = merge_seeds(closed, own[i]);
					c.lemma_mode = LemmaMode::replace;
					run.seeds = c.seeds.size();
					if (dir) {
						write_lemma_file(*dir / "candidates.jsonl", cand.lemmas);
						write_lemma_file(*dir / "selected.jsonl", selected);
						write_lemma_file(*dir / "closed.jsonl", closed);
					}
					run.outcome = sgcd_prove(p, c);
				}
			} catch (const std::exception& e) {
				run.error = e.what();
				run.outcome = SearchOutcome{};
			}
			if (dir) {
				auto j = run_json(run);
				j["format"] = kFormatTag;
				write_text(*dir / "outcome.json", j.dump() + "\n");
			}
		});

		for (std::size_t i = 0; i < n; ++i) {
			const auto& o = it.runs[i].outcome;
			if (o.proved() && o.proof) {
				it.solved.insert(cfg.corpus[i].id);
				proofs[i] = o.proof;
			}
		}
		report.solved_union.insert(it.solved.begin(), it.solved.end());
		report.iterations.push_back(std::move(it));
	}
	if (cfg.out_dir)
		write_text(*cfg.out_dir / "report.json", report.to_json() + "\n");
	return report;
}

} // namespace cdforge
