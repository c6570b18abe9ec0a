// Command-line front end. Exit codes: 0 proved or ok, 1 exhausted,
// 2 limit reached, 3 input error.

#include "cdforge/loop.hpp"
#include "cdforge/tptp.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace cdforge;

namespace {

enum Exit { kOk = 0, kExhausted = 1, kLimit = 2, kInputError = 3 };

class InputError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
	std::ifstream in(path);
	if (!in)
		throw InputError("cannot open '" + path + "'");
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

std::string stem_of(const std::string& path) {
	auto slash = path.find_last_of('/');
	std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
	auto dot = base.find_last_of('.');
	return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

Problem load_problem(const std::string& path, const std::vector<std::string>& extra_axioms = {}) {
	Problem p = parse_tptp_cd(read_file(path), stem_of(path));
	for (const auto& spec : extra_axioms) {
		auto eq = spec.find('=');
		if (eq == std::string::npos || eq == 0)
			throw InputError("--axiom expects LABEL=FORMULA, got '" + spec + "'");
		p.axioms.insert_or_assign(spec.substr(0, eq), parse_functional(spec.substr(eq + 1)));
	}
	return p;
}

/// A D-term, factor equations, or @FILE holding either.
DTerm load_proof(const std::string& arg, const Problem& p) {
	std::string text = !arg.empty() && arg[0] == '@' ? read_file(arg.substr(1)) : arg;
	if (text.find('=') != std::string::npos) {
		std::set<std::string> labels;
		for (const auto& [label, f] : p.axioms)
			labels.insert(label);
		return parse_factor_equations(text, &labels);
	}
	return parse_dterm(text);
}

void emit(const std::string& out_path, const std::string& text) {
	if (out_path.empty()) {
		std::cout << text;
		return;
	}
	std::ofstream out(out_path);
	if (!out)
		throw InputError("cannot write '" + out_path + "'");
	out << text;
}

std::string lemmas_text(const std::vector<LemmaRecord>& lemmas) {
	std::ostringstream ss;
	write_lemmas(ss, lemmas);
	return ss.str();
}

int status_code(const SearchOutcome& o) {
	switch (o.status) {
	case SearchOutcome::Status::proved:
		return kOk;
	case SearchOutcome::Status::exhausted:
		return kExhausted;
	case SearchOutcome::Status::limit_reached:
		return kLimit;
	}
	return kInputError;
}

struct SearchFlags {
	std::string generator = "tsize";
	std::uint64_t max_level = SearchConfig{}.max_level;
	std::uint64_t pre_add = 0;
	std::size_t cache_limit = SearchConfig{}.cache_limit;
	double size_factor = SearchConfig{}.formula_size_factor;
	std::optional<std::uint64_t> inf_limit;
	std::optional<double> time_limit;
	std::string lemmas;
	std::string mode = "replace";

	void attach(CLI::App* app) {
		app->add_option("--generator", generator, "Level generator")
			->check(CLI::IsMember({"tsize", "height", "psp"}))
			->capture_default_str();
		app->add_option("--max-level", max_level, "Highest level to explore")->capture_default_str();
		app->add_option("--pre-add", pre_add, "Goal-driven levels tried ahead of generation")->capture_default_str();
		app->add_option("--cache-limit", cache_limit, "Maximum cached lemmas")->capture_default_str();
		app->add_option("--size-factor", size_factor, "Formula size bound relative to the goal")
			->capture_default_str();
		app->add_option("--inf-limit", inf_limit, "Inference limit");
		app->add_option("--time-limit", time_limit, "Wall-clock limit in seconds");
		app->add_option("--lemmas", lemmas, "Seed lemmas (JSON lines)");
		app->add_option("--mode", mode, "How seed lemmas enter the search")
			->check(CLI::IsMember({"replace", "axioms"}))
			->capture_default_str();
	}

	SearchConfig config() const {
		SearchConfig c;
		c.generator = parse_generator(generator);
		c.max_level = max_level;
		c.pre_add_max_level = pre_add;
		c.cache_limit = cache_limit;
		c.formula_size_factor = size_factor;
		c.inference_limit = inf_limit;
		c.time_limit_seconds = time_limit;
		c.lemma_mode = parse_lemma_mode(mode);
		if (!lemmas.empty())
			c.seeds = load_lemmas(lemmas);
		return c;
	}
};

struct TrainFlags {
	TrainParams hp;

	void attach(CLI::App* app) {
		app->add_option("--lr", hp.learning_rate, "Learning rate")->capture_default_str();
		app->add_option("--epochs", hp.epochs, "Training epochs")->capture_default_str();
		app->add_option("--batch", hp.batch_size, "Mini-batch size, 0 for full batch")->capture_default_str();
		app->add_option("--l2", hp.l2, "L2 penalty on weights")->capture_default_str();
		app->add_option("--seed", hp.seed, "Shuffle seed")->capture_default_str();
	}
};

std::string problem_text(const Problem& p) {
	std::ostringstream ss;
	ss << "problem " << p.id << '\n';
	for (const auto& label : ordered_axiom_labels(p.axioms))
		ss << "axiom " << label << ": " << to_string(p.axioms.at(label)) << '\n';
	ss << "goal: " << to_string(p.goal) << '\n';
	return ss.str();
}

std::string problem_json(const Problem& p) {
	nlohmann::json j;
	j["format"] = kFormatTag;
	j["id"] = p.id;
	j["axioms"] = nlohmann::json::object();
	for (const auto& [label, f] : p.axioms)
		j["axioms"][label] = to_string(f);
	j["goal"] = to_string(p.goal);
	return j.dump(2);
}

std::string outcome_text(const SearchOutcome& o) {
	std::ostringstream ss;
	ss << "status: " << to_string(o.status) << '\n';
	if (o.proof) {
		ss << "proof: " << to_string(*o.proof) << '\n';
		DMeasures m = d_measures(*o.proof);
		ss << "csize/tsize/height: " << m.csize << '/' << m.tsize << '/' << m.height << '\n';
	}
	ss << "inferences: " << o.stats.inferences << '\n'
	   << "levels completed: " << o.stats.levels_completed << '\n'
	   << "triples generated: " << o.stats.triples_generated << '\n'
	   << "wall time: " << o.stats.wall_time << " s\n";
	return ss.str();
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"Condensed detachment prover with learned lemma selection"};
	app.require_subcommand(1);
	std::string format = "text";
	std::string out;
	auto add_common = [&](CLI::App* sub) {
		sub->add_option("--format", format, "Output format")
			->check(CLI::IsMember({"text", "json"}))
			->capture_default_str();
		sub->add_option("--out", out, "Output file (default stdout)");
	};

	std::string problem_path;
	std::vector<std::string> extra_axioms;
	auto add_problem = [&](CLI::App* sub) {
		sub->add_option("problem", problem_path, "TPTP CNF problem file")->required();
		sub->add_option("--axiom", extra_axioms, "Extra axiom LABEL=FORMULA for proof leaves");
	};
	SearchFlags search;
	TrainFlags train;
	std::string proof_arg;
	std::string model_path;
	std::size_t k = 200;

	auto* parse = app.add_subcommand("parse", "Parse a problem and print it");
	add_problem(parse);
	add_common(parse);

	auto* prove = app.add_subcommand("prove", "Search for a proof");
	add_problem(prove);
	add_common(prove);
	search.attach(prove);

	auto* gen = app.add_subcommand("gen-lemmas", "Write candidate lemmas from axiom-driven generation");
	add_problem(gen);
	add_common(gen);
	search.attach(gen);

	auto* label = app.add_subcommand("label", "Label a proof's lemma instances with utilities");
	add_problem(label);
	add_common(label);
	search.attach(label);
	label->add_option("--proof", proof_arg, "Proof (D-term, factor equations, or @FILE); searched for if absent");

	std::vector<std::string> data_paths;
	auto* trainc = app.add_subcommand("train", "Fit a linear utility model");
	trainc->add_option("data", data_paths, "Training example files")->required();
	add_common(trainc);
	train.attach(trainc);

	std::string candidates_path;
	bool no_close = false;
	auto* select = app.add_subcommand("select", "Select the top-k candidates and close them under subproofs");
	add_problem(select);
	add_common(select);
	select->add_option("--model", model_path, "Model file; heuristic selection without one");
	select->add_option("--candidates", candidates_path, "Candidate lemmas (JSON lines)")->required();
	select->add_option("-k", k, "Number of lemmas to select")->capture_default_str();
	select->add_flag("--no-close", no_close, "Write the selection without its subproof closure");

	auto* verifyc = app.add_subcommand("verify", "Check a proof against a problem");
	add_problem(verifyc);
	add_common(verifyc);
	verifyc->add_option("--proof", proof_arg, "Proof (D-term, factor equations, or @FILE)")->required();

	std::string selected_path, closed_path;
	auto* usage = app.add_subcommand("analyze-usage", "Report how much of a proof the lemma sets cover");
	add_common(usage);
	usage->add_option("--proof", proof_arg, "Proof (D-term, factor equations, or @FILE)")->required();
	usage->add_option("--selected", selected_path, "Selected lemmas (JSON lines)")->required();
	usage->add_option("--closed", closed_path, "Closed lemmas (JSON lines)")->required();

	auto* exportc = app.add_subcommand("export-tptp", "Write the problem with lemmas as extra axioms");
	add_problem(exportc);
	add_common(exportc);
	exportc->add_option("--lemmas", search.lemmas, "Lemmas to add (JSON lines)");

	std::vector<std::string> corpus_paths;
	std::size_t iters = 2;
	std::size_t workers = 1;
	auto* loopc = app.add_subcommand("loop", "Iterative training and proving over a corpus");
	loopc->add_option("problems", corpus_paths, "TPTP CNF problem files")->required();
	loopc->add_option("--iters", iters, "Iterations including the plain sweep")->capture_default_str();
	loopc->add_option("-k", k, "Lemmas selected per problem")->capture_default_str();
	loopc->add_option("--workers", workers, "Problems processed concurrently")->capture_default_str();
	add_common(loopc);
	loopc->get_option("--out")->description("Artifact directory (report.json and per-iteration files)");
	search.attach(loopc);
	train.attach(loopc);

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		int rc = app.exit(e);
		return rc == 0 ? kOk : kInputError;
	}

	const bool json = format == "json";
	try {
		if (*parse) {
			Problem p = load_problem(problem_path, extra_axioms);
			emit(out, json ? problem_json(p) + "\n" : problem_text(p));
			return kOk;
		}
		if (*prove) {
			Problem p = load_problem(problem_path, extra_axioms);
			SearchOutcome o = sgcd_prove(p, search.config());
			emit(out, json ? o.to_json() + "\n" : outcome_text(o));
			return status_code(o);
		}
		if (*gen) {
			Problem p = load_problem(problem_path, extra_axioms);
			CandidateResult r = generate_candidates(p, search.config());
			emit(out, lemmas_text(r.lemmas));
			std::cerr << r.lemmas.size() << " candidates, search " << to_string(r.outcome.status) << '\n';
			return kOk;
		}
		if (*label) {
			Problem p = load_problem(problem_path, extra_axioms);
			SearchConfig cfg = search.config();
			std::optional<DTerm> proof;
			if (!proof_arg.empty()) {
				proof = load_proof(proof_arg, p);
			} else {
				SearchConfig plain = cfg;
				plain.seeds.clear();
				SearchOutcome o = sgcd_prove(p, plain);
				if (!o.proved())
					throw LabelingError("no proof found to label (" + to_string(o.status) + ")");
				proof = o.proof;
			}
			auto lemmas = extract_lemma_instances(*proof, p);
			LabelingResult r = label_utilities(p, lemmas, cfg, proof);
			std::ostringstream ss;
			write_examples(ss, r.examples);
			emit(out, ss.str());
			std::cerr << r.examples.size() << " examples, baseline " << r.baseline_inferences << " inferences\n";
			return kOk;
		}
		if (*trainc) {
			std::vector<TrainingExample> data;
			for (const auto& path : data_paths) {
				std::ifstream in(path);
				if (!in)
					throw InputError("cannot open '" + path + "'");
				auto part = read_examples(in);
				data.insert(data.end(), part.begin(), part.end());
			}
			LinearModel m = train_on_examples(data, train.hp);
			emit(out, m.to_json() + "\n");
			std::cerr << data.size() << " examples, final loss " << m.final_loss() << '\n';
			return kOk;
		}
		if (*select) {
			Problem p = load_problem(problem_path, extra_axioms);
			auto candidates = load_lemmas(candidates_path);
			std::vector<LemmaRecord> chosen = model_path.empty()
												  ? select_heuristic(candidates, k)
												  : select_top_k(LinearModel::load(model_path), candidates, p, k);
			emit(out, lemmas_text(no_close ? chosen : close_and_export(chosen, p)));
			return kOk;
		}
		if (*verifyc) {
			Problem p = load_problem(problem_path, extra_axioms);
			VerificationReport r = verify(load_proof(proof_arg, p), p);
			emit(out, json ? r.to_json() + "\n" : r.to_text());
			return r.proved ? kOk : kExhausted;
		}
		if (*usage) {
			std::string text = !proof_arg.empty() && proof_arg[0] == '@' ? read_file(proof_arg.substr(1)) : proof_arg;
			DTerm proof = text.find('=') != std::string::npos ? parse_factor_equations(text) : parse_dterm(text);
			UsageReport r = analyze_usage(proof, load_lemmas(selected_path), load_lemmas(closed_path));
			if (json) {
				emit(out, r.to_json() + "\n");
			} else {
				std::ostringstream ss;
				ss << "A closed lemmas: " << r.a << "\nB proof csize: " << r.b << "\nC in closed set: " << r.c
				   << "\nD = C/B: " << r.d << "\nE in selected set: " << r.e << "\nF = E/B: " << r.f << '\n';
				emit(out, ss.str());
			}
			return kOk;
		}
		if (*exportc) {
			Problem p = load_problem(problem_path, extra_axioms);
			std::vector<LemmaRecord> lemmas;
			if (!search.lemmas.empty())
				lemmas = load_lemmas(search.lemmas);
			emit(out, export_tptp(p, lemmas));
			return kOk;
		}
		if (*loopc) {
			LoopConfig cfg;
			for (const auto& path : corpus_paths)
				cfg.corpus.push_back(load_problem(path));
			cfg.iterations = iters;
			cfg.k = k;
			cfg.search = search.config();
			cfg.label_search = cfg.search;
			cfg.label_search.seeds.clear();
			cfg.train = train.hp;
			cfg.workers = workers;
			if (!out.empty())
				cfg.out_dir = out;
			LoopReport r = run_loop(cfg);
			if (json || out.empty()) {
				std::cout << r.to_json() << '\n';
			} else {
				for (const auto& it : r.iterations)
					std::cout << "iteration " << it.index << ": " << it.solved.size() << '/' << cfg.corpus.size()
							  << " solved" << (it.training_skipped ? " (" + *it.training_skipped + ")" : "") << '\n';
				std::cout << "total: " << r.solved_union.size() << '/' << cfg.corpus.size() << " solved\n";
			}
			return kOk;
		}
	} catch (const LabelingError& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kLimit;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kInputError;
	}
	return kInputError;
}
