#include "cdforge/pipeline.hpp"

#include <algorithm>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

namespace cdforge {

std::vector<LemmaRecord> extract_lemma_instances(const DTerm& proof, const Problem& p) {
	VerificationReport r = verify(proof, p);
	if (!r.proved)
		throw std::invalid_argument("proof " + to_string(proof) + " does not prove problem '" + p.id + "'");
	auto table = mgt_table(proof, p.axioms);
	std::vector<LemmaRecord> out;
	for (const DTerm& s : distinct_compound_subterms(proof))
		out.push_back({s, table.at(s), {}, std::nullopt});
	return out;
}

LabelingResult label_utilities(const Problem& p, const std::vector<LemmaRecord>& lemmas, const SearchConfig& cfg,
							   const std::optional<DTerm>& containing_proof, const NameTable& names) {
	SearchConfig base = cfg;
	base.seeds.clear();
	SearchOutcome baseline = sgcd_prove(p, base);
	if (!baseline.proved())
		throw LabelingError("baseline search for '" + p.id + "' ended " + to_string(baseline.status));
	const std::uint64_t i0 = baseline.stats.inferences;

	LabelingResult out;
	out.baseline_inferences = i0;
	std::vector<std::optional<double>> reduction;
	for (const auto& lemma : lemmas) {
		SearchConfig c = base;
		c.seeds = {lemma};
		c.lemma_mode = LemmaMode::axioms;
		c.inference_limit = i0;
		SearchOutcome o = sgcd_prove(p, c);
		if (o.proved())
			reduction.emplace_back(static_cast<double>(i0) - static_cast<double>(o.stats.inferences));
		else
			reduction.emplace_back(std::nullopt);
	}
	double best = 0.0;
	bool any = false;
	for (const auto& r : reduction)
		if (r) {
			best = any ? std::max(best, *r) : *r;
			any = true;
		}
	for (std::size_t k = 0; k < lemmas.size(); ++k) {
		double u = -1.0;
		if (reduction[k]) {
			double scale = best > 0.0 ? best : static_cast<double>(std::max<std::uint64_t>(i0, 1));
			u = std::clamp(*reduction[k] / scale, -1.0, 1.0);
		}
		out.examples.push_back({p.id, lemmas[k], u, extract_features(lemmas[k], p, containing_proof, names)});
	}
	return out;
}

void write_examples(std::ostream& out, const std::vector<TrainingExample>& examples) {
	out << nlohmann::json{{"format", kFormatTag}, {"kind", "training"}}.dump() << '\n';
	for (const auto& ex : examples) {
		nlohmann::json features = nlohmann::json::object();
		for (const auto& [name, v] : ex.features.values)
			features[name] = v;
		nlohmann::json meta = nlohmann::json::object();
		for (const auto& [name, v] : ex.features.meta)
			meta[name] = v;
		meta["lf_hb_name"] = ex.features.name;
		if (!ex.features.containing_proof.empty())
			meta["lfp_containing_proof"] = ex.features.containing_proof;
		nlohmann::json j{
			{"problem", ex.problem},
			{"dterm", to_string(ex.lemma.dterm)},
			{"formula", to_string(ex.lemma.formula)},
			{"utility", ex.utility},
			{"features", features},
			{"meta", meta},
		};
		out << j.dump() << '\n';
	}
}

std::vector<TrainingExample> read_examples(std::istream& in) {
	std::vector<TrainingExample> out;
	std::string line;
	std::size_t lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		if (line.find_first_not_of(" \t\r") == std::string::npos)
			continue;
		try {
			auto j = nlohmann::json::parse(line);
			if (j.contains("format"))
				continue;
			FeatureVector fv;
			const auto& features = j.at("features");
			for (const auto& name : feature_roster())
				fv.values.emplace_back(name, features.at(name).get<double>());
			if (j.contains("meta")) {
				for (const auto& [k, v] : j["meta"].items()) {
					if (k == "lf_hb_name")
						fv.name = v.get<std::string>();
					else if (k == "lfp_containing_proof")
						fv.containing_proof = v.get<std::string>();
					else if (v.is_number())
						fv.meta[k] = v.get<double>();
				}
			}
			LemmaRecord lemma{parse_dterm(j.at("dterm").get<std::string>()),
							  parse_functional(j.at("formula").get<std::string>()), {}, std::nullopt};
			out.push_back({j.at("problem").get<std::string>(), std::move(lemma), j.at("utility").get<double>(),
						   std::move(fv)});
		} catch (const std::exception& e) {
			throw std::invalid_argument("training file line " + std::to_string(lineno) + ": " + e.what());
		}
	}
	return out;
}

LinearModel train_on_examples(const std::vector<TrainingExample>& data, const TrainParams& hp) {
	std::vector<std::vector<double>> x;
	std::vector<double> y;
	x.reserve(data.size());
	for (const auto& ex : data) {
		x.push_back(ex.features.numeric());
		y.push_back(ex.utility);
	}
	return train_linear(x, y, feature_roster(), hp);
}

namespace {

struct Ranked {
	double score;
	std::string ftext;
	std::uint64_t tsize;
	std::string dtext;
	std::size_t index;
};

bool better(const Ranked& a, const Ranked& b) {
	if (a.score != b.score)
		return a.score > b.score;
	if (a.ftext != b.ftext)
		return a.ftext < b.ftext;
	if (a.tsize != b.tsize)
		return a.tsize < b.tsize;
	return a.dtext < b.dtext;
}

} // namespace

std::vector<LemmaRecord> select_top_k(const LinearModel& model, const std::vector<LemmaRecord>& candidates,
									  const Problem& p, std::size_t k, const NameTable& names) {
	std::vector<Ranked> ranked;
	ranked.reserve(candidates.size());
	for (std::size_t i = 0; i < candidates.size(); ++i) {
		const auto& c = candidates[i];
		double s = model.predict(extract_features(c, p, std::nullopt, names));
		ranked.push_back({s, to_string(canonical(c.formula)), c.dterm.tsize(), to_string(c.dterm), i});
	}
	k = std::min(k, ranked.size());
	std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(), better);
	std::vector<LemmaRecord> out;
	out.reserve(k);
	for (std::size_t i = 0; i < k; ++i) {
		LemmaRecord r = candidates[ranked[i].index];
		r.score = ranked[i].score;
		out.push_back(std::move(r));
	}
	return out;
}

std::vector<LemmaRecord> select_heuristic(const std::vector<LemmaRecord>& candidates, std::size_t k) {
	struct Key {
		std::uint64_t tsize, height;
		std::string ftext, dtext;
		std::size_t index;
	};
	std::vector<Key> keys;
	keys.reserve(candidates.size());
	for (std::size_t i = 0; i < candidates.size(); ++i) {
		TermMeasures m = term_measures(candidates[i].formula);
		keys.push_back({m.tsize, m.height, to_string(canonical(candidates[i].formula)),
						to_string(candidates[i].dterm), i});
	}
	auto less = [](const Key& a, const Key& b) {
		return std::tie(a.tsize, a.height, a.ftext, a.dtext) < std::tie(b.tsize, b.height, b.ftext, b.dtext);
	};
	k = std::min(k, keys.size());
	std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(), less);
	std::vector<LemmaRecord> out;
	for (std::size_t i = 0; i < k; ++i)
		out.push_back(candidates[keys[i].index]);
	return out;
}

std::vector<LemmaRecord> close_and_export(const std::vector<LemmaRecord>& selected, const Problem& p) {
	std::vector<DTerm> roots;
	roots.reserve(selected.size());
	for (const auto& l : selected)
		roots.push_back(l.dterm);
	std::vector<LemmaRecord> out;
	DTermMap<Term> formulas;
	for (const DTerm& r : roots) {
		if (formulas.contains(r))
			continue;
		auto table = mgt_table(r, p.axioms);
		if (!table.contains(r))
			throw std::invalid_argument("selected lemma " + to_string(r) + " has no MGT");
		for (auto& [d, f] : table)
			formulas.try_emplace(d, std::move(f));
	}
	for (const auto& e : subproof_closure(roots)) {
		if (e.is_leaf)
			continue;
		out.push_back({e.dterm, formulas.at(e.dterm), {}, std::nullopt});
	}
	return out;
}

UsageReport analyze_usage(const DTerm& proof, const std::vector<LemmaRecord>& selected,
						  const std::vector<LemmaRecord>& closed) {
	UsageReport r;
	DTermSet closed_set, selected_set;
	for (const auto& l : closed)
		if (!l.dterm.is_leaf())
			closed_set.insert(l.dterm);
	for (const auto& l : selected)
		if (!l.dterm.is_leaf())
			selected_set.insert(l.dterm);
	r.a = closed_set.size();
	auto compounds = distinct_compound_subterms(proof);
	r.b = compounds.size();
	for (const DTerm& s : compounds) {
		if (closed_set.contains(s))
			++r.c;
		if (selected_set.contains(s))
			++r.e;
	}
	r.d = r.b ? static_cast<double>(r.c) / static_cast<double>(r.b) : 1.0;
	r.f = r.b ? static_cast<double>(r.e) / static_cast<double>(r.b) : 1.0;
	return r;
}

std::string UsageReport::to_json() const {
	nlohmann::json j{{"format", kFormatTag}, {"A", a}, {"B", b}, {"C", c}, {"D", d}, {"E", e}, {"F", f}};
	return j.dump();
}

} // namespace cdforge
