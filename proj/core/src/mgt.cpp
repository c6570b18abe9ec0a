#include "cdforge/mgt.hpp"

#include <nlohmann/json.hpp>

namespace cdforge {

void Problem::validate() const {
	if (axioms.empty())
		throw std::invalid_argument("problem '" + id + "' has no axioms");
	if (!goal.is_ground())
		throw std::invalid_argument("goal of problem '" + id + "' is not ground");
}

std::optional<Term> cd_step(const Term& major, const Term& minor) {
	// Fail fast before renaming when the major cannot be an implication.
	if (!major.is_variable() && (major.name() != "i" || major.arity() != 2))
		return std::nullopt;
	Term maj = rename_apart(major, {});
	std::set<std::string> reserved = variables_of(maj);
	Term min = rename_apart(minor, reserved);
	collect_variables(min, reserved);
	// Fresh antecedent/consequent names.
	std::string a = "_a", b = "_b";
	while (reserved.contains(a))
		a += "'";
	while (reserved.contains(b))
		b += "'";
	Term consequent = Term::variable(b);
	const std::pair<Term, Term> pairs[] = {
		{maj, Term::apply("i", {Term::variable(a), consequent})},
		{Term::variable(a), min},
	};
	auto sigma = unify_all(pairs);
	if (!sigma)
		return std::nullopt;
	return canonical(sigma->apply(consequent));
}

DTermMap<Term> mgt_table(const DTerm& d, const AxiomMap& axioms) {
	MinimalDag dag = minimal_dag(d);
	std::vector<std::optional<Term>> formulas(dag.entries.size());
	std::vector<DTerm> subterms;
	subterms.reserve(dag.entries.size());
	DTermMap<Term> out;
	for (std::size_t id = 0; id < dag.entries.size(); ++id) {
		const auto& e = dag.entries[id];
		if (e.is_leaf) {
			auto it = axioms.find(e.label);
			if (it == axioms.end())
				throw UnmappedLeafError(e.label);
			formulas[id] = canonical(it->second);
			subterms.push_back(DTerm::leaf(e.label));
		} else {
			subterms.push_back(DTerm::node(subterms[e.major], subterms[e.minor]));
			if (formulas[e.major] && formulas[e.minor])
				formulas[id] = cd_step(*formulas[e.major], *formulas[e.minor]);
		}
		if (formulas[id])
			out.emplace(subterms[id], *formulas[id]);
	}
	return out;
}

std::optional<Term> mgt(const DTerm& d, const AxiomMap& axioms) {
	auto table = mgt_table(d, axioms);
	auto it = table.find(d);
	if (it == table.end())
		return std::nullopt;
	return it->second;
}

std::optional<Term> infer_minor(const Term& major, const Term& conclusion) {
	// Freeze the conclusion's variables as fresh constants so that unification
	// may only instantiate the major.
	std::set<std::string> conclusion_vars = variables_of(conclusion);
	Substitution freeze, thaw;
	std::size_t k = 0;
	for (const auto& v : conclusion_vars) {
		std::string frozen = "$frozen" + std::to_string(k++);
		freeze.bind(v, Term::constant(frozen));
		thaw.bind(frozen, Term::variable(v));
	}
	Term maj = rename_apart(major, {});
	std::set<std::string> reserved = variables_of(maj);
	std::string x = "_m";
	while (reserved.contains(x))
		x += "'";
	Term minor = Term::variable(x);
	auto sigma = unify(maj, Term::apply("i", {minor, freeze.apply(conclusion)}));
	if (!sigma)
		return std::nullopt;
	Term m = sigma->apply(minor);
	// Thaw: frozen constants back to the conclusion's variables.
	std::function<Term(const Term&)> unfreeze = [&](const Term& t) -> Term {
		if (t.is_constant()) {
			if (auto it = thaw.bindings().find(t.name()); it != thaw.bindings().end())
				return it->second;
			return t;
		}
		if (t.is_variable())
			return t;
		std::vector<Term> args;
		for (const Term& a : t.args())
			args.push_back(unfreeze(a));
		return Term::apply(t.name(), std::move(args));
	};
	return canonical(unfreeze(m));
}

namespace {

void collect_failures(const DTerm& d, const DTermMap<Term>& table, DTermSet& visited, std::vector<std::string>& out) {
	if (d.is_leaf() || table.contains(d) || !visited.insert(d).second)
		return;
	bool children_ok = table.contains(d.major()) && table.contains(d.minor());
	if (children_ok) {
		out.push_back(to_string(d));
		return;
	}
	collect_failures(d.major(), table, visited, out);
	collect_failures(d.minor(), table, visited, out);
}

} // namespace

VerificationReport verify(const DTerm& d, const Problem& p) {
	VerificationReport r;
	r.measures = d_measures(d);
	auto table = mgt_table(d, p.axioms);
	if (auto it = table.find(d); it != table.end()) {
		r.mgt = it->second;
		r.proved = subsumes(it->second, p.goal);
	} else {
		DTermSet visited;
		collect_failures(d, table, visited, r.failures);
	}
	return r;
}

std::string VerificationReport::to_text() const {
	std::string out;
	out += "proved: ";
	out += proved ? "yes" : "no";
	out += "\nmgt: ";
	out += mgt ? to_string(*mgt) : "none";
	out += "\ncsize: " + std::to_string(measures.csize);
	out += "\ntsize: " + std::to_string(measures.tsize);
	out += "\nheight: " + std::to_string(measures.height);
	for (const auto& f : failures)
		out += "\nfailure: " + f;
	out += '\n';
	return out;
}

std::string VerificationReport::to_json() const {
	nlohmann::json j;
	j["format"] = "cdforge/v1";
	j["proved"] = proved;
	j["mgt"] = mgt ? nlohmann::json(to_string(*mgt)) : nlohmann::json(nullptr);
	j["measures"] = {{"csize", measures.csize}, {"tsize", measures.tsize}, {"height", measures.height}};
	j["failures"] = failures;
	return j.dump();
}

} // namespace cdforge
