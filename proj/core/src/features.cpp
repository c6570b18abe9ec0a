#include "cdforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <zlib.h>

namespace cdforge {

const std::vector<std::string>& feature_roster() {
	static const std::vector<std::string> roster = [] {
		std::vector<std::string> r = {
			"lf_d_csize",
			"lf_d_tsize",
			"lf_d_height",
			"lf_d_grd_csize",
			"lf_d_major_minor_relation",
			"lf_d_number_of_terminals",
			"lf_b_length",
			"lf_hb_distinct_hb_shared_vars",
			"lf_hb_distinct_h_only_vars",
			"lf_hb_distinct_b_only_vars",
			"lf_hb_singletons",
			"lf_hb_double_negation_occs",
			"lf_hb_nongoal_symbol_occs",
			"lf_h_excluded_goal_subterms",
			"lf_h_subterms_not_in_goal",
			"lf_hb_compression_ratio_raw_deflate",
			"lf_hb_compression_ratio_treerepair",
			"lf_hb_compression_ratio_dag",
			"lf_hb_organic",
			"lf_hb_name_status",
		};
		for (const char* comp : {"h", "b", "hb"})
			for (const char* f : {"csize", "tsize", "height", "distinct_vars", "var_occs", "const_occs", "fun_occs",
								  "occs_of_most_frequent_var", "occs_of_most_frequent_const",
								  "occs_of_most_frequent_fun"})
				r.push_back(std::string("lf_") + comp + "_" + f);
		return r;
	}();
	return roster;
}

double FeatureVector::get(std::string_view feature) const {
	for (const auto& [name, v] : values)
		if (name == feature)
			return v;
	throw std::out_of_range("unknown feature '" + std::string(feature) + "'");
}

std::vector<double> FeatureVector::numeric() const {
	std::vector<double> out;
	out.reserve(values.size());
	for (const auto& [name, v] : values)
		out.push_back(v);
	return out;
}

NameTable NameTable::builtin() {
	NameTable t;
	t.add("mingle", parse_functional("i(x,i(x,x))"));
	t.add("syll", parse_functional("i(i(p,q),i(i(q,r),i(p,r)))"));
	return t;
}

void NameTable::add(std::string name, Term formula) {
	entries_.emplace_back(std::move(name), std::move(formula));
}

std::optional<std::string> NameTable::lookup(const Term& formula) const {
	for (const auto& [name, f] : entries_)
		if (is_variant(f, formula))
			return name;
	return std::nullopt;
}

// ---------------------------------------------------------------------------
// Compression

double compression_ratio_dag(const Term& t) {
	TermMeasures m = term_measures(t);
	if (m.tsize == 0)
		return 1.0;
	return static_cast<double>(m.csize) / static_cast<double>(m.tsize);
}

double compression_ratio_raw_deflate(const Term& t) {
	std::string text = to_string(t);
	z_stream zs{};
	if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
		throw std::runtime_error("deflateInit2 failed");
	std::vector<unsigned char> buf(deflateBound(&zs, text.size()) + 16);
	zs.next_in = reinterpret_cast<Bytef*>(text.data());
	zs.avail_in = static_cast<uInt>(text.size());
	zs.next_out = buf.data();
	zs.avail_out = static_cast<uInt>(buf.size());
	int rc = deflate(&zs, Z_FINISH);
	std::size_t out = zs.total_out;
	deflateEnd(&zs);
	if (rc != Z_STREAM_END)
		throw std::runtime_error("deflate failed");
	return std::clamp(static_cast<double>(out) / static_cast<double>(text.size()), 0.0, 1.0);
}

namespace {

// Mutable tree for digram replacement. Variables are leaves with sym -1.
struct RTree {
	struct Node {
		int sym;
		std::vector<int> kids;
	};
	std::vector<Node> nodes;
	std::vector<std::size_t> arity;
	int root = 0;

	int add(const Term& t, std::unordered_map<std::string, int>& syms) {
		if (t.is_variable()) {
			nodes.push_back({-1, {}});
			return static_cast<int>(nodes.size() - 1);
		}
		std::string key = t.name() + '/' + std::to_string(t.arity());
		auto [it, fresh] = syms.try_emplace(key, static_cast<int>(arity.size()));
		if (fresh)
			arity.push_back(t.arity());
		std::vector<int> kids;
		for (const Term& a : t.args())
			kids.push_back(add(a, syms));
		nodes.push_back({it->second, std::move(kids)});
		return static_cast<int>(nodes.size() - 1);
	}

	std::size_t live_symbols(int n) const {
		const Node& x = nodes[static_cast<std::size_t>(n)];
		std::size_t c = x.sym >= 0 ? 1 : 0;
		for (int k : x.kids)
			c += live_symbols(k);
		return c;
	}
};

using Digram = std::tuple<int, std::size_t, int>;

} // namespace

double compression_ratio_treerepair(const Term& t) {
	std::uint64_t tsize = term_measures(t).tsize;
	if (tsize == 0)
		return 1.0;
	RTree tree;
	std::unordered_map<std::string, int> syms;
	tree.root = tree.add(t, syms);
	std::size_t rules = 0;
	for (;;) {
		// Greedy non-overlapping occurrence count in pre-order.
		std::map<Digram, std::vector<std::pair<int, std::size_t>>> occ;
		std::map<Digram, std::set<int>> used;
		std::vector<int> stack{tree.root};
		std::vector<int> order;
		while (!stack.empty()) {
			int n = stack.back();
			stack.pop_back();
			order.push_back(n);
			const auto& kids = tree.nodes[static_cast<std::size_t>(n)].kids;
			for (auto it = kids.rbegin(); it != kids.rend(); ++it)
				stack.push_back(*it);
		}
		for (int n : order) {
			const auto& node = tree.nodes[static_cast<std::size_t>(n)];
			if (node.sym < 0)
				continue;
			for (std::size_t k = 0; k < node.kids.size(); ++k) {
				int c = node.kids[k];
				int csym = tree.nodes[static_cast<std::size_t>(c)].sym;
				if (csym < 0)
					continue;
				Digram d{node.sym, k, csym};
				auto& u = used[d];
				if (u.contains(n) || u.contains(c))
					continue;
				u.insert(n);
				u.insert(c);
				occ[d].emplace_back(n, k);
			}
		}
		const std::vector<std::pair<int, std::size_t>>* best = nullptr;
		for (const auto& [d, list] : occ)
			if (list.size() >= 2 && (!best || list.size() > best->size()))
				best = &list;
		if (!best)
			break;
		// Replace parent/child pairs by a fresh symbol whose arguments are the
		// parent's other children with the child's children spliced in.
		auto [p0, k0] = best->front();
		const auto& par0 = tree.nodes[static_cast<std::size_t>(p0)];
		const auto& ch0 = tree.nodes[static_cast<std::size_t>(par0.kids[k0])];
		int fresh = static_cast<int>(tree.arity.size());
		tree.arity.push_back(par0.kids.size() - 1 + ch0.kids.size());
		for (auto [p, k] : *best) {
			auto& par = tree.nodes[static_cast<std::size_t>(p)];
			int c = par.kids[k];
			std::vector<int> grand = tree.nodes[static_cast<std::size_t>(c)].kids;
			std::vector<int> kids(par.kids.begin(), par.kids.begin() + static_cast<std::ptrdiff_t>(k));
			kids.insert(kids.end(), grand.begin(), grand.end());
			kids.insert(kids.end(), par.kids.begin() + static_cast<std::ptrdiff_t>(k) + 1, par.kids.end());
			par.kids = std::move(kids);
			par.sym = fresh;
		}
		++rules;
	}
	double grammar = static_cast<double>(tree.live_symbols(tree.root) + 2 * rules);
	return std::clamp(grammar / static_cast<double>(tsize), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Truth tables

namespace {

constexpr std::size_t kMaxTableVars = 20;

using Bits = std::vector<std::uint64_t>;

bool propositional(const Term& t) {
	if (t.is_variable() || t.is_constant())
		return true;
	if (!((t.name() == "i" && t.arity() == 2) || (t.name() == "n" && t.arity() == 1)))
		return false;
	return std::all_of(t.args().begin(), t.args().end(), [](const Term& a) { return propositional(a); });
}

void atoms_of(const Term& t, std::vector<std::string>& out) {
	if (t.is_variable() || t.is_constant()) {
		std::string key = (t.is_variable() ? "v:" : "c:") + t.name();
		if (std::find(out.begin(), out.end(), key) == out.end())
			out.push_back(key);
		return;
	}
	for (const Term& a : t.args())
		atoms_of(a, out);
}

Bits eval(const Term& t, const std::vector<std::string>& atoms, std::size_t words) {
	if (t.is_variable() || t.is_constant()) {
		std::string key = (t.is_variable() ? "v:" : "c:") + t.name();
		auto j = static_cast<std::size_t>(std::find(atoms.begin(), atoms.end(), key) - atoms.begin());
		Bits b(words);
		for (std::size_t w = 0; w < words; ++w) {
			std::uint64_t v = 0;
			for (std::size_t bit = 0; bit < 64; ++bit)
				if (((w * 64 + bit) >> j) & 1U)
					v |= std::uint64_t{1} << bit;
			b[w] = v;
		}
		return b;
	}
	if (t.name() == "n") {
		Bits b = eval(t.arg(0), atoms, words);
		for (auto& w : b)
			w = ~w;
		return b;
	}
	Bits a = eval(t.arg(0), atoms, words);
	Bits c = eval(t.arg(1), atoms, words);
	for (std::size_t w = 0; w < words; ++w)
		a[w] = ~a[w] | c[w];
	return a;
}

} // namespace

bool is_tautology(const Term& t) {
	if (!propositional(t))
		return false;
	std::vector<std::string> atoms;
	atoms_of(t, atoms);
	if (atoms.size() > kMaxTableVars)
		return false;
	std::size_t rows = std::size_t{1} << atoms.size();
	std::size_t words = (rows + 63) / 64;
	Bits b = eval(t, atoms, words);
	for (std::size_t w = 0; w < words; ++w) {
		std::uint64_t mask = ~std::uint64_t{0};
		if (w == words - 1 && rows % 64)
			mask = (std::uint64_t{1} << (rows % 64)) - 1;
		if ((b[w] & mask) != mask)
			return false;
	}
	return true;
}

int organic_status(const Term& t) {
	std::unordered_set<Term, TermHash> seen;
	std::vector<Term> stack;
	for (const Term& a : t.args())
		stack.push_back(a);
	while (!stack.empty()) {
		Term s = stack.back();
		stack.pop_back();
		if (!s.is_compound() || !seen.insert(s).second)
			continue;
		if (is_tautology(s))
			return 2;
		for (const Term& a : s.args())
			stack.push_back(a);
	}
	return 0;
}

// ---------------------------------------------------------------------------
// Feature extraction

namespace {

struct ComponentStats {
	double csize = 0, tsize = 0, height = 0, distinct_vars = 0, var_occs = 0, const_occs = 0, fun_occs = 0,
		   max_var = 0, max_const = 0, max_fun = 0;
};

void count_occurrences(const Term& t, std::map<std::string, int>& vars, std::map<std::string, int>& consts,
					   std::map<std::string, int>& funs) {
	if (t.is_variable()) {
		++vars[t.name()];
		return;
	}
	if (t.is_constant()) {
		++consts[t.name()];
		return;
	}
	++funs[t.name() + '/' + std::to_string(t.arity())];
	for (const Term& a : t.args())
		count_occurrences(a, vars, consts, funs);
}

void collect_compounds(const Term& t, std::unordered_set<Term, TermHash>& out) {
	if (!t.is_compound() || !out.insert(t).second)
		return;
	for (const Term& a : t.args())
		collect_compounds(a, out);
}

ComponentStats component_stats(const std::vector<Term>& terms) {
	ComponentStats s;
	std::unordered_set<Term, TermHash> compounds;
	std::map<std::string, int> vars, consts, funs;
	for (const Term& t : terms) {
		TermMeasures m = term_measures(t);
		s.tsize += static_cast<double>(m.tsize);
		s.height = std::max(s.height, static_cast<double>(m.height));
		collect_compounds(t, compounds);
		count_occurrences(t, vars, consts, funs);
	}
	s.csize = static_cast<double>(compounds.size());
	s.distinct_vars = static_cast<double>(vars.size());
	auto total = [](const std::map<std::string, int>& m) {
		double n = 0;
		for (const auto& [k, v] : m)
			n += v;
		return n;
	};
	auto most = [](const std::map<std::string, int>& m) {
		int n = 0;
		for (const auto& [k, v] : m)
			n = std::max(n, v);
		return static_cast<double>(n);
	};
	s.var_occs = total(vars);
	s.const_occs = total(consts);
	s.fun_occs = total(funs);
	s.max_var = most(vars);
	s.max_const = most(consts);
	s.max_fun = most(funs);
	return s;
}

std::size_t double_negations(const Term& t) {
	if (!t.is_compound())
		return 0;
	std::size_t n = (t.name() == "n" && t.arity() == 1 && t.arg(0).is_compound() && t.arg(0).name() == "n" &&
					 t.arg(0).arity() == 1)
		? 1
		: 0;
	for (const Term& a : t.args())
		n += double_negations(a);
	return n;
}

void symbols_of(const Term& t, std::set<std::string>& out) {
	if (t.is_variable())
		return;
	out.insert(t.name() + '/' + std::to_string(t.arity()));
	for (const Term& a : t.args())
		symbols_of(a, out);
}

std::size_t nongoal_occurrences(const Term& t, const std::set<std::string>& goal_symbols) {
	if (t.is_variable())
		return 0;
	std::size_t n = goal_symbols.contains(t.name() + '/' + std::to_string(t.arity())) ? 0 : 1;
	for (const Term& a : t.args())
		n += nongoal_occurrences(a, goal_symbols);
	return n;
}

// Each distinct constant becomes a distinct fresh variable.
Term constants_to_variables(const Term& t, std::map<std::string, Term>& fresh) {
	if (t.is_variable())
		return t;
	if (t.is_constant()) {
		auto it = fresh.find(t.name());
		if (it == fresh.end())
			it = fresh.emplace(t.name(), Term::variable("_c" + std::to_string(fresh.size()))).first;
		return it->second;
	}
	std::vector<Term> args;
	for (const Term& a : t.args())
		args.push_back(constants_to_variables(a, fresh));
	return Term::apply(t.name(), std::move(args));
}

void subterm_variants(const Term& t, std::set<std::string>& out) {
	out.insert(to_string(canonical(t)));
	for (const Term& a : t.args())
		subterm_variants(a, out);
}

std::size_t count_terminals(const DTerm& d) {
	std::size_t n = 0;
	for (const DTerm& s : distinct_compound_subterms(d))
		if (s.major().is_leaf() && s.minor().is_leaf())
			++n;
	return n;
}

int major_minor_relation(const DTerm& d) {
	if (d.is_leaf() || d.major() == d.minor())
		return 0;
	if (is_subterm(d.minor(), d.major()))
		return 1;
	if (is_subterm(d.major(), d.minor()))
		return 2;
	return 3;
}

// Body-as-implication translation: i(b1, i(b2, ..., head)).
Term joined(const LemmaRecord& l) {
	Term t = l.formula;
	for (auto it = l.body.rbegin(); it != l.body.rend(); ++it)
		t = Term::apply("i", {*it, t});
	return t;
}

} // namespace

FeatureVector extract_features(const LemmaRecord& lemma, const Problem& p, const std::optional<DTerm>& containing_proof,
							   const NameTable& names, const std::string& proof_id) {
	FeatureVector fv;
	auto put = [&](const std::string& name, double v) { fv.values.emplace_back(name, v); };

	DMeasures dm = d_measures(lemma.dterm);
	put("lf_d_csize", static_cast<double>(dm.csize));
	put("lf_d_tsize", static_cast<double>(dm.tsize));
	put("lf_d_height", static_cast<double>(dm.height));
	// D-terms carry no variables here, so grounding is the identity.
	put("lf_d_grd_csize", static_cast<double>(dm.csize));
	put("lf_d_major_minor_relation", major_minor_relation(lemma.dterm));
	put("lf_d_number_of_terminals", static_cast<double>(count_terminals(lemma.dterm)));

	const Term& head = lemma.formula;
	std::vector<Term> hb{head};
	hb.insert(hb.end(), lemma.body.begin(), lemma.body.end());
	std::set<std::string> hv = variables_of(head), bv;
	for (const Term& b : lemma.body)
		collect_variables(b, bv);
	std::size_t shared = 0, h_only = 0, b_only = 0;
	for (const auto& v : hv)
		(bv.contains(v) ? shared : h_only)++;
	for (const auto& v : bv)
		if (!hv.contains(v))
			++b_only;
	std::map<std::string, int> vars, consts, funs;
	for (const Term& t : hb)
		count_occurrences(t, vars, consts, funs);
	std::size_t singletons = 0;
	for (const auto& [v, n] : vars)
		if (n == 1)
			++singletons;
	std::size_t dneg = 0;
	for (const Term& t : hb)
		dneg += double_negations(t);
	std::set<std::string> goal_symbols;
	symbols_of(p.goal, goal_symbols);
	std::size_t nongoal = 0;
	for (const Term& t : hb)
		nongoal += nongoal_occurrences(t, goal_symbols);
	std::map<std::string, Term> fresh;
	Term goal_v = constants_to_variables(p.goal, fresh);
	std::set<std::string> goal_subs, head_subs;
	subterm_variants(goal_v, goal_subs);
	subterm_variants(head, head_subs);
	std::size_t excluded = 0, not_in_goal = 0;
	for (const auto& s : goal_subs)
		if (!head_subs.contains(s))
			++excluded;
	for (const auto& s : head_subs)
		if (!goal_subs.contains(s))
			++not_in_goal;
	Term j = joined(lemma);
	auto name = names.lookup(j);
	if (name)
		fv.name = lemma.body.empty() ? *name : "meta_" + *name;

	put("lf_b_length", static_cast<double>(lemma.body.size()));
	put("lf_hb_distinct_hb_shared_vars", static_cast<double>(shared));
	put("lf_hb_distinct_h_only_vars", static_cast<double>(h_only));
	put("lf_hb_distinct_b_only_vars", static_cast<double>(b_only));
	put("lf_hb_singletons", static_cast<double>(singletons));
	put("lf_hb_double_negation_occs", static_cast<double>(dneg));
	put("lf_hb_nongoal_symbol_occs", static_cast<double>(nongoal));
	put("lf_h_excluded_goal_subterms", static_cast<double>(excluded));
	put("lf_h_subterms_not_in_goal", static_cast<double>(not_in_goal));
	put("lf_hb_compression_ratio_raw_deflate", compression_ratio_raw_deflate(j));
	put("lf_hb_compression_ratio_treerepair", compression_ratio_treerepair(j));
	put("lf_hb_compression_ratio_dag", compression_ratio_dag(j));
	put("lf_hb_organic", organic_status(j));
	put("lf_hb_name_status", name ? (lemma.body.empty() ? 0 : 1) : 2);

	auto general = [&](const char* comp, const std::vector<Term>& terms) {
		ComponentStats s = component_stats(terms);
		std::string pre = std::string("lf_") + comp + "_";
		put(pre + "csize", s.csize);
		put(pre + "tsize", s.tsize);
		put(pre + "height", s.height);
		put(pre + "distinct_vars", s.distinct_vars);
		put(pre + "var_occs", s.var_occs);
		put(pre + "const_occs", s.const_occs);
		put(pre + "fun_occs", s.fun_occs);
		put(pre + "occs_of_most_frequent_var", s.max_var);
		put(pre + "occs_of_most_frequent_const", s.max_const);
		put(pre + "occs_of_most_frequent_fun", s.max_fun);
	};
	general("h", {head});
	general("b", lemma.body);
	general("hb", hb);

	if (containing_proof) {
		const DTerm& proof = *containing_proof;
		auto occs = static_cast<double>(count_instance_occurrences(lemma.dterm, proof));
		fv.containing_proof = proof_id.empty() ? p.id : proof_id;
		fv.meta["lfp_d_occs"] = occs;
		fv.meta["lfp_d_incoming"] = static_cast<double>(dag_incoming_edges(lemma.dterm, proof));
		// Ground lemma D-terms: both match counts equal the occurrence count.
		fv.meta["lfp_d_occs_innermost_matches"] = occs;
		fv.meta["lfp_d_occs_outermost_matches"] = occs;
		if (auto depth = min_depth_of(lemma.dterm, proof))
			fv.meta["lfp_d_min_goal_dist"] = static_cast<double>(*depth);
	}
	return fv;
}

} // namespace cdforge
