#include "cdforge/sgcd.hpp"

#include "heap.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace cdforge {

std::string to_string(Generator g) {
	switch (g) {
	case Generator::tsize: return "tsize";
	case Generator::height: return "height";
	case Generator::psp: return "psp";
	}
	return "?";
}

Generator parse_generator(const std::string& s) {
	if (s == "tsize")
		return Generator::tsize;
	if (s == "height")
		return Generator::height;
	if (s == "psp")
		return Generator::psp;
	throw std::invalid_argument("unknown generator '" + s + "'");
}

std::string to_string(LemmaMode m) {
	return m == LemmaMode::replace ? "replace" : "axioms";
}

LemmaMode parse_lemma_mode(const std::string& s) {
	if (s == "replace")
		return LemmaMode::replace;
	if (s == "axioms")
		return LemmaMode::axioms;
	throw std::invalid_argument("unknown lemma mode '" + s + "'");
}

std::string to_string(SearchOutcome::Status s) {
	switch (s) {
	case SearchOutcome::Status::proved: return "proved";
	case SearchOutcome::Status::exhausted: return "exhausted";
	case SearchOutcome::Status::limit_reached: return "limit_reached";
	}
	return "?";
}

std::string SearchOutcome::to_json() const {
	nlohmann::json j;
	j["format"] = kFormatTag;
	j["status"] = to_string(status);
	j["proof"] = proof ? nlohmann::json(to_string(*proof)) : nlohmann::json(nullptr);
	j["stats"] = {
		{"levels_completed", stats.levels_completed},
		{"triples_generated", stats.triples_generated},
		{"triples_cached", stats.triples_cached},
		{"inferences", stats.inferences},
		{"wall_time", stats.wall_time},
	};
	return j.dump();
}

std::size_t SearchState::cache_size() const {
	std::size_t n = 0;
	for (const auto& [level, slot] : cache)
		n += slot.size();
	return n;
}

std::uint64_t generator_level(Generator g, const DTerm& d) {
	return g == Generator::height ? d.height() : d.tsize();
}

namespace {

struct Shape {
	std::uint64_t tsize = 0, height = 0;
};

Shape shape(const Term& t) {
	if (t.is_variable())
		return {};
	Shape s{1, 0};
	for (const Term& a : t.args()) {
		Shape c = shape(a);
		s.tsize += c.tsize;
		s.height = std::max(s.height, c.height + 1);
	}
	return s;
}

struct OrderKey {
	std::vector<std::uint64_t> fields;
	std::string ftext, dtext;
	friend auto operator<=>(const OrderKey&, const OrderKey&) = default;
};

OrderKey order_key(const Triple& t, const std::vector<OrderField>& ordering) {
	OrderKey k;
	bool need_full = std::any_of(ordering.begin(), ordering.end(), [](OrderField f) {
		return f == OrderField::csize || f == OrderField::distinct_vars;
	});
	Shape s = shape(t.formula);
	TermMeasures m;
	if (need_full)
		m = term_measures(t.formula);
	for (OrderField f : ordering) {
		switch (f) {
		case OrderField::tsize: k.fields.push_back(s.tsize); break;
		case OrderField::height: k.fields.push_back(s.height); break;
		case OrderField::csize: k.fields.push_back(m.csize); break;
		case OrderField::distinct_vars: k.fields.push_back(m.distinct_vars); break;
		}
	}
	k.ftext = to_string(t.formula);
	k.dtext = to_string(t.dterm);
	return k;
}

using Bindings = std::vector<std::pair<const std::string*, Term>>;

bool match_into(const Term& g, const Term& s, Bindings& b) {
	if (g.is_variable()) {
		for (const auto& [name, t] : b)
			if (*name == g.name())
				return t == s;
		b.emplace_back(&g.name(), s);
		return true;
	}
	if (s.is_variable() || g.name() != s.name() || g.arity() != s.arity())
		return false;
	if (g.is_ground())
		return g == s;
	for (std::size_t k = 0; k < g.arity(); ++k)
		if (!match_into(g.arg(k), s.arg(k), b))
			return false;
	return true;
}

bool fast_subsumes(const Term& g, const Term& s) {
	Bindings b;
	b.reserve(8);
	return match_into(g, s, b);
}

struct LimitHit {};

} // namespace

bool triple_less(const Triple& a, const Triple& b, const std::vector<OrderField>& ordering) {
	return order_key(a, ordering) < order_key(b, ordering);
}

DTerm expand_lemma_leaves(const DTerm& d, const std::map<std::string, DTerm>& lemma_labels) {
	if (d.is_leaf()) {
		auto it = lemma_labels.find(d.label());
		return it == lemma_labels.end() ? d : it->second;
	}
	return DTerm::node(expand_lemma_leaves(d.major(), lemma_labels), expand_lemma_leaves(d.minor(), lemma_labels));
}

// ---------------------------------------------------------------------------

struct Search::Impl {
	using Cont = std::function<bool(const DTerm&)>;

	struct Ranked {
		OrderKey key;
		std::uint64_t level;
		DTerm dterm;
		friend bool operator<(const Ranked& a, const Ranked& b) { return a.key < b.key; }
	};

	Problem original;
	Problem problem;
	SearchConfig cfg;
	std::map<std::string, DTerm> lemma_leaves;

	detail::SymbolTable symbols;
	detail::Heap heap{symbols};
	std::int32_t sym_i = 0;
	std::vector<std::pair<DTerm, detail::Template>> axioms;
	detail::Template goal;
	std::uint64_t bound = 0;

	SearchState state;
	DTermSet seen;
	DTermMap<Term> formulas;
	DTermMap<detail::Template> templates;
	DTermMap<OrderKey> keys;
	DTermMap<Shape> shapes;
	std::set<Ranked> ranking;
	std::unordered_set<std::string> failed;
	std::uint64_t cached_below = 0;
	std::size_t oversized = 0;
	bool ran = false;

	std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

	Impl(Problem p, SearchConfig c) : original(p), problem(std::move(p)), cfg(std::move(c)) {
		problem.validate();
		sym_i = symbols.intern("i", 2);
		std::uint64_t max_size = shape(problem.goal).tsize;
		for (const auto& [label, f] : problem.axioms)
			max_size = std::max(max_size, shape(f).tsize);
		bound = static_cast<std::uint64_t>(cfg.formula_size_factor * static_cast<double>(max_size));

		if (cfg.lemma_mode == LemmaMode::axioms) {
			std::size_t n = 0;
			for (const auto& lemma : cfg.seeds) {
				auto f = mgt(lemma.dterm, original.axioms);
				if (!f)
					throw std::invalid_argument("seed lemma " + to_string(lemma.dterm) + " has no MGT");
				std::string label;
				do
					label = "L" + std::to_string(++n);
				while (problem.axioms.contains(label));
				problem.axioms.emplace(label, *f);
				lemma_leaves.emplace(label, lemma.dterm);
			}
		}
		for (const auto& [label, f] : problem.axioms) {
			DTerm leaf = DTerm::leaf(label);
			Term cf = canonical(f);
			formulas.emplace(leaf, cf);
			axioms.emplace_back(leaf, detail::compile(cf, symbols));
		}
		goal = detail::compile(problem.goal, symbols);
	}

	void tick() {
		++state.inferences;
		if (cfg.inference_limit && state.inferences > *cfg.inference_limit)
			throw LimitHit{};
		if (cfg.time_limit_seconds && (state.inferences & 1023) == 0 && elapsed() > *cfg.time_limit_seconds)
			throw LimitHit{};
	}

	double elapsed() const {
		return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
	}

	const Term& formula_of(const DTerm& d) {
		if (auto it = formulas.find(d); it != formulas.end())
			return it->second;
		for (auto& [sub, f] : mgt_table(d, problem.axioms))
			formulas.try_emplace(sub, f);
		auto it = formulas.find(d);
		if (it == formulas.end())
			throw std::logic_error("subproof without MGT: " + to_string(d));
		return it->second;
	}

	const detail::Template& template_of(const DTerm& d) {
		if (auto it = templates.find(d); it != templates.end())
			return it->second;
		return templates.emplace(d, detail::compile(formula_of(d), symbols)).first->second;
	}

	// Detachment on compiled premises; counts one inference.
	std::optional<Term> step(const detail::Template& major, const detail::Template& minor) {
		tick();
		auto m = heap.mark();
		std::int32_t a = heap.deref(heap.instantiate(major));
		std::int32_t b = heap.instantiate(minor);
		std::optional<Term> out;
		if (heap.is_unbound(a)) {
			std::int32_t y = heap.new_var();
			std::int32_t s = heap.build(sym_i, {b, y});
			heap.unify(a, s);
			out = heap.extract(y);
		} else if (heap.symbol_of(a) == sym_i && heap.unify(heap.arg_of(a, 0), b)) {
			out = heap.extract(heap.arg_of(a, 1));
		}
		heap.undo(m);
		return out;
	}

	// --- axiom-driven -------------------------------------------------------

	void consider(const DTerm& d, const detail::Template& major, const detail::Template& minor,
				  std::uint64_t level, std::vector<Triple>& kept) {
		if (!seen.insert(d).second)
			return;
		auto f = step(major, minor);
		if (!f)
			return;
		formulas.try_emplace(d, *f);
		admit({level, d, *f}, kept);
	}

	void admit(Triple t, std::vector<Triple>& kept) {
		++state.triples_generated;
		if (shape(t.formula).tsize > bound) {
			++oversized;
			state.abandoned.push_back(std::move(t));
		} else {
			kept.push_back(std::move(t));
		}
	}

	const std::vector<Triple>& slot(std::uint64_t level) {
		static const std::vector<Triple> empty;
		auto it = state.cache.find(level);
		return it == state.cache.end() ? empty : it->second;
	}

	std::vector<Triple> generate_level(std::uint64_t level) {
		std::vector<Triple> kept;
		oversized = 0;
		if (level == 0) {
			for (const auto& [leaf, tmpl] : axioms)
				if (seen.insert(leaf).second)
					admit({0, leaf, formulas.at(leaf)}, kept);
		} else if (cfg.generator == Generator::psp) {
			const std::vector<Triple>& prev = slot(level - 1);
			for (const Triple& a : prev) {
				for (const DTerm& s : distinct_subterms(a.dterm)) {
					consider(DTerm::node(a.dterm, s), template_of(a.dterm), template_of(s), level, kept);
					if (s != a.dterm)
						consider(DTerm::node(s, a.dterm), template_of(s), template_of(a.dterm), level, kept);
				}
			}
		} else {
			for (auto [i, j] : level_pairs(level)) {
				const std::vector<Triple>& as = slot(i);
				const std::vector<Triple>& bs = slot(j);
				for (const Triple& a : as)
					for (const Triple& b : bs)
						consider(DTerm::node(a.dterm, b.dterm), template_of(a.dterm), template_of(b.dterm), level,
								 kept);
			}
		}
		cached_below = std::max(cached_below, level + 1);
		return kept;
	}

	// Argument-level pairs for a node at `level` (tsize and height generators).
	std::vector<std::pair<std::uint64_t, std::uint64_t>> level_pairs(std::uint64_t level) const {
		std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
		if (level == 0)
			return out;
		if (cfg.generator == Generator::tsize) {
			for (std::uint64_t i = 0; i < level; ++i)
				out.emplace_back(i, level - 1 - i);
		} else {
			for (std::uint64_t i = 0; i < level; ++i)
				for (std::uint64_t j = 0; j < level; ++j)
					if (std::max(i, j) == level - 1)
						out.emplace_back(i, j);
		}
		return out;
	}

	// --- merge --------------------------------------------------------------

	void evict(DTerm d) {
		auto kit = keys.find(d);
		auto level = ranking.find(Ranked{kit->second, 0, d})->level;
		ranking.erase(Ranked{kit->second, 0, d});
		keys.erase(kit);
		shapes.erase(d);
		auto& v = state.cache[level];
		auto it = std::find_if(v.begin(), v.end(), [&](const Triple& t) { return t.dterm == d; });
		state.abandoned.push_back(std::move(*it));
		v.erase(it);
		if (v.empty())
			state.cache.erase(level);
	}

	void insert(Triple t, OrderKey k) {
		auto& v = state.cache[t.level];
		auto pos = std::lower_bound(v.begin(), v.end(), k,
									[&](const Triple& x, const OrderKey& key) { return keys.at(x.dterm) < key; });
		ranking.insert(Ranked{k, t.level, t.dterm});
		shapes.emplace(t.dterm, shape(t.formula));
		keys.emplace(t.dterm, std::move(k));
		formulas.try_emplace(t.dterm, t.formula);
		v.insert(pos, std::move(t));
	}

	void merge(std::vector<Triple> news) {
		std::vector<std::pair<OrderKey, Triple>> ranked;
		ranked.reserve(news.size());
		for (auto& t : news) {
			OrderKey k = order_key(t, cfg.ordering);
			ranked.emplace_back(std::move(k), std::move(t));
		}
		std::sort(ranked.begin(), ranked.end(),
				  [](const auto& a, const auto& b) { return a.first < b.first; });
		for (auto& [k, t] : ranked) {
			if (cfg.cache_limit == 0 || keys.contains(t.dterm)) {
				state.abandoned.push_back(std::move(t));
				continue;
			}
			if (ranking.size() >= cfg.cache_limit && !(k < ranking.rbegin()->key)) {
				state.abandoned.push_back(std::move(t));
				continue;
			}
			if (cfg.subsumption_deletion) {
				Shape ts = shape(t.formula);
				bool subsumed = false;
				std::vector<DTerm> victims;
				for (const auto& [level, v] : state.cache) {
					for (const Triple& c : v) {
						const Shape& cs = shapes.at(c.dterm);
						if (cs.tsize <= ts.tsize && fast_subsumes(c.formula, t.formula)) {
							subsumed = true;
							break;
						}
						if (ts.tsize <= cs.tsize && fast_subsumes(t.formula, c.formula))
							victims.push_back(c.dterm);
					}
					if (subsumed)
						break;
				}
				if (subsumed) {
					state.abandoned.push_back(std::move(t));
					continue;
				}
				for (const DTerm& d : victims)
					evict(d);
			}
			insert(std::move(t), std::move(k));
			if (ranking.size() > cfg.cache_limit)
				evict(ranking.rbegin()->dterm);
		}
	}

	// --- goal-driven --------------------------------------------------------

	bool try_formula(std::int32_t g, const detail::Template& tmpl, const DTerm& d, const Cont& k) {
		tick();
		auto m = heap.mark();
		if (heap.unify(g, heap.instantiate(tmpl)) && k(d))
			return true;
		heap.undo(m);
		return false;
	}

	bool solve(std::int32_t g, std::uint64_t level, const Cont& k) {
		std::string key = std::to_string(level) + '|' + heap.key(g);
		if (failed.contains(key))
			return false;
		bool any = false;
		Cont k2 = [&](const DTerm& d) {
			any = true;
			return k(d);
		};
		if (solve_raw(g, level, k2))
			return true;
		if (!any)
			failed.insert(std::move(key));
		return false;
	}

	bool solve_raw(std::int32_t g, std::uint64_t level, const Cont& k) {
		if (level < cached_below) {
			const std::vector<Triple>& entries = slot(level);
			for (const Triple& t : entries)
				if (try_formula(g, template_of(t.dterm), t.dterm, k))
					return true;
			return false;
		}
		if (level == 0) {
			for (const auto& [leaf, tmpl] : axioms)
				if (try_formula(g, tmpl, leaf, k))
					return true;
			return false;
		}
		if (cfg.generator == Generator::psp)
			return solve_psp(g, level, k);
		for (auto [i, j] : level_pairs(level)) {
			tick();
			auto m = heap.mark();
			std::int32_t x = heap.new_var();
			std::int32_t major = heap.build(sym_i, {x, g});
			std::uint64_t jj = j;
			bool found = solve(major, i, [&](const DTerm& da) {
				return solve(x, jj, [&](const DTerm& db) { return k(DTerm::node(da, db)); });
			});
			if (found)
				return true;
			heap.undo(m);
		}
		return false;
	}

	bool solve_psp(std::int32_t g, std::uint64_t level, const Cont& k) {
		// D(a, s): a at level-1, s a subterm of a.
		{
			tick();
			auto m = heap.mark();
			std::int32_t x = heap.new_var();
			std::int32_t major = heap.build(sym_i, {x, g});
			bool found = solve(major, level - 1, [&](const DTerm& da) {
				for (const DTerm& s : distinct_subterms(da))
					if (try_formula(x, template_of(s), s, [&](const DTerm&) { return k(DTerm::node(da, s)); }))
						return true;
				return false;
			});
			if (found)
				return true;
			heap.undo(m);
		}
		// D(s, a): a at level-1 proves the minor, s a proper subterm of a.
		{
			tick();
			auto m = heap.mark();
			std::int32_t y = heap.new_var();
			std::int32_t major = heap.build(sym_i, {y, g});
			bool found = solve(y, level - 1, [&](const DTerm& da) {
				for (const DTerm& s : distinct_subterms(da)) {
					if (s == da)
						continue;
					if (try_formula(major, template_of(s), s, [&](const DTerm&) { return k(DTerm::node(s, da)); }))
						return true;
				}
				return false;
			});
			if (found)
				return true;
			heap.undo(m);
		}
		return false;
	}

	std::optional<DTerm> goal_driven(std::uint64_t level) {
		failed.clear();
		auto m = heap.mark();
		std::int32_t g = heap.instantiate(goal);
		std::optional<DTerm> proof;
		solve(g, level, [&](const DTerm& d) {
			proof = d;
			return true;
		});
		heap.undo(m);
		return proof;
	}

	std::optional<DTerm> check_cache() {
		auto m = heap.mark();
		std::int32_t g = heap.instantiate(goal);
		std::optional<DTerm> proof;
		for (const auto& [level, v] : state.cache) {
			for (const Triple& t : v) {
				if (try_formula(g, template_of(t.dterm), t.dterm, [&](const DTerm& d) {
						proof = d;
						return true;
					}))
					break;
			}
			if (proof)
				break;
		}
		heap.undo(m);
		return proof;
	}

	// --- main loop ----------------------------------------------------------

	std::uint64_t seed_cache() {
		merge(generate_level(0));
		std::map<std::uint64_t, std::vector<Triple>> by_level;
		for (const auto& lemma : cfg.seeds) {
			if (lemma.dterm.is_leaf() || seen.contains(lemma.dterm))
				continue;
			auto f = mgt(lemma.dterm, problem.axioms);
			if (!f)
				throw std::invalid_argument("seed lemma " + to_string(lemma.dterm) + " has no MGT");
			seen.insert(lemma.dterm);
			formulas.try_emplace(lemma.dterm, *f);
			std::uint64_t level = generator_level(cfg.generator, lemma.dterm);
			by_level[level].push_back({level, lemma.dterm, *f});
		}
		std::uint64_t top = 0;
		for (auto& [level, triples] : by_level) {
			std::vector<Triple> kept;
			for (auto& t : triples)
				admit(std::move(t), kept);
			merge(std::move(kept));
			top = std::max(top, level);
		}
		return top + 1;
	}

	SearchOutcome run() {
		if (ran)
			throw std::logic_error("Search::run called twice");
		ran = true;
		start = std::chrono::steady_clock::now();
		SearchOutcome out;
		auto finish = [&](SearchOutcome::Status s, std::optional<DTerm> proof) {
			out.status = s;
			if (proof)
				out.proof = lemma_leaves.empty() ? *proof : expand_lemma_leaves(*proof, lemma_leaves);
			out.stats.inferences = state.inferences;
			out.stats.triples_generated = state.triples_generated;
			out.stats.triples_cached = state.cache_size();
			out.stats.wall_time = elapsed();
			return out;
		};
		try {
			std::uint64_t first = 0;
			if (cfg.lemma_mode == LemmaMode::replace && !cfg.seeds.empty()) {
				first = seed_cache();
				cached_below = first;
				if (auto d = check_cache())
					return finish(SearchOutcome::Status::proved, d);
			}
			for (std::uint64_t l = first; l <= cfg.max_level; ++l) {
				cached_below = l;
				for (std::uint64_t m = l; m <= l + cfg.pre_add_max_level; ++m)
					if (auto d = goal_driven(m))
						return finish(SearchOutcome::Status::proved, d);
				auto news = generate_level(l);
				if (news.empty() && oversized == 0)
					return finish(SearchOutcome::Status::exhausted, std::nullopt);
				merge(std::move(news));
				out.stats.levels_completed = l + 1;
			}
			return finish(SearchOutcome::Status::limit_reached, std::nullopt);
		} catch (const LimitHit&) {
			return finish(SearchOutcome::Status::limit_reached, std::nullopt);
		}
	}
};

Search::Search(Problem problem, SearchConfig cfg) : impl_(std::make_unique<Impl>(std::move(problem), std::move(cfg))) {}
Search::~Search() = default;

std::vector<Triple> Search::generate_level(std::uint64_t level) {
	return impl_->generate_level(level);
}
std::size_t Search::last_oversized() const {
	return impl_->oversized;
}
void Search::merge(std::vector<Triple> news) {
	impl_->merge(std::move(news));
}
std::optional<DTerm> Search::goal_driven(std::uint64_t level) {
	return impl_->goal_driven(level);
}
SearchOutcome Search::run() {
	return impl_->run();
}
const SearchState& Search::state() const {
	return impl_->state;
}
const Problem& Search::problem() const {
	return impl_->problem;
}
DTerm Search::to_original(const DTerm& d) const {
	return impl_->lemma_leaves.empty() ? d : expand_lemma_leaves(d, impl_->lemma_leaves);
}
std::uint64_t Search::size_bound() const {
	return impl_->bound;
}

SearchOutcome sgcd_prove(const Problem& p, const SearchConfig& cfg) {
	Search s(p, cfg);
	return s.run();
}

CandidateResult generate_candidates(const Problem& p, SearchConfig cfg) {
	cfg.pre_add_max_level = 0;
	Search s(p, cfg);
	CandidateResult r;
	r.outcome = s.run();
	r.proof = r.outcome.proof;
	std::vector<Triple> all;
	DTermSet taken;
	for (const auto& [level, v] : s.state().cache)
		for (const Triple& t : v)
			if (!t.dterm.is_leaf() && taken.insert(t.dterm).second)
				all.push_back(t);
	for (const Triple& t : s.state().abandoned)
		if (!t.dterm.is_leaf() && taken.insert(t.dterm).second)
			all.push_back(t);
	if (r.proof && !r.proof->is_leaf() && !taken.contains(*r.proof)) {
		if (auto f = mgt(*r.proof, p.axioms))
			all.push_back({generator_level(cfg.generator, *r.proof), *r.proof, *f});
	}
	std::vector<std::pair<OrderKey, Triple>> ranked;
	ranked.reserve(all.size());
	for (auto& t : all) {
		OrderKey k = order_key(t, cfg.ordering);
		ranked.emplace_back(std::move(k), std::move(t));
	}
	std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
	for (auto& [k, t] : ranked)
		r.lemmas.push_back({s.to_original(t.dterm), std::move(t.formula), {}, std::nullopt});
	return r;
}

} // namespace cdforge
