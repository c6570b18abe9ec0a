#include "cdforge/sgcd.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <random>

using namespace cdforge;

namespace {

Term T(const char* s) { return parse_functional(s); }
DTerm D(const char* s) { return parse_dterm(s); }

const char* kMeredith = "i(i(i(i(i(x,y),i(n(z),n(u))),z),v),i(i(v,x),i(u,x)))";

Problem mingle() { return {"mingle", {{"1", T("i(x,i(x,x))")}}, T("i(i(a,i(a,a)),i(a,i(a,a)))"), {}}; }
Problem meredith(const char* goal) { return {"mer", {{"1", T(kMeredith)}}, T(goal), {}}; }
Problem trivial() { return {"triv", {{"1", T("x")}}, T("a"), {}}; }

std::size_t count_all(const SearchState& s) {
	return s.cache_size() + s.abandoned.size();
}

TEST(Names, RoundTrip) {
	for (Generator g : {Generator::tsize, Generator::height, Generator::psp})
		EXPECT_EQ(parse_generator(to_string(g)), g);
	for (LemmaMode m : {LemmaMode::replace, LemmaMode::axioms})
		EXPECT_EQ(parse_lemma_mode(to_string(m)), m);
	EXPECT_THROW(parse_generator("breadth"), std::invalid_argument);
}

TEST(GenerateLevel, CatalanCounts) {
	SearchConfig cfg;
	cfg.subsumption_deletion = false;
	cfg.cache_limit = 100000;
	Search s(trivial(), cfg);
	const std::size_t catalan[] = {1, 1, 2, 5, 14, 42};
	for (std::uint64_t l = 0; l < 6; ++l) {
		auto news = s.generate_level(l);
		EXPECT_EQ(news.size(), catalan[l]) << "level " << l;
		for (const auto& t : news) {
			EXPECT_EQ(t.level, l);
			EXPECT_EQ(t.dterm.tsize(), l);
		}
		s.merge(std::move(news));
	}
	EXPECT_EQ(s.state().cache_size(), 1u + 1 + 2 + 5 + 14 + 42);
}

TEST(GenerateLevel, HeightCounts) {
	SearchConfig cfg;
	cfg.generator = Generator::height;
	cfg.subsumption_deletion = false;
	cfg.cache_limit = 100000;
	Search s(trivial(), cfg);
	// Full binary trees of height exactly h: 1, 1, 3, 21.
	const std::size_t counts[] = {1, 1, 3, 21};
	for (std::uint64_t l = 0; l < 4; ++l) {
		auto news = s.generate_level(l);
		EXPECT_EQ(news.size(), counts[l]) << "level " << l;
		s.merge(std::move(news));
	}
}

TEST(GenerateLevel, UnifiabilityFilter) {
	// The ground axiom i(a,b) cannot detach from itself.
	Problem p{"g", {{"1", T("i(a,b)")}, {"2", T("a")}}, T("b"), {}};
	Search s(p, SearchConfig{});
	s.merge(s.generate_level(0));
	auto one = s.generate_level(1);
	ASSERT_EQ(one.size(), 1u);
	EXPECT_EQ(one[0].dterm, D("D(1,2)"));
	EXPECT_EQ(one[0].formula, T("b"));
}

TEST(GenerateLevel, OversizedGoesToAbandoned) {
	SearchConfig cfg;
	cfg.formula_size_factor = 0.0;
	Search s(mingle(), cfg);
	EXPECT_EQ(s.size_bound(), 0u);
	auto zero = s.generate_level(0);
	EXPECT_TRUE(zero.empty());
	EXPECT_EQ(s.last_oversized(), 1u);
	EXPECT_EQ(s.state().abandoned.size(), 1u);
}

Triple fake(const char* d, int tsize) {
	// Right-leaning chains over distinct constants: no subsumption among them.
	Term t = Term::constant("k" + std::to_string(tsize));
	for (int k = 0; k < tsize; ++k)
		t = Term::apply("i", {Term::constant("c" + std::to_string(k)), t});
	return {1, D(d), t};
}

TEST(Merge, LimitKeepsBest) {
	SearchConfig cfg;
	cfg.cache_limit = 2;
	Search s(mingle(), cfg);
	s.merge({fake("D(1,1)", 5), fake("D(1,2)", 3), fake("D(2,1)", 7)});
	EXPECT_EQ(s.state().cache_size(), 2u);
	ASSERT_EQ(s.state().abandoned.size(), 1u);
	EXPECT_EQ(s.state().abandoned[0].dterm, D("D(2,1)"));
	s.merge({fake("D(2,2)", 4)});
	EXPECT_EQ(s.state().cache_size(), 2u);
	EXPECT_EQ(s.state().abandoned.back().dterm, D("D(1,1)"));
	s.merge({});
	EXPECT_EQ(count_all(s.state()), 4u);
	// Slots stay sorted best first.
	const auto& slot = s.state().cache.at(1);
	EXPECT_EQ(slot[0].dterm, D("D(1,2)"));
	EXPECT_EQ(slot[1].dterm, D("D(2,2)"));
}

TEST(Merge, SubsumptionEvictsSpecialized) {
	Search s(mingle(), SearchConfig{});
	s.merge({{1, D("D(1,1)"), T("i(a,i(b,b))")}});
	s.merge({{1, D("D(1,2)"), T("i(x,i(y,y))")}});
	ASSERT_EQ(s.state().cache_size(), 1u);
	EXPECT_EQ(s.state().cache.at(1)[0].dterm, D("D(1,2)"));
	// A more specific newcomer is abandoned.
	s.merge({{2, D("D(2,2)"), T("i(c,i(d,d))")}});
	EXPECT_EQ(s.state().cache_size(), 1u);
	EXPECT_EQ(s.state().abandoned.size(), 2u);
}

TEST(Merge, ZeroLimitAbandonsAll) {
	SearchConfig cfg;
	cfg.cache_limit = 0;
	Search s(mingle(), cfg);
	s.merge({fake("D(1,1)", 1), fake("D(1,2)", 2)});
	EXPECT_EQ(s.state().cache_size(), 0u);
	EXPECT_EQ(s.state().abandoned.size(), 2u);
}

TEST(Prove, Examples) {
	SearchOutcome m = sgcd_prove(mingle(), SearchConfig{});
	ASSERT_TRUE(m.proved());
	EXPECT_EQ(*m.proof, D("D(1,1)"));
	auto j = nlohmann::json::parse(m.to_json());
	EXPECT_EQ(j["status"], "proved");

	SearchOutcome leaf = sgcd_prove({"ax", {{"1", T("i(x,x)")}}, T("i(a,a)"), {}}, SearchConfig{});
	ASSERT_TRUE(leaf.proved());
	EXPECT_EQ(*leaf.proof, D("1"));

	SearchOutcome none = sgcd_prove({"u", {{"1", T("i(a,b)")}}, T("c"), {}}, SearchConfig{});
	EXPECT_EQ(none.status, SearchOutcome::Status::exhausted);
	EXPECT_FALSE(none.proof);

	SearchConfig tight;
	tight.inference_limit = 50;
	SearchOutcome lim = sgcd_prove(meredith("i(i(a,b),i(i(b,c),i(a,c)))"), tight);
	EXPECT_EQ(lim.status, SearchOutcome::Status::limit_reached);
	EXPECT_LE(lim.stats.inferences, 51u);

	SearchConfig shallow;
	shallow.max_level = 1;
	EXPECT_EQ(sgcd_prove(meredith("i(i(a,b),i(i(b,c),i(a,c)))"), shallow).status,
			  SearchOutcome::Status::limit_reached);
}

TEST(Prove, MeredithFirstLemmas) {
	for (Generator g : {Generator::tsize, Generator::height, Generator::psp}) {
		SearchConfig cfg;
		cfg.generator = g;
		SearchOutcome o = sgcd_prove(meredith("i(i(i(a,a),b),i(c,b))"), cfg);
		ASSERT_TRUE(o.proved()) << to_string(g);
		EXPECT_TRUE(verify(*o.proof, meredith("i(i(i(a,a),b),i(c,b))")).proved);
	}
}

TEST(Prove, AxiomsModeExpandsLemmaLeaves) {
	Problem p = mingle();
	p.goal = T("i(i(i(a,i(a,a)),i(a,i(a,a))),i(i(a,i(a,a)),i(a,i(a,a))))");
	SearchConfig cfg;
	cfg.lemma_mode = LemmaMode::axioms;
	cfg.seeds = {{D("D(1,1)"), T("i(i(x,i(x,x)),i(x,i(x,x)))"), {}, {}}};
	SearchOutcome o = sgcd_prove(p, cfg);
	ASSERT_TRUE(o.proved());
	EXPECT_TRUE(verify(*o.proof, p).proved);
	EXPECT_EQ(*o.proof, D("D(1,D(1,1))"));
}

TEST(Candidates, Examples) {
	SearchConfig cfg;
	cfg.pre_add_max_level = 3;
	CandidateResult r = generate_candidates(mingle(), cfg);
	ASSERT_TRUE(r.proof);
	bool has_proof = false;
	for (const auto& l : r.lemmas) {
		EXPECT_FALSE(l.dterm.is_leaf());
		EXPECT_TRUE(is_variant(l.formula, *mgt(l.dterm, mingle().axioms)));
		has_proof = has_proof || l.dterm == *r.proof;
	}
	EXPECT_TRUE(has_proof);

	SearchConfig none;
	none.cache_limit = 0;
	CandidateResult z = generate_candidates(meredith("i(i(i(a,a),b),i(c,b))"), none);
	for (const auto& l : z.lemmas)
		EXPECT_FALSE(l.dterm.is_leaf());
}

TEST(Ordering, TripleLess) {
	std::vector<OrderField> o{OrderField::tsize, OrderField::height};
	Triple small{1, D("D(1,1)"), T("i(x,x)")};
	Triple big{1, D("D(1,1)"), T("i(x,i(x,x))")};
	EXPECT_TRUE(triple_less(small, big, o));
	EXPECT_FALSE(triple_less(big, small, o));
	EXPECT_FALSE(triple_less(small, small, o));
	std::vector<OrderField> vars{OrderField::distinct_vars};
	Triple two{1, D("D(1,1)"), T("i(x,y)")};
	EXPECT_TRUE(triple_less(big, two, vars));
}

TEST(ExpandLeaves, Examples) {
	std::map<std::string, DTerm> m{{"L1", D("D(1,1)")}};
	EXPECT_EQ(expand_lemma_leaves(D("D(L1,D(L1,2))"), m), D("D(D(1,1),D(D(1,1),2))"));
	EXPECT_EQ(expand_lemma_leaves(D("2"), m), D("2"));
}

TEST(GeneratorLevel, Examples) {
	DTerm d = D("D(D(1,1),D(1,D(1,1)))");
	EXPECT_EQ(generator_level(Generator::tsize, d), 4u);
	EXPECT_EQ(generator_level(Generator::height, d), 3u);
	EXPECT_EQ(generator_level(Generator::psp, d), 4u);
}

// --- properties ----------------------------------------------------------

class SgcdProperty : public ::testing::Test {
protected:
	std::mt19937_64 rng{777};

	Problem random_problem() {
		Problem p;
		p.id = "rand";
		const std::vector<std::string> vars{"x", "y", "z"};
		std::size_t n = 1 + rng() % 2;
		for (std::size_t k = 1; k <= n; ++k) {
			Term t = cdforge::testing::random_term(rng, 4, vars);
			if (!t.is_compound())
				t = Term::apply("i", {t, t});
			p.axioms.emplace(std::to_string(k), t);
		}
		for (int tries = 0; tries < 50; ++tries) {
			DTerm d = cdforge::testing::random_dterm(rng, rng() % 4, n);
			if (auto f = mgt(d, p.axioms)) {
				p.goal = cdforge::testing::ground(*f);
				return p;
			}
		}
		p.goal = cdforge::testing::ground(p.axioms.at("1"));
		return p;
	}
};

TEST_F(SgcdProperty, LevelsMonotoneAndEnumeratedOnce) {
	for (Generator g : {Generator::tsize, Generator::height, Generator::psp}) {
		for (int k = 0; k < 20; ++k) {
			Problem p = random_problem();
			SearchConfig cfg;
			cfg.generator = g;
			cfg.cache_limit = 50;
			Search s(p, cfg);
			DTermSet all;
			for (std::uint64_t l = 0; l <= 4; ++l) {
				for (const auto& t : s.generate_level(l)) {
					EXPECT_EQ(t.level, l);
					EXPECT_GE(generator_level(g, t.dterm), g == Generator::psp ? 0u : l);
					EXPECT_TRUE(all.insert(t.dterm).second) << "duplicate " << to_string(t.dterm);
				}
				s.merge({});
			}
			// Merging the news is what feeds later levels; replay with merges.
			Search m(p, cfg);
			DTermSet seen;
			for (std::uint64_t l = 0; l <= 4; ++l) {
				m.merge(m.generate_level(l));
				for (const auto& [lev, v] : m.state().cache)
					for (const auto& t : v)
						seen.insert(t.dterm);
			}
			std::size_t distinct = 0;
			DTermSet both;
			for (const auto& [lev, v] : m.state().cache)
				for (const auto& t : v)
					distinct += both.insert(t.dterm).second;
			for (const auto& t : m.state().abandoned)
				distinct += both.insert(t.dterm).second;
			EXPECT_EQ(distinct, count_all(m.state()));
		}
	}
}

TEST_F(SgcdProperty, DeterministicAndSound) {
	for (int k = 0; k < 60; ++k) {
		Problem p = random_problem();
		SearchConfig cfg;
		cfg.generator = static_cast<Generator>(k % 3);
		cfg.inference_limit = 20000;
		cfg.max_level = 6;
		SearchOutcome a = sgcd_prove(p, cfg);
		SearchOutcome b = sgcd_prove(p, cfg);
		EXPECT_EQ(a.status, b.status);
		EXPECT_EQ(a.proof, b.proof);
		EXPECT_EQ(a.stats.inferences, b.stats.inferences);
		if (a.proved())
			EXPECT_TRUE(verify(*a.proof, p).proved) << to_string(*a.proof);
		else
			EXPECT_FALSE(a.proof);
	}
}

TEST_F(SgcdProperty, CachedFormulasAreMgts) {
	for (int k = 0; k < 20; ++k) {
		Problem p = random_problem();
		Search s(p, SearchConfig{});
		for (std::uint64_t l = 0; l <= 3; ++l)
			s.merge(s.generate_level(l));
		for (const auto& [lev, v] : s.state().cache) {
			for (std::size_t i = 0; i < v.size(); ++i) {
				EXPECT_TRUE(is_variant(v[i].formula, *mgt(v[i].dterm, p.axioms)));
				EXPECT_LE(term_measures(v[i].formula).tsize, s.size_bound());
				if (i > 0)
					EXPECT_FALSE(triple_less(v[i], v[i - 1], SearchConfig{}.ordering));
			}
		}
	}
}

} // namespace
