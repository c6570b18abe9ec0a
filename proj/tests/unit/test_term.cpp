#include "cdforge/term.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace cdforge;
using cdforge::testing::NaiveUnifier;

namespace {

Term T(const char* s) { return parse_functional(s); }

TEST(Parse, MingleStructure) {
	Term t = T("i(x,i(x,x))");
	ASSERT_TRUE(t.is_compound());
	EXPECT_EQ(t.name(), "i");
	EXPECT_TRUE(t.arg(0).is_variable());
	EXPECT_EQ(t.arg(1), Term::apply("i", {Term::variable("x"), Term::variable("x")}));
}

TEST(Parse, ConstantAndWhitespace) {
	EXPECT_TRUE(T("a").is_constant());
	EXPECT_EQ(T(" i ( a , x ) "), T("i(a,x)"));
	EXPECT_EQ(to_string(T("i(i(i(i(i(x,y),i(n(z),n(u))),z),v),i(i(v,x),i(u,x)))")),
			  "i(i(i(i(i(x,y),i(n(z),n(u))),z),v),i(i(v,x),i(u,x)))");
}

TEST(Parse, VariableConvention) {
	for (const char* v : {"p", "q", "z", "x1", "t42"})
		EXPECT_TRUE(T(v).is_variable()) << v;
	for (const char* c : {"a", "b", "o", "c1", "pa"})
		EXPECT_FALSE(T(c).is_variable()) << c;
	Term custom = parse_functional("f(A,b)", [](std::string_view s) { return std::isupper(s[0]) != 0; });
	EXPECT_TRUE(custom.arg(0).is_variable());
	EXPECT_TRUE(custom.arg(1).is_constant());
}

TEST(Parse, ErrorsCarryPosition) {
	try {
		T("i(x,");
		FAIL();
	} catch (const ParseError& e) {
		EXPECT_EQ(e.position(), 4u);
	}
	EXPECT_THROW(T("i(x,y))"), ParseError);
	EXPECT_THROW(T("i(a,i(a))"), ParseError);
	EXPECT_THROW(T("x(a)"), ParseError);
}

TEST(Polish, Examples) {
	EXPECT_EQ(parse_polish("Cpq"), T("i(p,q)"));
	EXPECT_EQ(parse_polish("CCCppqCrq"), T("i(i(i(p,p),q),i(r,q))"));
	EXPECT_EQ(parse_polish("CCpqCCqrCpr"), T("i(i(p,q),i(i(q,r),i(p,r)))"));
	EXPECT_EQ(print_polish(T("i(i(x,y),n(x))")), "CCpqNp");
	EXPECT_THROW(parse_polish("CCpq"), ParseError);
	EXPECT_THROW(parse_polish("Kpq"), ParseError);
	EXPECT_THROW(print_polish(T("i(a,x)")), std::invalid_argument);
}

TEST(Unify, Examples) {
	auto s = unify(T("i(x,y)"), T("i(a,i(b,c))"));
	ASSERT_TRUE(s);
	EXPECT_EQ(s->apply(T("x")), T("a"));
	EXPECT_EQ(s->apply(T("y")), T("i(b,c)"));
	EXPECT_FALSE(unify(T("x"), T("i(x,y)")));
	auto m = unify(T("i(x,y)"), T("i(x1,i(x1,x1))"));
	ASSERT_TRUE(m);
	EXPECT_TRUE(is_variant(m->apply(T("y")), T("i(x1,x1)")));
}

TEST(Match, Examples) {
	auto s = match_onto(T("i(x,y)"), T("i(a,i(b,c))"));
	ASSERT_TRUE(s);
	EXPECT_EQ(s->apply(T("y")), T("i(b,c)"));
	EXPECT_FALSE(match_onto(T("i(a,x)"), T("i(b,c)")));
	auto syll = match_onto(T("i(i(p,q),i(i(q,r),i(p,r)))"), T("i(i(a,b),i(i(b,c),i(a,c)))"));
	ASSERT_TRUE(syll);
	EXPECT_EQ(syll->apply(T("p")), T("a"));
	EXPECT_EQ(syll->apply(T("q")), T("b"));
	EXPECT_EQ(syll->apply(T("r")), T("c"));
	// Variables of the specific side act as constants.
	EXPECT_FALSE(match_onto(T("i(a,b)"), T("i(x,b)")));
	EXPECT_FALSE(match_onto(T("i(x,x)"), T("i(p,q)")));
}

TEST(RenameApart, FreshAndSharing) {
	Term r = rename_apart(T("i(x,y)"), {"x"});
	for (const auto& v : variables_of(r))
		EXPECT_NE(v, "x");
	EXPECT_TRUE(is_variant(r, T("i(x,y)")));
	EXPECT_EQ(rename_apart(T("a"), {"x"}), T("a"));
	Term s = rename_apart(T("i(x,x)"), {});
	EXPECT_EQ(s.arg(0), s.arg(1));
	EXPECT_EQ(rename_apart(T("i(x,y)"), {"v0"}), rename_apart(T("i(x,y)"), {"v0"}));
}

TEST(Measures, Examples) {
	EXPECT_EQ(term_measures(T("i(x,i(x,x))")), (TermMeasures{2, 2, 2, 1}));
	EXPECT_EQ(term_measures(T("x")), (TermMeasures{0, 0, 0, 1}));
	TermMeasures m = term_measures(T("i(i(p,p),i(p,p))"));
	EXPECT_EQ(m.csize, 2u);
	EXPECT_EQ(m.tsize, 3u);
	// Constants count toward tsize and height but are not compound.
	EXPECT_EQ(term_measures(T("i(a,b)")), (TermMeasures{3, 1, 1, 0}));
}

TEST(Canonical, VariantsCoincide) {
	EXPECT_EQ(canonical(T("i(y,i(x,y))")), T("i(p,i(q,p))"));
	EXPECT_EQ(canonical_variable_name(11), "p1");
	EXPECT_TRUE(is_variant(T("i(x,y)"), T("i(y,x)")));
	EXPECT_FALSE(is_variant(T("i(x,x)"), T("i(x,y)")));
}

TEST(Arity, Consistency) {
	std::map<std::string, std::size_t> ar;
	check_arity(T("i(n(x),y)"), ar);
	EXPECT_THROW(check_arity(Term::apply("n", {T("x"), T("y")}), ar), std::invalid_argument);
}

// --- properties ----------------------------------------------------------

class TermProperty : public ::testing::Test {
protected:
	std::mt19937_64 rng{20240611};
	const std::vector<std::string> vars{"x", "y", "z"};
	const std::vector<std::string> other{"u", "v", "w"};

	Term random(int budget) { return cdforge::testing::random_term(rng, budget, vars); }
	Term random_other(int budget) { return cdforge::testing::random_term(rng, budget, other); }
};

TEST_F(TermProperty, AgreesWithNaiveUnifier) {
	int unified = 0;
	for (int trial = 0; trial < 3000; ++trial) {
		Term a = random(5), b = random(5);
		auto mine = unify(a, b);
		auto ref = NaiveUnifier::unify({{a, b}});
		ASSERT_EQ(mine.has_value(), ref.has_value()) << to_string(a) << " vs " << to_string(b);
		if (!mine)
			continue;
		++unified;
		Term x = mine->apply(a);
		EXPECT_EQ(x, mine->apply(b));
		// Idempotent.
		EXPECT_EQ(mine->apply(x), x);
		// Both are most general, hence variants of each other.
		EXPECT_TRUE(is_variant(x, NaiveUnifier::apply(*ref, a)));
	}
	EXPECT_GT(unified, 100);
}

TEST_F(TermProperty, SymmetryAndMostGenerality) {
	// Candidate ground unifiers come from a small domain, enumerated fully.
	const std::vector<Term> domain{T("a"), T("n(a)"), T("i(a,a)"), T("i(n(a),a)"), T("i(a,i(a,a))")};
	int witnessed = 0;
	for (int trial = 0; trial < 1500; ++trial) {
		Term a = random(4), b = random(4);
		auto s = unify(a, b);
		auto t = unify(b, a);
		ASSERT_EQ(s.has_value(), t.has_value());
		if (s)
			EXPECT_TRUE(is_variant(s->apply(a), t->apply(a)));
		for (std::size_t code = 0; code < domain.size() * domain.size() * domain.size(); ++code) {
			Substitution theta;
			std::size_t c = code;
			for (const auto& v : vars) {
				theta.bind(v, domain[c % domain.size()]);
				c /= domain.size();
			}
			if (theta.apply(a) != theta.apply(b))
				continue;
			++witnessed;
			ASSERT_TRUE(s) << "unifier exists but unify failed: " << to_string(a) << " vs " << to_string(b);
			EXPECT_TRUE(subsumes(s->apply(a), theta.apply(a)));
		}
	}
	EXPECT_GT(witnessed, 100);
}

TEST_F(TermProperty, MatchImpliesRenamedUnify) {
	int matched = 0;
	for (int trial = 0; trial < 2000; ++trial) {
		Term g = random(3);
		Term s = random_other(5);
		if (!match_onto(g, s))
			continue;
		++matched;
		EXPECT_TRUE(unify(rename_apart(g, variables_of(s)), s));
	}
	EXPECT_GT(matched, 20);
}

TEST_F(TermProperty, RoundTrips) {
	for (int trial = 0; trial < 1000; ++trial) {
		Term t = random(8);
		EXPECT_EQ(parse_functional(to_string(t)), t);
		Term c = canonical(t);
		EXPECT_TRUE(is_variant(parse_polish(print_polish(t)), t));
		EXPECT_EQ(canonical(parse_polish(print_polish(c))), c);
	}
}

TEST_F(TermProperty, MeasureOrdering) {
	for (int trial = 0; trial < 1000; ++trial) {
		TermMeasures m = term_measures(random(8));
		if (m.tsize >= 1) {
			EXPECT_LE(m.height, m.csize);
			EXPECT_LE(m.csize, m.tsize);
		}
	}
}

} // namespace
