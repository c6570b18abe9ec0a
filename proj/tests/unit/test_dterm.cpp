#include "cdforge/dterm.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace cdforge;

namespace {

DTerm D(const char* s) { return parse_dterm(s); }

TEST(DMeasures, Examples) {
	EXPECT_EQ(d_measures(D("D(D(1,D(1,1)),D(D(1,1),1))")), (DMeasures{5, 3, 4}));
	EXPECT_EQ(d_measures(D("1")), (DMeasures{0, 0, 0}));
	EXPECT_EQ(d_measures(D("D(1,1)")), (DMeasures{1, 1, 1}));
}

TEST(DTermText, ParsePrint) {
	EXPECT_EQ(to_string(D(" D( D(1, n) ,2 ) ")), "D(D(1,n),2)");
	EXPECT_THROW(D("D(1)"), ParseError);
	EXPECT_THROW(D("D(1,2"), ParseError);
	EXPECT_THROW(D("E(1,2)"), ParseError);
}

TEST(MinimalDag, Examples) {
	MinimalDag g = minimal_dag(D("D(D(1,1),D(1,1))"));
	EXPECT_EQ(g.node_count(), 2u);
	EXPECT_EQ(unfold(g), D("D(D(1,1),D(1,1))"));
	MinimalDag leaf = minimal_dag(D("n"));
	EXPECT_EQ(leaf.node_count(), 0u);
	EXPECT_TRUE(leaf.entries[leaf.root].is_leaf);
}

TEST(MinimalDag, LineFifteenHas46Nodes) {
	DTerm proof = parse_factor_equations(cdforge::testing::read_data("LCL073-1.proof"));
	EXPECT_EQ(minimal_dag(proof).node_count(), 46u);
	EXPECT_EQ(d_measures(proof), (DMeasures{3276, 40, 46}));
}

TEST(FactorEquations, Examples) {
	DTerm d = parse_factor_equations("2 = D(1, 1), 3 = D(1, 2), 4 = D(2, D(3, 3))");
	EXPECT_EQ(d, D("D(D(1,1),D(D(1,D(1,1)),D(1,D(1,1))))"));
	EXPECT_EQ(print_factor_equations(D("D(1,1)")), "2 = D(1, 1)");
	EXPECT_EQ(print_factor_equations(D("D(D(1,1),D(1,1))")), "2 = D(1, 1), 3 = D(2, 2)");
	// Newline separators and a plain D-term are accepted too.
	EXPECT_EQ(parse_factor_equations("2 = D(1, 1)\n3 = D(2, 2)\n"), D("D(D(1,1),D(1,1))"));
	EXPECT_EQ(parse_factor_equations("D(1,1)"), D("D(1,1)"));
}

TEST(FactorEquations, Errors) {
	std::set<std::string> axioms{"1"};
	EXPECT_THROW(parse_factor_equations("2 = D(1, 3)", &axioms), ParseError);
	EXPECT_THROW(parse_factor_equations("2 = D(1, 1), 2 = D(2, 1)"), ParseError);
	EXPECT_THROW(parse_factor_equations("2 = D(2, 1)", &axioms), ParseError);
}

TEST(FactorEquations, NumberingSkipsNumericLeaves) {
	std::string text = print_factor_equations(D("D(D(7,n),D(7,n))"));
	EXPECT_EQ(text, "8 = D(7, n), 9 = D(8, 8)");
}

TEST(Subterms, ClosureExamples) {
	auto c = subproof_closure({D("D(D(1,1),1)")});
	ASSERT_EQ(c.size(), 3u);
	EXPECT_TRUE(c[0].is_leaf);
	EXPECT_EQ(c[0].dterm, D("1"));
	EXPECT_EQ(c[1].dterm, D("D(1,1)"));
	EXPECT_EQ(c[2].dterm, D("D(D(1,1),1)"));
	EXPECT_TRUE(subproof_closure({}).empty());
}

TEST(Subterms, InstanceOccurrences) {
	EXPECT_EQ(count_instance_occurrences(D("D(1,1)"), D("D(D(1,1),D(1,1))")), 2u);
	EXPECT_EQ(count_instance_occurrences(D("X"), D("D(1,1)")), 3u);
	EXPECT_EQ(count_instance_occurrences(D("D(1,1)"), D("1")), 0u);
	EXPECT_EQ(count_instance_occurrences(D("D(X,X)"), D("D(D(1,1),D(D(1,1),D(1,2)))")), 2u);
}

TEST(Subterms, IncomingEdgesAndDepth) {
	DTerm host = D("D(D(1,1),D(D(1,1),1))");
	EXPECT_EQ(dag_incoming_edges(D("D(1,1)"), host), 2u);
	EXPECT_EQ(dag_incoming_edges(host, host), 0u);
	EXPECT_EQ(min_depth_of(D("D(1,1)"), host), 1u);
	EXPECT_EQ(min_depth_of(host, host), 0u);
	EXPECT_FALSE(min_depth_of(D("D(2,2)"), host));
}

class DTermProperty : public ::testing::Test {
protected:
	std::mt19937_64 rng{99};
	DTerm random(std::uint64_t max_inner) {
		return cdforge::testing::random_dterm(rng, rng() % (max_inner + 1), 2);
	}
};

TEST_F(DTermProperty, FactorEquationRoundTrip) {
	for (int k = 0; k < 1000; ++k) {
		DTerm d = random(12);
		EXPECT_EQ(parse_factor_equations(print_factor_equations(d)), d) << to_string(d);
		EXPECT_EQ(parse_dterm(to_string(d)), d);
	}
}

TEST_F(DTermProperty, DagCanonicalAndMeasureOrder) {
	for (int k = 0; k < 500; ++k) {
		DTerm d = random(12);
		DTerm copy = parse_dterm(to_string(d));
		MinimalDag g = minimal_dag(d);
		EXPECT_EQ(g, minimal_dag(copy));
		EXPECT_EQ(unfold(g), d);
		DMeasures m = d_measures(d);
		EXPECT_EQ(g.node_count(), m.csize);
		EXPECT_EQ(distinct_compound_subterms(d).size(), m.csize);
		if (m.tsize >= 1) {
			EXPECT_LE(m.csize, m.tsize);
			EXPECT_LE(m.height, m.csize);
		}
		// No two table entries are structurally equal.
		for (std::size_t a = 0; a < g.entries.size(); ++a)
			for (std::size_t b = a + 1; b < g.entries.size(); ++b)
				EXPECT_FALSE(g.entries[a] == g.entries[b]);
	}
}

TEST_F(DTermProperty, ClosureIdempotentMonotoneExtensive) {
	auto compounds = [](const std::vector<ClosureEntry>& c) {
		std::vector<DTerm> out;
		for (const auto& e : c)
			out.push_back(e.dterm);
		return out;
	};
	for (int k = 0; k < 300; ++k) {
		std::vector<DTerm> s{random(8), random(8)};
		auto c1 = compounds(subproof_closure(s));
		auto c2 = compounds(subproof_closure(c1));
		EXPECT_EQ(c1, c2);
		for (const auto& d : s)
			EXPECT_NE(std::find(c1.begin(), c1.end(), d), c1.end());
		std::vector<DTerm> bigger = s;
		bigger.push_back(random(8));
		auto c3 = compounds(subproof_closure(bigger));
		for (const auto& d : c1)
			EXPECT_NE(std::find(c3.begin(), c3.end(), d), c3.end());
		// A singleton closure holds exactly csize compounds.
		auto single = subproof_closure({s[0]});
		auto n = std::count_if(single.begin(), single.end(), [](const ClosureEntry& e) { return !e.is_leaf; });
		EXPECT_EQ(static_cast<std::uint64_t>(n), d_measures(s[0]).csize);
	}
}

} // namespace
