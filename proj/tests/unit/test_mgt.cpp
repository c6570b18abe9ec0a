#include "cdforge/mgt.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace cdforge;
using namespace cdforge::testing;

namespace {

Term T(const char* s) { return parse_functional(s); }
DTerm D(const char* s) { return parse_dterm(s); }

const char* kMingle = "i(x,i(x,x))";
const char* kMeredith = "i(i(i(i(i(x,y),i(n(z),n(u))),z),v),i(i(v,x),i(u,x)))";

TEST(CdStep, Examples) {
	auto r = cd_step(T(kMingle), T(kMingle));
	ASSERT_TRUE(r);
	EXPECT_TRUE(is_variant(*r, T("i(i(x,i(x,x)),i(x,i(x,x)))")));
	EXPECT_FALSE(cd_step(T("a"), T("b")));
	EXPECT_FALSE(cd_step(T("i(a,b)"), T("c")));
	// Premises sharing variable names are renamed apart.
	auto s = cd_step(T("i(x,i(y,x))"), T("i(x,y)"));
	ASSERT_TRUE(s);
	EXPECT_TRUE(is_variant(*s, T("i(p,i(q,r))")));
}

TEST(Mgt, Examples) {
	AxiomMap mingle{{"1", T(kMingle)}};
	EXPECT_TRUE(is_variant(*mgt(D("1"), mingle), T(kMingle)));
	AxiomMap mer{{"1", T(kMeredith)}};
	EXPECT_TRUE(is_variant(*mgt(D("D(1,D(1,D(1,1)))"), mer), T("i(i(i(p,p),q),i(r,q))")));
	AxiomMap ground{{"1", T("i(a,b)")}};
	EXPECT_FALSE(mgt(D("D(1,1)"), ground));
	EXPECT_THROW(mgt(D("D(1,2)"), mingle), UnmappedLeafError);
}

TEST(MgtTable, CoversEverySubterm) {
	AxiomMap mer{{"1", T(kMeredith)}};
	DTerm d = D("D(1,D(1,D(1,1)))");
	auto table = mgt_table(d, mer);
	for (const auto& s : distinct_subterms(d))
		EXPECT_TRUE(table.contains(s)) << to_string(s);
}

TEST(Verify, Examples) {
	Problem p{"mingle", {{"1", T(kMingle)}}, T("i(c,i(c,c))"), {}};
	VerificationReport leaf = verify(D("1"), p);
	EXPECT_TRUE(leaf.proved);
	EXPECT_EQ(leaf.measures, (DMeasures{0, 0, 0}));
	VerificationReport dd = verify(D("D(1,1)"), p);
	EXPECT_FALSE(dd.proved);
	ASSERT_TRUE(dd.mgt);
	auto j = nlohmann::json::parse(dd.to_json());
	EXPECT_EQ(j["proved"], false);
	EXPECT_NE(dd.to_text().find("proved: no"), std::string::npos);
	Problem bad{"bad", {{"1", T("i(a,b)")}}, T("b"), {}};
	VerificationReport f = verify(D("D(1,1)"), bad);
	EXPECT_FALSE(f.proved);
	EXPECT_FALSE(f.failures.empty());
}

TEST(Problem, Validation) {
	Problem ok{"ok", {{"1", T(kMingle)}}, T("a"), {}};
	EXPECT_NO_THROW(ok.validate());
	Problem nonground{"ng", {{"1", T(kMingle)}}, T("x"), {}};
	EXPECT_THROW(nonground.validate(), std::invalid_argument);
	Problem empty{"e", {}, T("a"), {}};
	EXPECT_THROW(empty.validate(), std::invalid_argument);
}

TEST(InferMinor, Examples) {
	EXPECT_EQ(*infer_minor(T("i(a,b)"), T("b")), T("a"));
	EXPECT_EQ(*infer_minor(T("i(x,x)"), T("c")), T("c"));
	EXPECT_FALSE(infer_minor(T("i(a,b)"), T("c")));
	// Variables of the conclusion stay fixed.
	auto m = infer_minor(T("i(i(x,y),x)"), T("i(p,q)"));
	ASSERT_TRUE(m);
	auto step = cd_step(T("i(i(x,y),x)"), *m);
	ASSERT_TRUE(step);
	EXPECT_TRUE(subsumes(*step, T("i(p,q)")));
}

TEST(MingleChain, MatchesNaiveOracle) {
	AxiomMap mingle{{"1", T(kMingle)}};
	auto oracle = naive_cd_step(T(kMingle), T(kMingle));
	ASSERT_TRUE(oracle);
	EXPECT_TRUE(is_variant(*mgt(D("D(1,1)"), mingle), *oracle));
}

class MgtProperty : public ::testing::Test {
protected:
	std::mt19937_64 rng{4242};
	const std::vector<AxiomMap> systems{
		{{"1", T(kMeredith)}},
		{{"1", parse_polish("CCpqCCqrCpr")}, {"2", parse_polish("CCNppp")}, {"3", parse_polish("CpCNpq")}},
		{{"1", T("i(x,i(y,x))")}, {"2", T("i(i(x,i(y,z)),i(i(x,y),i(x,z)))")}},
	};
};

TEST_F(MgtProperty, DagAgreesWithTreeRecursion) {
	int defined = 0;
	for (int k = 0; k < 600; ++k) {
		const AxiomMap& ax = systems[k % systems.size()];
		DTerm d = random_dterm(rng, rng() % 9, ax.size());
		auto fast = mgt(d, ax);
		auto slow = naive_mgt(d, ax);
		ASSERT_EQ(fast.has_value(), slow.has_value()) << to_string(d);
		if (fast) {
			++defined;
			EXPECT_TRUE(naive_variant(*fast, *slow)) << to_string(d);
		}
	}
	EXPECT_GT(defined, 100);
}

TEST_F(MgtProperty, Compositionality) {
	for (int k = 0; k < 400; ++k) {
		const AxiomMap& ax = systems[k % systems.size()];
		DTerm d = random_dterm(rng, 1 + rng() % 7, ax.size());
		auto a = mgt(d.major(), ax);
		auto b = mgt(d.minor(), ax);
		auto whole = mgt(d, ax);
		if (!a || !b) {
			EXPECT_FALSE(whole);
			continue;
		}
		auto step = cd_step(*a, *b);
		ASSERT_EQ(step.has_value(), whole.has_value());
		if (step)
			EXPECT_TRUE(is_variant(*step, *whole));
	}
}

TEST_F(MgtProperty, LiftingToAxiomInstances) {
	for (int k = 0; k < 400; ++k) {
		const AxiomMap& ax = systems[1];
		DTerm d = random_dterm(rng, rng() % 6, ax.size());
		auto general = mgt(d, ax);
		if (!general)
			continue;
		// Instantiate one axiom by binding its first variable to i(p,p).
		AxiomMap inst = ax;
		std::string label = std::to_string(1 + rng() % ax.size());
		Term f = ax.at(label);
		Substitution s;
		s.bind(*variables_of(f).begin(), T("i(p,p)"));
		inst.insert_or_assign(label, s.apply(f));
		if (auto special = mgt(d, inst))
			EXPECT_TRUE(subsumes(*general, *special)) << to_string(d);
	}
}

TEST_F(MgtProperty, VerifyReportsMatchGoal) {
	for (int k = 0; k < 300; ++k) {
		const AxiomMap& ax = systems[k % systems.size()];
		DTerm d = random_dterm(rng, rng() % 6, ax.size());
		auto f = mgt(d, ax);
		if (!f)
			continue;
		Problem p{"r", ax, ground(*f), {}};
		VerificationReport r = verify(d, p);
		ASSERT_TRUE(r.proved);
		ASSERT_TRUE(r.mgt);
		EXPECT_TRUE(match_onto(*r.mgt, p.goal));
	}
}

} // namespace
