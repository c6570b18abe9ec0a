#include "cdforge/sgcd.hpp"

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

using namespace cdforge;

namespace {

const char* kMeredith = "i(i(i(i(i(x,y),i(n(z),n(u))),z),v),i(i(v,x),i(u,x)))";

DTerm lcl_proof() {
	std::ifstream in(CDFORGE_DATA_DIR "/LCL073-1.proof");
	std::stringstream ss;
	ss << in.rdbuf();
	return parse_factor_equations(ss.str());
}

AxiomMap lcl_axioms() {
	// The leaf n stands for an unconstrained minor premise.
	return {{"1", parse_functional(kMeredith)}, {"n", Term::variable("p")}};
}

void BM_MgtLcl073(benchmark::State& state) {
	DTerm proof = lcl_proof();
	AxiomMap axioms = lcl_axioms();
	for (auto _ : state)
		benchmark::DoNotOptimize(mgt(proof, axioms));
	state.SetLabel("tsize 3276, csize 46");
}
BENCHMARK(BM_MgtLcl073);

void BM_MinimalDag(benchmark::State& state) {
	DTerm proof = lcl_proof();
	for (auto _ : state)
		benchmark::DoNotOptimize(minimal_dag(proof));
}
BENCHMARK(BM_MinimalDag);

void BM_Unify(benchmark::State& state) {
	// i(x1,i(x2,...)) against i(i(y1,y1),i(i(y2,y2),...)) of growing depth.
	auto chain = [](int depth, bool paired) {
		Term t = Term::variable(paired ? "q" : "p");
		for (int k = depth; k > 0; --k) {
			std::string v = (paired ? "q" : "p") + std::to_string(k);
			Term head = paired ? Term::apply("i", {Term::variable(v), Term::variable(v)}) : Term::variable(v);
			t = Term::apply("i", {head, t});
		}
		return t;
	};
	Term a = chain(static_cast<int>(state.range(0)), false);
	Term b = chain(static_cast<int>(state.range(0)), true);
	for (auto _ : state)
		benchmark::DoNotOptimize(unify(a, b));
	state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Unify)->RangeMultiplier(4)->Range(4, 256)->Complexity();

void BM_GenerateLevels(benchmark::State& state) {
	Problem p;
	p.id = "levels";
	p.axioms.emplace("1", parse_functional(kMeredith));
	p.goal = parse_functional("i(i(a,b),i(i(b,c),i(a,c)))");
	const auto levels = static_cast<std::uint64_t>(state.range(0));
	std::size_t generated = 0;
	for (auto _ : state) {
		SearchConfig cfg;
		Search s(p, cfg);
		for (std::uint64_t l = 0; l <= levels; ++l)
			s.merge(s.generate_level(l));
		generated = s.state().triples_generated;
	}
	state.counters["triples"] = static_cast<double>(generated);
}
BENCHMARK(BM_GenerateLevels)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_ProveLuk(benchmark::State& state) {
	Problem p;
	p.id = "luk";
	p.axioms.emplace("1", parse_polish("CCpqCCqrCpr"));
	p.axioms.emplace("2", parse_polish("CCNppp"));
	p.axioms.emplace("3", parse_polish("CpCNpq"));
	p.goal = parse_functional("i(i(i(a,b),c),i(i(c,d),i(i(i(n(a),e),b),d)))");
	SearchConfig cfg;
	cfg.generator = static_cast<Generator>(state.range(0));
	cfg.inference_limit = 50000;
	std::uint64_t inferences = 0;
	for (auto _ : state) {
		SearchOutcome o = sgcd_prove(p, cfg);
		inferences = o.stats.inferences;
	}
	state.SetLabel(to_string(cfg.generator));
	state.counters["inferences"] = static_cast<double>(inferences);
}
BENCHMARK(BM_ProveLuk)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
