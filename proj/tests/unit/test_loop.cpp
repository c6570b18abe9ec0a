#include "cdforge/loop.hpp"
#include "cdforge/tptp.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

using namespace cdforge;
namespace fs = std::filesystem;

namespace {

Problem load(const std::string& name) {
	return parse_tptp_cd(cdforge::testing::read_data("corpus/" + name + ".p"), name);
}

LoopConfig small_loop() {
	LoopConfig cfg;
	cfg.corpus = {load("mer-01"), load("mer-02"), load("luk-01")};
	cfg.k = 10;
	cfg.search.inference_limit = 20000;
	cfg.label_search.inference_limit = 20000;
	cfg.train.epochs = 50;
	return cfg;
}

TEST(Loop, SingleIterationIsPlainSweep) {
	LoopConfig cfg = small_loop();
	cfg.iterations = 1;
	LoopReport r = run_loop(cfg);
	ASSERT_EQ(r.iterations.size(), 1u);
	ASSERT_EQ(r.iterations[0].runs.size(), cfg.corpus.size());
	for (std::size_t k = 0; k < cfg.corpus.size(); ++k) {
		const ProblemRun& run = r.iterations[0].runs[k];
		SearchOutcome ref = sgcd_prove(cfg.corpus[k], cfg.search);
		EXPECT_EQ(run.problem, cfg.corpus[k].id);
		EXPECT_EQ(run.outcome.status, ref.status);
		EXPECT_EQ(run.outcome.proof, ref.proof);
		EXPECT_EQ(run.seeds, 0u);
		EXPECT_TRUE(run.error.empty());
	}
	EXPECT_EQ(r.solved_union, r.iterations[0].solved);
}

TEST(Loop, UnsolvableCorpusSkipsTraining) {
	LoopConfig cfg;
	cfg.corpus = {{"u", {{"1", parse_functional("i(a,b)")}}, parse_functional("c"), {}}};
	cfg.iterations = 2;
	LoopReport r = run_loop(cfg);
	ASSERT_EQ(r.iterations.size(), 2u);
	EXPECT_TRUE(r.iterations[1].training_skipped);
	EXPECT_FALSE(r.iterations[1].final_loss);
	EXPECT_TRUE(r.solved_union.empty());
	auto j = nlohmann::json::parse(r.to_json());
	EXPECT_EQ(j["iterations"].size(), 2u);
}

TEST(Loop, ArtifactsAndUnion) {
	LoopConfig cfg = small_loop();
	cfg.iterations = 2;
	cfg.workers = 2;
	fs::path dir = fs::temp_directory_path() / "cdforge-loop-unit";
	fs::remove_all(dir);
	cfg.out_dir = dir;
	LoopReport r = run_loop(cfg);
	ASSERT_EQ(r.iterations.size(), 2u);
	for (const auto& it : r.iterations)
		for (const auto& s : it.solved)
			EXPECT_TRUE(r.solved_union.contains(s));
	EXPECT_TRUE(fs::exists(dir / "report.json"));
	EXPECT_TRUE(fs::exists(dir / "iter_0" / "mer-01" / "outcome.json"));
	EXPECT_TRUE(fs::exists(dir / "iter_0" / "mer-01" / "problem.p"));
	EXPECT_TRUE(fs::exists(dir / "iter_1" / "training.jsonl"));
	if (!r.iterations[1].training_skipped)
		EXPECT_TRUE(fs::exists(dir / "iter_1" / "model.json"));
	EXPECT_TRUE(fs::exists(dir / "iter_1" / "mer-01" / "closed.jsonl"));
	// Exported problems parse back to the same problem.
	std::ifstream in(dir / "iter_0" / "luk-01" / "problem.p");
	std::stringstream ss;
	ss << in.rdbuf();
	Problem back = parse_tptp_cd(ss.str(), "luk-01");
	EXPECT_EQ(back.axioms, cfg.corpus[2].axioms);
	EXPECT_EQ(back.goal, cfg.corpus[2].goal);
	fs::remove_all(dir);
}

TEST(Loop, RejectsZeroIterations) {
	LoopConfig cfg = small_loop();
	cfg.iterations = 0;
	EXPECT_THROW(run_loop(cfg), std::invalid_argument);
}

} // namespace
