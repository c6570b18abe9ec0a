#include "cdforge/lemma.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace cdforge {

void write_lemmas(std::ostream& out, const std::vector<LemmaRecord>& lemmas) {
	out << nlohmann::json{{"format", kFormatTag}, {"kind", "lemmas"}}.dump() << '\n';
	for (const auto& l : lemmas) {
		nlohmann::json j{{"dterm", to_string(l.dterm)}, {"formula", to_string(l.formula)}};
		if (l.score)
			j["score"] = *l.score;
		out << j.dump() << '\n';
	}
}

std::vector<LemmaRecord> read_lemmas(std::istream& in) {
	std::vector<LemmaRecord> out;
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
			DTerm d = parse_dterm(j.at("dterm").get<std::string>());
			Term f = parse_functional(j.at("formula").get<std::string>());
			std::optional<double> score;
			if (j.contains("score") && !j["score"].is_null())
				score = j["score"].get<double>();
			out.push_back({std::move(d), std::move(f), {}, score});
		} catch (const std::exception& e) {
			throw std::invalid_argument("lemma file line " + std::to_string(lineno) + ": " + e.what());
		}
	}
	return out;
}

std::vector<LemmaRecord> load_lemmas(const std::string& path) {
	std::ifstream in(path);
	if (!in)
		throw std::invalid_argument("cannot open lemma file '" + path + "'");
	return read_lemmas(in);
}

void save_lemmas(const std::string& path, const std::vector<LemmaRecord>& lemmas) {
	std::ofstream out(path);
	if (!out)
		throw std::runtime_error("cannot write '" + path + "'");
	write_lemmas(out, lemmas);
}

} // namespace cdforge
