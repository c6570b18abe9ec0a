#include "cdforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cdforge {

std::vector<double> LinearModel::standardize(const std::vector<double>& raw) const {
	if (raw.size() != weights.size())
		throw std::invalid_argument("feature vector has " + std::to_string(raw.size()) + " entries, model expects " +
									std::to_string(weights.size()));
	std::vector<double> z(raw.size());
	for (std::size_t i = 0; i < raw.size(); ++i)
		z[i] = (raw[i] - mean[i]) / stddev[i];
	return z;
}

double LinearModel::predict_standardized(const std::vector<double>& z) const {
	double s = bias;
	for (std::size_t i = 0; i < z.size(); ++i)
		s += weights[i] * z[i];
	return s;
}

double LinearModel::predict_raw(const std::vector<double>& raw) const {
	return predict_standardized(standardize(raw));
}

double LinearModel::predict(const FeatureVector& f) const {
	std::vector<double> raw;
	raw.reserve(features.size());
	for (const auto& name : features)
		raw.push_back(f.get(name));
	return predict_raw(raw);
}

namespace {

double objective(const std::vector<std::vector<double>>& z, const std::vector<double>& y, const LinearModel& m) {
	double sse = 0.0;
	for (std::size_t r = 0; r < z.size(); ++r) {
		double e = m.predict_standardized(z[r]) - y[r];
		sse += e * e;
	}
	double penalty = 0.0;
	for (double w : m.weights)
		penalty += w * w;
	return sse / static_cast<double>(z.size()) + m.hp.l2 * penalty;
}

} // namespace

LinearModel train_linear(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
						 const std::vector<std::string>& names, const TrainParams& hp) {
	if (x.empty())
		throw std::invalid_argument("no training data");
	if (x.size() != y.size())
		throw std::invalid_argument("feature rows and targets differ in count");
	const std::size_t d = names.size();
	for (std::size_t r = 0; r < x.size(); ++r) {
		if (x[r].size() != d)
			throw std::invalid_argument("row " + std::to_string(r) + " has wrong feature count");
		if (!std::isfinite(y[r]) || !std::all_of(x[r].begin(), x[r].end(), [](double v) { return std::isfinite(v); }))
			throw std::invalid_argument("row " + std::to_string(r) + " has non-finite values");
	}
	const std::size_t n = x.size();
	LinearModel m;
	m.features = names;
	m.hp = hp;
	m.weights.assign(d, 0.0);
	m.mean.assign(d, 0.0);
	m.stddev.assign(d, 1.0);
	for (std::size_t i = 0; i < d; ++i) {
		double mu = 0.0;
		for (const auto& row : x)
			mu += row[i];
		mu /= static_cast<double>(n);
		double var = 0.0;
		for (const auto& row : x)
			var += (row[i] - mu) * (row[i] - mu);
		var /= static_cast<double>(n);
		m.mean[i] = mu;
		m.stddev[i] = var > 1e-24 ? std::sqrt(var) : 1.0;
	}
	std::vector<std::vector<double>> z;
	z.reserve(n);
	for (const auto& row : x)
		z.push_back(m.standardize(row));

	std::mt19937_64 rng(hp.seed);
	std::vector<std::size_t> order(n);
	std::iota(order.begin(), order.end(), 0);
	const std::size_t batch = hp.batch_size == 0 ? n : std::min(hp.batch_size, n);
	std::vector<double> grad(d);
	for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
		if (batch < n)
			std::shuffle(order.begin(), order.end(), rng);
		for (std::size_t start = 0; start < n; start += batch) {
			std::size_t end = std::min(n, start + batch);
			auto bs = static_cast<double>(end - start);
			std::fill(grad.begin(), grad.end(), 0.0);
			double gbias = 0.0;
			for (std::size_t k = start; k < end; ++k) {
				const auto& row = z[order[k]];
				double e = m.predict_standardized(row) - y[order[k]];
				for (std::size_t i = 0; i < d; ++i)
					grad[i] += 2.0 * e * row[i] / bs;
				gbias += 2.0 * e / bs;
			}
			for (std::size_t i = 0; i < d; ++i)
				m.weights[i] -= hp.learning_rate * (grad[i] + 2.0 * hp.l2 * m.weights[i]);
			m.bias -= hp.learning_rate * gbias;
		}
		m.loss_history.push_back(objective(z, y, m));
	}
	return m;
}

std::string LinearModel::to_json() const {
	nlohmann::json j;
	j["format"] = kFormatTag;
	j["features"] = features;
	j["weights"] = weights;
	j["bias"] = bias;
	j["norm"] = {{"mean", mean}, {"std", stddev}};
	j["hp"] = {{"learning_rate", hp.learning_rate},
			   {"epochs", hp.epochs},
			   {"batch_size", hp.batch_size},
			   {"l2", hp.l2}};
	j["seed"] = hp.seed;
	j["final_loss"] = final_loss();
	return j.dump(2);
}

LinearModel LinearModel::from_json(const std::string& text) {
	auto j = nlohmann::json::parse(text);
	LinearModel m;
	m.features = j.at("features").get<std::vector<std::string>>();
	m.weights = j.at("weights").get<std::vector<double>>();
	m.bias = j.at("bias").get<double>();
	m.mean = j.at("norm").at("mean").get<std::vector<double>>();
	m.stddev = j.at("norm").at("std").get<std::vector<double>>();
	if (m.weights.size() != m.features.size() || m.mean.size() != m.features.size() ||
		m.stddev.size() != m.features.size())
		throw std::invalid_argument("model file: inconsistent dimensions");
	if (j.contains("hp")) {
		const auto& hp = j["hp"];
		m.hp.learning_rate = hp.value("learning_rate", m.hp.learning_rate);
		m.hp.epochs = hp.value("epochs", m.hp.epochs);
		m.hp.batch_size = hp.value("batch_size", m.hp.batch_size);
		m.hp.l2 = hp.value("l2", m.hp.l2);
	}
	m.hp.seed = j.value("seed", m.hp.seed);
	if (j.contains("final_loss"))
		m.loss_history.push_back(j["final_loss"].get<double>());
	return m;
}

void LinearModel::save(const std::string& path) const {
	std::ofstream out(path);
	if (!out)
		throw std::runtime_error("cannot write '" + path + "'");
	out << to_json() << '\n';
}

LinearModel LinearModel::load(const std::string& path) {
	std::ifstream in(path);
	if (!in)
		throw std::invalid_argument("cannot open model file '" + path + "'");
	std::stringstream ss;
	ss << in.rdbuf();
	return from_json(ss.str());
}

} // namespace cdforge
