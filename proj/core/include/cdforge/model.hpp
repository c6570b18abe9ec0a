#pragma once

#include "cdforge/features.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cdforge {

struct TrainParams {
	double learning_rate = 0.01;
	std::size_t epochs = 300;
	/// 0 means full batch.
	std::size_t batch_size = 32;
	std::uint64_t seed = 1;
	double l2 = 0.0;
};

/// Utility predictor U(f) = sum_i w_i * z_i + bias over standardized
/// features z_i = (f_i - mean_i) / std_i.
struct LinearModel {
	std::vector<std::string> features;
	std::vector<double> weights;
	double bias = 0.0;
	std::vector<double> mean;
	std::vector<double> stddev;
	TrainParams hp;
	/// Objective (MSE plus L2 penalty) after each epoch.
	std::vector<double> loss_history;

	double final_loss() const { return loss_history.empty() ? 0.0 : loss_history.back(); }

	std::vector<double> standardize(const std::vector<double>& raw) const;
	double predict_raw(const std::vector<double>& raw) const;
	double predict_standardized(const std::vector<double>& z) const;
	/// Looks features up by name, so vectors with a different layout work.
	double predict(const FeatureVector& f) const;

	std::string to_json() const;
	static LinearModel from_json(const std::string& text);
	void save(const std::string& path) const;
	static LinearModel load(const std::string& path);
};

/// Mini-batch gradient descent on mean squared error. Rows of x must share
/// the length of `names`. Throws std::invalid_argument on empty or
/// non-finite data.
LinearModel train_linear(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
						 const std::vector<std::string>& names, const TrainParams& hp);

} // namespace cdforge
