#pragma once

#include <Eigen/Core>

namespace tempowarp {

/// C x L feature map, one row per channel.
struct FeatureMap {
  Eigen::MatrixXd values;

  Eigen::Index channels() const { return values.rows(); }
  Eigen::Index length() const { return values.cols(); }
};

struct StyleParams {
  Eigen::VectorXd gamma;
  Eigen::VectorXd beta;
};

struct ChannelStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // population (1/L)
};

ChannelStats channel_stats(const FeatureMap& m);

/// (M_c - mu_c) / (sigma_c + eps) per channel.
FeatureMap instance_norm(const FeatureMap& m, double eps = 1e-5);

/// gamma_c * (M_c - mu_c) / (sigma_c + eps) + beta_c per channel.
FeatureMap adain(const FeatureMap& content, const StyleParams& style, double eps = 1e-5);

}  // namespace tempowarp
