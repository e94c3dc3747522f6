#include "tempowarp/feature_norm.hpp"

#include <cmath>

#include "tempowarp/error.hpp"

namespace tempowarp {

namespace {

void check_map(const FeatureMap& m) {
  require(m.length() >= 1, ErrorKind::InvalidInput, "feature map channels need at least one element");
  require(m.values.allFinite(), ErrorKind::InvalidInput, "feature map contains non-finite values");
}

}  // namespace

ChannelStats channel_stats(const FeatureMap& m) {
  check_map(m);
  ChannelStats s;
  s.mean = m.values.rowwise().mean();
  const Eigen::MatrixXd centred = m.values.colwise() - s.mean;
  s.stddev = (centred.array().square().rowwise().sum() / static_cast<double>(m.length())).sqrt();
  return s;
}

FeatureMap instance_norm(const FeatureMap& m, double eps) {
  require(eps >= 0.0, ErrorKind::InvalidInput, "eps must be nonnegative");
  const ChannelStats s = channel_stats(m);
  FeatureMap out{m.values.colwise() - s.mean};
  for (Eigen::Index c = 0; c < m.channels(); ++c) {
    const double denom = s.stddev(c) + eps;
    out.values.row(c) = denom > 0.0 ? Eigen::RowVectorXd(out.values.row(c) / denom)
                                    : Eigen::RowVectorXd::Zero(m.length());
  }
  return out;
}

FeatureMap adain(const FeatureMap& content, const StyleParams& style, double eps) {
  require(style.gamma.size() == content.channels() && style.beta.size() == content.channels(),
          ErrorKind::InvalidInput, "style parameters must match the content channel count");
  FeatureMap out = instance_norm(content, eps);
  for (Eigen::Index c = 0; c < content.channels(); ++c) {
    out.values.row(c) = (style.gamma(c) * out.values.row(c)).array() + style.beta(c);
  }
  return out;
}

}  // namespace tempowarp
