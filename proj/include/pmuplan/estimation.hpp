// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Linear phasor-only weighted least squares: the rectangular measurement
// Jacobian, the projection (hat) matrix K = H (Hᵀ R⁻¹ H)⁻¹ Hᵀ R⁻¹ and the
// residual sensitivity matrix S = I - K, plus the diagonal metrics used to
// rank placements.
//
// All solves go through a column-pivoted Householder QR of R^{-1/2} H. Pivots
// below kRankTolerance times the largest pivot count as zero.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "pmuplan/errors.hpp"
#include "pmuplan/measurement.hpp"
#include "pmuplan/network.hpp"

namespace pmuplan {

inline constexpr double kRankTolerance = 1e-10;

enum class StateScope {
  kFullState,  // (Vr, Vx) of every bus, n = 2|Omega|
  kPmuState,   // (Vr, Vx) of PMU buses only, n = 2|Q|
};

struct StateColumn {
  BusId bus = 0;
  bool imaginary = false;

  bool operator==(const StateColumn&) const = default;
};

struct Jacobian {
  Eigen::MatrixXd entries;
  std::vector<MeasurementChannel> rows;
  std::vector<StateColumn> columns;

  Eigen::Index m() const { return entries.rows(); }
  Eigen::Index n() const { return entries.cols(); }
};

// Diagonal measurement covariance.
struct CovarianceModel {
  Eigen::VectorXd variances;

  static CovarianceModel identity(Eigen::Index m) {
    return {Eigen::VectorXd::Ones(m)};
  }
  static CovarianceModel from_channels(
      const std::vector<MeasurementChannel>& channels) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(channels.size()));
    for (std::size_t i = 0; i < channels.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = channels[i].variance;
    }
    return {std::move(v)};
  }
};

inline Jacobian build_jacobian(const NetworkCase& net,
                               const MeasurementSet& mset,
                               StateScope scope = StateScope::kFullState,
                               BranchModel model = BranchModel::kTapAware) {
  if (mset.channels.empty()) throw UsageError("measurement set is empty");
  const BusSet& state_buses =
      scope == StateScope::kFullState ? net.omega() : mset.placement.buses;

  Jacobian jac;
  jac.rows = mset.channels;
  jac.columns.reserve(2 * state_buses.size());
  for (BusId b : state_buses) {
    jac.columns.push_back({b, false});
    jac.columns.push_back({b, true});
  }
  jac.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(jac.rows.size()),
                                      static_cast<Eigen::Index>(jac.columns.size()));

  // Column of (bus, Vr), or -1 when the bus carries no state in this scope.
  auto column = [&](BusId b) -> Eigen::Index {
    auto it = std::lower_bound(state_buses.begin(), state_buses.end(), b);
    if (it == state_buses.end() || *it != b) return -1;
    return 2 * static_cast<Eigen::Index>(it - state_buses.begin());
  };

  const auto branches = net.branches();
  for (std::size_t i = 0; i < jac.rows.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const MeasurementChannel& ch = jac.rows[i];
    switch (ch.kind) {
      case ChannelKind::kVr:
      case ChannelKind::kVx: {
        const Eigen::Index c = column(ch.bus);
        if (c < 0) break;
        jac.entries(row, c + (ch.kind == ChannelKind::kVx ? 1 : 0)) = 1.0;
        break;
      }
      case ChannelKind::kIr:
      case ChannelKind::kIx: {
        const Branch& br = branches[ch.branch->index];
        const BusId self = ch.branch->metered_end;
        const BusId other = NetworkCase::other_end(br, self);
        const BranchAdmittance y = branch_end_admittances(br, model);
        const bool at_from = self == br.from_bus;
        const std::pair<BusId, std::complex<double>> terms[] = {
            {self, at_from ? y.ff : y.tt},
            {other, at_from ? y.ft : y.tf},
        };
        for (const auto& [bus, adm] : terms) {
          const Eigen::Index c = column(bus);
          if (c < 0) continue;
          if (ch.kind == ChannelKind::kIr) {
            jac.entries(row, c) += adm.real();
            jac.entries(row, c + 1) += -adm.imag();
          } else {
            jac.entries(row, c) += adm.imag();
            jac.entries(row, c + 1) += adm.real();
          }
        }
        break;
      }
    }
  }
  return jac;
}

// Factorization of the whitened Jacobian R^{-1/2} H shared by the estimate,
// the projection matrix and its diagonal.
class WeightedLeastSquares {
 public:
  WeightedLeastSquares(const Eigen::MatrixXd& h, const Eigen::VectorXd& variances)
      : h_(h) {
    if (variances.size() != h.rows()) {
      throw UsageError("covariance size does not match the Jacobian");
    }
    if ((variances.array() <= 0.0).any() || !variances.allFinite()) {
      throw UsageError("measurement variances must be positive");
    }
    scale_ = variances.array().rsqrt().matrix();
    qr_.setThreshold(kRankTolerance);
    qr_.compute(scale_.asDiagonal() * h);
  }

  WeightedLeastSquares(const Jacobian& h, const CovarianceModel& r)
      : WeightedLeastSquares(h.entries, r.variances) {}

  Eigen::Index m() const { return h_.rows(); }
  Eigen::Index n() const { return h_.cols(); }
  Eigen::Index rank() const { return qr_.rank(); }

  void require_full_rank() const {
    if (rank() < n()) throw UnobservableError(n() - rank());
  }

  // Δx̂ = (Hᵀ R⁻¹ H)⁻¹ Hᵀ R⁻¹ Δz
  Eigen::VectorXd estimate(const Eigen::VectorXd& dz) const {
    require_full_rank();
    if (dz.size() != m()) throw UsageError("residual vector has wrong length");
    return qr_.solve(scale_.cwiseProduct(dz));
  }

  // diag(K); K and R^{-1/2} K R^{1/2} share the same diagonal.
  Eigen::VectorXd leverages() const {
    require_full_rank();
    const Eigen::MatrixXd permuted =
        (scale_.asDiagonal() * h_) * qr_.colsPermutation();
    const auto r = qr_.matrixR().topLeftCorner(n(), n())
                       .template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd y = r.transpose().solve(permuted.transpose());
    return y.colwise().squaredNorm().transpose();
  }

  Eigen::MatrixXd projection() const {
    require_full_rank();
    const Eigen::MatrixXd q = qr_.householderQ() * Eigen::MatrixXd::Identity(m(), n());
    Eigen::MatrixXd k = q * q.transpose();
    // Undo the whitening: K = R^{1/2} P R^{-1/2}.
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      for (Eigen::Index i = 0; i < k.rows(); ++i) {
        k(i, j) *= scale_(j) / scale_(i);
      }
    }
    return k;
  }

 private:
  Eigen::MatrixXd h_;
  Eigen::VectorXd scale_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

inline Eigen::VectorXd wls_estimate(const Jacobian& h, const CovarianceModel& r,
                                    const Eigen::VectorXd& dz) {
  return WeightedLeastSquares(h, r).estimate(dz);
}

inline Eigen::MatrixXd projection_matrix(const Jacobian& h,
                                         const CovarianceModel& r) {
  return WeightedLeastSquares(h, r).projection();
}

inline Eigen::MatrixXd sensitivity_matrix(const Jacobian& h,
                                          const CovarianceModel& r) {
  const Eigen::MatrixXd k = projection_matrix(h, r);
  return Eigen::MatrixXd::Identity(k.rows(), k.cols()) - k;
}

// Rank from singular values, the reference the QR decisions are tested against.
inline Eigen::Index numerical_rank(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0;
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const auto& sigma = svd.singularValues();
  const double cutoff = kRankTolerance * sigma.maxCoeff();
  return (sigma.array() > cutoff).count();
}

struct DiagonalMetrics {
  double min = 0.0;
  double max = 0.0;
  double sum = 0.0;
  double average = 0.0;
};

inline DiagonalMetrics diagonal_metrics(const Eigen::VectorXd& diag) {
  if (diag.size() == 0) throw UsageError("diagonal is empty");
  return {diag.minCoeff(), diag.maxCoeff(), diag.sum(), diag.mean()};
}

struct SensitivityReport {
  Eigen::VectorXd diag_s;
  double min = 0.0;
  double max = 0.0;
  double sum = 0.0;
  double average = 0.0;
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  Eigen::Index rank = 0;
};

// Metrics over diag(S). Only S is known here, so n is left at zero and the
// rank is recovered from trace(S) = m - rank.
inline SensitivityReport diag_metrics(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) throw UsageError("S must be square");
  SensitivityReport report;
  report.diag_s = s.diagonal();
  const DiagonalMetrics d = diagonal_metrics(report.diag_s);
  report.min = d.min;
  report.max = d.max;
  report.sum = d.sum;
  report.average = d.average;
  report.m = s.rows();
  report.rank = s.rows() - static_cast<Eigen::Index>(std::llround(d.sum));
  return report;
}

inline SensitivityReport sensitivity_report(const Jacobian& h,
                                            const CovarianceModel& r) {
  SensitivityReport report = diag_metrics(sensitivity_matrix(h, r));
  report.n = h.n();
  report.rank = numerical_rank(h.entries);
  return report;
}

struct MetricOptions {
  StateScope scope = StateScope::kFullState;
  Dedupe dedupe = Dedupe::kByBranch;
  ChannelVariances variances;
  BranchModel branch_model = BranchModel::kTapAware;
  int channel_limit = kDefaultChannelLimit;
};

// av(diag(S)) for the measurement set induced by `buses`.
inline double placement_metric(const NetworkCase& net, const BusSet& buses,
                               const MetricOptions& options = {}) {
  if (buses.empty()) throw UsageError("placement is empty");
  const PmuPlacement placement =
      make_placement(net, buses, options.channel_limit);
  const MeasurementSet mset =
      enumerate_channels(net, placement, options.dedupe, options.variances);
  const Jacobian h = build_jacobian(net, mset, options.scope, options.branch_model);
  const WeightedLeastSquares wls(h, CovarianceModel::from_channels(mset.channels));
  return 1.0 - wls.leverages().mean();
}

// Binds a case and options into a thread-safe placement objective.
inline SetMetric make_sensitivity_metric(std::shared_ptr<const NetworkCase> net,
                                         MetricOptions options = {}) {
  return [net = std::move(net), options](const BusSet& buses) {
    return placement_metric(*net, buses, options);
  };
}

}  // namespace pmuplan
