#include "gmmsq/packing.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "gmmsq/rng.hpp"

namespace gmmsq::packing {

Matrix random_frame(int m, int d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix g(d, m);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < m; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, m);
  // Fix the sign convention so the frame is a deterministic function of g.
  Matrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q.transpose();
}

double operator_norm(const Matrix& a) {
  return a.jacobiSvd().singularValues()[0];
}

double operator_norm_power(const Matrix& a, int iterations, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Rng rng(0x9e3779b9ULL);
  Vector v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  v.normalize();
  double norm = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = a.transpose() * (a * v);
    const double next = std::sqrt(w.norm());
    if (w.norm() == 0.0) return 0.0;
    w.normalize();
    if (std::abs(next - norm) <= tol * std::max(1.0, next)) {
      norm = next;
      break;
    }
    norm = next;
    v = w;
  }
  return norm;
}

namespace {

double cross_frobenius(const Matrix& a, const Matrix& b) { return (a * b.transpose()).norm(); }

double cross_operator(const Matrix& a, const Matrix& b) {
  const Matrix prod = a * b.transpose();
  if (static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(a.cols()) > op_norm_switch) {
    return operator_norm_power(prod);
  }
  return operator_norm(prod);
}

void record_cross_stats(SubspacePack& pack) {
  pack.max_cross_frobenius = 0.0;
  pack.max_cross_operator = 0.0;
  for (int i = 0; i < pack.count(); ++i) {
    for (int j = i + 1; j < pack.count(); ++j) {
      pack.max_cross_frobenius =
          std::max(pack.max_cross_frobenius, cross_frobenius(pack.frames[static_cast<std::size_t>(i)],
                                                             pack.frames[static_cast<std::size_t>(j)]));
      pack.max_cross_operator =
          std::max(pack.max_cross_operator, cross_operator(pack.frames[static_cast<std::size_t>(i)],
                                                           pack.frames[static_cast<std::size_t>(j)]));
    }
  }
}

}  // namespace

SubspacePack pack_frobenius(int count, int m, int d, double threshold, std::uint64_t seed,
                            int max_attempts) {
  if (count < 1) throw ParameterError("pack_frobenius: count must be >= 1");
  if (!(m >= 1 && m < d)) throw ParameterError("pack_frobenius: need 1 <= m < d");
  if (threshold <= 0.0) throw ParameterError("pack_frobenius: threshold must be > 0");
  if (max_attempts <= 0) max_attempts = 50 * count;

  SubspacePack pack;
  pack.subspace_dim = m;
  pack.ambient_dim = d;
  pack.method = "frobenius";
  pack.threshold = threshold;
  pack.seed = seed;

  double worst_seen = 0.0;
  for (int attempt = 0; attempt < max_attempts && pack.count() < count; ++attempt) {
    Matrix frame = random_frame(m, d, derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    double worst = 0.0;
    for (const Matrix& other : pack.frames) {
      worst = std::max(worst, cross_frobenius(frame, other));
      if (worst > threshold) break;
    }
    worst_seen = std::max(worst_seen, worst);
    if (worst <= threshold) pack.frames.push_back(std::move(frame));
  }
  if (pack.count() < count) {
    throw ConstructionError("pack_frobenius: accepted " + std::to_string(pack.count()) + "/" +
                            std::to_string(count) + " frames within " +
                            std::to_string(max_attempts) + " attempts (worst cross-norm seen " +
                            std::to_string(worst_seen) + ", threshold " +
                            std::to_string(threshold) + ")");
  }
  record_cross_stats(pack);
  return pack;
}

SubspacePack pack_batched_svd(int count, int m, int d, double c, std::uint64_t seed) {
  if (count < 1) throw ParameterError("pack_batched_svd: count must be >= 1");
  if (!(m >= 1 && m < d)) throw ParameterError("pack_batched_svd: need 1 <= m < d");
  if (!(c > 0.0 && c < 0.25)) throw ParameterError("pack_batched_svd: need 0 < c < 1/4");

  const int total = count * m;
  const double vec_threshold = 4.0 * std::pow(static_cast<double>(d), -0.5 + c);
  const int max_attempts = 50 * total;

  // Stage 1: near-orthogonal unit vectors by greedy rejection.
  Matrix vectors(total, d);
  int accepted = 0;
  double worst_seen = 0.0;
  Rng rng(seed);
  for (int attempt = 0; attempt < max_attempts && accepted < total; ++attempt) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    v.normalize();
    double worst = 0.0;
    for (int i = 0; i < accepted; ++i) {
      worst = std::max(worst, std::abs(vectors.row(i).dot(v.transpose())));
      if (worst > vec_threshold) break;
    }
    worst_seen = std::max(worst_seen, worst);
    if (worst <= vec_threshold) vectors.row(accepted++) = v.transpose();
  }
  if (accepted < total) {
    throw ConstructionError("pack_batched_svd: vector stage accepted " +
                            std::to_string(accepted) + "/" + std::to_string(total) +
                            " (worst |<u,v>| seen " + std::to_string(worst_seen) +
                            ", threshold " + std::to_string(vec_threshold) + ")");
  }

  SubspacePack pack;
  pack.subspace_dim = m;
  pack.ambient_dim = d;
  pack.method = "batched-svd";
  pack.threshold = vec_threshold;
  pack.exponent = c;
  pack.seed = seed;

  // Stage 2: batch, orthonormalize by flattening the singular values.
  for (int b = 0; b < count; ++b) {
    const Matrix batch = vectors.middleRows(b * m, m);
    Eigen::JacobiSVD<Matrix> svd(batch, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix frame = svd.matrixU() * svd.matrixV().transpose();

    BatchStats stats;
    stats.sigma_min = svd.singularValues().minCoeff();
    stats.sigma_max = svd.singularValues().maxCoeff();
    const Matrix gram = batch * batch.transpose();
    for (int k = 0; k < m; ++k) {
      double row = 0.0;
      for (int l = 0; l < m; ++l) {
        if (l != k) row += std::abs(gram(k, l));
      }
      stats.gershgorin_radius = std::max(stats.gershgorin_radius, row);
    }
    stats.correction_frobenius = (frame - batch).norm();
    pack.batches.push_back(stats);
    pack.raw_batches.push_back(batch);
    pack.frames.push_back(frame);
  }
  record_cross_stats(pack);
  return pack;
}

PackDiagnostics diagnostics(const SubspacePack& pack) {
  if (pack.count() == 0) throw ParameterError("diagnostics: empty pack");
  PackDiagnostics diag;
  const int m = pack.subspace_dim;

  for (const Matrix& frame : pack.frames) {
    const double residual = (frame * frame.transpose() - Matrix::Identity(m, m)).norm();
    diag.max_orthonormality_residual = std::max(diag.max_orthonormality_residual, residual);
  }

  for (int i = 0; i < pack.count(); ++i) {
    for (int j = i + 1; j < pack.count(); ++j) {
      PairStat stat;
      stat.i = i;
      stat.j = j;
      const auto& fi = pack.frames[static_cast<std::size_t>(i)];
      const auto& fj = pack.frames[static_cast<std::size_t>(j)];
      stat.frobenius = cross_frobenius(fi, fj);
      stat.op_norm = cross_operator(fi, fj);
      diag.max_pair_operator = std::max(diag.max_pair_operator, stat.op_norm);
      diag.max_pair_frobenius = std::max(diag.max_pair_frobenius, stat.frobenius);
      diag.pairs.push_back(stat);
    }
  }

  if (pack.method == "batched-svd" && pack.raw_batches.size() == pack.frames.size()) {
    diag.batches = pack.batches;
    for (std::size_t b = 0; b < pack.batches.size(); ++b) {
      const auto& stats = pack.batches[b];
      // Gershgorin on B B^T: eigenvalues in [1 - R, 1 + R], so singular
      // values of B in [sqrt(1-R), sqrt(1+R)].
      const double lo = std::sqrt(std::max(0.0, 1.0 - stats.gershgorin_radius));
      const double hi = std::sqrt(1.0 + stats.gershgorin_radius);
      if (stats.sigma_min < lo - 1e-12 || stats.sigma_max > hi + 1e-12) {
        diag.gershgorin_pass = false;
      }
    }
    // Decomposition chain:
    // ||A_i A_j^T|| <= ||B_i B_j^T|| + ||B_i|| ||A_j - B_j||_F
    //                + ||B_j|| ||A_i - B_i||_F + ||A_i - B_i||_F ||A_j - B_j||_F.
    for (auto& stat : diag.pairs) {
      const auto& bi = pack.batches[static_cast<std::size_t>(stat.i)];
      const auto& bj = pack.batches[static_cast<std::size_t>(stat.j)];
      const auto& rbi = pack.raw_batches[static_cast<std::size_t>(stat.i)];
      const auto& rbj = pack.raw_batches[static_cast<std::size_t>(stat.j)];
      const double ci = bi.correction_frobenius, cj = bj.correction_frobenius;
      stat.chain_bound = cross_operator(rbi, rbj) + bi.sigma_max * cj + bj.sigma_max * ci +
                         ci * cj;
      if (stat.op_norm > stat.chain_bound + 1e-12) diag.chain_pass = false;
    }
  }

  if (std::abs(diag.max_pair_operator - pack.max_cross_operator) > 1e-9 ||
      std::abs(diag.max_pair_frobenius - pack.max_cross_frobenius) > 1e-9) {
    if (pack.count() > 1) diag.stats_match_recorded = false;
  }
  return diag;
}

}  // namespace gmmsq::packing
