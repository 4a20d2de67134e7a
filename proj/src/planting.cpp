#include "gmmsq/planting.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>

#include "gmmsq/json_io.hpp"
#include "gmmsq/parallel.hpp"
#include "gmmsq/rng.hpp"

#include <nlohmann/json.hpp>

namespace gmmsq::planting {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_sum_exp(const std::vector<double>& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

std::string mode_name(Mode mode) {
  return mode == Mode::GeneralEps ? "general-eps" : "sqrt-k";
}

Mode mode_from_name(const std::string& name) {
  if (name == "general-eps") return Mode::GeneralEps;
  if (name == "sqrt-k") return Mode::SqrtK;
  throw ParameterError("unknown mode: " + name + " (expected general-eps or sqrt-k)");
}

double InstanceSpec::separation_target() const {
  if (mode == Mode::GeneralEps) return std::pow(static_cast<double>(k), epsilon);
  return std::sqrt(static_cast<double>(k)) / 3.0;
}

InstanceSpec derive_params(Mode mode, int k, std::optional<double> epsilon, double c_delta,
                           int d, Seeds seeds) {
  InstanceSpec spec;
  spec.mode = mode;
  spec.k = k;
  spec.c_delta = c_delta;
  spec.d = d;
  spec.seeds = seeds;
  if (c_delta <= 0.0) throw ParameterError("derive_params: c_delta must be > 0");

  if (mode == Mode::GeneralEps) {
    if (!epsilon || *epsilon <= 0.0) {
      throw ParameterError("derive_params: general-eps mode needs epsilon > 0");
    }
    if (k < 2) throw ParameterError("derive_params: k must be >= 2");
    spec.epsilon = *epsilon;
    spec.m = std::max(1, static_cast<int>(std::llround(
                             std::pow(static_cast<double>(k), 2.0 * spec.epsilon))));
    // 1/(26 eps) is generally fractional; floor, clamped to >= 1.
    spec.t = std::max(1, static_cast<int>(std::floor(1.0 / (26.0 * spec.epsilon))));
    const double sep = std::pow(static_cast<double>(k), spec.epsilon);
    const double ref = std::sqrt(std::log(static_cast<double>(k)));
    spec.advisories.push_back(std::string("separation k^eps exceeds sqrt(log k): ") +
                              (sep > ref ? "yes" : "no (below the asymptotic regime)"));
    spec.advisories.push_back(std::string("k > (2/eps)^(1/eps) with nominal constant 2: ") +
                              (static_cast<double>(k) >
                                       std::pow(2.0 / spec.epsilon, 1.0 / spec.epsilon)
                                   ? "yes"
                                   : "no"));
  } else {
    if (k < 2 || k % 2 != 0) {
      throw ParameterError("derive_params: sqrt-k mode needs even k >= 2");
    }
    spec.epsilon = 0.5;
    spec.m = k / 2;
    spec.t = 3;
    spec.advisories.push_back(std::string("k <= log d with nominal constant 1: ") +
                              (static_cast<double>(k) <= std::log(static_cast<double>(d))
                                   ? "yes"
                                   : "no (below the asymptotic regime)"));
  }

  spec.delta = spec.c_delta *
               std::pow(static_cast<double>(k), -2.5 / static_cast<double>(spec.m));
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) {
    throw ParameterError("derive_params: delta = " + std::to_string(spec.delta) +
                         " outside (0, 1); adjust c_delta");
  }
  spec.rho = std::sqrt(1.0 - spec.delta);
  if (spec.m >= d) {
    throw ParameterError("derive_params: m = " + std::to_string(spec.m) +
                         " must be below the ambient dimension d = " + std::to_string(d));
  }
  return spec;
}

Matrix PlantedInstance::covariance() const {
  const Matrix proj = frame.transpose() * frame;
  return Matrix::Identity(ambient_dim, ambient_dim) - (1.0 - delta) * proj;
}

Matrix PlantedInstance::sqrt_covariance() const {
  const Matrix proj = frame.transpose() * frame;
  return Matrix::Identity(ambient_dim, ambient_dim) - (1.0 - std::sqrt(delta)) * proj;
}

void PlantedInstance::validate(double tol) const {
  if (ambient_dim < 1) throw ParameterError("PlantedInstance: bad ambient dimension");
  const int m = subspace_dim();
  if (frame.cols() != ambient_dim || m < 1 || m >= ambient_dim) {
    throw ParameterError("PlantedInstance: frame shape mismatch");
  }
  const double residual = (frame * frame.transpose() - Matrix::Identity(m, m)).norm();
  if (residual > tol) {
    throw VerificationError("PlantedInstance: frame orthonormality residual " +
                            std::to_string(residual));
  }
  if (means.cols() != ambient_dim || means.rows() != weights.size()) {
    throw ParameterError("PlantedInstance: means/weights shape mismatch");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ParameterError("PlantedInstance: delta must lie in (0, 1)");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw VerificationError("PlantedInstance: weights sum to " + std::to_string(weights.sum()));
  }
}

PlantedInstance plant(const mixture::SmoothedMixture& low_dim, const Matrix& v) {
  const int m = static_cast<int>(v.rows());
  const int d = static_cast<int>(v.cols());
  if (low_dim.dimension != m) {
    throw ParameterError("plant: mixture dimension " + std::to_string(low_dim.dimension) +
                         " does not match frame rows " + std::to_string(m));
  }
  if (m >= d) throw ParameterError("plant: need subspace dimension below ambient dimension");
  const double residual = (v * v.transpose() - Matrix::Identity(m, m)).norm();
  if (residual > 1e-10) {
    throw ParameterError("plant: frame is not row-orthonormal (residual " +
                         std::to_string(residual) + ")");
  }
  if (!(low_dim.variance > 0.0 && low_dim.variance < 1.0)) {
    throw ParameterError("plant: mixture variance must lie in (0, 1)");
  }
  PlantedInstance inst;
  inst.ambient_dim = d;
  inst.frame = v;
  inst.means = low_dim.means * v;  // rows are V^T mu_i
  inst.weights = low_dim.weights;
  inst.delta = low_dim.variance;
  inst.core_hash.clear();
  return inst;
}

double log_pdf(const PlantedInstance& inst, const Vector& x) {
  if (x.size() != inst.ambient_dim) throw ParameterError("planting::log_pdf: dimension mismatch");
  const int m = inst.subspace_dim();
  const int d = inst.ambient_dim;
  const Vector y = inst.frame * x;                     // subspace coordinates
  const Vector res = x - inst.frame.transpose() * y;   // orthogonal residual
  const double log_orth = -0.5 * (d - m) * kLog2Pi - 0.5 * res.squaredNorm();

  std::vector<double> terms(static_cast<std::size_t>(inst.components()));
  const double log_norm = -0.5 * m * (kLog2Pi + std::log(inst.delta));
  for (int i = 0; i < inst.components(); ++i) {
    const Vector mu_sub = inst.frame * inst.means.row(i).transpose();
    const double q = (y - mu_sub).squaredNorm() / (2.0 * inst.delta);
    terms[static_cast<std::size_t>(i)] = std::log(inst.weights[i]) + log_norm - q;
  }
  return log_sum_exp(terms) + log_orth;
}

double pdf(const PlantedInstance& inst, const Vector& x) { return std::exp(log_pdf(inst, x)); }

double log_pdf_dense(const PlantedInstance& inst, const Vector& x) {
  if (x.size() != inst.ambient_dim) {
    throw ParameterError("planting::log_pdf_dense: dimension mismatch");
  }
  const int d = inst.ambient_dim;
  const Matrix sigma = inst.covariance();
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw ConstructionError("log_pdf_dense: covariance not positive definite");
  }
  const Matrix l = llt.matrixL();
  double log_det = 0.0;
  for (int i = 0; i < d; ++i) log_det += 2.0 * std::log(l(i, i));

  std::vector<double> terms(static_cast<std::size_t>(inst.components()));
  for (int i = 0; i < inst.components(); ++i) {
    const Vector diff = x - inst.means.row(i).transpose();
    const Vector z = l.triangularView<Eigen::Lower>().solve(diff);
    terms[static_cast<std::size_t>(i)] =
        std::log(inst.weights[i]) - 0.5 * (d * kLog2Pi + log_det + z.squaredNorm());
  }
  return log_sum_exp(terms);
}

namespace {

template <class Apply>
Matrix sample_impl(const PlantedInstance& inst, std::size_t n, std::uint64_t seed, Apply apply) {
  const int d = inst.ambient_dim;
  Matrix out(static_cast<Eigen::Index>(n), d);
  Vector cumulative(inst.components());
  double acc = 0.0;
  for (int i = 0; i < inst.components(); ++i) {
    acc += inst.weights[i];
    cumulative[i] = acc;
  }
  const double shrink = 1.0 - std::sqrt(inst.delta);
  apply(n, [&](std::size_t block, std::size_t lo, std::size_t hi) {
    Rng rng(derive_seed(seed, block));
    Vector g(d);
    for (std::size_t i = lo; i < hi; ++i) {
      const double u = rng.uniform();
      int comp = 0;
      while (comp + 1 < inst.components() && u >= cumulative[comp]) ++comp;
      for (int c = 0; c < d; ++c) g[c] = rng.normal();
      // Sigma^{1/2} g = g - (1 - sqrt(delta)) V^T (V g)
      const Vector vg = inst.frame * g;
      Vector x = g - shrink * (inst.frame.transpose() * vg);
      x += inst.means.row(comp).transpose();
      out.row(static_cast<Eigen::Index>(i)) = x.transpose();
    }
  });
  return out;
}

}  // namespace

Matrix sample(const PlantedInstance& inst, std::size_t n, std::uint64_t seed) {
  return sample_impl(inst, n, seed,
                     [](std::size_t count, auto&& fn) { par::blocked_apply(count, fn); });
}

Matrix sample_serial(const PlantedInstance& inst, std::size_t n, std::uint64_t seed) {
  return sample_impl(inst, n, seed,
                     [](std::size_t count, auto&& fn) { par::serial_apply(count, fn); });
}

Vector gaussian_hermite_moments(const Vector& mean, const Matrix& cov, int max_degree) {
  const int d = static_cast<int>(mean.size());
  if (cov.rows() != d || cov.cols() != d) {
    throw ParameterError("gaussian_hermite_moments: covariance shape mismatch");
  }
  const auto idx = hermite::basis(d, max_degree);
  std::map<hermite::MultiIndex, std::size_t> pos;
  for (std::size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = i;

  // Generator G(t) = <mean, t> + t^T (cov - I) t / 2 as sparse monomials.
  struct Term {
    hermite::MultiIndex gamma;
    double coeff;
  };
  std::vector<Term> gen;
  for (int c = 0; c < d; ++c) {
    if (mean[c] != 0.0) {
      hermite::MultiIndex g(static_cast<std::size_t>(d), 0);
      g[static_cast<std::size_t>(c)] = 1;
      gen.push_back({g, mean[c]});
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const double shifted = cov(i, j) - (i == j ? 1.0 : 0.0);
      const double coeff = i == j ? 0.5 * shifted : 0.5 * (shifted + cov(j, i) - 0.0);
      if (coeff != 0.0) {
        hermite::MultiIndex g(static_cast<std::size_t>(d), 0);
        g[static_cast<std::size_t>(i)] += 1;
        g[static_cast<std::size_t>(j)] += 1;
        gen.push_back({g, coeff});
      }
    }
  }

  // Monomial index targets a -> a + gamma precomputed per generator term.
  std::vector<std::vector<std::ptrdiff_t>> shift(gen.size());
  for (std::size_t g = 0; g < gen.size(); ++g) {
    shift[g].assign(idx.size(), -1);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      hermite::MultiIndex sum = idx[a];
      int deg = 0;
      for (std::size_t c = 0; c < sum.size(); ++c) {
        sum[c] += gen[g].gamma[c];
        deg += sum[c];
      }
      if (deg <= max_degree) shift[g][a] = static_cast<std::ptrdiff_t>(pos.at(sum));
    }
  }

  // exp(G) truncated: result = sum_j G^j / j!, powers accumulated in place.
  Vector result = Vector::Zero(static_cast<Eigen::Index>(idx.size()));
  Vector power = Vector::Zero(static_cast<Eigen::Index>(idx.size()));
  result[0] = 1.0;
  power[0] = 1.0;
  for (int j = 1; j <= max_degree; ++j) {
    Vector next = Vector::Zero(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t g = 0; g < gen.size(); ++g) {
      const double c = gen[g].coeff;
      for (std::size_t a = 0; a < idx.size(); ++a) {
        const std::ptrdiff_t target = shift[g][a];
        if (target >= 0 && power[static_cast<Eigen::Index>(a)] != 0.0) {
          next[static_cast<Eigen::Index>(target)] +=
              c * power[static_cast<Eigen::Index>(a)];
        }
      }
    }
    next /= static_cast<double>(j);
    power = next;
    result += power;
  }

  // E[h_a] = sqrt(prod a_c!) * coefficient at a.
  Vector moments(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) {
    double fact = 1.0;
    for (int e : idx[a]) {
      for (int q = 2; q <= e; ++q) fact *= q;
    }
    moments[static_cast<Eigen::Index>(a)] =
        std::sqrt(fact) * result[static_cast<Eigen::Index>(a)];
  }
  return moments;
}

Vector hermite_moments(const PlantedInstance& inst, int max_degree) {
  const Matrix sigma = inst.covariance();
  Vector total;
  for (int i = 0; i < inst.components(); ++i) {
    const Vector mi =
        gaussian_hermite_moments(inst.means.row(i).transpose(), sigma, max_degree);
    if (total.size() == 0) total = inst.weights[i] * mi;
    else total += inst.weights[i] * mi;
  }
  return total;
}

double hermite_moment(const PlantedInstance& inst, const hermite::MultiIndex& a) {
  if (static_cast<int>(a.size()) != inst.ambient_dim) {
    throw ParameterError("planting::hermite_moment: multi-index length mismatch");
  }
  const int deg = hermite::degree(a);
  const auto idx = hermite::basis(inst.ambient_dim, deg);
  const Vector all = hermite_moments(inst, deg);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] == a) return all[static_cast<Eigen::Index>(i)];
  }
  throw ParameterError("planting::hermite_moment: index not found");
}

std::string core_json(const builders::DiscreteDistribution& core) {
  jsonio::Writer w;
  w.begin_object();
  w.key("m");
  w.value(core.dimension);
  w.key("points");
  w.value(core.support);
  w.key("weights");
  w.value(core.weights);
  w.key("seed");
  w.value(static_cast<std::uint64_t>(core.seed));
  w.key("builder");
  w.value(core.builder);
  w.key("t");
  w.value(core.matched_degree);
  w.end_object();
  return w.str();
}

std::string core_hash(const builders::DiscreteDistribution& core) {
  return jsonio::fnv1a_hex(core_json(core));
}

namespace {

void write_spec(jsonio::Writer& w, const InstanceSpec& spec) {
  w.begin_object();
  w.key("mode");
  w.value(mode_name(spec.mode));
  w.key("k");
  w.value(spec.k);
  w.key("epsilon");
  w.value(spec.epsilon);
  w.key("c_delta");
  w.value(spec.c_delta);
  w.key("m");
  w.value(spec.m);
  w.key("t");
  w.value(spec.t);
  w.key("delta");
  w.value(spec.delta);
  w.key("rho");
  w.value(spec.rho);
  w.key("d");
  w.value(spec.d);
  w.key("seeds");
  w.begin_object();
  w.key("core");
  w.value(static_cast<std::uint64_t>(spec.seeds.core));
  w.key("pack");
  w.value(static_cast<std::uint64_t>(spec.seeds.pack));
  w.key("sampling");
  w.value(static_cast<std::uint64_t>(spec.seeds.sampling));
  w.end_object();
  w.key("advisories");
  w.begin_array();
  for (const auto& a : spec.advisories) w.value(a);
  w.end_array();
  w.end_object();
}

}  // namespace

std::string instance_json(const PlantedInstance& inst) {
  jsonio::Writer w;
  w.begin_object();
  w.key("version");
  w.value(1);
  w.key("spec");
  write_spec(w, inst.spec);
  w.key("gmm");
  w.begin_object();
  w.key("d");
  w.value(inst.ambient_dim);
  w.key("weights");
  w.value(inst.weights);
  w.key("means");
  w.value(inst.means);
  w.key("cov_factor");
  w.begin_object();
  w.key("delta");
  w.value(inst.delta);
  w.key("V");
  w.value(inst.frame);
  w.end_object();
  w.end_object();
  w.key("answer_key");
  w.begin_object();
  w.key("V");
  w.value(inst.frame);
  w.key("core_hash");
  w.value(inst.core_hash);
  w.end_object();
  w.end_object();
  return w.str();
}

void export_instance(const PlantedInstance& inst, const std::string& path) {
  jsonio::write_file(path, instance_json(inst));
}

namespace {

Matrix parse_matrix(const nlohmann::json& rows) {
  if (!rows.is_array() || rows.empty()) throw IoError("instance file: expected matrix");
  const std::size_t r = rows.size();
  const std::size_t c = rows[0].size();
  Matrix out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw IoError("instance file: ragged matrix");
    for (std::size_t j = 0; j < c; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
  }
  return out;
}

Vector parse_vector(const nlohmann::json& vals) {
  Vector out(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out[static_cast<Eigen::Index>(i)] = vals[i].get<double>();
  return out;
}

}  // namespace

PlantedInstance import_instance(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(jsonio::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("instance file: JSON parse error: ") + e.what());
  }
  if (!doc.contains("version") || doc["version"].get<int>() != 1) {
    throw IoError("instance file: missing or unsupported schema version");
  }
  if (!doc.contains("gmm") || !doc.contains("spec") || !doc.contains("answer_key")) {
    throw IoError("instance file: missing required sections");
  }
  const auto& gmm = doc["gmm"];
  const auto& spec = doc["spec"];
  const auto& key = doc["answer_key"];

  PlantedInstance inst;
  inst.ambient_dim = gmm["d"].get<int>();
  inst.weights = parse_vector(gmm["weights"]);
  inst.means = parse_matrix(gmm["means"]);
  inst.delta = gmm["cov_factor"]["delta"].get<double>();
  inst.frame = parse_matrix(gmm["cov_factor"]["V"]);
  inst.core_hash = key["core_hash"].get<std::string>();

  inst.spec.mode = mode_from_name(spec["mode"].get<std::string>());
  inst.spec.k = spec["k"].get<int>();
  inst.spec.epsilon = spec["epsilon"].get<double>();
  inst.spec.c_delta = spec["c_delta"].get<double>();
  inst.spec.m = spec["m"].get<int>();
  inst.spec.t = spec["t"].get<int>();
  inst.spec.delta = spec["delta"].get<double>();
  inst.spec.rho = spec["rho"].get<double>();
  inst.spec.d = spec["d"].get<int>();
  inst.spec.seeds.core = spec["seeds"]["core"].get<std::uint64_t>();
  inst.spec.seeds.pack = spec["seeds"]["pack"].get<std::uint64_t>();
  inst.spec.seeds.sampling = spec["seeds"]["sampling"].get<std::uint64_t>();
  for (const auto& a : spec["advisories"]) inst.spec.advisories.push_back(a.get<std::string>());

  inst.validate();
  return inst;
}

std::string instance_hash(const PlantedInstance& inst) {
  return jsonio::fnv1a_hex(instance_json(inst));
}

void write_samples_csv(const Matrix& samples, const std::string& path) {
  std::string out;
  const Eigen::Index d = samples.cols();
  for (Eigen::Index c = 0; c < d; ++c) {
    out += "x" + std::to_string(c);
    out += c + 1 < d ? "," : "\n";
  }
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index c = 0; c < d; ++c) {
      out += jsonio::format_double(samples(i, c));
      out += c + 1 < d ? "," : "\n";
    }
  }
  jsonio::write_file(path, out);
}

}  // namespace gmmsq::planting
