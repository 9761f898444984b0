#include "muntz/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "verdicts.hpp"

namespace muntz::embedding {

namespace {

void check_section(const exponents::ExponentSequence& seq, std::size_t n) {
  if (n == 0) throw std::invalid_argument("section size must be positive");
  if (n > seq.size())
    throw std::invalid_argument("section size exceeds the exponent prefix");
  if (n > linalg::kMaxSection) {
    std::ostringstream os;
    os << "section size " << n << " exceeds the supported maximum of "
       << linalg::kMaxSection;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

std::vector<double> basis_scales(const exponents::ExponentSequence& seq,
                                 std::size_t n, Normalization norm) {
  std::vector<double> d(n, 1.0);
  switch (norm) {
    case Normalization::Raw:
      break;
    case Normalization::NormalizedMonomials:
      for (std::size_t i = 0; i < n; ++i) d[i] = std::sqrt(2.0 * seq[i] + 1.0);
      break;
    case Normalization::RieszScaled:
      for (std::size_t i = 0; i < n; ++i) {
        if (!(seq[i] > 0.0))
          throw std::invalid_argument(
              "Riesz scaling needs strictly positive exponents");
        d[i] = std::sqrt(seq[i]);
      }
      break;
  }
  return d;
}

namespace {

void apply_scales(linalg::Matrix& m, const std::vector<double>& d) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) m(i, j) *= d[i] * d[j];
}

}  // namespace

linalg::Matrix lebesgue_gram(const exponents::ExponentSequence& seq,
                             std::size_t n) {
  check_section(seq, n);
  linalg::Matrix B(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      B(i, j) = 1.0 / (seq[i] + seq[j] + 1.0);
  return B;
}

linalg::Matrix mu_gram(const exponents::ExponentSequence& seq, std::size_t n,
                       const measure::Measure& mu) {
  check_section(seq, n);
  // Entry errors get multiplied by d_i d_j <= 2 lambda_max + 1 under
  // normalization, so the accuracy budget shrinks with the exponent sum.
  // Implicit pullback densities carry root-solve noise around 1e-12, and
  // tolerances below that noise floor only explode the adaptive mesh, so
  // they get a coarser budget than exact literal densities.
  const double base = mu.is_pullback() ? 1e-10 : 1e-12;
  const double floor = mu.is_pullback() ? 1e-12 : 1e-15;
  linalg::Matrix A(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double s = seq[i] + seq[j];
      A(i, j) = mu.moment(s, std::max(base / (2.0 * s + 1.0), floor));
      A(j, i) = A(i, j);
    }
  return A;
}

SingularSpectrum pencil_svals(linalg::Matrix A, linalg::Matrix B,
                              const std::vector<double>& scales) {
  if (scales.size() != A.size() || A.size() != B.size())
    throw std::invalid_argument("pencil blocks and scales disagree in size");
  apply_scales(A, scales);
  apply_scales(B, scales);
  SingularSpectrum spec;
  spec.section = A.size();
  spec.b_condition = linalg::spd_condition(B);
  const std::vector<double> nu = linalg::generalized_eigenvalues(A, B);
  spec.values.reserve(nu.size());
  for (double v : nu) spec.values.push_back(std::sqrt(std::max(0.0, v)));
  return spec;
}

SingularSpectrum embedding_svals(const exponents::ExponentSequence& seq,
                                 std::size_t n, const measure::Measure& mu,
                                 Normalization norm) {
  return pencil_svals(mu_gram(seq, n, mu), lebesgue_gram(seq, n),
                      basis_scales(seq, n, norm));
}

NormTrend operator_norm_estimate(const exponents::ExponentSequence& seq,
                                 const measure::Measure& mu,
                                 const std::vector<std::size_t>& n_list,
                                 Normalization norm) {
  if (n_list.empty()) throw std::invalid_argument("empty section list");
  if (!std::is_sorted(n_list.begin(), n_list.end()))
    throw std::invalid_argument("section list must be increasing");
  NormTrend trend;
  for (std::size_t n : n_list) {
    const SingularSpectrum spec = embedding_svals(seq, n, mu, norm);
    trend.s1.emplace_back(n, spec.values.front());
  }
  trend.last = trend.s1.back().second;
  const std::size_t m = trend.s1.size();
  if (m >= 3) {
    auto val = [&](std::size_t k) { return trend.s1[k].second; };
    bool plateau = true;
    for (std::size_t k = m - 2; k < m; ++k)
      plateau = plateau && std::fabs(val(k) - val(k - 1)) <=
                               1e-3 * std::max(std::fabs(val(k)), 1e-300);
    bool rising = true;
    for (std::size_t k = 1; k < m; ++k) rising = rising && val(k) > val(k - 1);
    // growth per unit log n must not shrink over the back half
    bool superlinear = rising && val(m - 1) >= 2.0 * val(0);
    std::vector<double> slope;
    for (std::size_t k = 1; k < m; ++k)
      slope.push_back(
          (val(k) - val(k - 1)) /
          (std::log(static_cast<double>(trend.s1[k].first)) -
           std::log(static_cast<double>(trend.s1[k - 1].first))));
    for (std::size_t k = slope.size() / 2 + 1; k < slope.size(); ++k)
      superlinear = superlinear && slope[k] >= 0.9 * slope[k - 1];
    if (plateau)
      trend.verdict = NormTrend::Verdict::Plateau;
    else if (superlinear)
      trend.verdict = NormTrend::Verdict::Divergence;
  }
  return trend;
}

std::vector<std::pair<std::size_t, double>> essential_norm_estimate(
    const exponents::ExponentSequence& seq, const measure::Measure& mu,
    std::size_t n, const std::vector<std::size_t>& n0_list,
    Normalization norm) {
  check_section(seq, n);
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t n0 : n0_list) {
    if (n0 >= n)
      throw std::invalid_argument("tail offset must be below the section size");
    std::vector<double> tail(seq.values.begin() + static_cast<long>(n0),
                             seq.values.begin() + static_cast<long>(n));
    const exponents::ExponentSequence sub =
        exponents::ExponentSequence::from_values(std::move(tail));
    const SingularSpectrum spec = embedding_svals(sub, n - n0, mu, norm);
    out.emplace_back(n0, spec.values.front());
  }
  return out;
}

SchattenSum schatten_qnorm(const SingularSpectrum& spec, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("Schatten exponent must be > 0");
  SchattenSum out;
  const std::size_t n = spec.values.size();
  if (n == 0) return out;
  double total = 0.0;
  for (double s : spec.values) total += std::pow(s, q);
  double tail = 0.0;
  for (std::size_t k = 3 * n / 4; k < n; ++k)
    tail += std::pow(spec.values[k], q);
  out.converged = tail <= 1e-6 * total + 1e-300;
  out.value = total > 0.0 ? std::pow(total, 1.0 / q) : 0.0;
  return out;
}

std::vector<std::pair<double, double>> liminf_test(
    const exponents::ExponentSequence& seq, const measure::Measure& mu) {
  std::vector<std::pair<double, double>> out;
  for (double lam : seq.values) {
    if (lam < 1.0) continue;  // J_{1/lambda} only makes sense for lambda >= 1
    const double delta = 1.0 / lam;
    out.emplace_back(lam, mu.tail_mass(delta) * lam);
  }
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "inconclusive";
  }
}

namespace {

bool ratios_divergent(const std::vector<std::pair<double, double>>& r) {
  if (r.size() < 3) return false;
  for (std::size_t k = r.size() / 2; k + 1 < r.size(); ++k)
    if (r[k + 1].second < r[k].second * (1.0 - 1e-6) - 1e-9) return false;
  return r.back().second > 10.0 &&
         r.back().second > 10.0 * std::max(r.front().second, 1e-300);
}

bool ratios_vanishing(const std::vector<std::pair<double, double>>& r) {
  if (r.size() < 3) return false;
  return r.back().second < 0.1 * r.front().second ||
         r.back().second < 1e-3;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

ClassificationReport classify_embedding(const exponents::ExponentSequence& seq,
                                        const measure::Measure& mu) {
  ClassificationReport r;
  r.profile = measure::sublinearity_profile(mu);
  r.liminf_ratios = liminf_test(seq, mu);

  bool lacunary = false;
  double gamma = 0.0;
  try {
    const auto lac = exponents::lacunarity(seq);
    lacunary = lac.lacunary;
    gamma = lac.gamma;
  } catch (const std::exception& e) {
    r.notes.push_back(std::string("lacunarity check skipped: ") + e.what());
  }
  bool quasilacunary = lacunary;
  if (!quasilacunary) {
    for (int blocks = 2; blocks <= 4 && !quasilacunary; ++blocks) {
      try {
        quasilacunary = exponents::quasilacunary(seq, blocks).quasilacunary;
      } catch (const std::exception&) {
        break;
      }
    }
  }
  r.notes.push_back(std::string("exponent prefix: ") +
                    (lacunary ? "lacunary (gamma=" + fmt(gamma) + ")"
                     : quasilacunary ? "quasilacunary"
                                     : "neither lacunary nor quasilacunary"));

  VerdictChain vc(r);

  // rule 1: positive mass at 1 rules the embedding out entirely
  const double m1 = mu.mass_at_one();
  if (m1 > 0.0)
    vc.no_bounded("mass " + fmt(m1) +
                  " at the point 1; an embedding measure must vanish there");

  // rule 2: support bounded away from 1
  const double sup = mu.support_upper_bound();
  if (sup < 1.0 - 1e-9)
    vc.yes_schatten("support inside [0, " + fmt(sup) +
                    "], bounded away from 1");

  // rule 3: sublinear tail + lacunary prefix
  if (r.profile.sublinear && lacunary)
    vc.yes_bounded("sublinear tail profile (sup ratio " +
                   fmt(r.profile.sup_ratio) + ") with a lacunary prefix");

  // rule 4: vanishing sublinear tail + lacunary prefix
  if (r.profile.vanishing && lacunary)
    vc.yes_compact("vanishing sublinear tail profile with a lacunary prefix");

  // rule 5: alpha-sublinear tail + quasilacunary prefix
  if (r.profile.alpha_sublinear && quasilacunary)
    vc.yes_schatten("alpha-sublinear tail profile (alpha~" +
                    fmt(r.profile.alpha) + ") with a quasilacunary prefix");

  // rule 6: tail ratios mu(J_{1/lambda})*lambda diverge
  if (ratios_divergent(r.liminf_ratios))
    vc.no_bounded("tail-mass ratios at scales 1/lambda_n grow without bound");

  // rule 7: tail ratios do not tend to 0
  if (!r.liminf_ratios.empty() && !ratios_vanishing(r.liminf_ratios))
    vc.no_compact(
        "tail-mass ratios at scales 1/lambda_n stay above a positive "
        "floor");

  r.lambda2_embedding = r.bounded;
  if (r.bounded.value != Verdict::Inconclusive)
    r.lambda2_embedding.rule =
        "the embedding property is boundedness: " + r.bounded.rule;

  // spectral evidence: never a rule, may legitimately fail to solve
  try {
    std::vector<std::size_t> n_list;
    for (std::size_t n : {2u, 3u, 4u, 6u, 8u, 10u})
      if (n <= seq.size() && n <= linalg::kMaxSection) n_list.push_back(n);
    if (n_list.size() >= 3)
      r.norm_trend = operator_norm_estimate(seq, mu, n_list);
  } catch (const std::exception& e) {
    r.norm_trend_error = e.what();
  }
  return r;
}

}  // namespace muntz::embedding
