#pragma once

// Classical simulation of Wigner-positive circuits: sample an initial phase
// point from the product input, push it through local Gaussian channels,
// sample detector outcomes from the calibrated positive Wigner tables.
// Positivity of every ingredient is enforced at validation, never assumed.
// Also hosts small-instance Gaussian boson sampling probabilities through
// the truncated Fock oracle.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cvng/fock_oracle.hpp"
#include "cvng/symplectic.hpp"
#include "cvng/wigner.hpp"

namespace cvng {

struct DetectorSpec {
  enum class Kind { Heterodyne, DiscretePovm };
  Kind kind = Kind::Heterodyne;
  std::vector<WignerForm> povm;      // single-mode element forms
  std::vector<std::string> labels;   // one per element

  static DetectorSpec heterodyne() { return {}; }
  static DetectorSpec discrete(std::vector<WignerForm> elements,
                               std::vector<std::string> names) {
    DetectorSpec d;
    d.kind = Kind::DiscretePovm;
    d.povm = std::move(elements);
    d.labels = std::move(names);
    return d;
  }
};

struct ChannelStep {
  std::vector<int> modes;  // ordered subset the channel acts on
  GaussianChannel ch;
};

struct Circuit {
  std::vector<WignerForm> inputs;      // one single-mode positive form per mode
  std::vector<ChannelStep> channels;
  std::vector<DetectorSpec> detectors; // one per mode

  int modes() const { return static_cast<int>(inputs.size()); }
};

struct RunConfig {
  long n_samples = 0;
  std::uint64_t seed = 0;
  int streams = 1;
  bool record_chain = false;
};

struct SampleRecord {
  Vec final_point;
  std::vector<double> outcomes;  // heterodyne: (x,p) per mode; POVM: label index
  std::vector<Vec> chain;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based per-sample substream: parallel and serial runs agree.
inline std::mt19937_64 substream(std::uint64_t seed, long sample_index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(0x5eed0000ULL + sample_index)));
}

inline Mat psd_sqrt(const Mat& V) {
  Eigen::SelfAdjointEigenSolver<Mat> es(V);
  Vec ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-10) throw std::invalid_argument("psd_sqrt: matrix not PSD");
    ev[i] = std::sqrt(std::max(0.0, ev[i]));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

// Rejection-sampling envelope for a positive single-mode polynomial x Gaussian
// form: proposal Gaussian with doubled covariance, bound from a grid sup with
// a safety margin.
struct SamplingEnvelope {
  bool gaussian_exact = false;  // single Gaussian term: draw exactly
  Vec mean;                     // real center
  Mat cov;                      // proposal covariance
  Mat sqrt_cov;
  double bound = 1.0;           // W(x) <= bound * N(x; mean, cov)
  double acceptance = 1.0;
};

inline SamplingEnvelope build_envelope(const WignerForm& w) {
  if (w.nvars() != 2) throw std::invalid_argument("build_envelope: single-mode inputs only");
  SamplingEnvelope env;
  if (w.terms().size() == 1 && w.terms()[0].poly.degree() == 0 &&
      w.terms()[0].c.imag().norm() < 1e-14) {
    const auto& t = w.terms()[0];
    env.gaussian_exact = true;
    env.mean = t.c.real();
    env.cov = t.A.inverse();
    env.sqrt_cov = detail::psd_sqrt(env.cov);
    return env;
  }
  // Proposal: Gaussian at the weighted center with twice the broadest covariance.
  Vec mean = Vec::Zero(2);
  Mat cov = Mat::Zero(2, 2);
  for (const auto& t : w.terms()) {
    mean += t.c.real() / static_cast<double>(w.terms().size());
    Mat Sigma = t.A.inverse();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) cov(i, j) = std::max(cov(i, j), std::abs(Sigma(i, j)));
  }
  env.mean = mean;
  env.cov = 2.0 * (cov + 0.05 * Mat::Identity(2, 2));
  env.sqrt_cov = detail::psd_sqrt(env.cov);
  Mat icov = env.cov.inverse();
  double det = env.cov.determinant();
  auto proposal = [&](const Vec& x) {
    Vec d = x - env.mean;
    return std::exp(-0.5 * d.dot(icov * d)) / (2.0 * kPi * std::sqrt(det));
  };
  double sup = 0.0;
  double smax = std::sqrt(env.cov.diagonal().maxCoeff());
  for (double x = -8 * smax; x <= 8 * smax; x += smax / 8)
    for (double p = -8 * smax; p <= 8 * smax; p += smax / 8) {
      Vec pt(2);
      pt << env.mean[0] + x, env.mean[1] + p;
      double v = w.value(pt);
      if (v < -1e-9) throw std::invalid_argument("build_envelope: input form is negative");
      sup = std::max(sup, v / proposal(pt));
    }
  env.bound = 1.2 * sup;
  env.acceptance = 1.0 / env.bound;  // inputs are normalized
  return env;
}

struct ValidatedCircuit {
  Circuit circuit;
  std::vector<SamplingEnvelope> envelopes;
};

// Enforce the Wigner-positivity preconditions and build sampling envelopes.
// Throws std::invalid_argument naming the offending component.
inline ValidatedCircuit validate_circuit(const Circuit& c, double acceptance_floor = 0.1) {
  if (c.inputs.empty()) throw std::invalid_argument("circuit: no input modes");
  if (c.detectors.size() != c.inputs.size())
    throw std::invalid_argument("circuit: one detector per mode required");
  ValidatedCircuit v{c, {}};
  for (size_t k = 0; k < c.inputs.size(); ++k) {
    const WignerForm& w = c.inputs[k];
    if (std::abs(w.integral() - 1.0) > 1e-8)
      throw std::invalid_argument("circuit: input " + std::to_string(k) + " is not normalized");
    SamplingEnvelope env;
    try {
      env = build_envelope(w);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("circuit: input " + std::to_string(k) +
                                  " has a negative Wigner function");
    }
    if (env.acceptance < acceptance_floor)
      throw std::invalid_argument("circuit: input " + std::to_string(k) +
                                  " rejection acceptance below floor");
    v.envelopes.push_back(std::move(env));
  }
  for (size_t s = 0; s < c.channels.size(); ++s) {
    const auto& step = c.channels[s];
    if (!channel_is_valid(step.ch))
      throw std::invalid_argument("circuit: channel " + std::to_string(s) + " is invalid");
    if (2 * static_cast<int>(step.modes.size()) != step.ch.X.cols())
      throw std::invalid_argument("circuit: channel " + std::to_string(s) +
                                  " mode subset mismatch");
    for (int m : step.modes)
      if (m < 0 || m >= c.modes())
        throw std::invalid_argument("circuit: channel " + std::to_string(s) +
                                    " touches a missing mode");
  }
  for (size_t k = 0; k < c.detectors.size(); ++k) {
    const auto& det = c.detectors[k];
    if (det.kind == DetectorSpec::Kind::Heterodyne) continue;
    if (det.povm.empty() || det.povm.size() != det.labels.size())
      throw std::invalid_argument("circuit: detector " + std::to_string(k) +
                                  " POVM/label mismatch");
    // Pointwise positivity and completeness on the validation grid.
    for (double x = -8.0; x <= 8.0; x += 0.5)
      for (double p = -8.0; p <= 8.0; p += 0.5) {
        Vec pt(2);
        pt << x, p;
        double tot = 0.0;
        for (size_t e = 0; e < det.povm.size(); ++e) {
          double val = det.povm[e].value(pt);
          if (val < -1e-9)
            throw std::invalid_argument("circuit: detector " + std::to_string(k) +
                                        " element " + det.labels[e] +
                                        " has a negative Wigner value");
          tot += val;
        }
        if (std::abs(4.0 * kPi * tot - 1.0) > 1e-6)
          throw std::invalid_argument("circuit: detector " + std::to_string(k) +
                                      " POVM is not complete");
      }
  }
  return v;
}

// Step 1: independent per-mode draw from the positive input Wigner functions.
inline Vec sample_initial(const ValidatedCircuit& vc, std::mt19937_64& gen) {
  const int m = vc.circuit.modes();
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vec x(2 * m);
  for (int k = 0; k < m; ++k) {
    const auto& env = vc.envelopes[k];
    Vec draw(2);
    if (env.gaussian_exact) {
      draw << gauss(gen), gauss(gen);
      draw = env.mean + env.sqrt_cov * draw;
    } else {
      Mat icov = env.cov.inverse();
      double det = env.cov.determinant();
      for (int attempt = 0;; ++attempt) {
        if (attempt > 10000)
          throw std::runtime_error("sample_initial: rejection sampling stalled");
        Vec z(2);
        z << gauss(gen), gauss(gen);
        draw = env.mean + env.sqrt_cov * z;
        Vec d = draw - env.mean;
        double prop = std::exp(-0.5 * d.dot(icov * d)) / (2.0 * kPi * std::sqrt(det));
        double target = std::max(0.0, vc.circuit.inputs[k].value(draw));
        if (uni(gen) * env.bound * prop <= target) break;
      }
    }
    x[2 * k] = draw[0];
    x[2 * k + 1] = draw[1];
  }
  return x;
}

// Step 2: x' ~ Normal(X x_sub + alpha, Vc) on the subset, identity elsewhere.
inline Vec step_channel(const Vec& x, const ChannelStep& step, std::mt19937_64& gen) {
  const int ns = static_cast<int>(step.modes.size());
  Vec xsub(2 * ns);
  for (int i = 0; i < ns; ++i) {
    xsub[2 * i] = x[2 * step.modes[i]];
    xsub[2 * i + 1] = x[2 * step.modes[i] + 1];
  }
  Vec mean = step.ch.X * xsub + step.ch.alpha;
  Vec out = x;
  Vec noise = Vec::Zero(mean.size());
  if (step.ch.Vc.norm() > 0.0) {
    Mat sq = detail::psd_sqrt(step.ch.Vc);
    std::normal_distribution<double> gauss;
    Vec z(mean.size());
    for (int i = 0; i < z.size(); ++i) z[i] = gauss(gen);
    noise = sq * z;
  }
  for (int i = 0; i < ns; ++i) {
    out[2 * step.modes[i]] = mean[2 * i] + noise[2 * i];
    out[2 * step.modes[i] + 1] = mean[2 * i + 1] + noise[2 * i + 1];
  }
  return out;
}

// Steps 3-4: per-mode outcomes. Heterodyne draws alpha = x_mode + N(0, 1);
// discrete POVMs sample from the normalized Wigner-value table at x.
inline std::vector<double> sample_detectors(const ValidatedCircuit& vc, const Vec& x,
                                            std::mt19937_64& gen) {
  std::vector<double> out;
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < vc.circuit.modes(); ++k) {
    const auto& det = vc.circuit.detectors[k];
    Vec pt(2);
    pt << x[2 * k], x[2 * k + 1];
    if (det.kind == DetectorSpec::Kind::Heterodyne) {
      out.push_back(pt[0] + gauss(gen));
      out.push_back(pt[1] + gauss(gen));
    } else {
      std::vector<double> p(det.povm.size());
      double tot = 0.0;
      for (size_t e = 0; e < det.povm.size(); ++e) {
        p[e] = std::max(0.0, det.povm[e].value(pt));
        tot += p[e];
      }
      double u = uni(gen) * tot;
      size_t pick = 0;
      double acc = 0.0;
      for (size_t e = 0; e < p.size(); ++e) {
        acc += p[e];
        if (u <= acc) {
          pick = e;
          break;
        }
      }
      out.push_back(static_cast<double>(pick));
    }
  }
  return out;
}

inline SampleRecord simulate_one(const ValidatedCircuit& vc, std::uint64_t seed,
                                 long index, bool record_chain) {
  auto gen = detail::substream(seed, index);
  SampleRecord rec;
  Vec x = sample_initial(vc, gen);
  if (record_chain) rec.chain.push_back(x);
  for (const auto& step : vc.circuit.channels) {
    x = step_channel(x, step, gen);
    if (record_chain) rec.chain.push_back(x);
  }
  rec.final_point = x;
  rec.outcomes = sample_detectors(vc, x, gen);
  return rec;
}

// Full run: n_samples records in sample-index order; bit-identical for a
// fixed (seed, stream count) since each sample owns its substream.
inline std::vector<SampleRecord> run(const Circuit& circuit, const RunConfig& cfg) {
  ValidatedCircuit vc = validate_circuit(circuit);
  std::vector<SampleRecord> records(static_cast<size_t>(std::max(0L, cfg.n_samples)));
  if (cfg.n_samples <= 0) return records;
  int streams = std::max(1, cfg.streams);
  if (streams == 1) {
    for (long i = 0; i < cfg.n_samples; ++i)
      records[i] = simulate_one(vc, cfg.seed, i, cfg.record_chain);
    return records;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < streams; ++t) {
    pool.emplace_back([&, t] {
      for (long i = t; i < cfg.n_samples; i += streams)
        records[i] = simulate_one(vc, cfg.seed, i, cfg.record_chain);
    });
  }
  for (auto& th : pool) th.join();
  return records;
}

// On-off click POVM element Wigner value (1 - 2 e^{-(x^2+p^2)/2})/(4 pi);
// negative at the origin, hence excluded from the positive sampler.
inline double onoff_click_wigner(double x, double p) {
  return (1.0 - 2.0 * std::exp(-0.5 * (x * x + p * p))) / (4.0 * kPi);
}

// Small-instance GBS probability P(n) = <n| rho |n> through the Fock oracle.
inline double gbs_probability(const GaussianState& st, const std::vector<int>& pattern,
                              int truncation, double leak_tol = 1e-4) {
  const int m = st.modes();
  if (static_cast<int>(pattern.size()) != m)
    throw std::invalid_argument("gbs_probability: pattern length");
  if (truncation > 25 || m > 4)
    throw std::invalid_argument("gbs_probability: d <= 25 and m <= 4 enforced");
  for (int n : pattern)
    if (n < 0 || n >= truncation)
      throw std::invalid_argument("gbs_probability: pattern entry out of range");
  fock::Space sp{truncation, m};
  auto rho = fock::gaussian_to_fock(sp, st, leak_tol);
  CVec v = fock::fock_vector(sp, pattern);
  return std::real((v.adjoint() * rho.rho * v)(0));
}

}  // namespace cvng
