// Copyright 2026 The dpnash Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpnash/privacy.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dpnash/lp.h"

namespace dpnash {
namespace {

uint64_t MixSeed(uint64_t seed, uint64_t salt) {
  // SplitMix64 finalizer over seed ^ golden-ratio multiple of salt.
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

absl::Status CheckTrajectory(const Trajectory& traj, const GameDims& d) {
  if (traj.steps.size() != static_cast<size_t>(d.H)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "trajectory has ", traj.steps.size(), " steps, expected ", d.H));
  }
  auto in = [](int v, int n) { return v >= 0 && v < n; };
  for (const Step& st : traj.steps) {
    if (!in(st.s, d.S) || !in(st.a, d.A) || !in(st.b, d.B)) {
      return absl::OutOfRangeError("trajectory index outside game dims");
    }
  }
  if (!in(traj.terminal_state, d.S)) {
    return absl::OutOfRangeError("terminal state outside game dims");
  }
  return absl::OkStatus();
}

int NextState(const Trajectory& traj, int h) {
  return h + 1 < static_cast<int>(traj.steps.size()) ? traj.steps[h + 1].s
                                                    : traj.terminal_state;
}

}  // namespace

absl::Status RecordEpisode(CountTables& counts, const Trajectory& traj) {
  const GameDims& d = counts.dims;
  if (auto st = CheckTrajectory(traj, d); !st.ok()) return st;
  for (int h = 0; h < d.H; ++h) {
    const Step& st = traj.steps[h];
    ++counts.n_sab[d.sab(h, st.s, st.a, st.b)];
    ++counts.n_sabs[d.sabs(h, st.s, st.a, st.b, NextState(traj, h))];
  }
  return absl::OkStatus();
}

double SumRow(std::span<const double> row) {
  double sum = 0.0;
  for (double v : row) sum += v;
  return sum;
}

AssumptionCheck CheckPrivateCounts(const PrivateCounts& pc,
                                   const CountTables& truth) {
  const GameDims& d = truth.dims;
  const double E = pc.error_bound;
  AssumptionCheck out;
  for (size_t c = 0; c < d.num_sab(); ++c) {
    std::span<const double> row(pc.nt_sabs.data() + c * d.S, d.S);
    for (int n = 0; n < d.S; ++n) {
      const double v = row[n];
      if (!(v > 0.0)) out.positive = false;
      if (!(std::fabs(v - static_cast<double>(truth.n_sabs[c * d.S + n])) <= E)) {
        out.sabs_within_e = false;
      }
    }
    const double nt = pc.nt_sab[c];
    const double n = static_cast<double>(truth.n_sab[c]);
    if (!(std::fabs(nt - n) <= E)) out.sab_within_e = false;
    if (nt != SumRow(row)) out.sum_identity = false;
    if (!(nt >= n)) out.no_underestimate = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary mechanism.

BinaryCounter::BinaryCounter(int capacity, double node_scale, uint64_t seed,
                             uint64_t stream)
    : capacity_(capacity),
      node_scale_(node_scale),
      seed_(seed),
      stream_(stream),
      alpha_(std::bit_width(static_cast<unsigned>(std::max(capacity, 1))), 0),
      alpha_hat_(alpha_.size(), 0.0) {
  released_.reserve(static_cast<size_t>(capacity) + 1);
  released_.push_back(0.0);
}

int BinaryCounter::NoiseTerms(int t) {
  return std::popcount(static_cast<unsigned>(t));
}

double BinaryCounter::NodeNoise(int level, int64_t index) const {
  if (node_scale_ == 0.0) return 0.0;
  const uint64_t key = (static_cast<uint64_t>(level) << 48) |
                       static_cast<uint64_t>(index);
  return LaplaceFromUniform(ToOpenUnit(CounterRng::At(seed_, stream_, key)),
                            node_scale_);
}

absl::Status BinaryCounter::Update(int increment) {
  if (time_ >= capacity_) {
    return absl::OutOfRangeError(
        absl::StrCat("binary counter capacity ", capacity_, " exceeded"));
  }
  if (increment != 0 && increment != 1) {
    return absl::InvalidArgumentError("binary counter increments are 0 or 1");
  }
  const int t = ++time_;
  const int level = std::countr_zero(static_cast<unsigned>(t));
  int64_t closed = increment;
  for (int j = 0; j < level; ++j) {
    closed += alpha_[j];
    alpha_[j] = 0;
    alpha_hat_[j] = 0.0;
  }
  alpha_[level] = closed;
  alpha_hat_[level] = static_cast<double>(closed) +
                      NodeNoise(level, static_cast<int64_t>(t >> level) - 1);
  double release = 0.0;
  for (int j = 0; j < static_cast<int>(alpha_.size()); ++j) {
    if ((t >> j) & 1) release += alpha_hat_[j];
  }
  released_.push_back(release);
  return absl::OkStatus();
}

absl::StatusOr<double> BinaryCounter::Query(int t) const {
  if (t < 0 || t > time_) {
    return absl::OutOfRangeError(
        absl::StrCat("query time ", t, " outside [0, ", time_, "]"));
  }
  return released_[t];
}

// ---------------------------------------------------------------------------
// Privatizer kinds and noise parameters.

absl::Status PrivatizerKind::Validate() const {
  if (type != Type::kNone && !(epsilon > 0.0 && std::isfinite(epsilon))) {
    return absl::InvalidArgumentError(
        absl::StrCat("privacy budget must be positive, got ", epsilon));
  }
  return absl::OkStatus();
}

std::string PrivatizerKind::Name() const {
  switch (type) {
    case Type::kNone:
      return "none";
    case Type::kCentral:
      return "central";
    case Type::kLocal:
      return "local";
  }
  return "unknown";
}

absl::StatusOr<PrivatizerKind> ParsePrivatizerKind(const std::string& name,
                                                   double epsilon) {
  PrivatizerKind kind;
  if (name == "none") {
    kind = PrivatizerKind::None();
  } else if (name == "central") {
    kind = PrivatizerKind::Central(epsilon);
  } else if (name == "local") {
    kind = PrivatizerKind::Local(epsilon);
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown privatizer '", name, "'"));
  }
  if (auto st = kind.Validate(); !st.ok()) return st;
  return kind;
}

CentralNoise CentralNoiseFor(double epsilon, int H, int K) {
  const double log_k = std::max(1.0, std::log2(static_cast<double>(K)));
  CentralNoise out;
  out.stream_epsilon = epsilon / (2.0 * H * log_k);
  out.depth = std::bit_width(static_cast<unsigned>(std::max(K, 1)));
  out.node_scale = out.depth / out.stream_epsilon;
  return out;
}

double LocalNoiseScale(double epsilon, int H) { return 2.0 * H / epsilon; }

NoisyIndicators LaplacePerturbEpisode(const Trajectory& traj,
                                      const GameDims& d, double scale,
                                      CounterRng& rng) {
  NoisyIndicators out{std::vector<double>(d.num_sab(), 0.0),
                      std::vector<double>(d.num_sabs(), 0.0)};
  for (int h = 0; h < static_cast<int>(traj.steps.size()); ++h) {
    const Step& st = traj.steps[h];
    out.sigma_sab[d.sab(h, st.s, st.a, st.b)] = 1.0;
    out.sigma_sabs[d.sabs(h, st.s, st.a, st.b, NextState(traj, h))] = 1.0;
  }
  for (double& v : out.sigma_sab) v += rng.Laplace(scale);
  for (double& v : out.sigma_sabs) v += rng.Laplace(scale);
  return out;
}

// ---------------------------------------------------------------------------
// Post-processing.

absl::StatusOr<PostprocessResult> Postprocess(
    std::span<const double> nhat_sabs, double nhat_sab, double E) {
  const int S = static_cast<int>(nhat_sabs.size());
  if (S == 0) return absl::InvalidArgumentError("empty count row");
  if (!(E >= 0.0) || !std::isfinite(E) || !std::isfinite(nhat_sab)) {
    return absl::InvalidArgumentError("postprocess needs finite E >= 0");
  }
  for (double v : nhat_sabs) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("non-finite noisy count");
    }
  }
  const double slack = E / 4.0;
  // A noisy total below -E/4 leaves no nonnegative x; the band is then
  // widened to reach 0, which only happens outside the event the envelope E
  // was calibrated for.
  const double hi = std::max(nhat_sab + slack, 0.0);
  const double lo = std::min(nhat_sab - slack, hi);

  PostprocessResult out;
  std::vector<double> x(nhat_sabs.begin(), nhat_sabs.end());
  const bool nonneg = std::all_of(x.begin(), x.end(),
                                  [](double v) { return v >= 0.0; });
  const double raw_sum = SumRow(x);
  if (!(nonneg && raw_sum >= lo && raw_sum <= hi)) {
    // Epigraph LP over (x_0..x_{S-1}, t): minimize t.
    LinearProgram lp;
    lp.objective.assign(S + 1, 0.0);
    lp.objective[S] = 1.0;
    for (int n = 0; n < S; ++n) {
      LpRow up, down;
      up.coeffs.assign(S + 1, 0.0);
      down.coeffs.assign(S + 1, 0.0);
      up.coeffs[n] = 1.0;
      up.coeffs[S] = -1.0;
      up.rhs = nhat_sabs[n];
      down.coeffs[n] = -1.0;
      down.coeffs[S] = -1.0;
      down.rhs = -nhat_sabs[n];
      lp.ineq.push_back(std::move(up));
      lp.ineq.push_back(std::move(down));
    }
    LpRow sum_hi, sum_lo;
    sum_hi.coeffs.assign(S + 1, 1.0);
    sum_hi.coeffs[S] = 0.0;
    sum_hi.rhs = hi;
    sum_lo.coeffs.assign(S + 1, -1.0);
    sum_lo.coeffs[S] = 0.0;
    sum_lo.rhs = -lo;
    lp.ineq.push_back(sum_hi);
    lp.ineq.push_back(sum_lo);
    auto first = Solve(lp);
    if (!first.ok()) return first.status();
    if (first->status != LpStatus::kOptimal) {
      return absl::InternalError("post-processing LP infeasible");
    }
    const double t_star = first->x[S];
    out.t = t_star;

    // Tie-break over the optimal face: minimize sum_s' d_s' with
    // d_s' >= |x_s' - nhat_s'| and |x_s' - nhat_s'| <= t*.
    const double band = t_star + kLpFeasTol * (1.0 + std::fabs(t_star));
    LinearProgram tie;
    tie.objective.assign(2 * S, 0.0);
    for (int n = 0; n < S; ++n) tie.objective[S + n] = 1.0;
    for (int n = 0; n < S; ++n) {
      LpRow r1, r2, r3, r4;
      for (LpRow* r : {&r1, &r2, &r3, &r4}) r->coeffs.assign(2 * S, 0.0);
      r1.coeffs[n] = 1.0;
      r1.coeffs[S + n] = -1.0;
      r1.rhs = nhat_sabs[n];
      r2.coeffs[n] = -1.0;
      r2.coeffs[S + n] = -1.0;
      r2.rhs = -nhat_sabs[n];
      r3.coeffs[n] = 1.0;
      r3.rhs = nhat_sabs[n] + band;
      r4.coeffs[n] = -1.0;
      r4.rhs = -(nhat_sabs[n] - band);
      for (LpRow* r : {&r1, &r2, &r3, &r4}) tie.ineq.push_back(std::move(*r));
    }
    sum_hi.coeffs.assign(2 * S, 0.0);
    sum_lo.coeffs.assign(2 * S, 0.0);
    for (int n = 0; n < S; ++n) {
      sum_hi.coeffs[n] = 1.0;
      sum_lo.coeffs[n] = -1.0;
    }
    tie.ineq.push_back(std::move(sum_hi));
    tie.ineq.push_back(std::move(sum_lo));
    auto second = Solve(tie);
    if (!second.ok()) return second.status();
    if (second->status != LpStatus::kOptimal) {
      return absl::InternalError("post-processing tie-break LP not optimal");
    }
    for (int n = 0; n < S; ++n) x[n] = std::max(0.0, second->x[n]);
    // Pull the sum back inside [lo, hi] if roundoff pushed it out.
    const double sum = SumRow(x);
    if (sum < lo) {
      const double add = (lo - sum) / S;
      for (double& v : x) v += add;
    } else if (sum > hi && sum > 0.0) {
      const double keep = hi / sum;
      for (double& v : x) v *= keep;
    }
  }

  out.nt_sabs.resize(S);
  const double per_entry = E / (2.0 * S);
  for (int n = 0; n < S; ++n) out.nt_sabs[n] = x[n] + per_entry;
  out.nt_sab = SumRow(out.nt_sabs);
  return out;
}

// ---------------------------------------------------------------------------
// Privatizers.

namespace {

absl::StatusOr<PrivateCounts> ReleaseFromNoisy(const GameDims& d, double E,
                                               std::span<const double> nhat_sab,
                                               std::span<const double> nhat_sabs) {
  PrivateCounts pc{d, std::vector<double>(d.num_sab()),
                   std::vector<double>(d.num_sabs()), E};
  for (size_t c = 0; c < d.num_sab(); ++c) {
    auto res = Postprocess(nhat_sabs.subspan(c * d.S, d.S), nhat_sab[c], E);
    if (!res.ok()) return res.status();
    std::copy(res->nt_sabs.begin(), res->nt_sabs.end(),
              pc.nt_sabs.begin() + static_cast<ptrdiff_t>(c * d.S));
    pc.nt_sab[c] = res->nt_sab;
  }
  return pc;
}

class NonePrivatizer final : public Privatizer {
 public:
  explicit NonePrivatizer(const GameDims& d) : counts_(d) {}

  absl::Status Absorb(const Trajectory& traj) override {
    return RecordEpisode(counts_, traj);
  }

  absl::StatusOr<PrivateCounts> Release() override {
    const GameDims& d = counts_.dims;
    PrivateCounts pc{d, std::vector<double>(d.num_sab()),
                     std::vector<double>(d.num_sabs()), 0.0};
    for (size_t i = 0; i < d.num_sabs(); ++i) {
      pc.nt_sabs[i] = static_cast<double>(counts_.n_sabs[i]);
    }
    for (size_t c = 0; c < d.num_sab(); ++c) {
      pc.nt_sab[c] = static_cast<double>(counts_.n_sab[c]);
    }
    return pc;
  }

  double error_bound() const override { return 0.0; }
  PrivatizerKind kind() const override { return PrivatizerKind::None(); }

 private:
  CountTables counts_;
};

class CentralPrivatizer final : public Privatizer {
 public:
  CentralPrivatizer(const PrivatizerKind& kind, const GameDims& d, double E,
                    const PrivatizerOptions& opt)
      : kind_(kind), dims_(d), E_(E) {
    const double scale =
        opt.zero_noise ? 0.0 : CentralNoiseFor(kind.epsilon, d.H, d.K).node_scale;
    const size_t streams = d.num_sab() + d.num_sabs();
    counters_.reserve(streams);
    for (size_t i = 0; i < streams; ++i) {
      counters_.emplace_back(d.K, scale, opt.seed,
                             StreamId(StreamTag::kCentralNoise, i));
    }
    nhat_.assign(streams, 0.0);
  }

  absl::Status Absorb(const Trajectory& traj) override {
    if (auto st = CheckTrajectory(traj, dims_); !st.ok()) return st;
    std::vector<uint8_t> hit(counters_.size(), 0);
    for (int h = 0; h < dims_.H; ++h) {
      const Step& st = traj.steps[h];
      const size_t c = dims_.sab(h, st.s, st.a, st.b);
      hit[c] = 1;
      hit[dims_.num_sab() + dims_.sabs(h, st.s, st.a, st.b, NextState(traj, h))] =
          1;
    }
    for (size_t i = 0; i < counters_.size(); ++i) {
      if (auto st = counters_[i].Update(hit[i]); !st.ok()) return st;
      nhat_[i] = *counters_[i].Query(counters_[i].current_time());
    }
    return absl::OkStatus();
  }

  absl::StatusOr<PrivateCounts> Release() override {
    std::span<const double> all(nhat_);
    return ReleaseFromNoisy(dims_, E_, all.first(dims_.num_sab()),
                            all.subspan(dims_.num_sab()));
  }

  double error_bound() const override { return E_; }
  PrivatizerKind kind() const override { return kind_; }

 private:
  PrivatizerKind kind_;
  GameDims dims_;
  double E_;
  std::vector<BinaryCounter> counters_;  // sab streams, then sabs streams
  std::vector<double> nhat_;
};

class LocalPrivatizer final : public Privatizer {
 public:
  LocalPrivatizer(const PrivatizerKind& kind, const GameDims& d, double E,
                  const PrivatizerOptions& opt)
      : kind_(kind),
        dims_(d),
        E_(E),
        seed_(opt.seed),
        scale_(opt.zero_noise ? 0.0 : LocalNoiseScale(kind.epsilon, d.H)),
        nhat_sab_(d.num_sab(), 0.0),
        nhat_sabs_(d.num_sabs(), 0.0) {}

  absl::Status Absorb(const Trajectory& traj) override {
    if (auto st = CheckTrajectory(traj, dims_); !st.ok()) return st;
    // User side: only the perturbed tables leave this scope.
    CounterRng rng(seed_, StreamId(StreamTag::kLocalNoise, episodes_++));
    const NoisyIndicators noisy = LaplacePerturbEpisode(traj, dims_, scale_, rng);
    for (size_t i = 0; i < nhat_sab_.size(); ++i) nhat_sab_[i] += noisy.sigma_sab[i];
    for (size_t i = 0; i < nhat_sabs_.size(); ++i) {
      nhat_sabs_[i] += noisy.sigma_sabs[i];
    }
    return absl::OkStatus();
  }

  absl::StatusOr<PrivateCounts> Release() override {
    return ReleaseFromNoisy(dims_, E_, nhat_sab_, nhat_sabs_);
  }

  double error_bound() const override { return E_; }
  PrivatizerKind kind() const override { return kind_; }

 private:
  PrivatizerKind kind_;
  GameDims dims_;
  double E_;
  uint64_t seed_;
  double scale_;
  uint64_t episodes_ = 0;
  std::vector<double> nhat_sab_;
  std::vector<double> nhat_sabs_;
};

}  // namespace

absl::StatusOr<std::unique_ptr<Privatizer>> MakePrivatizer(
    const PrivatizerKind& kind, const GameDims& dims, double E,
    const PrivatizerOptions& options) {
  if (auto st = kind.Validate(); !st.ok()) return st;
  if (!dims.Valid()) return absl::InvalidArgumentError("invalid game dims");
  if (kind.type != PrivatizerKind::Type::kNone && !(E >= 0.0 && std::isfinite(E))) {
    return absl::InvalidArgumentError("error bound E must be finite and >= 0");
  }
  switch (kind.type) {
    case PrivatizerKind::Type::kNone:
      return std::make_unique<NonePrivatizer>(dims);
    case PrivatizerKind::Type::kCentral:
      return std::make_unique<CentralPrivatizer>(kind, dims, E, options);
    case PrivatizerKind::Type::kLocal:
      return std::make_unique<LocalPrivatizer>(kind, dims, E, options);
  }
  return absl::InternalError("unhandled privatizer kind");
}

// ---------------------------------------------------------------------------
// Calibration.

double CandidateE(const PrivatizerKind& kind, const GameDims& d, double beta) {
  const double log_term =
      std::log(static_cast<double>(d.H) * d.S * d.A * d.B * d.K / beta);
  const double base = static_cast<double>(d.H) / kind.epsilon;
  switch (kind.type) {
    case PrivatizerKind::Type::kNone:
      return 0.0;
    case PrivatizerKind::Type::kCentral:
      return 8.0 * base * log_term * log_term;
    case PrivatizerKind::Type::kLocal:
      return 8.0 * base * std::sqrt(d.K * log_term);
  }
  return 0.0;
}

std::vector<double> SimulateMaxErrors(const PrivatizerKind& kind,
                                      const GameDims& d, int realizations,
                                      uint64_t seed) {
  std::vector<double> out(realizations, 0.0);
  const size_t streams = d.num_sab() + d.num_sabs();
  for (int r = 0; r < realizations; ++r) {
    const uint64_t key = MixSeed(seed, static_cast<uint64_t>(r));
    double worst = 0.0;
    if (kind.type == PrivatizerKind::Type::kCentral) {
      const double scale = CentralNoiseFor(kind.epsilon, d.H, d.K).node_scale;
      for (size_t i = 0; i < streams; ++i) {
        BinaryCounter ctr(d.K, scale, key, StreamId(StreamTag::kCentralNoise, i));
        // Nhat^k is the release after k - 1 episodes, k in [1, K].
        for (int t = 1; t <= d.K - 1; ++t) {
          (void)ctr.Update(0);
          worst = std::max(worst, std::fabs(*ctr.Query(t)));
        }
      }
    } else if (kind.type == PrivatizerKind::Type::kLocal) {
      const double scale = LocalNoiseScale(kind.epsilon, d.H);
      std::vector<double> sums(streams, 0.0);
      for (int episode = 0; episode < d.K - 1; ++episode) {
        CounterRng rng(key, StreamId(StreamTag::kLocalNoise, episode));
        for (double& v : sums) {
          v += rng.Laplace(scale);
          worst = std::max(worst, std::fabs(v));
        }
      }
    }
    out[r] = worst;
  }
  return out;
}

double CertificateFrequency(std::span<const double> max_errors, double E) {
  if (max_errors.empty()) return 0.0;
  const double bound = E / 4.0;
  const auto hits = std::count_if(max_errors.begin(), max_errors.end(),
                                  [&](double v) { return v <= bound; });
  return static_cast<double>(hits) / static_cast<double>(max_errors.size());
}

absl::StatusOr<Calibration> CalibrateE(const PrivatizerKind& kind,
                                       const GameDims& dims, double beta,
                                       const CalibrationOptions& options) {
  if (auto st = kind.Validate(); !st.ok()) return st;
  if (!dims.Valid()) return absl::InvalidArgumentError("invalid game dims");
  if (!(beta > 0.0 && beta < 1.0)) {
    return absl::InvalidArgumentError("beta must lie in (0, 1)");
  }
  if (options.realizations < 1 || options.estimation_realizations < 1) {
    return absl::InvalidArgumentError("need at least one realization");
  }
  Calibration cal;
  cal.realizations = options.realizations;
  cal.estimation_realizations = options.estimation_realizations;
  if (kind.type == PrivatizerKind::Type::kNone || options.zero_noise) {
    return cal;
  }
  cal.candidate = CandidateE(kind, dims, beta);
  std::vector<double> errs =
      SimulateMaxErrors(kind, dims, options.estimation_realizations, options.seed);
  std::sort(errs.begin(), errs.end());
  const double level = 1.0 - beta / 6.0;
  const size_t rank = static_cast<size_t>(
      std::ceil(level * static_cast<double>(errs.size())));
  cal.monte_carlo = 4.0 * errs[std::clamp<size_t>(rank, 1, errs.size()) - 1];
  cal.E = std::max(cal.candidate, cal.monte_carlo);

  const std::vector<double> fresh = SimulateMaxErrors(
      kind, dims, options.realizations, MixSeed(options.seed, 0xce27));
  cal.certified_frequency = CertificateFrequency(fresh, cal.E);
  while (cal.certified_frequency < 1.0 - beta / 3.0) {
    cal.E *= 1.05;
    cal.certified_frequency = CertificateFrequency(fresh, cal.E);
  }
  return cal;
}

}  // namespace dpnash
