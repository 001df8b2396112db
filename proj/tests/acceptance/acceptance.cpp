// One PASS/FAIL line per primary acceptance criterion; exit status is the
// number of failures.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "elicit/cooke.hpp"
#include "elicit/error.hpp"
#include "elicit/fitting.hpp"
#include "elicit/pooling.hpp"
#include "elicit/quadrature.hpp"
#include "elicit/scoring.hpp"
#include "elicit/trial_model.hpp"
#include "random_dists.hpp"

using namespace elicit;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  fmt::print("{} {}: {}\n", pass ? "PASS" : "FAIL", name, detail);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("e" + std::to_string(i + 1));
  return out;
}

WeightVector random_weights(std::mt19937_64& rng, std::size_t n) {
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) total += (x = g(rng) + 0.05);
  for (double& x : w) x /= total;
  return custom_weights(ids(n), w);
}

void pooling_normalization() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20190321);
  std::uniform_real_distribution<double> probe(-0.5, 1.5);
  double worst = 0.0;
  int zero_violations = 0;
  int zero_probes = 0;
  int errors = 0;
  for (int set = 0; set < 200; ++set) {
    const std::size_t n = 2 + static_cast<std::size_t>(set % 4);
    std::vector<Distribution> dists;
    for (std::size_t i = 0; i < n; ++i) dists.push_back(testing::random_overlapping(rng, set + static_cast<int>(i)));
    const WeightVector w = random_weights(rng, n);
    try {
      const Distribution lin = linear_pool(dists, w);
      const Distribution log = log_linear_pool(dists, w);
      worst = std::max(worst, std::abs(integrate_over(lin, [&](double x) { return lin.pdf(x); }) - 1.0));
      worst = std::max(worst, std::abs(integrate_over(log, [&](double x) { return log.pdf(x); }) - 1.0));
      for (int k = 0; k < 50; ++k) {
        const double x = probe(rng);
        const bool some_zero = std::any_of(dists.begin(), dists.end(), [&](const Distribution& d) { return d.pdf(x) == 0.0; });
        if (some_zero) {
          ++zero_probes;
          if (log.pdf(x) != 0.0) ++zero_violations;
        }
      }
    } catch (const Error&) {
      ++errors;
    }
  }
  const double secs = seconds_since(t0);
  report("pooling normalization", worst < 1e-6 && zero_violations == 0 && errors == 0 && secs < 60.0,
         fmt::format("200 sets, max |mass - 1| = {:.3g}, {} zero probes with {} violations, {} errors, {:.1f} s",
                     worst, zero_probes, zero_violations, errors, secs));
}

void log_pool_oracle() {
  const Distribution dists[] = {Distribution::normal(0, 1), Distribution::normal(4, 1)};
  const Distribution pooled = log_linear_pool(dists, equal_weights(ids(2)));
  const double mean = pooled.mean();
  const double sd = std::sqrt(pooled.variance());
  // Weighted geometric mean of the two kernels: precision sum w_i / s_i^2.
  const double precision = 0.5 + 0.5;
  const double analytic_sd = std::sqrt(1.0 / precision);
  const double stated_sd = 1.0 / std::sqrt(2.0);
  report("log-pool closed-form oracle", std::abs(mean - 2.0) <= 0.01 && std::abs(sd - stated_sd) <= 0.01,
         fmt::format("mean {:.6f} (target 2 +/- 0.01), sd {:.6f} (target {:.6f} +/- 0.01; the equal-weight "
                     "geometric mean f1^0.5 f2^0.5 has sd {:.6f}, {:.6f} is the unweighted product f1 f2)",
                     mean, sd, stated_sd, analytic_sd, stated_sd));
}

// Independent Classical Method: direct hit counting, closed-form chi-squared
// survival for three degrees of freedom, segment information by hand.
double chi2_3_survival(double x) {
  return std::erfc(std::sqrt(x / 2.0)) + std::sqrt(2.0 * x / M_PI) * std::exp(-x / 2.0);
}

std::vector<double> brute_weights(const std::vector<cooke::SeedQuestion>& seeds, std::size_t held_out,
                                  const std::vector<std::string>& experts, double alpha) {
  std::vector<double> raw;
  for (const auto& e : experts) {
    int hits[4] = {0, 0, 0, 0};
    double info = 0.0;
    int q = 0;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      if (k == held_out) continue;
      const auto& s = seeds[k];
      const bool lg = s.scale == Scale::log;
      auto tr = [&](double v) { return lg ? std::log(v) : v; };
      const ElicitedJudgment* j = nullptr;
      double lo = tr(s.truth);
      double hi = tr(s.truth);
      for (const auto& jj : s.judgments) {
        if (jj.expert_id == e) j = &jj;
        lo = std::min(lo, tr(jj.minimum));
        hi = std::max(hi, tr(jj.maximum));
      }
      const double t = s.truth;
      hits[t < j->q25 ? 0 : t < j->median ? 1 : t < j->q75 ? 2 : 3]++;
      const double span = hi - lo;
      lo -= 0.1 * span;
      hi += 0.1 * span;
      const double edges[7] = {lo, tr(j->minimum), tr(j->q25), tr(j->median), tr(j->q75), tr(j->maximum), hi};
      const double mass[6] = {0.01, 0.24, 0.25, 0.25, 0.24, 0.01};
      double ii = 0.0;
      for (int m = 0; m < 6; ++m) ii += mass[m] * std::log(mass[m] / ((edges[m + 1] - edges[m]) / (hi - lo)));
      info += ii;
      ++q;
    }
    double relent = 0.0;
    for (int h : hits) {
      const double sj = static_cast<double>(h) / q;
      if (sj > 0) relent += sj * std::log(sj / 0.25);
    }
    const double c = chi2_3_survival(2.0 * q * relent);
    raw.push_back(c >= alpha ? c * info / q : 0.0);
  }
  double total = 0.0;
  for (double r : raw) total += r;
  if (total > 0) {
    for (double& r : raw) r /= total;
  }
  return raw;
}

void cm_oracle() {
  std::mt19937_64 rng(20190321);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  double worst = 0.0;
  int folds = 0;
  int mismatched_errors = 0;
  const double alpha = 0.01;
  for (int inst = 0; inst < 60; ++inst) {
    const int n_experts = 2 + inst % 3;
    const int n_seeds = 4 + (inst / 3) % 5;
    std::vector<double> bias(n_experts);
    std::vector<double> spread(n_experts);
    for (int e = 0; e < n_experts; ++e) {
      bias[e] = 1.5 * z(rng);
      spread[e] = 0.3 + 2.0 * u(rng);
    }
    std::vector<cooke::SeedQuestion> seeds;
    for (int s = 0; s < n_seeds; ++s) {
      cooke::SeedQuestion q;
      q.question_id = "s" + std::to_string(s);
      q.scale = s % 3 == 2 ? Scale::log : Scale::linear;
      const double centre = q.scale == Scale::log ? std::log(50.0 + 100 * u(rng)) : 100 * u(rng);
      const double scale = q.scale == Scale::log ? 0.4 : 10.0;
      const double truth = centre + scale * z(rng);
      q.truth = q.scale == Scale::log ? std::exp(truth) : truth;
      for (int e = 0; e < n_experts; ++e) {
        const double m = centre + scale * (bias[e] + 0.3 * z(rng));
        const double w = scale * spread[e];
        double v[5] = {m - 3.5 * w, m - 0.67 * w, m, m + 0.67 * w, m + 3.5 * w};
        if (q.scale == Scale::log) {
          for (double& x : v) x = std::exp(x);
        }
        ElicitedJudgment j{q.question_id, "x" + std::to_string(e), v[0], v[1], v[2], v[3], v[4], {}};
        if (q.scale == Scale::log) j.support = {0.0, std::numeric_limits<double>::infinity()};
        q.judgments.push_back(j);
      }
      seeds.push_back(std::move(q));
    }
    const auto experts = cooke::expert_ids(seeds);
    cooke::CvOptions opts;
    opts.alpha = alpha;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const auto brute = brute_weights(seeds, k, experts, alpha);
      const bool brute_empty = std::all_of(brute.begin(), brute.end(), [](double w) { return w == 0.0; });
      std::vector<cooke::SeedQuestion> train;
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i != k) train.push_back(seeds[i]);
      }
      try {
        const auto w = cooke::classical_weights(train, opts);
        if (brute_empty) ++mismatched_errors;
        for (std::size_t e = 0; e < experts.size(); ++e) worst = std::max(worst, std::abs(w.weights[e] - brute[e]));
      } catch (const Error& err) {
        if (!(err.code() == ErrorCode::no_calibrated_expert && brute_empty)) ++mismatched_errors;
      }
      ++folds;
    }
    // The full cross-validation must carry exactly those weights too.
    try {
      const auto cv = cooke::leave_one_out_cv(seeds, opts);
      for (std::size_t k = 0; k < cv.size(); ++k) {
        const auto brute = brute_weights(seeds, k, experts, alpha);
        for (std::size_t e = 0; e < experts.size(); ++e) {
          worst = std::max(worst, std::abs(cv[k].weights.weights[e] - brute[e]));
        }
      }
    } catch (const Error& err) {
      if (err.code() != ErrorCode::no_calibrated_expert) ++mismatched_errors;
    }
  }
  report("CM pipeline oracle equivalence", worst <= 1e-10 && mismatched_errors == 0,
         fmt::format("{} folds over 60 instances, max |w - w_brute| = {:.3g}, {} disagreements on cut-off", folds,
                     worst, mismatched_errors));
}

void calibration_sanity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20190321);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  const double zq[5] = {-2.326347874040841, -0.674489750196082, 0.0, 0.674489750196082, 2.326347874040841};
  double calibrated_total = 0.0;
  int bad_low_cal = 0;
  int bad_zero_weight = 0;
  const int reps = 500;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<cooke::SeedQuestion> seeds;
    for (int s = 0; s < 10; ++s) {
      cooke::SeedQuestion q;
      q.question_id = "s" + std::to_string(s);
      const double mu = 100 * u(rng);
      const double sigma = 1.0 + 10 * u(rng);
      q.truth = mu + sigma * z(rng);
      // Exact population quantiles of N(mu, sigma).
      ElicitedJudgment good{q.question_id, "calibrated", 0, 0, 0, 0, 0, {}};
      double* gv[5] = {&good.minimum, &good.q25, &good.median, &good.q75, &good.maximum};
      for (int k = 0; k < 5; ++k) *gv[k] = mu + sigma * zq[k];
      // Same shape, placed wholly below the truth.
      ElicitedJudgment never = good;
      never.expert_id = "never";
      const double shift = (never.maximum - q.truth) + sigma;
      for (double* v : {&never.minimum, &never.q25, &never.median, &never.q75, &never.maximum}) *v -= shift;
      q.judgments = {good, never};
      seeds.push_back(std::move(q));
    }
    const auto good = cooke::assess_expert("calibrated", seeds);
    const auto never = cooke::assess_expert("never", seeds);
    calibrated_total += good.calibration;
    if (!(never.calibration < 0.01)) ++bad_low_cal;
    const cooke::CalibrationResult both[] = {good, never};
    try {
      if (cooke::cm_weights(both, 0.05).weights[1] != 0.0) ++bad_zero_weight;
    } catch (const Error& e) {
      // Both cut: the never-containing expert still gets no weight.
      if (e.code() != ErrorCode::no_calibrated_expert) ++bad_zero_weight;
    }
  }
  const double mean_cal = calibrated_total / reps;
  const double secs = seconds_since(t0);
  const int good_reps = std::min(reps - bad_low_cal, reps - bad_zero_weight);
  report("calibration sanity", mean_cal >= 0.3 && good_reps >= 0.99 * reps && secs < 120.0,
         fmt::format("mean calibration {:.4f} (>= 0.3); never-containing expert C < 0.01 in {}/{} and weight 0 in "
                     "{}/{}; {:.1f} s",
                     mean_cal, reps - bad_low_cal, reps, reps - bad_zero_weight, reps, secs));
}

void scoring_closed_forms() {
  const auto n = Distribution::normal(0, 1);
  const double ls = scoring::logarithmic_score(n, 0.0).value;
  const double qs = scoring::quadratic_score(n, 0.0);
  const bool closed = std::abs(ls - 0.918939) <= 1e-6 && std::abs(qs - 0.515789) <= 1e-6;

  // Truth model N(0, 1) discretized on a fine grid; reports N(m, s) over a
  // lattice that contains the truthful (0, 1).
  std::vector<double> xs;
  std::vector<double> ps;
  double total = 0.0;
  for (int i = -600; i <= 600; ++i) {
    const double x = i / 100.0;
    xs.push_back(x);
    ps.push_back(n.pdf(x));
    total += ps.back();
  }
  for (double& p : ps) p /= total;
  auto expected = [&](const Distribution& report) {
    const double sq = scoring::squared_density_integral(report);
    double e = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) e += ps[i] * (2.0 * report.pdf(xs[i]) - sq);
    return e;
  };
  const double truthful = expected(n);
  double best_other = -1e300;
  for (int a = -5; a <= 5; ++a) {
    for (int b = -5; b <= 5; ++b) {
      if (a == 0 && b == 0) continue;
      best_other = std::max(best_other, expected(Distribution::normal(0.1 * a, 1.0 + 0.08 * b)));
    }
  }
  report("scoring closed forms", closed && truthful > best_other,
         fmt::format("log {:.7f} (0.918939), quadratic {:.7f} (0.515789); expected quadratic truthful {:.7f} vs "
                     "best of 120 misreports {:.7f}",
                     ls, qs, truthful, best_other));
}

void fitting_round_trip() {
  std::mt19937_64 rng(20190321);
  const double inf = std::numeric_limits<double>::infinity();
  std::string detail;
  bool pass = true;
  for (Family f : {Family::normal, Family::lognormal, Family::beta, Family::gamma}) {
    int ok = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const Distribution d = testing::random_parametric(rng, static_cast<int>(f));
      const Support s = f == Family::normal ? Support{} : f == Family::beta ? Support{0, 1} : Support{0, inf};
      ElicitedJudgment j{"q", "e", d.quantile(0.01), d.quantile(0.25), d.quantile(0.5), d.quantile(0.75),
                         d.quantile(0.99), s};
      const auto cand = fit_family(j, f);
      double err = 0.0;
      for (double p : {0.25, 0.5, 0.75}) err = std::max(err, std::abs(cand.distribution.quantile(p) - d.quantile(p)));
      worst = std::max(worst, err);
      if (err <= 1e-3) ++ok;
    }
    if (ok != 100) pass = false;
    detail += fmt::format("{}{} {}/100 (max err {:.2g})", detail.empty() ? "" : ", ", to_string(f), ok, worst);
  }
  report("fitting round-trip", pass, detail);
}

void trial_identities() {
  std::mt19937_64 rng(20190321);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mass_bad = 0;
  int eq_bad = 0;
  int grid_bad = 0;
  double worst = 0.0;
  int grids = 0;
  for (int i = 0; i < 1000; ++i) {
    const trial::PointParameters p{u(rng), u(rng), u(rng), u(rng), u(rng)};
    const auto c = trial::cell_probabilities(p);
    if (c.group[0] + c.group[1] + c.group[2] != 1.0) ++mass_bad;
    const double theta = u(rng);
    const double sens = trial::et_sensitivity(p.eta, p.psi, theta, theta);
    worst = std::max(worst, std::abs(sens - theta));
    if (std::abs(sens - theta) > 1e-12) ++eq_bad;
    for (int total : {1, 7, 100, 331}) {
      const auto sample = trial::patient_sample(p, total);
      int sum = 0;
      for (int g : sample.group) sum += g;
      if (sum != total || static_cast<int>(sample.patients.size()) != total) ++grid_bad;
      ++grids;
    }
  }
  report("trial model identities", mass_bad == 0 && eq_bad == 0 && grid_bad == 0,
         fmt::format("group masses off in {}/1000, sensitivity identity off in {}/1000 (max {:.2g}), patient grid "
                     "off in {}/{}",
                     mass_bad, eq_bad, worst, grid_bad, grids));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void end_to_end() {
  const fs::path fixture = ELICIT_E2E_DIR;
  const fs::path out = fs::temp_directory_path() / fmt::format("elicit-e2e-{}", ::getpid());
  fs::create_directories(out);
  const std::string cli = ELICIT_CLI;
  auto sh = [&](const std::string& args, const fs::path& stdout_file) {
    const std::string cmd = fmt::format("cd \"{}\" && \"{}\" {} > \"{}\"", fixture.string(), cli, args, stdout_file.string());
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  int rc = 0;
  rc |= sh(fmt::format("crossval --seeds seeds.csv --alpha 0.05 --consensus shelf.csv --out \"{}\"",
                       (out / "folds.json").string()),
           out / "crossval.stdout");
  rc |= sh(fmt::format("score --folds \"{}\" --truths seeds.csv --out \"{}\"", (out / "folds.json").string(),
                       (out / "table.csv").string()),
           out / "table.txt");
  rc |= sh(fmt::format("correlations --folds \"{}\" --truths seeds.csv --out \"{}\"", (out / "folds.json").string(),
                       (out / "correlations.csv").string()),
           out / "correlations.txt");
  std::vector<std::string> differ;
  for (const char* name : {"folds.json", "table.csv", "table.txt", "correlations.csv", "correlations.txt"}) {
    const std::string golden = slurp(fixture / "golden" / name);
    if (golden.empty() || golden != slurp(out / name)) differ.push_back(name);
  }
  fs::remove_all(out);
  std::string list;
  for (const auto& d : differ) list += " " + d;
  report("end-to-end fixture", rc == 0 && differ.empty(),
         rc != 0 ? fmt::format("CLI exited nonzero") :
                   differ.empty() ? "crossval, score and correlations reproduce all 5 golden files byte-identically"
                                  : "differs from golden:" + list);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {pooling_normalization, log_pool_oracle, cm_oracle,
                                                       calibration_sanity,    scoring_closed_forms, fitting_round_trip,
                                                       trial_identities,      end_to_end};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      report("criterion aborted", false, e.what());
    }
  }
  fmt::print("{} of {} criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
