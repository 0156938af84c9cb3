// Acceptance gate: every shipped guarantee, one pass/fail line each.
// Exits nonzero when any line fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "slb/bounds.hpp"
#include "slb/errors.hpp"
#include "slb/kraft.hpp"
#include "slb/lz.hpp"
#include "slb/phi.hpp"
#include "slb/saddle.hpp"
#include "slb/spectral.hpp"

using namespace slb;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void line(bool ok, const char* name, const std::string& detail) {
  std::printf("%s: %s%s%s\n", ok ? "PASS" : "FAIL", name,
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

template <class Body>
void criterion(const char* name, Body&& body) {
  try {
    std::string detail;
    const bool ok = body(detail);
    line(ok, name, detail);
  } catch (const std::exception& e) {
    line(false, name, std::string("threw: ") + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Alphabet wide(double half, int nodes) {
  return Alphabet::continuous_interval(-half, half, nodes);
}

int worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

// Shared instances for the first two criteria.
struct PhiInstance {
  Alphabet alphabet;
  DistortionSpec spec;
  double d;
  double closed_form;
  double tol;
};

std::vector<PhiInstance> phi_instances() {
  std::vector<PhiInstance> out;
  const Alphabet sq = wide(16.0, 16001);
  for (double d : {0.1, 0.5, 1.0, 2.0})
    out.push_back({sq, make_spec({square_distortion()}, {d}), d,
                   0.5 * std::log2(2 * std::numbers::pi * std::numbers::e * d),
                   1e-6});
  const Alphabet ab = wide(60.0, 24001);
  for (double d : {0.1, 0.5, 1.0, 2.0})
    out.push_back({ab, make_spec({abs_distortion()}, {d}), d,
                   std::log2(2 * std::numbers::e * d), 1e-6});
  const Alphabet bin = Alphabet::binary();
  for (double d : {0.05, 0.15, 0.25, 0.35, 0.45}) {
    const double hb = -d * std::log2(d) - (1 - d) * std::log2(1 - d);
    out.push_back({bin, make_spec({hamming_distortion()}, {d}), d, hb, 1e-9});
  }
  return out;
}

bool run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(SLBKIT_BIN) + " " + args + " > " +
                          out.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

}  // namespace

int main() {
  // 1. Closed-form entropy-maximization values, each evaluation under 1 s.
  criterion("01 closed-form rate floors (square, abs, binary hamming)",
            [](std::string& detail) {
              double worst = 0.0, slowest = 0.0;
              for (const auto& inst : phi_instances()) {
                const auto t0 = std::chrono::steady_clock::now();
                const PhiResult r = phi(inst.alphabet, inst.spec, {&inst.d, 1});
                slowest = std::max(slowest, seconds_since(t0));
                const double err = std::abs(r.phi - inst.closed_form);
                if (!r.converged) return false;
                if (err > inst.tol) {
                  detail = "error " + fmt(err) + " at level " + fmt(inst.d);
                  return false;
                }
                worst = std::max(worst, err / inst.tol);
              }
              detail = "worst error " + fmt(worst) +
                       " of tolerance, slowest call " + fmt(slowest) + " s";
              return slowest < 1.0;
            });

  // 2. The maximizer's entropy and moments match the reported value.
  criterion("02 maximum-entropy residuals below 1e-6", [](std::string& detail) {
    double worst = 0.0;
    for (const auto& inst : phi_instances()) {
      const PhiResult r = phi(inst.alphabet, inst.spec, {&inst.d, 1});
      const MaxEntCheck c = maxent_check(r, inst.alphabet, inst.spec,
                                         {&inst.d, 1});
      if (!c.applicable) {
        detail = "check not applicable at level " + fmt(inst.d);
        return false;
      }
      worst = std::max(worst, std::abs(c.entropy_gap_bits));
      for (double g : c.moment_gaps) worst = std::max(worst, std::abs(g));
    }
    detail = "worst residual " + fmt(worst);
    return worst <= 1e-6;
  });

  // 3. Ball-volume estimates against closed-form counts.
  criterion("03 saddle volumes vs exact counts, first-order bound above both",
            [](std::string& detail) {
              const Alphabet la = wide(60.0, 24001);
              const DistortionSpec sa = make_spec({abs_distortion()}, {1.0});
              SaddleResult sr = find_saddle(la, sa, sa.levels);
              const VolumeEstimate sv = log_volume_saddle(100, sr, la);
              const double exact_l1 = log2_l1_ball_bits(100, 1.0);
              const double err_l1 = std::abs(sv.log_volume_bits - exact_l1);
              if (err_l1 > 0.01) {
                detail = "l1 n=100 error " + fmt(err_l1);
                return false;
              }
              const PhiResult pr = phi(la, sa, sa.levels);
              const VolumeEstimate cv = chernoff_log_volume(100, pr);
              if (cv.log_volume_bits < sv.log_volume_bits ||
                  cv.log_volume_bits < exact_l1) {
                detail = "first-order bound below a second-order value";
                return false;
              }

              const Alphabet bin = Alphabet::binary();
              const DistortionSpec sh = make_spec({hamming_distortion()},
                                                  {0.25});
              SaddleResult hr = find_saddle(bin, sh, sh.levels);
              SaddleResult hr20 = hr;
              const VolumeEstimate hv20 = log_volume_saddle(20, hr20, bin);
              const VolumeEstimate he20 = exact_volume(20, bin, sh, 0.25);
              const double err20 =
                  std::abs(hv20.log_volume_bits - he20.log_volume_bits);
              SaddleResult hr200 = hr;
              const VolumeEstimate hv200 = log_volume_saddle(200, hr200, bin);
              const VolumeEstimate he200 = exact_volume(200, bin, sh, 0.25);
              const double err200 =
                  std::abs(hv200.log_volume_bits - he200.log_volume_bits);
              detail = "l1 err " + fmt(err_l1) + ", hamming err n=20 " +
                       fmt(err20) + ", n=200 " + fmt(err200);
              return err20 <= 0.2 && err200 <= 0.02;
            });

  // 4. Randomized certification campaigns, every trial slack >= 0.
  criterion("04 length-inequality campaigns certify every trial",
            [](std::string& detail) {
              const auto t0 = std::chrono::steady_clock::now();
              const int jobs = worker_count();
              const struct {
                int lemma;
                int trials;
              } plan[] = {{1, 200}, {2, 200}, {3, 50}, {4, 50}, {5, 100}};
              int total = 0;
              double min_slack = std::numeric_limits<double>::infinity();
              for (const auto& p : plan) {
                CampaignConfig cc;
                cc.lemma = p.lemma;
                cc.trials = p.trials;
                cc.seed = 2026;
                cc.max_n = 10;
                cc.max_ell = 8;
                cc.jobs = jobs;
                for (const KraftReport& r : run_campaign(cc)) {
                  ++total;
                  min_slack = std::min(min_slack, r.slack);
                  if (r.slack < 0.0) {
                    detail = "variant " + r.variant + " trial " +
                             std::to_string(r.trial) + " slack " +
                             fmt(r.slack);
                    return false;
                  }
                }
              }
              const double dt = seconds_since(t0);
              detail = std::to_string(total) + " trials, min slack " +
                       fmt(min_slack) + ", " + fmt(dt) + " s";
              return total == 600 && dt < 300.0;
            });

  // 5. The one-to-one refinement value and its gap law.
  criterion("05 one-to-one refinement at unit base rate", [](std::string& detail) {
    const OneToOneBound b = slb_one_to_one(1.0, 1000);
    if (b.value_bits < 0.9880 || b.value_bits > 0.9890) {
      detail = "value " + fmt(b.value_bits);
      return false;
    }
    const std::vector<int> ns = {100, 1000, 10000};
    const GapFit fit = fit_one_to_one_gap(1.0, ns);
    detail = "value " + fmt(b.value_bits) + ", gap constant " + fmt(fit.c) +
             ", rel residual " + fmt(fit.max_rel_residual);
    return fit.max_rel_residual <= 0.10;
  });

  // 6. Fixed-composition refinement term and the bound ordering grid.
  criterion("06 refinement term exact, ordering holds on the grid",
            [](std::string& detail) {
              for (int kp : {1, 2, 3}) {
                for (int n : {100, 1000}) {
                  const double want = kp * std::log2(double(n)) / (2.0 * n);
                  if (dsf_refinement_term(kp, n) != want) {
                    detail = "term mismatch at k'=" + std::to_string(kp) +
                             ", n=" + std::to_string(n);
                    return false;
                  }
                }
              }
              const double at100 = dsf_refinement_term(1, 100);
              if (std::abs(at100 - 0.0332192809489) > 1e-12) {
                detail = "n=100 value " + fmt(at100);
                return false;
              }

              int points = 0;
              const Alphabet ga = wide(16.0, 16001);
              const Alphabet bin = Alphabet::binary();
              for (int n : {50, 100, 500, 1000}) {
                for (double d : {0.0625, 0.25, 0.5}) {
                  BoundInputs in;
                  in.h_rate_bits = gaussian_entropy_rate(1.0);
                  in.n = n;
                  in.alphabet = ga;
                  in.spec = make_spec({square_distortion()}, {d});
                  if (!ordering_check(in).ordering_certificate) {
                    detail = "gaussian point n=" + std::to_string(n) +
                             " d=" + fmt(d);
                    return false;
                  }
                  ++points;
                }
                for (double d : {0.05, 0.15, 0.25}) {
                  BoundInputs in;
                  in.h_rate_bits = 1.0;
                  in.n = n;
                  in.alphabet = bin;
                  in.spec = make_spec({hamming_distortion()}, {d});
                  if (!ordering_check(in).ordering_certificate) {
                    detail = "binary point n=" + std::to_string(n) +
                             " d=" + fmt(d);
                    return false;
                  }
                  ++points;
                }
              }
              detail = std::to_string(points) + " grid points ordered";
              return points >= 20;
            });

  // 7. Sliding-window objective: gaussian pair example and the
  //    single-letter reduction.
  criterion("07 sliding objective matches the gaussian closed form",
            [](std::string& detail) {
              double worst = 0.0;
              for (double theta : {0.3, 0.5, 0.9})
                worst = std::max(worst, gaussian_example_check(1.0, theta));
              if (worst > 1e-2) {
                detail = "worst residual " + fmt(worst);
                return false;
              }
              const Alphabet bin = Alphabet::binary();
              const DistortionSpec spec = make_spec({hamming_distortion()},
                                                    {0.25});
              const SlidingBound sb = sliding_slb(bin, spec, 1.0,
                                                  worker_count());
              const PhiResult pr = phi(bin, spec, spec.levels);
              const double gap = std::abs(sb.value_bits - (1.0 - pr.phi));
              detail = "worst residual " + fmt(worst) +
                       ", single-letter gap " + fmt(gap);
              return gap <= 1e-12 && !sb.under_resolved;
            });

  // 8. Incremental parsing: pinned example and random round trips.
  criterion("08 parser pins the worked example and round-trips",
            [](std::string& detail) {
              const std::vector<int> u = {0, 1, 1, 0, 1, 0, 0, 1,
                                          1, 0, 0, 0, 1, 0, 0};
              const LZParse parse = lz78_parse(u, 2);
              const std::vector<std::vector<int>> want = {
                  {0}, {1}, {1, 0}, {1, 0, 0}, {1, 1}, {0, 0}, {0, 1}, {0, 0}};
              if (parse.c != 8 || parse.phrases != want) {
                detail = "phrase count " + std::to_string(parse.c);
                return false;
              }
              const LZLength len = lz78_length_bound(parse, 2);
              const double want_bits = 9.0 * std::log2(36.0);
              if (std::abs(len.bound_bits - 46.53) > 0.01 ||
                  std::abs(len.bound_bits - want_bits) > 1e-9) {
                detail = "length bound " + fmt(len.bound_bits);
                return false;
              }

              std::mt19937_64 rng(508);
              for (int t = 0; t < 1000; ++t) {
                const std::size_t r = 2 + t % 3;
                const std::size_t n = 1 + rng() % 400;
                std::vector<int> s(n);
                for (auto& v : s) v = static_cast<int>(rng() % r);
                const LZParse p = lz78_parse(s, r);
                std::vector<int> rebuilt;
                for (const auto& phrase : p.phrases)
                  rebuilt.insert(rebuilt.end(), phrase.begin(), phrase.end());
                if (rebuilt != s) {
                  detail = "round trip failed at t=" + std::to_string(t);
                  return false;
                }
              }
              detail = "example bound " + fmt(len.bound_bits) +
                       ", 1000 round trips";
              return true;
            });

  // 9. The per-sequence bound never exceeds an achieved description length.
  criterion("09 individual-sequence bound sound on 100 seeded pairs",
            [](std::string& detail) {
              IndivHarnessConfig hc;
              hc.jobs = worker_count();
              const std::vector<IndivTrial> trials = run_indiv_harness(hc);
              double min_margin = std::numeric_limits<double>::infinity();
              for (const IndivTrial& t : trials) {
                min_margin = std::min(min_margin, t.margin_bits);
                if (t.margin_bits < 0.0 || t.measured_bits < t.bound_bits) {
                  detail = "trial " + std::to_string(t.trial) + " margin " +
                           fmt(t.margin_bits);
                  return false;
                }
              }
              detail = std::to_string(trials.size()) +
                       " trials, min margin " + fmt(min_margin);
              return trials.size() == 100;
            });

  // 10. The command-line front end is byte-deterministic.
  criterion("10 front-end reruns byte-identical", [](std::string& detail) {
    const fs::path dir = fs::temp_directory_path() / "slbkit-acceptance";
    fs::create_directories(dir);
    const auto write = [&](const char* name, const std::string& text) {
      std::ofstream f(dir / name, std::ios::binary);
      f << text;
      return (dir / name).string();
    };
    const std::string phi_cfg = write("phi.json", R"({
      "alphabet": {"kind": "interval", "lower": -16, "upper": 16, "nodes": 4001},
      "functions": [{"kind": "square"}],
      "d_grid": [0.1, 0.5, 1.0, 2.0]})");
    const std::string kraft_cfg =
        write("kraft.json", R"({"lemma": 2, "trials": 20, "max_n": 8})");
    const std::string indiv_cfg = write(
        "indiv.json", R"({"harness": {"trials": 10, "n": 512, "ell": 32}})");

    const struct {
      const char* name;
      std::string args;
      std::string rerun_args;  // same inputs, different worker count
    } runs[] = {
        {"phi", "phi --config " + phi_cfg, "phi --config " + phi_cfg},
        {"kraft", "kraft --seed 3 --jobs 1 --config " + kraft_cfg,
         "kraft --seed 3 --jobs 4 --config " + kraft_cfg},
        {"indiv", "indiv --seed 5 --jobs 1 --config " + indiv_cfg,
         "indiv --seed 5 --jobs 4 --config " + indiv_cfg},
    };
    for (const auto& r : runs) {
      const fs::path out1 = dir / (std::string(r.name) + ".1");
      const fs::path out2 = dir / (std::string(r.name) + ".2");
      if (!run_cli(r.args + " --out " + out1.string(), dir / "log1") ||
          !run_cli(r.rerun_args + " --out " + out2.string(), dir / "log2")) {
        detail = std::string(r.name) + " exited nonzero";
        return false;
      }
      const std::string a = read_file(out1), b = read_file(out2);
      if (a.empty() || a != b) {
        detail = std::string(r.name) + " outputs differ";
        return false;
      }
    }
    detail = "3 subcommands, reruns identical across worker counts";
    return true;
  });

  return g_failures == 0 ? 0 : 1;
}
