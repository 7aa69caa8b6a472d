#include "inflam/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "inflam/errors.hpp"

namespace inflam {

namespace {

using Vec = std::vector<double>;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kDefaultSamples = 800;

// Auto-mode switching.
constexpr int kMaxSmallRejections = 20;
constexpr std::size_t kProbeInterval = 50;
constexpr double kStiffStability = 2.5;  // h * rho beyond which the explicit pair is stability bound
constexpr double kMinRemainingSteps = 200.0;
constexpr double kPiBeta = 0.04;
constexpr double kPiAlpha = 0.2 - 0.75 * kPiBeta;

// BDF.
constexpr int kMaxOrder = 5;
constexpr int kNewtonMaxIter = 4;
constexpr double kBdfMinFactor = 0.2;
constexpr double kBdfMaxFactor = 2.0;
constexpr int kKrylovRestart = 60;
constexpr int kKrylovMaxIter = 600;
constexpr double kKrylovTol = 1e-3;

double max_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Restarted GMRES with Givens rotations; x starts at zero. Returns the
// relative residual reached.
template <class Apply>
double gmres(Apply&& apply, const Vec& b, Vec& x, double rtol, int restart, int max_iter) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return 0.0;

  std::vector<Vec> v(restart + 1, Vec(n));
  std::vector<Vec> hess(restart + 1, Vec(restart, 0.0));
  Vec cs(restart), sn(restart), g(restart + 1);
  Vec r = b, w(n);
  double rel = 1.0;
  int total = 0;

  while (total < max_iter) {
    // r = b - A x
    if (total > 0) {
      apply(x, w);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    }
    const double beta = norm2(r);
    rel = beta / bnorm;
    if (rel <= rtol) return rel;
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int k = 0;
    for (; k < restart && total < max_iter; ++k, ++total) {
      apply(v[k], w);
      for (int j = 0; j <= k; ++j) {
        hess[j][k] = dot(w, v[j]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= hess[j][k] * v[j][i];
      }
      hess[k + 1][k] = norm2(w);
      if (hess[k + 1][k] > 0.0)
        for (std::size_t i = 0; i < n; ++i) v[k + 1][i] = w[i] / hess[k + 1][k];
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * hess[j][k] + sn[j] * hess[j + 1][k];
        hess[j + 1][k] = -sn[j] * hess[j][k] + cs[j] * hess[j + 1][k];
        hess[j][k] = t;
      }
      const double den = std::hypot(hess[k][k], hess[k + 1][k]);
      cs[k] = hess[k][k] / den;
      sn[k] = hess[k + 1][k] / den;
      hess[k][k] = den;
      hess[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      rel = std::abs(g[k + 1]) / bnorm;
      if (rel <= rtol || hess[k][k] == 0.0) {
        ++k;
        ++total;
        break;
      }
    }
    // Back substitution and update.
    Vec yk(k);
    for (int j = k - 1; j >= 0; --j) {
      double s = g[j];
      for (int l = j + 1; l < k; ++l) s -= hess[j][l] * yk[l];
      yk[j] = s / hess[j][j];
    }
    for (int j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) x[i] += yk[j] * v[j][i];
    if (rel <= rtol) return rel;
  }
  return rel;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Integrator {
 public:
  Integrator(const RhsFunction& rhs, const SystemState& s0, const SolverConfig& cfg)
      : rhs_(rhs), cfg_(cfg), grid_(rhs.grid()), n_(rhs.dimension()), ncomp_(rhs.components().size()) {
    traj_.components = rhs.components();
    traj_.grid = grid_;
    traj_.l1.assign(ncomp_, {});
    traj_.linf.assign(ncomp_, {});
    traj_.stats.clamped_mass.assign(ncomp_, 0.0);

    weights_.resize(grid_.size());
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) weights_[grid_.index(i, j)] = grid_.weight(i, j);

    if (cfg.output_times.empty()) {
      for (std::size_t k = 0; k <= kDefaultSamples; ++k)
        sample_times_.push_back(cfg.t_end * static_cast<double>(k) / kDefaultSamples);
    } else {
      sample_times_ = cfg.output_times;
    }
    std::sort(sample_times_.begin(), sample_times_.end());
    sample_times_.erase(std::unique(sample_times_.begin(), sample_times_.end()), sample_times_.end());
    if (sample_times_.empty() || sample_times_.back() < cfg.t_end) sample_times_.push_back(cfg.t_end);
    snapshot_times_ = cfg.snapshot_times;
    std::sort(snapshot_times_.begin(), snapshot_times_.end());

    t_ = s0.t;
    y_ = s0.pack();
    traj_.stats.min_accepted_value = *std::min_element(y_.begin(), y_.end());
  }

  Trajectory run() {
    f_.resize(n_);
    eval_checked(t_, y_, f_);
    emit_until(t_, y_, f_, t_, y_, f_);

    double h = std::min(cfg_.dt_init, cfg_.t_end - t_);
    bool implicit = cfg_.mode == SolverMode::ImplicitStiff;
    if (!implicit) implicit = !explicit_phase(h);
    if (implicit) implicit_phase(h);

    traj_.final_state = SystemState::unpack(t_, traj_.components, grid_, y_);
    return std::move(traj_);
  }

 private:
  bool eval(double t, const Vec& y, Vec& f) {
    ++traj_.stats.rhs_evaluations;
    rhs_(t, y, f);
    return all_finite(f);
  }

  void eval_checked(double t, const Vec& y, Vec& f) {
    if (eval(t, y, f)) return;
    const auto bad = static_cast<std::size_t>(
        std::find_if(f.begin(), f.end(), [](double x) { return !std::isfinite(x); }) - f.begin());
    const std::string comp = traj_.components[bad / grid_.size()];
    fail("non-finite right-hand side in component '" + comp + "' at t=" + std::to_string(t), comp);
  }

  [[noreturn]] void fail(const std::string& what, const std::string& comp = {}) {
    traj_.final_state = SystemState::unpack(t_, traj_.components, grid_, y_);
    throw IntegrationError(what, std::move(traj_), comp);
  }

  // Clamps undershoots within the absolute tolerance and books their mass.
  bool clamp(Vec& y, bool book) {
    if (!cfg_.clip_negative) return false;
    bool changed = false;
    const std::size_t m = grid_.size();
    for (std::size_t k = 0; k < n_; ++k) {
      if (y[k] < 0.0 && y[k] >= -cfg_.abs_tol) {
        if (book) traj_.stats.clamped_mass[k / m] += -y[k] * weights_[k % m];
        y[k] = 0.0;
        changed = true;
      }
    }
    return changed;
  }

  // Finalizes an accepted step: clamping, statistics, dense output.
  void accept(double t1, Vec& y1, Vec& f1, bool f1_valid) {
    ++traj_.stats.accepted;
    if (clamp(y1, true)) f1_valid = false;
    if (!f1_valid) eval_checked(t1, y1, f1);
    traj_.stats.min_accepted_value =
        std::min(traj_.stats.min_accepted_value, *std::min_element(y1.begin(), y1.end()));
    emit_until(t_, y_, f_, t1, y1, f1);
    t_ = t1;
    y_.swap(y1);
    f_.swap(f1);
  }

  // Emits every pending sample and snapshot in (t0, t1] (or at t0 initially)
  // by cubic Hermite interpolation.
  void emit_until(double t0, const Vec& y0, const Vec& f0, double t1, const Vec& y1, const Vec& f1) {
    const double h = t1 - t0;
    const double tol = cfg_.dt_min;
    auto interp = [&](double tau) {
      Vec y(n_);
      if (h <= 0.0 || tau >= t1) {
        y = y1;
      } else {
        const double s = (tau - t0) / h;
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        for (std::size_t k = 0; k < n_; ++k)
          y[k] = y0[k] + h01 * (y1[k] - y0[k]) + h * (h10 * f0[k] + h11 * f1[k]);
      }
      clamp(y, false);
      return y;
    };
    const bool last = t1 >= cfg_.t_end;
    while (next_sample_ < sample_times_.size() &&
           (sample_times_[next_sample_] <= t1 + tol * 0.5 || (last && next_sample_ + 1 == sample_times_.size()))) {
      const double tau = std::min(sample_times_[next_sample_], t1);
      record_sample(last && next_sample_ + 1 == sample_times_.size() ? cfg_.t_end : tau, interp(tau));
      ++next_sample_;
    }
    while (next_snapshot_ < snapshot_times_.size() && snapshot_times_[next_snapshot_] <= t1 + tol * 0.5) {
      const double tau = snapshot_times_[next_snapshot_];
      traj_.snapshots.push_back(SystemState::unpack(tau, traj_.components, grid_, interp(std::min(tau, t1))));
      ++next_snapshot_;
    }
  }

  void record_sample(double tau, const Vec& y) {
    const std::size_t m = grid_.size();
    traj_.times.push_back(tau);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < ncomp_; ++c) {
      std::span<const double> part(y.data() + c * m, m);
      traj_.l1[c].push_back(integrate_domain(grid_, part));
      double linf = 0.0;
      for (double v : part) {
        linf = std::max(linf, std::abs(v));
        lowest = std::min(lowest, v);
      }
      traj_.linf[c].push_back(linf);
    }
    traj_.sample_min.push_back(lowest);
  }

  double clip_step(double h) const {
    h = std::min(h, cfg_.dt_max);
    const double rest = cfg_.t_end - t_;
    // Avoid leaving a sliver step at the end.
    if (h >= rest || rest - h < cfg_.dt_min) return rest;
    return h;
  }

  // Returns true when t_end is reached, false when the problem should be
  // handed to the implicit method.
  bool explicit_phase(double& h) {
    std::array<Vec, 7> k;
    for (auto& v : k) v.resize(n_);
    Vec ytmp(n_), ynew(n_);
    int small_rejections = 0;
    bool last_rejected = false;
    std::size_t since_probe = 0;
    // PI control keeps the step from oscillating at the stability boundary.
    double err_old = 1e-4;

    while (t_ < cfg_.t_end) {
      h = clip_step(h);
      k[0] = f_;
      auto stage = [&](int s, double c, std::initializer_list<double> a) {
        for (std::size_t i = 0; i < n_; ++i) {
          double acc = 0.0;
          int j = 0;
          for (double aj : a) acc += aj * k[j++][i];
          ytmp[i] = y_[i] + h * acc;
        }
        return eval(t_ + c * h, ytmp, k[s]);
      };
      bool finite = stage(1, c2, {a21}) && stage(2, c3, {a31, a32}) && stage(3, c4, {a41, a42, a43}) &&
                    stage(4, c5, {a51, a52, a53, a54}) && stage(5, 1.0, {a61, a62, a63, a64, a65});
      double err = std::numeric_limits<double>::infinity();
      if (finite) {
        for (std::size_t i = 0; i < n_; ++i)
          ynew[i] = y_[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] + a76 * k[5][i]);
        finite = eval(t_ + h, ynew, k[6]);
        if (finite) {
          err = 0.0;
          for (std::size_t i = 0; i < n_; ++i) {
            const double e =
                h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] + e7 * k[6][i]);
            const double sc = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(e) / sc);
          }
        }
      }

      if (err <= 1.0) {
        const double e = std::max(err, 1e-10);
        double fac = 0.9 * std::pow(e, -kPiAlpha) * std::pow(err_old, kPiBeta);
        fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
        err_old = std::max(err, 1e-4);
        const double t1 = t_ + h;
        accept(t1 >= cfg_.t_end - cfg_.dt_min * 0.5 ? cfg_.t_end : t1, ynew, k[6], true);
        ynew.resize(n_);
        k[6].resize(n_);
        h *= fac;
        small_rejections = 0;
        last_rejected = false;

        if (cfg_.mode == SolverMode::Auto && ++since_probe >= kProbeInterval && t_ < cfg_.t_end) {
          since_probe = 0;
          const double rho = probe(t_, y_, f_);
          if (rho * h > kStiffStability && (cfg_.t_end - t_) > kMinRemainingSteps * h) {
            ++traj_.stats.switches;
            return false;
          }
        }
        continue;
      }

      ++traj_.stats.rejected;
      last_rejected = true;
      const bool at_floor = h <= cfg_.dt_min * (1.0 + 1e-12);
      if (h <= 2.0 * cfg_.dt_min) ++small_rejections;
      if (cfg_.mode == SolverMode::Auto && (small_rejections > kMaxSmallRejections || at_floor)) {
        ++traj_.stats.switches;
        h = std::max(h, cfg_.dt_min);
        return false;
      }
      if (at_floor) fail("step size fell below dt_min at t=" + std::to_string(t_));
      const double fac = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -kPiAlpha), 0.2, 1.0) : 0.2;
      h = std::max(h * fac, cfg_.dt_min);
    }
    return true;
  }

  double probe(double t, const Vec& y, const Vec& f0) {
    std::mt19937_64 rng(0x5eed);
    Vec v(n_), w(n_), yp(n_);
    for (auto& x : v) x = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    double nv = norm2(v);
    for (auto& x : v) x /= nv;
    const double sigma = std::sqrt(kEps) * (1.0 + norm2(y));
    double lambda = 0.0;
    for (int it = 0; it < 20; ++it) {
      for (std::size_t i = 0; i < n_; ++i) yp[i] = y[i] + sigma * v[i];
      if (!eval(t, yp, w)) return std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n_; ++i) w[i] = (w[i] - f0[i]) / sigma;
      lambda = norm2(w);
      if (lambda == 0.0) return 0.0;
      for (std::size_t i = 0; i < n_; ++i) v[i] = w[i] / lambda;
    }
    return lambda;
  }

 public:
  double probe_public(double t, const Vec& y) {
    Vec f0(n_);
    if (!eval(t, y, f0)) return std::numeric_limits<double>::infinity();
    return probe(t, y, f0);
  }

 private:
  // ---- variable-order BDF in backward-difference form -------------------

  static std::vector<std::vector<double>> compute_r(int order, double factor) {
    std::vector<std::vector<double>> m(order + 1, std::vector<double>(order + 1, 0.0));
    for (int j = 0; j <= order; ++j) m[0][j] = 1.0;
    for (int i = 1; i <= order; ++i)
      for (int j = 1; j <= order; ++j) m[i][j] = (i - 1 - factor * j) / i;
    for (int i = 1; i <= order; ++i)
      for (int j = 0; j <= order; ++j) m[i][j] *= m[i - 1][j];
    return m;
  }

  // Rescales the difference table to a new step h * factor.
  void change_d(std::vector<Vec>& d, int order, double factor) {
    const auto r = compute_r(order, factor);
    const auto u = compute_r(order, 1.0);
    std::vector<std::vector<double>> ru(order + 1, std::vector<double>(order + 1, 0.0));
    for (int i = 0; i <= order; ++i)
      for (int j = 0; j <= order; ++j)
        for (int l = 0; l <= order; ++l) ru[i][j] += r[i][l] * u[l][j];
    std::vector<Vec> out(order + 1, Vec(n_, 0.0));
    for (int i = 0; i <= order; ++i)
      for (int j = 0; j <= order; ++j) {
        const double c = ru[j][i];
        if (c == 0.0) continue;
        for (std::size_t k = 0; k < n_; ++k) out[i][k] += c * d[j][k];
      }
    for (int i = 0; i <= order; ++i) d[i].swap(out[i]);
  }

  struct NewtonResult {
    bool converged = false;
    int iterations = 0;
  };

  NewtonResult newton(double t_new, const Vec& y_pred, double c, const Vec& psi, const Vec& scale, Vec& y, Vec& d) {
    const double tol = std::max(10.0 * kEps / cfg_.rel_tol, std::min(0.03, std::sqrt(cfg_.rel_tol)));
    y = y_pred;
    d.assign(n_, 0.0);
    Vec f(n_), b(n_), z(n_), yp(n_), fp(n_);
    double dy_norm_old = -1.0;
    NewtonResult res;

    for (int it = 0; it < kNewtonMaxIter; ++it) {
      res.iterations = it + 1;
      if (!eval(t_new, y, f)) break;
      // Scaled system (I - c W J W^-1) z = W (c f - psi - d), W = 1/scale.
      for (std::size_t i = 0; i < n_; ++i) b[i] = (c * f[i] - psi[i] - d[i]) / scale[i];
      const double ynorm = 1.0 + max_norm(y);
      bool finite = true;
      auto apply = [&](const Vec& v, Vec& out) {
        double vmax = 0.0;
        for (std::size_t i = 0; i < n_; ++i) vmax = std::max(vmax, std::abs(v[i] * scale[i]));
        if (vmax == 0.0) {
          out = v;
          return;
        }
        const double sigma = std::sqrt(kEps) * ynorm / vmax;
        for (std::size_t i = 0; i < n_; ++i) yp[i] = y[i] + sigma * v[i] * scale[i];
        if (!eval(t_new, yp, fp)) finite = false;
        for (std::size_t i = 0; i < n_; ++i) out[i] = v[i] - c * (fp[i] - f[i]) / (sigma * scale[i]);
      };
      gmres(apply, b, z, kKrylovTol, kKrylovRestart, kKrylovMaxIter);
      if (!finite || !all_finite(z)) break;

      const double dy_norm = max_norm(z);
      const double rate = dy_norm_old < 0.0 ? -1.0 : dy_norm / dy_norm_old;
      if (rate >= 0.0 && (rate >= 1.0 || std::pow(rate, kNewtonMaxIter - it) / (1.0 - rate) * dy_norm > tol)) break;
      for (std::size_t i = 0; i < n_; ++i) {
        const double dy = z[i] * scale[i];
        y[i] += dy;
        d[i] += dy;
      }
      if (dy_norm == 0.0 || (rate >= 0.0 && rate / (1.0 - rate) * dy_norm < tol)) {
        res.converged = true;
        break;
      }
      // A single tiny correction is as good as converged.
      if (rate < 0.0 && dy_norm < tol * 1e-2) {
        res.converged = true;
        break;
      }
      dy_norm_old = dy_norm;
    }
    return res;
  }

  void implicit_phase(double h) {
    std::array<double, kMaxOrder + 2> gamma{};
    std::array<double, kMaxOrder + 2> error_const{};
    for (int k = 1; k <= kMaxOrder + 1; ++k) gamma[k] = gamma[k - 1] + 1.0 / k;
    for (int k = 0; k <= kMaxOrder + 1; ++k) error_const[k] = 1.0 / (k + 1);

    h = clip_step(std::max(h, cfg_.dt_min));
    std::vector<Vec> d(kMaxOrder + 3, Vec(n_, 0.0));
    d[0] = y_;
    for (std::size_t i = 0; i < n_; ++i) d[1][i] = h * f_[i];
    int order = 1;
    int n_equal = 0;
    Vec y_pred(n_), psi(n_), scale(n_), y_new(n_), corr(n_), f_new(n_), err(n_);

    while (t_ < cfg_.t_end) {
      const double h_clipped = clip_step(h);
      if (h_clipped != h) {
        change_d(d, order, h_clipped / h);
        h = h_clipped;
        n_equal = 0;
      }

      const double t_new = t_ + h;
      std::fill(y_pred.begin(), y_pred.end(), 0.0);
      std::fill(psi.begin(), psi.end(), 0.0);
      for (int j = 0; j <= order; ++j)
        for (std::size_t i = 0; i < n_; ++i) y_pred[i] += d[j][i];
      for (int j = 1; j <= order; ++j)
        for (std::size_t i = 0; i < n_; ++i) psi[i] += gamma[j] * d[j][i];
      for (std::size_t i = 0; i < n_; ++i) {
        psi[i] /= gamma[order];
        scale[i] = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_pred[i]);
      }
      const double c = h / gamma[order];

      const NewtonResult nr = newton(t_new, y_pred, c, psi, scale, y_new, corr);
      auto shrink = [&](double factor) {
        ++traj_.stats.rejected;
        if (h * factor < cfg_.dt_min) fail("step size fell below dt_min at t=" + std::to_string(t_));
        change_d(d, order, factor);
        h *= factor;
        n_equal = 0;
      };
      if (!nr.converged) {
        ++traj_.stats.newton_failures;
        shrink(0.5);
        continue;
      }

      const double safety = 0.9 * (2 * kNewtonMaxIter + 1) / (2 * kNewtonMaxIter + nr.iterations);
      double err_norm = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        scale[i] = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_new[i]);
        err_norm = std::max(err_norm, std::abs(error_const[order] * corr[i]) / scale[i]);
      }
      if (err_norm > 1.0) {
        shrink(std::max(kBdfMinFactor, safety * std::pow(err_norm, -1.0 / (order + 1))));
        continue;
      }

      // Accepted: update the difference table.
      ++n_equal;
      for (std::size_t i = 0; i < n_; ++i) {
        d[order + 2][i] = corr[i] - d[order + 1][i];
        d[order + 1][i] = corr[i];
      }
      for (int j = order; j >= 0; --j)
        for (std::size_t i = 0; i < n_; ++i) d[j][i] += d[j + 1][i];

      Vec y_acc = d[0];
      const Vec before = y_acc;
      const double t_acc = t_new >= cfg_.t_end - cfg_.dt_min * 0.5 ? cfg_.t_end : t_new;
      accept(t_acc, y_acc, f_new, false);
      // Keep the history consistent with any clamping of the new value.
      for (std::size_t i = 0; i < n_; ++i) {
        const double delta = y_[i] - before[i];
        if (delta != 0.0)
          for (int j = 0; j <= order; ++j) d[j][i] += delta;
      }
      y_new.resize(n_);
      f_new.resize(n_);

      if (n_equal < order + 1) continue;

      auto scaled_norm = [&](const Vec& v, double k) {
        double m = 0.0;
        for (std::size_t i = 0; i < n_; ++i) m = std::max(m, std::abs(k * v[i]) / scale[i]);
        return m;
      };
      const double inf = std::numeric_limits<double>::infinity();
      const double err_m = order > 1 ? scaled_norm(d[order], error_const[order - 1]) : inf;
      const double err_p = order < kMaxOrder ? scaled_norm(d[order + 2], error_const[order + 1]) : inf;
      const std::array<double, 3> norms{err_m, err_norm, err_p};
      std::array<double, 3> factors{};
      for (int k = 0; k < 3; ++k)
        factors[k] = norms[k] == 0.0 ? inf : (std::isinf(norms[k]) ? 0.0 : std::pow(norms[k], -1.0 / (order + k)));
      const int best = static_cast<int>(std::max_element(factors.begin(), factors.end()) - factors.begin());
      order += best - 1;
      const double factor = std::min(kBdfMaxFactor, safety * factors[best]);
      change_d(d, order, factor);
      h *= factor;
      n_equal = 0;
    }
  }

  const RhsFunction& rhs_;
  const SolverConfig& cfg_;
  Grid grid_;
  std::size_t n_;
  std::size_t ncomp_;
  Vec weights_;
  std::vector<double> sample_times_;
  std::vector<double> snapshot_times_;
  std::size_t next_sample_ = 0;
  std::size_t next_snapshot_ = 0;
  double t_ = 0.0;
  Vec y_, f_;
  Trajectory traj_;
};

}  // namespace

std::string_view to_string(SolverMode m) {
  switch (m) {
    case SolverMode::AdaptiveExplicit: return "adaptive_explicit";
    case SolverMode::ImplicitStiff: return "implicit_stiff";
    case SolverMode::Auto: return "auto";
  }
  return "?";
}

std::optional<SolverMode> parse_solver_mode(std::string_view s) {
  for (auto m : {SolverMode::AdaptiveExplicit, SolverMode::ImplicitStiff, SolverMode::Auto})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

void SolverConfig::validate() const {
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
    throw ConfigError("step bounds must satisfy 0 < dt_min <= dt_init <= dt_max");
  for (const auto* times : {&output_times, &snapshot_times})
    for (double t : *times)
      if (!(t >= 0.0 && t <= t_end)) throw ConfigError("requested time " + std::to_string(t) + " outside [0, t_end]");
}

std::size_t Trajectory::component_index(std::string_view name) const {
  for (std::size_t c = 0; c < components.size(); ++c)
    if (components[c] == name) return c;
  throw ConfigError("trajectory has no component '" + std::string(name) + "'");
}

Trajectory integrate(const RhsFunction& rhs, const SystemState& s0, const SolverConfig& cfg) {
  cfg.validate();
  if (s0.names != rhs.components()) throw ConfigError("initial state does not match the right-hand side components");
  for (const auto& f : s0.fields) {
    if (!f.all_finite()) throw ConfigError("initial state is not finite");
    if (f.min() < 0.0) throw ConfigError("initial state is negative");
  }
  if (!(s0.t < cfg.t_end)) throw ConfigError("initial time must precede t_end");
  Integrator it(rhs, s0, cfg);
  return it.run();
}

double stiffness_probe(const RhsFunction& rhs, const SystemState& s) {
  SolverConfig cfg;
  cfg.t_end = s.t + 1.0;
  Integrator it(rhs, s, cfg);
  return it.probe_public(s.t, s.pack());
}

}  // namespace inflam
