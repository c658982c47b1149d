#include "nehari/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "nehari/errors.hpp"

namespace nehari {

namespace {

struct Pair {
  Vector s;
  Vector y;
  double rho;
};

Vector two_loop(const std::deque<Pair>& mem, const Vector& g, const Metric& metric) {
  Vector q = g;
  std::vector<double> alpha(mem.size());
  for (std::size_t i = mem.size(); i-- > 0;) {
    alpha[i] = mem[i].rho * mem[i].s.dot(q);
    q -= alpha[i] * mem[i].y;
  }
  Vector r = metric.solve(q);
  if (!mem.empty()) {
    const Pair& last = mem.back();
    const double yhy = last.y.dot(metric.solve(last.y));
    if (yhy > 0.0) {
      r *= last.s.dot(last.y) / yhy;
    }
  }
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const double beta = mem[i].rho * mem[i].y.dot(r);
    r += (alpha[i] - beta) * mem[i].s;
  }
  return -r;
}

bool default_stop(const LbfgsOptions& opt, double value, double gnorm) {
  return gnorm <= opt.tol_grad * std::max(1.0, std::abs(value));
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& f, Vector x0, const Metric& metric,
                           const LbfgsOptions& opt) {
  LbfgsResult res;
  Vector x = std::move(x0);
  if (opt.sphere) {
    const double nx = metric.norm(x);
    if (!(nx > 0.0)) {
      throw InputError("sphere mode needs a nonzero start");
    }
    x /= nx;
  }
  Vector g;
  auto fx0 = f(x, g);
  ++res.evaluations;
  if (!fx0) {
    throw Infeasible("initial point is infeasible");
  }
  double fx = *fx0;
  std::deque<Pair> mem;
  const double eps = std::numeric_limits<double>::epsilon();

  auto stop = [&](double gnorm) {
    return opt.stop_test ? opt.stop_test(x, fx, g) : default_stop(opt, fx, gnorm);
  };

  res.status = "max iterations";
  bool reset_once = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    const double gnorm = metric.dual_norm(g);
    if (stop(gnorm)) {
      res.converged = true;
      res.status = "converged";
      break;
    }
    Vector d = two_loop(mem, g, metric);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      mem.clear();
      d = -metric.solve(g);
      slope = g.dot(d);
      if (!(slope < 0.0)) {
        res.converged = true;
        res.status = "zero gradient";
        break;
      }
    }
    const double dn = metric.norm(d);
    const double cap = opt.max_step * std::max(1.0, metric.norm(x));
    double alpha = mem.empty() ? opt.step_init : 1.0;
    if (alpha * dn > cap) {
      alpha = cap / dn;
    }

    bool accepted = false;
    Vector xn;
    Vector gn;
    double fn = 0.0;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      xn = x + alpha * d;
      if (opt.sphere) {
        const double nn = metric.norm(xn);
        if (!(nn > 0.0)) {
          alpha *= 0.5;
          continue;
        }
        xn /= nn;
      }
      auto trial = f(xn, gn);
      ++res.evaluations;
      if (trial && std::isfinite(*trial)) {
        const double armijo = fx + opt.armijo_c * alpha * slope;
        // Near roundoff, value differences carry no information: use the
        // approximate Wolfe test on the directional derivative instead.
        const bool flat = *trial <= fx + 1e3 * eps * std::max(opt.value_scale, std::abs(fx));
        const double dslope = gn.dot(d);
        const bool approx_wolfe = flat && dslope <= -0.8 * slope && dslope >= 0.9 * slope;
        if (*trial <= armijo || (approx_wolfe && *trial <= fx)) {
          fn = *trial;
          accepted = true;
          break;
        }
        if (approx_wolfe) {
          // A curvature-acceptable step that raises the value: roundoff floor.
          res.status = "roundoff floor";
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted && res.status == "roundoff floor") {
      // Further decrease is below value resolution; the value error is O(|g|^2).
      res.converged = !opt.stop_test && gnorm <= 1e3 * opt.tol_grad * std::max(1.0, std::abs(fx));
      break;
    }
    if (!accepted) {
      if (!mem.empty() && !reset_once) {
        mem.clear();
        reset_once = true;
        continue;
      }
      res.status = "line search stalled";
      break;
    }
    reset_once = false;
    Vector s = xn - x;
    Vector y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm() && sy > 0.0) {
      mem.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(mem.size()) > opt.memory) {
        mem.pop_front();
      }
    }
    x = std::move(xn);
    g = std::move(gn);
    fx = fn;
    res.iterations = it + 1;
    res.history.push_back(fx);
  }
  if (res.status == "max iterations" && stop(metric.dual_norm(g))) {
    res.converged = true;
    res.status = "converged";
  }
  res.x = std::move(x);
  res.value = fx;
  res.grad_norm = metric.dual_norm(g);
  res.grad = std::move(g);
  return res;
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (count <= 0) {
    return;
  }
  const int nthreads = std::min(std::max(workers, 1), count);
  if (nthreads == 1) {
    for (int i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) {
            error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

MultistartResult multistart_minimize(const Objective& f, const std::vector<Vector>& seeds,
                                     const Metric& metric, const LbfgsOptions& opt, int workers) {
  const int n = static_cast<int>(seeds.size());
  std::vector<std::optional<LbfgsResult>> runs(seeds.size());
  parallel_for(n, workers, [&](int i) {
    try {
      runs[static_cast<std::size_t>(i)] = lbfgs_minimize(f, seeds[static_cast<std::size_t>(i)], metric, opt);
    } catch (const Infeasible&) {
    }
  });
  MultistartResult out;
  out.values.resize(seeds.size());
  for (int i = 0; i < n; ++i) {
    auto& r = runs[static_cast<std::size_t>(i)];
    if (!r) {
      continue;
    }
    ++out.feasible_seeds;
    out.values[static_cast<std::size_t>(i)] = r->value;
    if (!out.best || r->value < out.best->value) {
      out.best = *r;
      out.best_seed = i;
    }
    out.runs.push_back(std::move(*r));
  }
  return out;
}

std::vector<Vector> random_seeds(const Metric& metric, int count, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    Vector xi(metric.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
      xi[i] = normal(rng);
    }
    Vector x = metric.solve(xi);
    const double nx = metric.norm(x);
    out.push_back(nx > 0.0 ? Vector(x / nx) : xi);
  }
  return out;
}

ScalarField metric_power(const Metric& metric, double r) {
  ScalarField s;
  s.degree = r;
  s.eval = [&metric, r](const Vector& x, Vector* grad) {
    const Vector kx = metric.apply(x);
    const double q = x.dot(kx);
    if (grad) {
      *grad = q > 0.0 ? Vector(r * std::pow(q, 0.5 * r - 1.0) * kx) : Vector::Zero(x.size());
    }
    return std::pow(q, 0.5 * r);
  };
  return s;
}

namespace {

struct AlState {
  double alpha = 0.0;
  double rho = 0.0;
};

// Scale-free constraint value c(x) = g(x) / ||x||_K^deg / scale and its gradient.
double constraint_value(const Constraint& c, const Metric& metric, const Vector& x, Vector* grad) {
  Vector gg;
  const double gv = c.g.eval(x, grad ? &gg : nullptr);
  const Vector kx = metric.apply(x);
  const double n2 = x.dot(kx);
  const double nd = std::pow(n2, 0.5 * c.g.degree);
  const double val = gv / nd / c.scale;
  if (grad) {
    *grad = (gg - (c.g.degree * gv / n2) * kx) / (nd * c.scale);
  }
  return val;
}

double violation(const Constraint& c, double cv, const AlState& st) {
  if (c.kind == ConstraintKind::Equality) {
    return std::abs(cv);
  }
  if (c.kind == ConstraintKind::NonNegative) {
    return std::abs(std::min(cv, st.rho > 0.0 ? st.alpha / st.rho : 0.0));
  }
  return 0.0;
}

}  // namespace

QuotientResult minimize_quotient(const QuotientProblem& prob, const std::vector<Vector>& seeds,
                                 const Metric& metric, const QuotientOptions& opt) {
  auto quotient = [&prob](const Vector& x, Vector* grad) -> std::optional<double> {
    if (prob.feasible && !prob.feasible(x)) {
      return std::nullopt;
    }
    Vector gn;
    Vector gd;
    const double num = prob.numerator.eval(x, grad ? &gn : nullptr);
    const double den = prob.denominator.eval(x, grad ? &gd : nullptr);
    if (!(den > 0.0) || !std::isfinite(num)) {
      return std::nullopt;
    }
    const double dk = std::pow(den, prob.power);
    const double q = num / dk;
    if (grad) {
      *grad = (gn - (prob.power * num / den) * gd) / dk;
    }
    return q;
  };

  const bool constrained = prob.constraint.kind != ConstraintKind::None;
  LbfgsOptions lo = opt.lbfgs;
  lo.sphere = true;

  struct SeedOutcome {
    bool feasible = false;
    double value = 0.0;
    double viol = 0.0;
    double cv = 0.0;
    double alpha = 0.0;
    LbfgsResult run;
    int iterations = 0;
  };
  std::vector<SeedOutcome> outcomes(seeds.size());

  parallel_for(static_cast<int>(seeds.size()), opt.workers, [&](int i) {
    SeedOutcome& o = outcomes[static_cast<std::size_t>(i)];
    Vector x = seeds[static_cast<std::size_t>(i)];
    if (!(metric.norm(x) > 0.0) || !quotient(x, nullptr)) {
      return;
    }
    AlState st{0.0, opt.penalty_init};
    double prev_viol = std::numeric_limits<double>::infinity();
    const int outer = constrained ? opt.max_outer : 1;
    for (int k = 0; k < outer; ++k) {
      const AlState cur = st;
      Objective lag = [&](const Vector& y, Vector& grad) -> std::optional<double> {
        auto q = quotient(y, &grad);
        if (!q || !constrained) {
          return q;
        }
        Vector gc;
        const double cv = constraint_value(prob.constraint, metric, y, &gc);
        double dpsi = 0.0;
        double psi = 0.0;
        if (prob.constraint.kind == ConstraintKind::Equality) {
          psi = -cur.alpha * cv + 0.5 * cur.rho * cv * cv;
          dpsi = -cur.alpha + cur.rho * cv;
        } else if (cv <= cur.alpha / cur.rho) {
          psi = -cur.alpha * cv + 0.5 * cur.rho * cv * cv;
          dpsi = -cur.alpha + cur.rho * cv;
        } else {
          psi = -cur.alpha * cur.alpha / (2.0 * cur.rho);
        }
        grad += dpsi * gc;
        return *q + psi;
      };
      o.run = lbfgs_minimize(lag, x, metric, lo);
      o.iterations += o.run.iterations;
      x = o.run.x;
      if (!constrained) {
        break;
      }
      o.cv = constraint_value(prob.constraint, metric, x, nullptr);
      const double viol = violation(prob.constraint, o.cv, st);
      if (viol <= opt.tol_constraint && o.run.converged) {
        break;
      }
      if (prob.constraint.kind == ConstraintKind::Equality) {
        st.alpha -= st.rho * o.cv;
      } else {
        st.alpha = std::max(0.0, st.alpha - st.rho * o.cv);
      }
      if (viol > opt.tol_constraint && viol > 0.25 * prev_viol) {
        st.rho = std::min(st.rho * opt.penalty_growth, opt.penalty_max);
      }
      prev_viol = viol;
    }
    o.feasible = true;
    o.value = *quotient(x, nullptr);
    o.alpha = st.alpha;
    o.viol = constrained ? violation(prob.constraint, o.cv, st) : 0.0;
  });

  QuotientResult out;
  const double accept_viol = 1e3 * opt.tol_constraint;
  int best = -1;
  bool best_ok = false;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const SeedOutcome& o = outcomes[i];
    if (!o.feasible) {
      continue;
    }
    ++out.feasible_seeds;
    const bool ok = o.viol <= accept_viol;
    if (best < 0) {
      best = static_cast<int>(i);
      best_ok = ok;
      continue;
    }
    const SeedOutcome& b = outcomes[static_cast<std::size_t>(best)];
    const bool better = ok == best_ok ? (ok ? o.value < b.value : o.viol < b.viol) : ok;
    if (better) {
      best = static_cast<int>(i);
      best_ok = ok;
    }
  }
  if (best < 0) {
    out.status = "no feasible seed";
    return out;
  }
  const SeedOutcome& b = outcomes[static_cast<std::size_t>(best)];
  out.feasible = true;
  out.value = b.value;
  out.x = b.run.x;
  out.grad_norm = b.run.grad_norm;
  out.constraint_value = b.cv;
  out.multiplier = b.alpha;
  out.converged = b.run.converged && best_ok;
  out.best_seed = best;
  out.iterations = b.iterations;
  out.status = out.converged ? "converged" : (best_ok ? b.run.status : "constraint not met");
  return out;
}

}  // namespace nehari
