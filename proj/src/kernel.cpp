#include "schedkernel/kernel.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace schedkernel {

namespace {

__extension__ typedef __int128 int128;

// Nonincreasing by key, ascending index on ties.
struct KeyOrder {
  const std::vector<Int>* key;
  bool operator()(std::size_t lhs, std::size_t rhs) const {
    const int c = cmp((*key)[lhs], (*key)[rhs]);
    return c > 0 || (c == 0 && lhs < rhs);
  }
};

std::vector<Int> sort_keys(const KernelInstance& inst,
                           std::span<const Int> xlb) {
  std::vector<Int> y(inst.size());
  for (std::size_t j = 0; j < inst.size(); ++j) {
    y[j] = inst.period(j) * xlb[j] - inst.offset(j);
  }
  return y;
}

// Domain of f: k = 0 is excluded at utilization exactly one.
struct RelaxationDomain {
  std::size_t first_position = 0;
  bool dual_unbounded = false;

  explicit RelaxationDomain(const KernelInstance& inst) {
    if (inst.total_utilization() != 1) return;
    first_position = 1;
    // At full utilization f(k) -> +inf as k -> 0 when the free numerator
    // constant + sum_j U_j * offset_j is positive; the LP is then unbounded.
    Rational numerator(inst.constant());
    for (std::size_t j = 0; j < inst.size(); ++j) {
      numerator += inst.utilization(j) * inst.offset(j);
    }
    dual_unbounded = sgn(numerator) > 0;
  }
};

// Downward scan for the largest position i > first_position with
// f(i) >= f(i-1). f is never strictly decreasing then strictly increasing,
// so the first such i seen from the top is a global maximizer; if there is
// none, first_position is.
//
// f(i) = p / q with p, q kept over a common denominator d: p = num / d and
// q = den / d. Moving index k off its lower bound subtracts
// wcet_k * y_k / period_k from p and U_k from q. On return f(i) = num / den
// with den > 0. `fn` is f(n) = constant + sum_j wcet_j * xlb_j.
struct ScanState {
  Int num;
  Int den;
  Int scale;
  Int tmp;
};

std::size_t scan_for_max(const KernelInstance& inst, std::size_t first,
                         std::span<const Int> y,
                         std::span<const std::size_t> order, const Int& fn,
                         ScanState& s) {
  s.num = fn;
  s.den = 1;
  s.scale = 1;
  std::size_t i = order.size();
  while (i > first) {
    const std::size_t k = order[i - 1];
    s.tmp = s.den * y[k];
    if (s.num <= s.tmp) break;
    // num <- num * T - d * C * y;  den <- den * T - d * C;  d <- d * T.
    s.tmp = s.scale * inst.wcet(k);
    s.num *= inst.period(k);
    mpz_submul(s.num.get_mpz_t(), s.tmp.get_mpz_t(), y[k].get_mpz_t());
    s.den *= inst.period(k);
    s.den -= s.tmp;
    s.scale *= inst.period(k);
    --i;
  }
  return i;
}

template <typename Num>
Num ceil_div_native(Num num, Num den) {
  Num q = num / den;
  if (num % den != 0 && num > 0) ++q;
  return q;
}

// Linear scan in 128-bit arithmetic. Caller guarantees magnitudes are small
// enough that nothing overflows.
SolverOutcome scan_native(const KernelInstance& inst, std::int64_t lo,
                          std::int64_t hi) {
  const std::size_t n = inst.size();
  std::vector<int128> c(n), period(n), offset(n);
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = to_int64(inst.wcet(j));
    period[j] = to_int64(inst.period(j));
    offset[j] = to_int64(inst.offset(j));
  }
  const int128 constant = to_int64(inst.constant());
  for (std::int64_t t = lo; t <= hi; ++t) {
    int128 v = constant;
    for (std::size_t j = 0; j < n; ++j) {
      v += ceil_div_native<int128>(t + offset[j], period[j]) * c[j];
    }
    if (v <= t) return SolverOutcome::feasible(Int(static_cast<long>(t)));
  }
  return SolverOutcome::infeasible();
}

bool fits_native(const KernelInstance& inst) {
  const Int limit = Int(1) << 50;
  auto small = [&](const Int& v) { return abs(v) < limit; };
  if (!small(inst.constant()) || !small(inst.lower()) ||
      !small(inst.upper())) {
    return false;
  }
  for (std::size_t j = 0; j < inst.size(); ++j) {
    if (!small(inst.wcet(j)) || !small(inst.period(j)) ||
        !small(inst.offset(j))) {
      return false;
    }
  }
  return inst.size() < 1024;
}

void record(SolveTrace& trace, TraceMode mode, const Int& bound) {
  ++trace.iterations;
  if (mode == TraceMode::kBounds) trace.bounds.emplace_back(bound);
}

}  // namespace

KernelInstance::KernelInstance(std::vector<Int> wcet, std::vector<Int> period,
                               std::vector<Int> offset, Int constant, Int lower,
                               Int upper)
    : wcet_(std::move(wcet)),
      period_(std::move(period)),
      offset_(std::move(offset)),
      constant_(std::move(constant)),
      lower_(std::move(lower)),
      upper_(std::move(upper)) {
  if (wcet_.size() != period_.size() || wcet_.size() != offset_.size()) {
    throw std::invalid_argument("kernel instance: length mismatch");
  }
  util_.resize(wcet_.size());
  FractionSum total;
  for (std::size_t j = 0; j < wcet_.size(); ++j) {
    if (sgn(wcet_[j]) <= 0 || sgn(period_[j]) <= 0) {
      throw std::invalid_argument(
          "kernel instance: wcet and period must be positive");
    }
    util_[j] = Rational(wcet_[j], period_[j]);
    util_[j].canonicalize();
    total.add(wcet_[j], period_[j]);
  }
  total_util_ = total.value();
  if (total_util_ > 1) {
    throw std::invalid_argument(
        "kernel instance: total utilization exceeds one (" +
        total_util_.get_str() + ")");
  }
}

KernelInstance KernelInstance::with_range(Int lower, Int upper) const {
  KernelInstance copy = *this;
  copy.lower_ = std::move(lower);
  copy.upper_ = std::move(upper);
  return copy;
}

std::string KernelInstance::describe() const {
  std::ostringstream out;
  auto list = [&](const std::vector<Int>& v) {
    out << '[';
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (j) out << ',';
      out << v[j];
    }
    out << ']';
  };
  out << "{\"C\":";
  list(wcet_);
  out << ",\"T\":";
  list(period_);
  out << ",\"offset\":";
  list(offset_);
  out << ",\"constant\":" << constant_ << ",\"lower\":" << lower_
      << ",\"upper\":" << upper_ << '}';
  return out.str();
}

const Int& SolverOutcome::value() const {
  if (!value_) throw std::logic_error("infeasible outcome has no value");
  return *value_;
}

std::string SolverOutcome::to_string() const {
  return value_ ? "feasible(" + value_->get_str() + ")" : "infeasible";
}

const char* solver_name(Solver solver) {
  return solver == Solver::kFixedPoint ? "fp" : "cp";
}

LowerBounds initial_lower_bounds(const KernelInstance& inst) {
  LowerBounds xlb(inst.size());
  for (std::size_t j = 0; j < inst.size(); ++j) {
    xlb[j] = ceil_div(inst.lower() + inst.offset(j), inst.period(j));
  }
  return xlb;
}

Int phi(const KernelInstance& inst, const Int& t) {
  Int sum = inst.constant();
  Int q;
  for (std::size_t j = 0; j < inst.size(); ++j) {
    q = t + inst.offset(j);
    mpz_cdiv_q(q.get_mpz_t(), q.get_mpz_t(), inst.period(j).get_mpz_t());
    mpz_addmul(sum.get_mpz_t(), q.get_mpz_t(), inst.wcet(j).get_mpz_t());
  }
  return sum;
}

std::vector<std::size_t> relaxation_order(const KernelInstance& inst,
                                          std::span<const Int> xlb) {
  if (xlb.size() != inst.size()) {
    throw std::invalid_argument("lower bound vector has wrong length");
  }
  const std::vector<Int> y = sort_keys(inst, xlb);
  std::vector<std::size_t> order(inst.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), KeyOrder{&y});
  return order;
}

Rational eval_f(const KernelInstance& inst, std::span<const Int> xlb,
                std::span<const std::size_t> order, std::size_t k) {
  const std::size_t n = inst.size();
  if (k > n) throw std::out_of_range("eval_f: position exceeds task count");
  Rational numerator(inst.constant());
  Rational denominator(1);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t j = order[pos];
    if (pos < k) {
      numerator += inst.wcet(j) * xlb[j];
    } else {
      numerator += inst.utilization(j) * inst.offset(j);
      denominator -= inst.utilization(j);
    }
  }
  if (sgn(denominator) == 0) {
    throw std::domain_error("eval_f: f(0) is undefined at full utilization");
  }
  return numerator / denominator;
}

RelaxationResult solve_relaxation(const KernelInstance& inst,
                                  std::span<const Int> xlb) {
  RelaxationResult result;
  result.order = relaxation_order(inst, xlb);
  const RelaxationDomain domain(inst);
  if (domain.dual_unbounded) return result;

  const std::vector<Int> y = sort_keys(inst, xlb);
  Int fn = inst.constant();
  for (std::size_t j = 0; j < inst.size(); ++j) fn += inst.wcet(j) * xlb[j];
  ScanState state;
  result.feasible = true;
  result.argmax =
      scan_for_max(inst, domain.first_position, y, result.order, fn, state);
  result.optimum = Rational(state.num, state.den);
  result.optimum.canonicalize();
  return result;
}

SolveResult solve_fp_kern(const KernelInstance& inst, TraceMode mode) {
  SolveResult result;
  if (inst.lower() > inst.upper()) return result;

  // The evaluation that merely confirms a fixed point is not a relaxation
  // solve: it reproduces the previous bound.
  Int t = inst.lower();
  Int v = phi(inst, t);
  record(result.trace, mode, v);
  if (v <= t) {
    result.outcome = SolverOutcome::feasible(std::move(t));
    return result;
  }
  while (true) {
    t = v;
    if (t > inst.upper()) return result;
    v = phi(inst, t);
    if (v <= t) {
      result.outcome = SolverOutcome::feasible(std::move(t));
      return result;
    }
    record(result.trace, mode, v);
  }
}

SolveResult solve_cp_kern(const KernelInstance& inst, TraceMode mode) {
  SolveResult result;
  if (inst.lower() > inst.upper()) return result;

  const std::size_t n = inst.size();
  const RelaxationDomain domain(inst);
  if (domain.dual_unbounded) return result;

  LowerBounds xlb = initial_lower_bounds(inst);
  std::vector<Int> y = sort_keys(inst, xlb);
  Int fn = inst.constant();
  for (std::size_t j = 0; j < n; ++j) {
    mpz_addmul(fn.get_mpz_t(), inst.wcet(j).get_mpz_t(), xlb[j].get_mpz_t());
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const KeyOrder by_key{&y};
  std::sort(order.begin(), order.end(), by_key);

  ScanState state;
  Int bound;
  Int next;
  Int delta;
  Int whole;
  Int frac;
  while (true) {
    const std::size_t i =
        scan_for_max(inst, domain.first_position, y, order, fn, state);
    // t* = num / den, den > 0.
    const Int& num = state.num;
    const Int& den = state.den;
    ++result.trace.iterations;
    if (mode == TraceMode::kBounds) {
      result.trace.bounds.emplace_back(num, den);
      result.trace.bounds.back().canonicalize();
    }
    bound = den * inst.lower();
    if (num <= bound) {
      result.outcome = SolverOutcome::feasible(inst.lower());
      return result;
    }
    bound = den * inst.upper();
    if (num > bound) return result;
    if (i == n) {
      // f(n) = constant + sum wcet * xlb is integral.
      result.outcome = SolverOutcome::feasible(fn);
      return result;
    }

    // Cut: every variable past the argmax is tight against t* in the LP
    // optimum, so its lower bound rises to ceil((t* + offset) / period).
    // With m = floor(t*) + offset that is ceil(m / period) when t* is
    // integral and floor(m / period) + 1 otherwise.
    mpz_fdiv_qr(whole.get_mpz_t(), frac.get_mpz_t(), num.get_mpz_t(),
                den.get_mpz_t());
    const bool integral = sgn(frac) == 0;
    for (std::size_t pos = i; pos < n; ++pos) {
      const std::size_t k = order[pos];
      next = whole + inst.offset(k);
      if (integral) {
        mpz_cdiv_q(next.get_mpz_t(), next.get_mpz_t(),
                   inst.period(k).get_mpz_t());
      } else {
        mpz_fdiv_q(next.get_mpz_t(), next.get_mpz_t(),
                   inst.period(k).get_mpz_t());
        ++next;
      }
      delta = next - xlb[k];
      xlb[k] = next;
      mpz_addmul(y[k].get_mpz_t(), inst.period(k).get_mpz_t(),
                 delta.get_mpz_t());
      mpz_addmul(fn.get_mpz_t(), inst.wcet(k).get_mpz_t(), delta.get_mpz_t());
    }
    const auto mid = order.begin() + static_cast<std::ptrdiff_t>(i);
    std::sort(mid, order.end(), by_key);
    std::inplace_merge(order.begin(), mid, order.end(), by_key);
  }
}

SolveResult solve(const KernelInstance& inst, Solver solver, TraceMode mode) {
  return solver == Solver::kFixedPoint ? solve_fp_kern(inst, mode)
                                       : solve_cp_kern(inst, mode);
}

SolverOutcome solve_oracle(const KernelInstance& inst, std::int64_t budget) {
  if (inst.lower() > inst.upper()) return SolverOutcome::infeasible();
  if (inst.upper() - inst.lower() + 1 > budget) {
    throw OracleBudgetExceeded("oracle range " +
                               Int(inst.upper() - inst.lower() + 1).get_str() +
                               " exceeds budget " + std::to_string(budget));
  }
  if (fits_native(inst)) {
    return scan_native(inst, to_int64(inst.lower()), to_int64(inst.upper()));
  }
  for (Int t = inst.lower(); t <= inst.upper(); ++t) {
    if (phi(inst, t) <= t) return SolverOutcome::feasible(t);
  }
  return SolverOutcome::infeasible();
}

}  // namespace schedkernel
