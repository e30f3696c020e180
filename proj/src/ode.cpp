#include "superrad/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "superrad/error.hpp"

namespace superrad::ode {

namespace {

using cplx = std::complex<double>;

struct Tableau {
  int stages = 0;       // stages before the end-point evaluation
  int error_order = 0;  // order of the embedded estimate
  std::vector<double> c;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> e;   // error weights over stages + end-point derivative
  std::vector<double> e3;  // secondary estimate (DOP853 only)
  std::vector<double> d;   // continuous extension (DP45 only)
};

Tableau dormand_prince45() {
  Tableau t;
  t.stages = 6;
  t.error_order = 4;
  t.c = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0};
  t.a = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
  };
  t.b = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84};
  t.e = {-71.0 / 57600, 0.0, 71.0 / 16695, -71.0 / 1920, 17253.0 / 339200, -22.0 / 525, 1.0 / 40};
  t.d = {-12715105075.0 / 11282082432.0, 0.0, 87487479700.0 / 32700410799.0,
         -10690763975.0 / 1880347072.0, 701980252875.0 / 199316789632.0,
         -1453857185.0 / 822651844.0, 69997945.0 / 29380423.0};
  return t;
}

// Coefficients of Hairer's DOP853.
Tableau dormand_prince853() {
  Tableau t;
  t.stages = 12;
  t.error_order = 7;
  t.c = {0.0,
         0.526001519587677318785587544488e-01,
         0.789002279381515978178381316732e-01,
         0.118350341907227396726757197510,
         0.281649658092772603273242802490,
         0.333333333333333333333333333333,
         0.25,
         0.307692307692307692307692307692,
         0.651282051282051282051282051282,
         0.6,
         0.857142857142857142857142857142,
         1.0};
  t.a.resize(12);
  t.a[1] = {5.26001519587677318785587544488e-2};
  t.a[2] = {1.97250569845378994544595329183e-2, 5.91751709536136983633785987549e-2};
  t.a[3] = {2.95875854768068491816892993775e-2, 0.0, 8.87627564304205475450678981324e-2};
  t.a[4] = {2.41365134159266685502369798665e-1, 0.0, -8.84549479328286085344864962717e-1,
            9.24834003261792003115737966543e-1};
  t.a[5] = {3.7037037037037037037037037037e-2, 0.0, 0.0, 1.70828608729473871279604482173e-1,
            1.25467687566822425016691814123e-1};
  t.a[6] = {3.7109375e-2, 0.0, 0.0, 1.70252211019544039314978060272e-1,
            6.02165389804559606850219397283e-2, -1.7578125e-2};
  t.a[7] = {3.70920001185047927108779319836e-2, 0.0, 0.0, 1.70383925712239993810214054705e-1,
            1.07262030446373284651809199168e-1, -1.53194377486244017527936158236e-2,
            8.27378916381402288758473766002e-3};
  t.a[8] = {6.24110958716075717114429577812e-1, 0.0, 0.0, -3.36089262944694129406857109825,
            -8.68219346841726006818189891453e-1, 2.75920996994467083049415600797e1,
            2.01540675504778934086186788979e1, -4.34898841810699588477366255144e1};
  t.a[9] = {4.77662536438264365890433908527e-1, 0.0, 0.0, -2.48811461997166764192642586468,
            -5.90290826836842996371446475743e-1, 2.12300514481811942347288949897e1,
            1.52792336328824235832596922938e1, -3.32882109689848629194453265587e1,
            -2.03312017085086261358222928593e-2};
  t.a[10] = {-9.3714243008598732571704021658e-1, 0.0, 0.0, 5.18637242884406370830023853209,
             1.09143734899672957818500254654, -8.14978701074692612513997267357,
             -1.85200656599969598641566180701e1, 2.27394870993505042818970056734e1,
             2.49360555267965238987089396762, -3.0467644718982195003823669022};
  t.a[11] = {2.27331014751653820792359768449, 0.0, 0.0, -1.05344954667372501984066689879e1,
             -2.00087205822486249909675718444, -1.79589318631187989172765950534e1,
             2.79488845294199600508499808837e1, -2.85899827713502369474065508674,
             -8.87285693353062954433549289258, 1.23605671757943030647266201528e1,
             6.43392746015763530355970484046e-1};
  t.b = {5.42937341165687622380535766363e-2, 0.0, 0.0, 0.0, 0.0,
         4.45031289275240888144113950566, 1.89151789931450038304281599044,
         -5.8012039600105847814672114227, 3.1116436695781989440891606237e-1,
         -1.52160949662516078556178806805e-1, 2.01365400804030348374776537501e-1,
         4.47106157277725905176885569043e-2};
  t.e = {0.1312004499419488073250102996e-1, 0.0, 0.0, 0.0, 0.0,
         -0.1225156446376204440720569753e+1, -0.4957589496572501915214079952,
         0.1664377182454986536961530415e+1, -0.3503288487499736816886487290,
         0.3341791187130174790297318841, 0.8192320648511571246570742613e-1,
         -0.2235530786388629525884427845e-1, 0.0};
  t.e3 = t.b;
  t.e3.push_back(0.0);
  t.e3[0] -= 0.244094488188976377952755905512;
  t.e3[8] -= 0.733846688281611857341361741547;
  t.e3[11] -= 0.220588235294117647058823529412e-1;
  return t;
}

const Tableau& tableau(Method m) {
  static const Tableau dp45 = dormand_prince45();
  static const Tableau dp853 = dormand_prince853();
  return m == Method::DormandPrince45 ? dp45 : dp853;
}

// Weights w with y(t + theta h) = y + h sum_j w[j] k[j] for the DP45
// continuous extension; k[6] is the derivative at the step end.
std::array<double, 7> dense_weights(const Tableau& tab, double theta) {
  const double u = 1.0 - theta;
  std::array<double, 7> w{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double b = j < tab.b.size() ? tab.b[j] : 0.0;
    const double first = j == 0 ? 1.0 : 0.0;
    const double last = j == 6 ? 1.0 : 0.0;
    w[j] = theta * b + theta * u * (first - b) + theta * theta * u * (2.0 * b - first - last) +
           theta * theta * u * u * tab.d[j];
  }
  return w;
}

template <std::size_t Terms>
void combine_fixed(double* out, const double* base, const double* const* src, const double* coef,
                   std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    double acc = base[i];
    for (std::size_t j = 0; j < Terms; ++j) acc += coef[j] * src[j][i];
    out[i] = acc;
  }
}

// out = base + h * sum_j w[j] * k[j], fused into one pass over memory on the
// interleaved real and imaginary parts.
void combine(State& out, const State& base, double h, std::span<const double> w,
             const std::vector<State>& k) {
  std::array<const double*, 16> src{};
  std::array<double, 16> coef{};
  std::size_t terms = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) {
      src[terms] = reinterpret_cast<const double*>(k[j].data());
      coef[terms] = h * w[j];
      ++terms;
    }
  }
  out.resize(base.size());
  double* o = reinterpret_cast<double*>(out.data());
  const double* y = reinterpret_cast<const double*>(base.data());
  const auto count = static_cast<std::size_t>(2 * base.size());
  switch (terms) {
    case 1: return combine_fixed<1>(o, y, src.data(), coef.data(), count);
    case 2: return combine_fixed<2>(o, y, src.data(), coef.data(), count);
    case 3: return combine_fixed<3>(o, y, src.data(), coef.data(), count);
    case 4: return combine_fixed<4>(o, y, src.data(), coef.data(), count);
    case 5: return combine_fixed<5>(o, y, src.data(), coef.data(), count);
    case 6: return combine_fixed<6>(o, y, src.data(), coef.data(), count);
    case 7: return combine_fixed<7>(o, y, src.data(), coef.data(), count);
    case 8: return combine_fixed<8>(o, y, src.data(), coef.data(), count);
    case 9: return combine_fixed<9>(o, y, src.data(), coef.data(), count);
    case 10: return combine_fixed<10>(o, y, src.data(), coef.data(), count);
    case 11: return combine_fixed<11>(o, y, src.data(), coef.data(), count);
    case 12: return combine_fixed<12>(o, y, src.data(), coef.data(), count);
    default: break;
  }
  for (std::size_t i = 0; i < count; ++i) {
    double acc = y[i];
    for (std::size_t j = 0; j < terms; ++j) acc += coef[j] * src[j][i];
    o[i] = acc;
  }
}

struct ErrorSums {
  double e5 = 0.0;
  double e3 = 0.0;
  bool finite = true;
};

// Terms = 0 reads the term count from runtime_terms.
template <std::size_t Terms, bool Two>
ErrorSums error_sums_fixed(const double* const* src, const double* c5, const double* c3,
                           std::size_t runtime_terms, const double* yo, const double* yn,
                           std::size_t count, double rtol, double atol) {
  const std::size_t terms = Terms > 0 ? Terms : runtime_terms;
  double acc5 = 0.0, acc3 = 0.0, check = 0.0;
  for (std::size_t i = 0; i < count; i += 2) {
    const double m = std::sqrt(std::max(yo[i] * yo[i] + yo[i + 1] * yo[i + 1],
                                        yn[i] * yn[i] + yn[i + 1] * yn[i + 1]));
    const double inv = 1.0 / (atol + rtol * m);
    double r5 = 0.0, i5 = 0.0, r3 = 0.0, i3 = 0.0;
    for (std::size_t j = 0; j < terms; ++j) {
      r5 += c5[j] * src[j][i];
      i5 += c5[j] * src[j][i + 1];
      if constexpr (Two) {
        r3 += c3[j] * src[j][i];
        i3 += c3[j] * src[j][i + 1];
      }
    }
    const double w = inv * inv;
    acc5 += (r5 * r5 + i5 * i5) * w;
    if constexpr (Two) acc3 += (r3 * r3 + i3 * i3) * w;
    check += yn[i] + yn[i + 1];
  }
  return {acc5, acc3, std::isfinite(check)};
}

// Weighted sums of squares of the embedded error estimates, with the scale
// atol + rtol * max(|y|, |y_new|) formed on the fly; one pass over memory.
ErrorSums error_sums(const Tableau& tab, const std::vector<State>& k, const State& y,
                     const State& y_new, double rtol, double atol) {
  std::array<const double*, 16> src{};
  std::array<double, 16> c5{}, c3{};
  std::size_t terms = 0;
  const bool two = !tab.e3.empty();
  for (std::size_t j = 0; j < tab.e.size(); ++j) {
    if (tab.e[j] != 0.0 || (two && tab.e3[j] != 0.0)) {
      src[terms] = reinterpret_cast<const double*>(k[j].data());
      c5[terms] = tab.e[j];
      c3[terms] = two ? tab.e3[j] : 0.0;
      ++terms;
    }
  }
  const double* yo = reinterpret_cast<const double*>(y.data());
  const double* yn = reinterpret_cast<const double*>(y_new.data());
  const auto count = static_cast<std::size_t>(2 * y.size());
  const auto run = [&]<std::size_t Terms, bool Two>() {
    return error_sums_fixed<Terms, Two>(src.data(), c5.data(), c3.data(), terms, yo, yn, count, rtol,
                                        atol);
  };
  if (!two && terms == 6) return run.template operator()<6, false>();
  if (two && terms == 8) return run.template operator()<8, true>();
  return two ? run.template operator()<0, true>() : run.template operator()<0, false>();
}

bool all_finite(const State& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i].real()) || !std::isfinite(y[i].imag())) return false;
  }
  return true;
}

}  // namespace

double error_norm(const State& v, const State& y, const State& z, double rtol, double atol) {
  if (v.size() == 0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(z[i]));
    const double r = std::abs(v[i]) / scale;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(v.size()));
}

Stats integrate(const RhsFn& rhs, State y0, std::span<const double> t_out, const Options& opts,
                const OutputFn& on_output, const StepFn& on_step) {
  Stats stats;
  if (t_out.empty()) return stats;
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "rtol and atol must be > 0");
  }
  for (std::size_t i = 1; i < t_out.size(); ++i) {
    if (!(t_out[i] > t_out[i - 1])) {
      throw Error(ErrorCode::InvalidParameter, "output grid must be strictly increasing");
    }
  }

  const Tableau& tab = tableau(opts.method);
  const int s = tab.stages;
  const Eigen::Index n = y0.size();
  const double rtol = opts.rtol;
  const double atol = opts.atol;

  double t = t_out.front();
  State y = std::move(y0);
  std::vector<State> k(static_cast<std::size_t>(tab.stages) + 1, State(n));
  State& f = k[0];
  rhs(t, y, f);
  ++stats.rhs_evals;
  if (!all_finite(y) || !all_finite(f)) {
    throw Error(ErrorCode::NonfiniteState, "initial state or derivative not finite");
  }
  if (on_output) on_output(0, t, y);
  if (on_step) on_step(t, y, f);
  if (t_out.size() == 1) return stats;

  State y_stage(n);
  State y_new(n);
  State y_dense;
  const bool interpolate = opts.dense_output && !tab.d.empty();
  const double error_exponent = -1.0 / (tab.error_order + 1.0);
  constexpr double safety = 0.9;
  constexpr double min_factor = 0.2;
  constexpr double max_factor = 10.0;

  auto norm_of = [&](const State& v) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = std::abs(v[i]) / (atol + rtol * std::abs(y[i]));
      acc += r * r;
    }
    return n > 0 ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
  };

  double h = opts.initial_step;
  if (!(h > 0.0)) {
    // Hairer's starting-step heuristic
    const double d0 = norm_of(y);
    const double d1 = norm_of(f);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_out.back() - t);
    State y1 = y + h0 * f;
    State f1(n);
    rhs(t + h0, y1, f1);
    ++stats.rhs_evals;
    const double d2 = norm_of(State(f1 - f)) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                    : std::pow(0.01 / dmax, 1.0 / (tab.error_order + 2.0));
    h = std::min(100.0 * h0, h1);
  }
  h = std::min(h, opts.max_step);

  std::size_t next_out = 1;
  bool last_rejected = false;
  while (next_out < t_out.size()) {
    if (stats.accepted + stats.rejected >= opts.max_steps) {
      throw Error(ErrorCode::ToleranceNotMet,
                  "step budget exhausted at t = " + std::to_string(t));
    }
    const double min_step = 10.0 * std::abs(std::nextafter(t, INFINITY) - t);
    if (h < min_step) {
      throw Error(ErrorCode::ToleranceNotMet, "step size underflow at t = " + std::to_string(t));
    }

    const double target = interpolate ? t_out.back() : t_out[next_out];
    double h_try = std::min(h, opts.max_step);
    bool lands = false;
    if (t + h_try * (1.0 + 1e-12) >= target) {
      h_try = target - t;
      lands = true;
    }

    for (int i = 1; i < s; ++i) {
      combine(y_stage, y, h_try, tab.a[static_cast<std::size_t>(i)], k);
      rhs(t + tab.c[static_cast<std::size_t>(i)] * h_try, y_stage, k[static_cast<std::size_t>(i)]);
    }
    combine(y_new, y, h_try, tab.b, k);
    const double t_new = lands ? target : t + h_try;
    rhs(t_new, y_new, k[static_cast<std::size_t>(s)]);
    stats.rhs_evals += static_cast<std::size_t>(s);

    const ErrorSums sums = error_sums(tab, k, y, y_new, rtol, atol);
    double err;
    if (!sums.finite) {
      err = std::numeric_limits<double>::infinity();
    } else if (tab.e3.empty()) {
      err = std::abs(h_try) * std::sqrt(sums.e5 / static_cast<double>(n));
    } else if (sums.e5 == 0.0 && sums.e3 == 0.0) {
      err = 0.0;
    } else {
      err = std::abs(h_try) * sums.e5 / std::sqrt((sums.e5 + 0.01 * sums.e3) * static_cast<double>(n));
    }
    if (n == 0) err = 0.0;

    if (std::isfinite(err) && err <= 1.0) {
      double factor = err == 0.0 ? max_factor
                                 : std::min(max_factor, safety * std::pow(err, error_exponent));
      if (last_rejected) factor = std::min(1.0, factor);
      if (interpolate) {
        for (; next_out + 1 < t_out.size() && t_out[next_out] < t_new; ++next_out) {
          const auto w = dense_weights(tab, (t_out[next_out] - t) / h_try);
          combine(y_dense, y, h_try, w, k);
          on_output(next_out, t_out[next_out], y_dense);
        }
      }
      t = t_new;
      std::swap(y, y_new);
      std::swap(k[0], k[static_cast<std::size_t>(s)]);
      ++stats.accepted;
      last_rejected = false;
      if (on_step) on_step(t, y, f);
      if (lands) {
        on_output(next_out, t, y);
        ++next_out;
        h = std::max(h_try * factor, h);
      } else {
        h = h_try * factor;
      }
    } else {
      if (!sums.finite && !all_finite(y_new)) {
        throw Error(ErrorCode::NonfiniteState, "state not finite at t = " + std::to_string(t));
      }
      const double factor =
          std::isfinite(err) ? std::max(min_factor, safety * std::pow(err, error_exponent))
                             : min_factor;
      h = h_try * factor;
      ++stats.rejected;
      last_rejected = true;
    }
  }
  return stats;
}

void HermiteTrack::push(double t, const State& y, const State& dydt) {
  times_.push_back(t);
  values_.push_back(y);
  slopes_.push_back(dydt);
}

void HermiteTrack::clear() {
  times_.clear();
  values_.clear();
  slopes_.clear();
}

void HermiteTrack::evaluate(double t, State& out) const {
  if (times_.empty()) throw Error(ErrorCode::InvalidParameter, "empty Hermite track");
  if (times_.size() == 1 || t <= times_.front()) {
    out = values_.front();
    return;
  }
  if (t >= times_.back()) {
    out = values_.back();
    return;
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  const double h = times_[hi] - times_[lo];
  const double u = (t - times_[lo]) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1;
  const double h10 = (u3 - 2 * u2 + u) * h;
  const double h01 = -2 * u3 + 3 * u2;
  const double h11 = (u3 - u2) * h;
  out = h00 * values_[lo] + h10 * slopes_[lo] + h01 * values_[hi] + h11 * slopes_[hi];
}

}  // namespace superrad::ode
