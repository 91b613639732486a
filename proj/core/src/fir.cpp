#include "gazepriv/fir.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gazepriv/error.hpp"

namespace gazepriv {

std::vector<double> fir_design(double cutoff_hz, int taps, double fs) {
  if (taps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "FIR needs at least one tap");
  }
  if (!(fs > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sampling rate must be positive");
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < fs / 2.0)) {
    std::ostringstream msg;
    msg << "cutoff " << cutoff_hz << " Hz must lie in (0, " << fs / 2.0 << ") Hz";
    throw Error(ErrorCode::kInvalidCutoff, msg.str());
  }
  const double fc = cutoff_hz / fs;
  const double centre = (taps - 1) / 2.0;
  std::vector<double> h(taps);
  for (int n = 0; n <= (taps - 1) / 2; ++n) {
    const double u = n - centre;
    const double sinc = u == 0.0 ? 2.0 * fc
                                 : std::sin(2.0 * std::numbers::pi * fc * u) / (std::numbers::pi * u);
    const double window =
        taps == 1 ? 1.0 : 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (taps - 1));
    h[n] = sinc * window;
    h[taps - 1 - n] = h[n];
  }
  const double sum = std::accumulate(h.begin(), h.end(), 0.0);
  for (double& v : h) v /= sum;
  return h;
}

std::complex<double> frequency_response(std::span<const double> coefficients, double freq_hz,
                                        double fs) {
  const double omega = 2.0 * std::numbers::pi * freq_hz / fs;
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    acc += coefficients[k] * std::polar(1.0, -omega * static_cast<double>(k));
  }
  return acc;
}

FirFilter::FirFilter(std::vector<double> coefficients)
    : Privatizer({"fir", 0, {0, 1}, 1}), h_(std::move(coefficients)) {
  if (h_.empty()) throw Error(ErrorCode::kInvalidArgument, "FIR needs at least one tap");
  const auto m = static_cast<std::int64_t>(h_.size());
  meta_.latency = SampleLatency{m - 1, 2};
  state_x_.assign(h_.size() - 1, 0.0);
  state_y_.assign(h_.size() - 1, 0.0);
}

FirFilter::FirFilter(double cutoff_hz, int taps, double fs)
    : FirFilter(fir_design(cutoff_hz, taps, fs)) {}

double FirFilter::convolve(const std::vector<double>& buf, std::size_t newest) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < h_.size(); ++k) acc += h_[k] * buf[newest - k];
  return acc;
}

std::optional<GazeSample> FirFilter::push(const GazeSample& s, MovementLabel) {
  auto held = hold_.apply(s);
  if (!held) return s;
  std::vector<double> bx = state_x_;
  std::vector<double> by = state_y_;
  bx.push_back(held->x);
  by.push_back(held->y);
  const std::size_t newest = bx.size() - 1;
  GazeSample out = GazeSample::at(s.t_ms, convolve(bx, newest), convolve(by, newest));
  if (!state_x_.empty()) {
    state_x_.assign(bx.begin() + 1, bx.end());
    state_y_.assign(by.begin() + 1, by.end());
  }
  return out;
}

void FirFilter::process(std::span<const GazeSample> in, std::span<const MovementLabel>,
                        std::vector<GazeSample>& out) {
  // State followed by the whole chunk; the last taps-1 entries become the
  // next state.
  std::vector<double> bx = state_x_;
  std::vector<double> by = state_y_;
  bx.reserve(bx.size() + in.size());
  by.reserve(by.size() + in.size());
  std::vector<std::optional<double>> ts;
  ts.reserve(in.size());
  for (const auto& s : in) {
    auto held = hold_.apply(s);
    if (!held) {
      ts.emplace_back(std::nullopt);
      continue;
    }
    bx.push_back(held->x);
    by.push_back(held->y);
    ts.emplace_back(s.t_ms);
  }
  std::size_t newest = state_x_.size();
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!ts[i]) {
      out.push_back(in[i]);
      continue;
    }
    out.push_back(GazeSample::at(*ts[i], convolve(bx, newest), convolve(by, newest)));
    ++newest;
  }
  const std::size_t keep = state_x_.size();
  if (keep > 0) {
    state_x_.assign(bx.end() - static_cast<std::ptrdiff_t>(keep), bx.end());
    state_y_.assign(by.end() - static_cast<std::ptrdiff_t>(keep), by.end());
  }
}

void write_coefficients_csv(const std::string& path, std::span<const double> coefficients) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path);
  os << "index,coefficient\n" << std::setprecision(17);
  for (std::size_t k = 0; k < coefficients.size(); ++k) os << k << ',' << coefficients[k] << '\n';
}

}  // namespace gazepriv
