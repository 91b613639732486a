#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "gazepriv/privatizers.hpp"

namespace gazepriv {

// Windowed-sinc low-pass: ideal sinc centred at (taps-1)/2, Hamming window,
// normalized to unit DC gain. Throws kInvalidCutoff / kInvalidArgument.
std::vector<double> fir_design(double cutoff_hz, int taps, double fs);

// H(f) = sum_k h[k] exp(-j 2 pi f k / fs).
std::complex<double> frequency_response(std::span<const double> coefficients,
                                        double freq_hz, double fs);

// Causal direct-form convolution. Keeps the previous taps-1 inputs as state
// (zero initially), so chunked processing reproduces per-sample output.
class FirFilter final : public Privatizer {
 public:
  explicit FirFilter(std::vector<double> coefficients);
  FirFilter(double cutoff_hz, int taps, double fs);

  std::optional<GazeSample> push(const GazeSample& s, MovementLabel) override;
  void process(std::span<const GazeSample> in, std::span<const MovementLabel> labels,
               std::vector<GazeSample>& out) override;

  const std::vector<double>& coefficients() const { return h_; }

 private:
  double convolve(const std::vector<double>& buf, std::size_t newest) const;

  std::vector<double> h_;
  // Linear history: the last taps-1 inputs, oldest first.
  std::vector<double> state_x_;
  std::vector<double> state_y_;
  HoldLast hold_;
};

void write_coefficients_csv(const std::string& path, std::span<const double> coefficients);

}  // namespace gazepriv
