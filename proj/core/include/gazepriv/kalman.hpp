#pragma once

#include <array>

#include "gazepriv/privatizers.hpp"

namespace gazepriv {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

// Continuous white-noise-acceleration discretization scaled by q.
Mat2 white_noise_acceleration(double q, double dt);

// Constant-velocity filter for one channel: state (position, velocity),
// A = [[1, dt], [0, 1]], H = [1 0].
class KalmanChannel {
 public:
  KalmanChannel(double dt, Mat2 process_noise, double measurement_noise, Vec2 state,
                Mat2 covariance);

  void predict();
  // Requires a preceding predict(). Throws kNonFiniteState on divergence.
  void update(double z);

  const Vec2& state() const { return x_; }
  const Mat2& covariance() const { return p_; }
  const Vec2& gain() const { return k_; }
  double position() const { return x_[0]; }
  double velocity() const { return x_[1]; }

 private:
  void check_finite() const;

  double dt_;
  Mat2 q_;
  double r_;
  Vec2 x_;
  Mat2 p_;
  Vec2 k_{0.0, 0.0};
};

struct KalmanParams {
  double q = 500.0;  // acceleration noise density, dva^2/s^3
  double r = 0.5;    // measurement variance, dva^2
};

// Independent horizontal and vertical channels. Missing samples run the
// prediction step only. State starts at the first valid sample with zero
// velocity and identity covariance.
class KalmanSmoother final : public Privatizer {
 public:
  KalmanSmoother(double fs, KalmanParams params = {});
  std::optional<GazeSample> push(const GazeSample& s, MovementLabel) override;

  const KalmanChannel* channel_x() const { return started_ ? &kx_ : nullptr; }
  const KalmanChannel* channel_y() const { return started_ ? &ky_ : nullptr; }

 private:
  double dt_;
  KalmanParams params_;
  bool started_ = false;
  KalmanChannel kx_;
  KalmanChannel ky_;
};

}  // namespace gazepriv
