#include "gazepriv/kalman.hpp"

#include <cmath>

#include "gazepriv/error.hpp"

namespace gazepriv {

Mat2 white_noise_acceleration(double q, double dt) {
  const double dt2 = dt * dt;
  return Mat2{{{q * dt2 * dt / 3.0, q * dt2 / 2.0}, {q * dt2 / 2.0, q * dt}}};
}

KalmanChannel::KalmanChannel(double dt, Mat2 process_noise, double measurement_noise, Vec2 state,
                             Mat2 covariance)
    : dt_(dt), q_(process_noise), r_(measurement_noise), x_(state), p_(covariance) {}

void KalmanChannel::predict() {
  x_ = {x_[0] + dt_ * x_[1], x_[1]};
  const double a00 = p_[0][0] + dt_ * p_[1][0];
  const double a01 = p_[0][1] + dt_ * p_[1][1];
  const double a10 = p_[1][0];
  const double a11 = p_[1][1];
  p_ = Mat2{{{a00 + dt_ * a01 + q_[0][0], a01 + q_[0][1]},
             {a10 + dt_ * a11 + q_[1][0], a11 + q_[1][1]}}};
  check_finite();
}

void KalmanChannel::update(double z) {
  const double s = p_[0][0] + r_;
  k_ = {p_[0][0] / s, p_[1][0] / s};
  const double innovation = z - x_[0];
  x_ = {x_[0] + k_[0] * innovation, x_[1] + k_[1] * innovation};
  const Mat2 prior = p_;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) p_[i][j] = prior[i][j] - k_[i] * prior[0][j];
  }
  check_finite();
}

void KalmanChannel::check_finite() const {
  const bool ok = std::isfinite(x_[0]) && std::isfinite(x_[1]) && std::isfinite(p_[0][0]) &&
                  std::isfinite(p_[0][1]) && std::isfinite(p_[1][0]) && std::isfinite(p_[1][1]);
  if (!ok) {
    throw Error(ErrorCode::kNonFiniteState,
                "Kalman state diverged; check the process/measurement noise settings");
  }
}

namespace {
constexpr Mat2 kIdentity{{{1.0, 0.0}, {0.0, 1.0}}};
}

KalmanSmoother::KalmanSmoother(double fs, KalmanParams params)
    : Privatizer({"kalman", 0, {0, 1}, 1}),
      dt_(1.0 / fs),
      params_(params),
      kx_(dt_, white_noise_acceleration(params.q, dt_), params.r, {0.0, 0.0}, kIdentity),
      ky_(kx_) {
  if (!(fs > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sampling rate must be positive");
  if (!(params.q >= 0.0) || !(params.r > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Kalman needs q >= 0 and r > 0");
  }
}

std::optional<GazeSample> KalmanSmoother::push(const GazeSample& s, MovementLabel) {
  if (!started_) {
    if (!s.valid) return s;
    const Mat2 q = white_noise_acceleration(params_.q, dt_);
    kx_ = KalmanChannel(dt_, q, params_.r, {s.x, 0.0}, kIdentity);
    ky_ = KalmanChannel(dt_, q, params_.r, {s.y, 0.0}, kIdentity);
    started_ = true;
    return s;
  }
  kx_.predict();
  ky_.predict();
  if (s.valid) {
    kx_.update(s.x);
    ky_.update(s.y);
  }
  return GazeSample::at(s.t_ms, kx_.position(), ky_.position());
}

}  // namespace gazepriv
