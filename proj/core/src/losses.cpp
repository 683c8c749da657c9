#include "textshape/losses.hpp"

#include <cmath>

namespace textshape {

void LossConfig::validate() const {
  if (!(lambda > 0.0) || !(dice_epsilon > 0.0) || !(smooth_l1_delta > 0.0)) {
    throw DegenerateInputError("loss parameters must be positive");
  }
}

double smooth_l1(double e, double delta) {
  const double a = std::abs(e);
  return a < delta ? 0.5 * e * e / delta : a - 0.5 * delta;
}

double smooth_l1_derivative(double e, double delta) {
  if (std::abs(e) < delta) return e / delta;
  return e > 0.0 ? 1.0 : -1.0;
}

DiceLoss dice_loss(const RealGrid& prob, const Mask& gt, const Mask& ignore, double eps) {
  require_same_shape(prob, gt, "dice prob vs gt");
  require_same_shape(prob, ignore, "dice prob vs ignore");
  if (!(eps > 0.0)) throw DegenerateInputError("dice epsilon must be positive");

  double inter = 0.0, sum_p = 0.0, sum_g = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    if (ignore[i]) continue;
    const double g = gt[i] ? 1.0 : 0.0;
    inter += prob[i] * g;
    sum_p += prob[i];
    sum_g += g;
  }
  const double num = 2.0 * inter + eps;
  const double den = sum_p + sum_g + eps;

  DiceLoss out;
  out.value = 1.0 - num / den;
  out.grad = RealGrid(prob.width(), prob.height());
  // d(num/den)/dp_i = (2 g_i den - num) / den^2
  const double den2 = den * den;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    if (ignore[i]) continue;
    const double g = gt[i] ? 1.0 : 0.0;
    out.grad[i] = -(2.0 * g * den - num) / den2;
  }
  return out;
}

DiceLoss dice_loss(const RealGrid& prob, const Mask& gt, double eps) {
  return dice_loss(prob, gt, Mask(prob.width(), prob.height()), eps);
}

RegressionLoss reg_loss(const RealGrid& pred_x, const RealGrid& pred_y, const RealGrid& gt_x, const RealGrid& gt_y,
                        const Mask& region, double delta) {
  require_same_shape(pred_x, pred_y, "pred_x vs pred_y");
  require_same_shape(pred_x, gt_x, "pred_x vs gt_x");
  require_same_shape(pred_x, gt_y, "pred_x vs gt_y");
  require_same_shape(pred_x, region, "pred_x vs region");
  if (!(delta > 0.0)) throw DegenerateInputError("smooth-L1 delta must be positive");

  RegressionLoss out;
  out.grad_x = RealGrid(pred_x.width(), pred_x.height());
  out.grad_y = RealGrid(pred_x.width(), pred_x.height());

  std::size_t count = 0;
  for (std::size_t i = 0; i < region.size(); ++i) count += region[i] ? 1 : 0;
  if (count == 0) return out;

  const double inv = 1.0 / static_cast<double>(count);
  double sum = 0.0;
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (!region[i]) continue;
    const double ex = pred_x[i] - gt_x[i];
    const double ey = pred_y[i] - gt_y[i];
    sum += 0.5 * smooth_l1(ex, delta) + 0.5 * smooth_l1(ey, delta);
    out.grad_x[i] = 0.5 * smooth_l1_derivative(ex, delta) * inv;
    out.grad_y[i] = 0.5 * smooth_l1_derivative(ey, delta) * inv;
  }
  out.value = sum * inv;
  return out;
}

LossReport compute_losses(const PredictionRaster& pred, const LabelRaster& labels, const LossConfig& cfg) {
  cfg.validate();
  if (pred.grid != labels.grid) throw ShapeMismatchError("prediction and label grids differ");

  Mask region(labels.mask.width(), labels.mask.height());
  for (std::size_t i = 0; i < region.size(); ++i) region[i] = labels.mask[i] && !labels.ignore_mask[i];

  DiceLoss cls = dice_loss(pred.prob, labels.mask, labels.ignore_mask, cfg.dice_epsilon);
  RegressionLoss reg =
      reg_loss(pred.dist_x, pred.dist_y, labels.dist_x, labels.dist_y, region, cfg.smooth_l1_delta);

  LossReport out;
  out.cls = cls.value;
  out.reg = reg.value;
  out.total = total_loss(out.cls, out.reg, cfg.lambda);
  out.grad_prob = std::move(cls.grad);
  out.grad_dist_x = std::move(reg.grad_x);
  out.grad_dist_y = std::move(reg.grad_y);
  for (std::size_t i = 0; i < out.grad_dist_x.size(); ++i) {
    out.grad_dist_x[i] *= cfg.lambda;
    out.grad_dist_y[i] *= cfg.lambda;
  }
  return out;
}

}  // namespace textshape
