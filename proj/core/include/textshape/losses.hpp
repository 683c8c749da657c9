#pragma once

#include "textshape/decode.hpp"
#include "textshape/encode.hpp"
#include "textshape/grid.hpp"

namespace textshape {

struct LossConfig {
  double lambda = 1.0;
  double dice_epsilon = 1.0;
  double smooth_l1_delta = 1.0;

  void validate() const;
};

struct DiceLoss {
  double value = 0.0;
  RealGrid grad;  // d value / d prob
};

struct RegressionLoss {
  double value = 0.0;
  RealGrid grad_x;  // d value / d pred_x
  RealGrid grad_y;
};

/// Gradients are of `total`, so the distance gradients carry the lambda factor.
struct LossReport {
  double total = 0.0;
  double cls = 0.0;
  double reg = 0.0;
  RealGrid grad_prob;
  RealGrid grad_dist_x;
  RealGrid grad_dist_y;
};

/// 0.5 e^2 / delta inside |e| < delta, |e| - 0.5 delta outside.
double smooth_l1(double e, double delta = 1.0);
double smooth_l1_derivative(double e, double delta = 1.0);

/// Soft Dice loss 1 - (2 sum(p g) + eps) / (sum(p) + sum(g) + eps).
/// Cells set in `ignore` are excluded from every sum and get zero gradient.
DiceLoss dice_loss(const RealGrid& prob, const Mask& gt, const Mask& ignore, double eps = 1.0);
DiceLoss dice_loss(const RealGrid& prob, const Mask& gt, double eps = 1.0);

/// Mean over region cells of 0.5 smooth_l1(ex) + 0.5 smooth_l1(ey), with
/// e = prediction - target. An empty region gives 0 and zero gradients.
RegressionLoss reg_loss(const RealGrid& pred_x, const RealGrid& pred_y, const RealGrid& gt_x, const RealGrid& gt_y,
                        const Mask& region, double delta = 1.0);

inline double total_loss(double cls, double reg, double lambda = 1.0) { return cls + lambda * reg; }

/// Both losses of a prediction against its labels. The regression region is
/// the label mask minus don't-care cells.
LossReport compute_losses(const PredictionRaster& pred, const LabelRaster& labels, const LossConfig& cfg = {});

}  // namespace textshape
