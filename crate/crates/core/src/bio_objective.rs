//! The biomechanics-informed training objective and its exact gradients.
//!
//! Three terms: a periodicity loss on predicted frame differences, a mirror
//! symmetry loss on leg/shoulder angles, and a foot-to-ground volume loss.
//! The symmetry and ground terms are evaluated on the reconstructed absolute
//! next-frame state (previous frame plus the predicted difference) passed
//! through forward kinematics; gradients with respect to the predicted
//! difference flow through the whole chain on a reverse-mode tape.

use crate::autodiff::{Real, Tape};
use crate::body_model::{
    fk_generic, foot_clearance_generic, leg_shoulder_angles_generic, math::Vec3, BodyModel,
    BodyState, ClearanceGeneric, FootClearance, LegShoulderAngles, Side, POSE_DIM, SIDES,
};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Weights of the symmetry and ground terms in the total objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        // Periodicity alone carries most of the signal; these defaults weight
        // symmetry strongly and the (m^3-scaled) ground volume lightly.
        LossWeights {
            lambda1: 10.0,
            lambda2: 0.01,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        if self.lambda1 < 0.0 || self.lambda2 < 0.0 || !self.lambda1.is_finite()
            || !self.lambda2.is_finite()
        {
            return Err(Error::ConfigInvalid(format!(
                "loss weights must be finite and non-negative, got {} / {}",
                self.lambda1, self.lambda2
            )));
        }
        Ok(())
    }
}

/// Per-batch mean values of the loss terms and their weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub l_c: f64,
    pub l_s: f64,
    pub l_g: f64,
    pub total: f64,
}

impl LossBreakdown {
    pub fn zero() -> Self {
        LossBreakdown {
            l_c: 0.0,
            l_s: 0.0,
            l_g: 0.0,
            total: 0.0,
        }
    }

    /// Combines component values into the weighted total.
    pub fn from_components(l_c: f64, l_s: f64, l_g: f64, weights: &LossWeights) -> Self {
        LossBreakdown {
            l_c,
            l_s,
            l_g,
            total: l_c + weights.lambda1 * l_s + weights.lambda2 * l_g,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.l_c.is_finite() && self.l_s.is_finite() && self.l_g.is_finite()
            && self.total.is_finite()
    }
}

/// Mean absolute error between true and predicted difference vectors.
/// Angle components are assumed to already be wrapped differences.
pub fn periodicity_loss(d_true: &[f64], d_pred: &[f64]) -> Result<f64> {
    if d_true.len() != d_pred.len() {
        return Err(Error::DimensionMismatch {
            what: "periodicity loss",
            expected: d_true.len(),
            got: d_pred.len(),
        });
    }
    let sum: f64 = d_true
        .iter()
        .zip(d_pred)
        .map(|(t, p)| (t - p).abs())
        .sum();
    Ok(sum / d_true.len() as f64)
}

/// |θ_leg1 + θ_leg2| + |θ_sho1 + θ_sho2|: zero when the left and right limbs
/// mirror each other about the body's center line.
pub fn symmetry_loss(angles: &LegShoulderAngles) -> f64 {
    (angles.leg[0] + angles.leg[1]).abs() + (angles.shoulder[0] + angles.shoulder[1]).abs()
}

fn symmetry_generic<R: Real>(leg: [R; 2], shoulder: [R; 2]) -> R {
    (leg[0] + leg[1]).abs() + (shoulder[0] + shoulder[1]).abs()
}

/// Volume between a foot line and the ground plane, decomposed as a
/// rectangular slab plus a triangular prism:
///
///   w·D·(L·cos α) − ½·w·(L·sin α)·(L·cos α)
///
/// `d` is the heel height above the plane and `alpha` the foot pitch,
/// positive when the heel end is above the toe end. Only meaningful on the
/// geometric domain 0 ≤ L·sin α ≤ D (heel and toe at or above the ground);
/// see [`robust_ground_loss`] for the guarded version.
pub fn ground_volume_loss(d: f64, alpha: f64, length: f64, width: f64) -> f64 {
    ground_volume_generic(d, alpha, length, width)
}

fn ground_volume_generic<R: Real>(d: R, alpha: R, length: f64, width: f64) -> R {
    let footprint = alpha.cos().scale(length);
    let drop = alpha.sin().scale(length);
    d.scale(width) * footprint - (drop * footprint).scale(0.5 * width)
}

/// Ground-volume loss on arbitrary clearances. On the geometric domain it is
/// exactly [`ground_volume_loss`]; outside it, the absolute heel and toe
/// clearances enter the prism decomposition, so ground penetration is
/// penalized, never rewarded.
///
/// The clearance's pitch is positive with the toe up; the volume formula's
/// pitch variable is its negation.
pub fn robust_ground_loss(clearance: &FootClearance, length: f64, width: f64) -> f64 {
    robust_ground_generic(
        &ClearanceGeneric {
            d: clearance.d,
            alpha: clearance.alpha,
        },
        length,
        width,
    )
}

fn robust_ground_generic<R: Real>(c: &ClearanceGeneric<R>, length: f64, width: f64) -> R {
    let alpha = -c.alpha;
    let drop = alpha.sin().scale(length); // heel end minus toe end height
    let d = c.d;
    let in_domain = d.value() >= 0.0 && drop.value() >= 0.0 && drop.value() <= d.value();
    if in_domain {
        ground_volume_generic(d, alpha, length, width)
    } else {
        let footprint = alpha.cos().scale(length).abs();
        let toe = d - drop;
        (d.abs() + toe.abs()).scale(0.5 * width) * footprint
    }
}

/// Which parameter group a network predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamGroup {
    Translation,
    Pose,
}

impl ParamGroup {
    pub fn dim(&self) -> usize {
        match self {
            ParamGroup::Translation => 3,
            ParamGroup::Pose => POSE_DIM,
        }
    }
}

/// One training sample's context for the objective: the normalized target
/// difference for the predicted group, the previous frame, the true next
/// frame (supplying the complementary parameter group), and the local ground
/// elevation.
#[derive(Debug, Clone)]
pub struct BioSample<'a> {
    pub target: &'a [f64],
    pub prev: &'a BodyState,
    pub truth_next: &'a BodyState,
    pub ground_z: f64,
}

/// Batch objective. `preds` are normalized predicted differences for `group`;
/// `diff_scale[i]` converts normalized component i to raw units. Returns
/// batch-mean loss components and, when requested, the gradient of each
/// sample's total with respect to its prediction.
pub fn total_loss_batch(
    group: ParamGroup,
    preds: &[Vec<f64>],
    samples: &[BioSample],
    diff_scale: &[f64],
    model: &BodyModel,
    weights: &LossWeights,
    want_grads: bool,
) -> Result<(LossBreakdown, Option<Vec<Vec<f64>>>)> {
    if preds.len() != samples.len() {
        return Err(Error::DimensionMismatch {
            what: "loss batch",
            expected: samples.len(),
            got: preds.len(),
        });
    }
    let q = group.dim();
    let mut sum = LossBreakdown::zero();
    let mut grads = want_grads.then(|| Vec::with_capacity(preds.len()));

    for (pred, sample) in preds.iter().zip(samples) {
        if pred.len() != q || sample.target.len() != q || diff_scale.len() != q {
            return Err(Error::DimensionMismatch {
                what: "prediction",
                expected: q,
                got: pred.len(),
            });
        }
        let tape = Tape::new();
        let vars: Vec<_> = pred.iter().map(|&v| tape.var(v)).collect();
        let ctx = vars[0];

        // Periodicity: mean absolute error in normalized difference space.
        let mut l_c = ctx.lift(0.0);
        for (v, &t) in vars.iter().zip(sample.target) {
            l_c = l_c + (ctx.lift(t) - *v).abs();
        }
        let l_c = l_c.scale(1.0 / q as f64);

        let need_fk = weights.lambda1 != 0.0 || weights.lambda2 != 0.0;
        let (l_s, l_g) = if need_fk {
            // Reconstruct the absolute next frame: the predicted group comes
            // from prev + denormalized prediction, the other group from the
            // true next frame.
            let (trans, pose) = match group {
                ParamGroup::Translation => {
                    let t = Vec3([
                        ctx.lift(sample.prev.trans[0]) + vars[0].scale(diff_scale[0]),
                        ctx.lift(sample.prev.trans[1]) + vars[1].scale(diff_scale[1]),
                        ctx.lift(sample.prev.trans[2]) + vars[2].scale(diff_scale[2]),
                    ]);
                    let pose: Vec<_> = sample
                        .truth_next
                        .pose
                        .iter()
                        .map(|&p| ctx.lift(p))
                        .collect();
                    (t, pose)
                }
                ParamGroup::Pose => {
                    let t = Vec3::lift(ctx, sample.truth_next.trans);
                    let pose: Vec<_> = sample
                        .prev
                        .pose
                        .iter()
                        .zip(vars.iter())
                        .enumerate()
                        .map(|(i, (&p, v))| ctx.lift(p) + v.scale(diff_scale[i]))
                        .collect();
                    (t, pose)
                }
            };
            let (joints, rots) = fk_generic(ctx, &trans, &pose, model);
            let l_s = if weights.lambda1 != 0.0 {
                let a = leg_shoulder_angles_generic(ctx, &joints, &rots[0], &model.ids)?;
                symmetry_generic(a.leg, a.shoulder)
            } else {
                ctx.lift(0.0)
            };
            let l_g = if weights.lambda2 != 0.0 {
                let mut total = ctx.lift(0.0);
                for side in SIDES {
                    let c = foot_clearance_generic(
                        ctx,
                        &joints,
                        &rots,
                        model,
                        sample.ground_z,
                        side,
                    )?;
                    let s = side as usize;
                    total = total
                        + robust_ground_generic(&c, model.foot.length[s], model.foot.width[s]);
                }
                total
            } else {
                ctx.lift(0.0)
            };
            (l_s, l_g)
        } else {
            (ctx.lift(0.0), ctx.lift(0.0))
        };

        let total = l_c + l_s.scale(weights.lambda1) + l_g.scale(weights.lambda2);
        sum.l_c += l_c.value();
        sum.l_s += l_s.value();
        sum.l_g += l_g.value();
        sum.total += total.value();

        if let Some(grads) = grads.as_mut() {
            let g = tape.gradient(total);
            grads.push(vars.iter().map(|v| g.wrt(*v)).collect());
        }
    }

    let n = preds.len().max(1) as f64;
    let mean = LossBreakdown {
        l_c: sum.l_c / n,
        l_s: sum.l_s / n,
        l_g: sum.l_g / n,
        total: sum.total / n,
    };
    Ok((mean, grads))
}

/// Convenience wrapper: symmetry and ground losses of one absolute state.
pub fn bio_terms_of_state(
    state: &BodyState,
    model: &BodyModel,
    ground_z: f64,
) -> Result<(f64, f64)> {
    let posed = crate::body_model::forward_kinematics(state, model, false)?;
    let angles = crate::body_model::leg_shoulder_angles(&posed, &model.ids)?;
    let l_s = symmetry_loss(&angles);
    let clearances = crate::body_model::foot_clearance(&posed, model, ground_z)?;
    let mut l_g = 0.0;
    for side in [Side::Left, Side::Right] {
        let s = side as usize;
        l_g += robust_ground_loss(&clearances[s], model.foot.length[s], model.foot.width[s]);
    }
    Ok((l_s, l_g))
}
