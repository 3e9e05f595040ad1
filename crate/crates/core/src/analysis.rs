//! Closed-form consistency and robustness guarantees.

use serde::Serialize;

use crate::error::{check_param, Error, Result};
use crate::ratio::ExtendedRatio;

const SQRT_5: f64 = 2.236_067_977_499_79;
/// The golden ratio `(1 + √5)/2`.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;
/// `1 + 2/√5`, the best ratio of any LRM constant mechanism.
pub const OPTIMAL_LRM_RATIO: f64 = 1.894_427_190_999_916;

/// Consistency `γ` and robustness `β` of a mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuaranteePair {
    pub consistency: ExtendedRatio,
    pub robustness: ExtendedRatio,
}

impl GuaranteePair {
    pub fn new(consistency: f64, robustness: f64) -> Self {
        GuaranteePair {
            consistency: ExtendedRatio::new(consistency),
            robustness: ExtendedRatio::new(robustness),
        }
    }
}

fn check_bim_alpha(alpha: f64) -> Result<()> {
    check_param("alpha", alpha, "[1, 2]", (1.0..=2.0).contains(&alpha))
}

fn check_bias(c: f64) -> Result<()> {
    check_param("c", c, "[0, 1/2]", (0.0..=0.5).contains(&c))
}

/// `α/(α − 1)`, unbounded at `α = 1`.
fn bim_robustness(alpha: f64) -> ExtendedRatio {
    ExtendedRatio::quotient(alpha, alpha - 1.0)
}

/// `(α, α/(α − 1))`.
pub fn bim_guarantees(alpha: f64) -> Result<GuaranteePair> {
    check_bim_alpha(alpha)?;
    Ok(GuaranteePair {
        consistency: ExtendedRatio::new(alpha),
        robustness: bim_robustness(alpha),
    })
}

/// `1/γ + 1/β` for the α-BIM guarantees; always 1.
pub fn bim_frontier_identity(alpha: f64) -> Result<f64> {
    check_param("alpha", alpha, "(1, 2]", alpha > 1.0 && alpha <= 2.0)?;
    let g = bim_guarantees(alpha)?;
    Ok(1.0 / g.consistency.value() + 1.0 / g.robustness.value())
}

/// One closed-form segment of an [`ErrorCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurvePiece {
    Constant {
        value: f64,
    },
    /// `1 + 4η/(1 − 2η)`.
    Reciprocal,
    /// `1 + 2αη/(α − 1)`.
    Linear {
        alpha: f64,
    },
}

impl CurvePiece {
    pub fn value_at(&self, eta: f64) -> ExtendedRatio {
        match *self {
            CurvePiece::Constant { value } => ExtendedRatio::new(value),
            CurvePiece::Reciprocal => ExtendedRatio::quotient(1.0 + 2.0 * eta, 1.0 - 2.0 * eta),
            CurvePiece::Linear { alpha } => {
                ExtendedRatio::new(1.0 + 2.0 * alpha * eta / (alpha - 1.0))
            }
        }
    }
}

/// Worst-case ratio of α-BIM as a function of the prediction error bound `η`.
///
/// Piece `i` covers `(breakpoints[i − 1], breakpoints[i]]`, the first piece
/// also covers `η = 0`, and the terminal value holds beyond the last
/// breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorCurve {
    alpha: f64,
    breakpoints: Vec<f64>,
    pieces: Vec<CurvePiece>,
    terminal: ExtendedRatio,
}

/// Pieces shorter than this are dropped (they occur at `α = φ` and `α = 2`).
const DEGENERATE_PIECE: f64 = 1e-12;

impl ErrorCurve {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[CurvePiece] {
        &self.pieces
    }

    pub fn terminal(&self) -> ExtendedRatio {
        self.terminal
    }

    pub fn evaluate(&self, eta: f64) -> Result<ExtendedRatio> {
        if !(eta >= 0.0) {
            return Err(Error::domain("eta", eta, "[0, inf)"));
        }
        let index = self.breakpoints.iter().position(|&b| eta <= b);
        Ok(match index {
            Some(i) => self.pieces[i].value_at(eta),
            None => self.terminal,
        })
    }
}

/// The error curve of α-BIM.
pub fn bim_error_curve(alpha: f64) -> Result<ErrorCurve> {
    check_bim_alpha(alpha)?;
    let linear = CurvePiece::Linear { alpha };
    let constant = CurvePiece::Constant { value: alpha };
    let candidates: Vec<(f64, CurvePiece)> = if alpha == 1.0 {
        vec![(0.5, CurvePiece::Reciprocal)]
    } else if alpha <= GOLDEN_RATIO {
        vec![
            ((alpha - 1.0) / (2.0 * (alpha + 1.0)), constant),
            (1.0 / alpha - 0.5, CurvePiece::Reciprocal),
            (1.0 / (2.0 * alpha), linear),
        ]
    } else {
        vec![
            ((alpha - 1.0).powi(2) / (2.0 * alpha), constant),
            (1.0 / (2.0 * alpha), linear),
        ]
    };

    let mut breakpoints = Vec::new();
    let mut pieces = Vec::new();
    let mut previous = 0.0;
    for (end, piece) in candidates {
        // a first piece may be a single point at η = 0 only if nothing follows
        if end - previous > DEGENERATE_PIECE || (pieces.is_empty() && end > 0.0) {
            breakpoints.push(end);
            pieces.push(piece);
            previous = end;
        }
    }
    Ok(ErrorCurve {
        alpha,
        breakpoints,
        pieces,
        terminal: bim_robustness(alpha),
    })
}

/// `ρ(x)` for the `(α, p)`-LRM constant mechanism on `x = (0, ½)`, valid for
/// `α < ¼`; for larger `α` this is the expression analysed at `p = ½`.
pub fn lrm_midpoint_formula(alpha: f64, p: f64) -> ExtendedRatio {
    let side = p * (4.0 - 4.0 * alpha);
    let denom = 1.0 - 4.0 * alpha * alpha;
    if side == 0.0 {
        ExtendedRatio::new(2.0 * (1.0 - 2.0 * p))
    } else {
        ExtendedRatio::new(2.0 * (1.0 - 2.0 * p) + ExtendedRatio::quotient(side, denom).value())
    }
}

/// `(ρ(x), ρ(x'))` for `x = (0, ½)` and `x' = (0, ½ + α)`.
pub fn lrm_instance_ratios(alpha: f64, p: f64) -> Result<(f64, f64)> {
    check_param("alpha", alpha, "[0, 1/4]", (0.0..=0.25).contains(&alpha))?;
    check_param("p", p, "[0, 1/2]", (0.0..=0.5).contains(&p))?;
    let rho_x = lrm_midpoint_formula(alpha, p).value();
    let left = if alpha <= 1.0 / 6.0 {
        p * (2.0 - 4.0 * alpha) / (1.0 + 2.0 * alpha)
    } else {
        p * (1.0 + 2.0 * alpha) / (2.0 - 4.0 * alpha)
    };
    let rho_x_prime = left + (1.0 - 2.0 * p) * (2.0 - 2.0 * alpha) + 2.0 * p / (1.0 - 2.0 * alpha);
    Ok((rho_x, rho_x_prime))
}

/// `ρ(x)` on `x = (0, ½)` at `p = ½`, for `α ∈ (¼, ½]`.
pub fn lrm_high_alpha_bound(alpha: f64) -> Result<ExtendedRatio> {
    check_param("alpha", alpha, "(1/4, 1/2]", alpha > 0.25 && alpha <= 0.5)?;
    Ok(lrm_midpoint_formula(alpha, 0.5))
}

/// BAM at bias `c = |ŷ − ½|`: `(2 − 4c², c + 2)` for `c ≥ ¼`, else the
/// regime bound `(7/4, 9/4)`.
pub fn bam_guarantees(c: f64) -> Result<GuaranteePair> {
    check_bias(c)?;
    Ok(if c >= 0.25 {
        GuaranteePair::new(2.0 - 4.0 * c * c, c + 2.0)
    } else {
        GuaranteePair::new(1.75, 2.25)
    })
}

/// Upper bounds for the α-bounding interval randomized mechanism.
pub fn birm_guarantees(alpha: f64) -> Result<GuaranteePair> {
    check_param("alpha", alpha, "(1, 2]", alpha > 1.0 && alpha <= 2.0)?;
    let t = 1.0 - 1.0 / alpha;
    let consistency = (1.0 + (12.0 + 4.0 * SQRT_5) / 5.0 * t)
        .min(0.6 + 2.0 * SQRT_5 / 5.0 + 1.6 * t)
        .min(OPTIMAL_LRM_RATIO);
    Ok(GuaranteePair {
        consistency: ExtendedRatio::new(consistency),
        robustness: bim_robustness(alpha),
    })
}

/// `(√5 − 1)/4`, where the bias-aware LRM consistency changes form.
pub const BALRM_KNEE: f64 = 0.309_016_994_374_947_4;

/// Upper bounds for the bias-aware LRM mechanism at bias `c`.
pub fn balrm_guarantees(c: f64) -> Result<GuaranteePair> {
    check_bias(c)?;
    if c <= 0.25 {
        return Ok(GuaranteePair::new(
            (23.0 + 9.0 * SQRT_5) / 20.0,
            0.5 + 4.0 / SQRT_5,
        ));
    }
    let robustness = (4.0 * SQRT_5 * c + 7.0 * SQRT_5 + 5.0) / 10.0;
    let consistency = if c <= BALRM_KNEE {
        (-8.0 * c * c + 2.0 * (SQRT_5 - 1.0) * c + SQRT_5 + 6.0) / 5.0
    } else {
        -(4.0 * (3.0 + SQRT_5) / 5.0) * c * c + (SQRT_5 + 8.0) / 5.0
    };
    Ok(GuaranteePair::new(consistency, robustness))
}

/// The two numbers pinned down by the randomized lower-bound argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundCertificate {
    pub delta: f64,
    pub bound: f64,
}

/// Coefficient of `p₂` in the lower-bound chain; vanishes at `δ*`.
pub fn p2_coefficient(delta: f64) -> f64 {
    (2.0 * delta - 0.13) / (0.71 - delta) - (15.0 / 14.0) * (0.29 - delta) / (0.71 - delta)
}

/// Solves `14(2δ − 0.13) = 15(0.29 − δ)` by bisection and evaluates the
/// resulting bound `1 + (15/14)(0.21 − δ)/(0.71 − δ)`.
pub fn lower_bound_certificate() -> LowerBoundCertificate {
    let f = |d: f64| 14.0 * (2.0 * d - 0.13) - 15.0 * (0.29 - d);
    let (mut lo, mut hi) = (0.0_f64, 0.29_f64);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let delta = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
    LowerBoundCertificate {
        delta,
        bound: 1.0 + (15.0 / 14.0) * (0.21 - delta) / (0.71 - delta),
    }
}
