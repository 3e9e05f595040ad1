//! Coarse-to-fine grid maximisation over boxes of up to three dimensions.

use rayon::prelude::*;

pub(crate) const MAX_DIMS: usize = 3;
pub(crate) type Point = [f64; MAX_DIMS];

/// Number of coarse candidates refined independently.
const CANDIDATES: usize = 6;
/// Minimum max-norm distance between two refined candidates.
const CANDIDATE_SEPARATION: f64 = 0.1;
/// Grid points per dimension at every refinement level.
const REFINE_POINTS: usize = 11;

/// Inclusive grid `lo, lo + step, …, hi`; the last point is snapped to `hi`.
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut points: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).collect();
    let last = points.last_mut().expect("non-empty");
    if hi - *last > 1e-9 * step {
        points.push(hi);
    } else {
        *last = hi;
    }
    points
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Level {
    pub step: f64,
    pub point: Point,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub point: Point,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    /// Best coarse grid value.
    pub coarse_value: f64,
    /// Refined candidates, best first.
    pub candidates: Vec<Candidate>,
    /// Zoom trace of the winning candidate.
    pub trace: Vec<Level>,
    pub evaluations: usize,
}

impl Outcome {
    pub fn best(&self) -> Option<&Candidate> {
        self.candidates.first()
    }
}

/// `a` beats `b`: larger value, ties broken towards the lexicographically
/// smaller point.
fn better(a: (f64, &Point), b: (f64, &Point)) -> bool {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => {
            for (x, y) in a.1.iter().zip(b.1) {
                match x.total_cmp(y) {
                    std::cmp::Ordering::Less => return true,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
            false
        }
    }
}

fn separated(a: &Point, b: &Point) -> bool {
    a.iter()
        .zip(b)
        .any(|(x, y)| (x - y).abs() >= CANDIDATE_SEPARATION)
}

/// Evaluates `f` on the tensor grid `axes`, in parallel, in index order.
fn evaluate_grid<F>(axes: &[Vec<f64>], f: &F) -> Vec<(Point, Option<f64>)>
where
    F: Fn(&Point) -> Option<f64> + Sync,
{
    let total: usize = axes.iter().map(Vec::len).product();
    (0..total)
        .into_par_iter()
        .map(|mut index| {
            let mut point = [0.0; MAX_DIMS];
            for d in (0..axes.len()).rev() {
                let len = axes[d].len();
                point[d] = axes[d][index % len];
                index /= len;
            }
            (point, f(&point))
        })
        .collect()
}

fn argmax(values: &[(Point, Option<f64>)]) -> Option<(Point, f64)> {
    let mut best: Option<(Point, f64)> = None;
    for (point, value) in values {
        if let Some(v) = value {
            if best.is_none_or(|(bp, bv)| better((*v, point), (bv, &bp))) {
                best = Some((*point, *v));
            }
        }
    }
    best
}

/// Maximises `f` over the box `bounds`: a coarse grid at `coarse_step`, then
/// a zoom around several well-separated coarse maxima. Each zoom level lays
/// an 11-point grid over `[c − r, c + r]` and halves `r`, stopping once the
/// grid spacing is at most `final_step`. Points where `f` is `None` are
/// infeasible.
pub(crate) fn maximize<F>(
    bounds: &[(f64, f64)],
    coarse_step: f64,
    radius: f64,
    final_step: f64,
    f: F,
) -> Outcome
where
    F: Fn(&Point) -> Option<f64> + Sync,
{
    assert!(!bounds.is_empty() && bounds.len() <= MAX_DIMS);
    let axes: Vec<Vec<f64>> = bounds
        .iter()
        .map(|&(lo, hi)| grid(lo, hi, coarse_step))
        .collect();
    let coarse = evaluate_grid(&axes, &f);
    let mut evaluations = coarse.len();

    let mut seeds: Vec<(Point, f64)> = Vec::new();
    while seeds.len() < CANDIDATES {
        let pool: Vec<(Point, Option<f64>)> = coarse
            .iter()
            .filter(|(p, _)| seeds.iter().all(|(s, _)| separated(p, s)))
            .copied()
            .collect();
        match argmax(&pool) {
            Some(seed) => seeds.push(seed),
            None => break,
        }
    }
    let coarse_value = seeds.first().map_or(f64::NEG_INFINITY, |s| s.1);

    let mut refined: Vec<(Candidate, Vec<Level>)> = Vec::new();
    for (start, start_value) in seeds {
        let mut center = start;
        let mut value = start_value;
        let mut r = radius;
        let mut trace = vec![Level {
            step: coarse_step,
            point: center,
            value,
        }];
        loop {
            let axes: Vec<Vec<f64>> = bounds
                .iter()
                .enumerate()
                .map(|(d, &(lo, hi))| {
                    linspace(
                        (center[d] - r).max(lo),
                        (center[d] + r).min(hi),
                        REFINE_POINTS,
                    )
                })
                .collect();
            let values = evaluate_grid(&axes, &f);
            evaluations += values.len();
            if let Some((p, v)) = argmax(&values) {
                if better((v, &p), (value, &center)) {
                    center = p;
                    value = v;
                }
            }
            let step = 2.0 * r / (REFINE_POINTS - 1) as f64;
            trace.push(Level {
                step,
                point: center,
                value,
            });
            if step <= final_step {
                break;
            }
            r *= 0.5;
        }
        refined.push((
            Candidate {
                point: center,
                value,
            },
            trace,
        ));
    }
    refined.sort_by(|a, b| {
        if better((a.0.value, &a.0.point), (b.0.value, &b.0.point)) {
            std::cmp::Ordering::Less
        } else if better((b.0.value, &b.0.point), (a.0.value, &a.0.point)) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    let trace = refined.first().map(|r| r.1.clone()).unwrap_or_default();
    Outcome {
        coarse_value,
        candidates: refined.into_iter().map(|r| r.0).collect(),
        trace,
        evaluations,
    }
}
