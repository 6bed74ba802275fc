//! Argument-principle zero counts over axis-aligned rectangles.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, TAU};

use super::lvalue::LFunction;
use super::LfuncError;
use crate::characters::Character;

/// Initial sample spacing along each edge.
const BASE_STEP: f64 = 0.05;
/// Below this |f| a boundary sample counts as touching a zero.
const BOUNDARY_FLOOR: f64 = 1e-8;
/// Segments are not split below this length.
const MIN_SEGMENT: f64 = 1e-10;
const INTEGRALITY_TOL: f64 = 0.1;
/// Edge offsets tried in order when an edge runs too close to a zero.
const NUDGES: [f64; 4] = [1e-3, -1e-3, 2e-3, -2e-3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rectangle {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Rectangle {
    pub fn new(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64) -> Result<Self, LfuncError> {
        let ok = [sigma_lo, sigma_hi, t_lo, t_hi].iter().all(|v| v.is_finite()) && sigma_lo < sigma_hi && t_lo < t_hi;
        if !ok {
            return Err(LfuncError::BadRegion(format!("[{sigma_lo}, {sigma_hi}] x [{t_lo}, {t_hi}]")));
        }
        Ok(Self { sigma_lo, sigma_hi, t_lo, t_hi })
    }

    pub fn width(&self) -> f64 {
        self.sigma_hi - self.sigma_lo
    }

    pub fn height(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.sigma_lo + self.sigma_hi), 0.5 * (self.t_lo + self.t_hi))
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.sigma_lo, self.t_lo),
            Complex64::new(self.sigma_hi, self.t_lo),
            Complex64::new(self.sigma_hi, self.t_hi),
            Complex64::new(self.sigma_lo, self.t_hi),
        ]
    }

    fn nudged(&self, offsets: [f64; 4]) -> Self {
        // edge order: bottom, right, top, left
        Self {
            t_lo: self.t_lo + offsets[0],
            sigma_hi: self.sigma_hi + offsets[1],
            t_hi: self.t_hi + offsets[2],
            sigma_lo: self.sigma_lo + offsets[3],
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WindingResult {
    pub count: u32,
    /// accumulated change of argument divided by 2π
    pub raw_winding: f64,
    /// the contour actually used after any edge nudges
    pub rectangle: Rectangle,
    pub evaluations: usize,
    pub nudged: bool,
}

#[derive(Debug, Default)]
struct EdgeTrace {
    total_arg: f64,
    evaluations: usize,
    touched_zero: bool,
}

fn trace_edge<F>(f: &F, a: Complex64, b: Complex64) -> Result<EdgeTrace, LfuncError>
where
    F: Fn(Complex64) -> Result<Complex64, LfuncError>,
{
    let mut trace = EdgeTrace::default();
    let len = (b - a).norm();
    let pieces = ((len / BASE_STEP).ceil() as usize).max(1);
    let point = |k: usize| a + (b - a) * (k as f64 / pieces as f64);

    let mut prev_z = a;
    let mut prev = f(a)?;
    trace.evaluations += 1;
    if prev.norm() < BOUNDARY_FLOOR {
        trace.touched_zero = true;
    }
    // explicit stack of pending right endpoints keeps refinement iterative
    let mut pending: Vec<(Complex64, Complex64)> = Vec::new();
    for k in (1..=pieces).rev() {
        let z = point(k);
        pending.push((z, Complex64::new(f64::NAN, 0.0)));
    }
    while let Some((z, cached)) = pending.pop() {
        let val = if cached.re.is_nan() {
            trace.evaluations += 1;
            f(z)?
        } else {
            cached
        };
        if val.norm() < BOUNDARY_FLOOR {
            trace.touched_zero = true;
        }
        let step = (val * prev.conj()).arg();
        let chord = (val - prev).norm();
        let small = prev.norm().min(val.norm());
        let needs_split = step.abs() > FRAC_PI_4 || chord > 0.5 * small;
        if needs_split && (z - prev_z).norm() > MIN_SEGMENT {
            let mid = 0.5 * (prev_z + z);
            pending.push((z, val));
            pending.push((mid, Complex64::new(f64::NAN, 0.0)));
            continue;
        }
        if needs_split {
            trace.touched_zero = true;
        }
        trace.total_arg += step;
        prev = val;
        prev_z = z;
    }
    Ok(trace)
}

fn trace_contour<F>(f: &F, rect: &Rectangle) -> Result<([EdgeTrace; 4], f64), LfuncError>
where
    F: Fn(Complex64) -> Result<Complex64, LfuncError>,
{
    let c = rect.corners();
    let edges = [
        trace_edge(f, c[0], c[1])?,
        trace_edge(f, c[1], c[2])?,
        trace_edge(f, c[2], c[3])?,
        trace_edge(f, c[3], c[0])?,
    ];
    let total: f64 = edges.iter().map(|e| e.total_arg).sum();
    Ok((edges, total / TAU))
}

fn integral(raw: f64) -> Option<u32> {
    let n = raw.round();
    ((raw - n).abs() <= INTEGRALITY_TOL && n >= 0.0).then_some(n as u32)
}

/// Winding of f around `rect` with no edge perturbation.
pub fn winding_strict<F>(f: &F, rect: &Rectangle) -> Result<WindingResult, LfuncError>
where
    F: Fn(Complex64) -> Result<Complex64, LfuncError>,
{
    let (edges, raw) = trace_contour(f, rect)?;
    if edges.iter().any(|e| e.touched_zero) {
        return Err(LfuncError::BoundaryTooClose);
    }
    let count = integral(raw).ok_or(LfuncError::BoundaryTooClose)?;
    Ok(WindingResult {
        count,
        raw_winding: raw,
        rectangle: *rect,
        evaluations: edges.iter().map(|e| e.evaluations).sum(),
        nudged: false,
    })
}

/// Winding of f around `rect`. Edges that pass within reach of a zero are
/// moved by the fixed nudge sequence until the count is clean.
pub fn winding_number<F>(f: &F, rect: &Rectangle) -> Result<WindingResult, LfuncError>
where
    F: Fn(Complex64) -> Result<Complex64, LfuncError>,
{
    let mut attempt = [0usize; 4];
    let mut evaluations = 0;
    loop {
        let offsets = attempt.map(|k| if k == 0 { 0.0 } else { NUDGES[k - 1] });
        let current = rect.nudged(offsets);
        let (edges, raw) = trace_contour(f, &current)?;
        evaluations += edges.iter().map(|e| e.evaluations).sum::<usize>();
        let touched: Vec<usize> = (0..4).filter(|&i| edges[i].touched_zero).collect();
        if touched.is_empty() {
            if let Some(count) = integral(raw) {
                return Ok(WindingResult {
                    count,
                    raw_winding: raw,
                    rectangle: current,
                    evaluations,
                    nudged: attempt.iter().any(|&k| k > 0),
                });
            }
        }
        let to_move: Vec<usize> = if touched.is_empty() { (0..4).collect() } else { touched };
        for i in to_move {
            attempt[i] += 1;
            if attempt[i] > NUDGES.len() {
                return Err(LfuncError::BoundaryTooClose);
            }
        }
    }
}

/// Number of zeros of L(s, χ) in the rectangle, χ primitive, σ_hi ≤ 3.
pub fn count_zeros_rectangle(chi: &Character, rect: &Rectangle) -> Result<WindingResult, LfuncError> {
    chi.require_primitive()?;
    if rect.sigma_hi > 3.0 || rect.sigma_lo <= -2.0 {
        return Err(LfuncError::BadRegion(format!(
            "sigma range [{}, {}] outside (-2, 3]",
            rect.sigma_lo, rect.sigma_hi
        )));
    }
    let lf = LFunction::new(chi.clone());
    winding_number(&|s| lf.value(s), rect)
}

/// A box of side below the target that holds `multiplicity` zeros.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalizedZero {
    pub rectangle: Rectangle,
    pub multiplicity: u32,
}

/// Recursive bisection of `rect`, which must hold `count` zeros and have a
/// clean boundary, until every occupied box has both sides below `min_side`.
pub fn localize_zeros<F>(f: &F, rect: &Rectangle, count: u32, min_side: f64) -> Result<Vec<LocalizedZero>, LfuncError>
where
    F: Fn(Complex64) -> Result<Complex64, LfuncError>,
{
    let mut out = Vec::new();
    let mut stack = vec![(*rect, count)];
    while let Some((r, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        if r.width() < min_side && r.height() < min_side {
            out.push(LocalizedZero { rectangle: r, multiplicity: n });
            continue;
        }
        let split_sigma = r.width() >= r.height();
        let (lo, hi) = if split_sigma { (r.sigma_lo, r.sigma_hi) } else { (r.t_lo, r.t_hi) };
        let mut done = false;
        // off-centre cuts when the midline grazes a zero
        for frac in [0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65] {
            let cut = lo + frac * (hi - lo);
            let (a, b) = if split_sigma {
                (Rectangle { sigma_hi: cut, ..r }, Rectangle { sigma_lo: cut, ..r })
            } else {
                (Rectangle { t_hi: cut, ..r }, Rectangle { t_lo: cut, ..r })
            };
            let Ok(wa) = winding_strict(f, &a) else { continue };
            if wa.count > n {
                continue;
            }
            stack.push((a, wa.count));
            stack.push((b, n - wa.count));
            done = true;
            break;
        }
        if !done {
            return Err(LfuncError::BoundaryTooClose);
        }
    }
    out.sort_by(|x, y| {
        let (cx, cy) = (x.rectangle.center(), y.rectangle.center());
        cx.im.total_cmp(&cy.im).then(cx.re.total_cmp(&cy.re))
    });
    Ok(out)
}
