//! Compensated accumulation, complex log-gamma and adaptive Gauss–Kronrod
//! quadrature shared by the evaluation modules.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::AddAssign;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Kahan–Babuška (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

/// Neumaier summation applied independently to real and imaginary parts.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl AddAssign<Complex64> for ComplexSum {
    fn add_assign(&mut self, rhs: Complex64) {
        self.add(rhs);
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for v in iter {
        acc.add(v);
    }
    acc.value()
}

// B_{2k} / (2k (2k-1)) for the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// log Γ(z) for complex z away from the non-positive integers.
///
/// The imaginary part is a continuous-in-shift branch, not necessarily the
/// principal one; callers exponentiate or take real parts.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: Complex64,
    pub error_estimate: f64,
    pub l1_estimate: f64,
    pub converged: bool,
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_KRONROD: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_GAUSS: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for (i, &node) in GK_NODES.iter().enumerate() {
        if node == 0.0 {
            let v = f(center);
            kronrod += v * GK_KRONROD[i];
            gauss += v * GK_GAUSS[3];
            l1 += v.norm() * GK_KRONROD[i];
        } else {
            let v1 = f(center - half * node);
            let v2 = f(center + half * node);
            kronrod += (v1 + v2) * GK_KRONROD[i];
            l1 += (v1.norm() + v2.norm()) * GK_KRONROD[i];
            if i % 2 == 1 {
                gauss += (v1 + v2) * GK_GAUSS[i / 2];
            }
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).norm();
    (value, err, l1 * half.abs())
}

/// Globally adaptive 7/15-point Gauss–Kronrod over `[a, b]`.
///
/// Stops once the summed error estimate is below `rel_tol` times the
/// running L1 estimate of the integrand, or after `max_intervals` bisections.
pub fn integrate_gk<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, rel_tol: f64, max_intervals: usize) -> Quadrature {
    let (v, e, l1) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e, l1)];
    loop {
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        let total_l1 = compensated_sum(intervals.iter().map(|iv| iv.4));
        if total_err <= rel_tol * total_l1 || intervals.len() >= max_intervals {
            let value = intervals.iter().map(|iv| iv.2).collect::<ComplexSum>().value();
            return Quadrature {
                value,
                error_estimate: total_err,
                l1_estimate: total_l1,
                converged: total_err <= rel_tol * total_l1,
            };
        }
        let (idx, _) =
            intervals.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |best, (i, iv)| {
                    if iv.3 > best.1 {
                        (i, iv.3)
                    } else {
                        best
                    }
                },
            );
        let (lo, hi, _, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1, l1a) = gk15(&f, lo, mid);
        let (v2, e2, l1b) = gk15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1, l1a));
        intervals.push((mid, hi, v2, e2, l1b));
    }
}
