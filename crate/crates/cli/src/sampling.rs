//! Seeded sample points for kernel sweeps.

use nonres_core::kernel::KernelParams;
use nonres_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// x ∈ [1, 100], y ∈ [2, 5], |t₀| ∈ (1, 10] with random sign,
/// Re s ∈ [−1, 2], Im s ∈ [−20, 20].
pub fn kernel_sample_points(samples: usize, seed: u64) -> Vec<(Complex64, KernelParams)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let x = rng.random_range(1.0..=100.0);
            let y = rng.random_range(2.0..=5.0);
            let mag = 10.0 - 9.0 * rng.random::<f64>();
            let t0 = if rng.random::<bool>() { mag } else { -mag };
            let s = Complex64::new(rng.random_range(-1.0..=2.0), rng.random_range(-20.0..=20.0));
            let p = KernelParams::unconstrained(x, y, t0).expect("sample ranges satisfy x > 0, y > 1");
            (s, p)
        })
        .collect()
}
