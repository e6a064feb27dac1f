//! Reference DFT and test signals.

use sciforge::spectral::Complex64;

/// Direct DFT along every axis of a row-major array.
pub fn direct_dft(shape: &[usize], data: &[Complex64]) -> Vec<Complex64> {
    let total = data.len();
    let unravel = |mut flat: usize| {
        let mut idx = vec![0; shape.len()];
        for axis in (0..shape.len()).rev() {
            idx[axis] = flat % shape[axis];
            flat /= shape[axis];
        }
        idx
    };
    (0..total)
        .map(|k| {
            let kidx = unravel(k);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, x) in data.iter().enumerate() {
                let jidx = unravel(j);
                let mut phase = 0.0;
                for axis in 0..shape.len() {
                    let n = shape[axis];
                    phase += ((jidx[axis] * kidx[axis]) % n) as f64 / n as f64;
                }
                let angle = -2.0 * std::f64::consts::PI * phase;
                acc += x * Complex64::new(angle.cos(), angle.sin());
            }
            acc
        })
        .collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn signal(len: usize, seed: u64) -> Vec<Complex64> {
    // Small LCG, independent of any crate RNG.
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    (0..len).map(|_| Complex64::new(next(), next())).collect()
}
