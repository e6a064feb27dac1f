//! Forward and inverse discrete Fourier transforms in one to three dimensions.
//!
//! Conventions: forward transforms are unscaled,
//! `X[k] = Σ x[j]·exp(−2πi·j·k/N)`; inverse transforms carry the `1/N`
//! factor so that `ifft(fft(x)) == x`. Arrays are row-major with the last
//! axis varying fastest. Real-to-complex transforms keep the non-negative
//! frequencies of the last axis, `n/2 + 1` bins.
//!
//! Power-of-two lengths use an iterative radix-2 kernel; every other length
//! goes through Bluestein's chirp transform on a power-of-two convolution.
//! Multi-dimensional transforms apply 1D transforms along each axis in turn.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

pub use num_complex::Complex64;

/// Environment variable selecting the number of worker threads.
pub const THREADS_VAR: &str = "OMP_NUM_THREADS";

/// Bound on the imaginary residue of an inverse real transform, relative to
/// `max(1, max |x|)` of the reconstruction.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("bad shape {0:?}: need 1 to 3 positive extents")]
    BadShape(Vec<usize>),
    #[error("bad thread count {0:?}: {THREADS_VAR} must be a positive integer")]
    BadThreadCount(String),
    #[error("shape mismatch: plan expects {expected:?}, got {found:?}")]
    ShapeMismatch { expected: Vec<usize>, found: Vec<usize> },
    #[error("data length {len} does not match shape {shape:?}")]
    LengthMismatch { shape: Vec<usize>, len: usize },
    #[error("plan kind is {0:?}")]
    WrongPlanKind(TransformKind),
    #[error("spectrum is not Hermitian: imaginary residue {0:e}")]
    NonHermitianInput(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    ComplexToComplex,
    RealToComplex,
}

fn check_shape(shape: &[usize]) -> Result<(), SpectralError> {
    if (1..=3).contains(&shape.len()) && shape.iter().all(|&n| n > 0) {
        Ok(())
    } else {
        Err(SpectralError::BadShape(shape.to_vec()))
    }
}

fn check_len(shape: &[usize], len: usize) -> Result<(), SpectralError> {
    if shape.iter().product::<usize>() == len {
        Ok(())
    } else {
        Err(SpectralError::LengthMismatch {
            shape: shape.to_vec(),
            len,
        })
    }
}

/// Complex field, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    shape: Vec<usize>,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(shape: Vec<usize>, data: Vec<Complex64>) -> Result<Self, SpectralError> {
        check_len(&shape, data.len())?;
        Ok(SpectralField { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }
}

/// Real field, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl RealField {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, SpectralError> {
        check_len(&shape, data.len())?;
        Ok(RealField { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
}

/// Precomputed 1D transform of one length.
#[derive(Debug)]
enum Kernel {
    Unit,
    Radix2(Radix2),
    Bluestein(Bluestein),
}

#[derive(Debug)]
struct Radix2 {
    n: usize,
    /// `exp(−2πi·k/n)` for `k < n/2`.
    twiddles: Vec<Complex64>,
}

#[derive(Debug)]
struct Bluestein {
    n: usize,
    inner: Radix2,
    /// `exp(−πi·k²/n)` for `k < n`.
    chirp: Vec<Complex64>,
    /// Forward transform of the conjugate chirp, wrapped to the inner length.
    filter: Vec<Complex64>,
}

/// `exp(−2πi·num/den)`, with the angle reduced exactly first.
fn unit_root(num: usize, den: usize) -> Complex64 {
    let angle = -2.0 * PI * ((num % den) as f64) / den as f64;
    Complex64::new(angle.cos(), angle.sin())
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two() && n >= 2);
        Radix2 {
            n,
            twiddles: (0..n / 2).map(|k| unit_root(k, n)).collect(),
        }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let n = self.n;
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let t = self.twiddles[k * stride] * buf[start + k + half];
                    let u = buf[start + k];
                    buf[start + k] = u + t;
                    buf[start + k + half] = u - t;
                }
            }
            size *= 2;
        }
    }

    fn inverse_unscaled(&self, buf: &mut [Complex64]) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward(buf);
        for v in buf.iter_mut() {
            *v = v.conj();
        }
    }
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        // k² mod 2n keeps the chirp angle small and exact.
        let chirp: Vec<Complex64> = (0..n).map(|k| unit_root(k * k % (2 * n), 2 * n)).collect();
        let mut filter = vec![Complex64::new(0.0, 0.0); m];
        filter[0] = chirp[0].conj();
        for k in 1..n {
            filter[k] = chirp[k].conj();
            filter[m - k] = chirp[k].conj();
        }
        inner.forward(&mut filter);
        Bluestein {
            n,
            inner,
            chirp,
            filter,
        }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let m = self.inner.n;
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..self.n {
            work[k] = buf[k] * self.chirp[k];
        }
        self.inner.forward(&mut work);
        for (w, f) in work.iter_mut().zip(&self.filter) {
            *w *= f;
        }
        self.inner.inverse_unscaled(&mut work);
        let scale = 1.0 / m as f64;
        for k in 0..self.n {
            buf[k] = work[k] * scale * self.chirp[k];
        }
    }
}

impl Kernel {
    fn new(n: usize) -> Self {
        match n {
            1 => Kernel::Unit,
            n if n.is_power_of_two() => Kernel::Radix2(Radix2::new(n)),
            n => Kernel::Bluestein(Bluestein::new(n)),
        }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        match self {
            Kernel::Unit => {}
            Kernel::Radix2(k) => k.forward(buf),
            Kernel::Bluestein(k) => k.forward(buf),
        }
    }
}

/// Transform descriptor: shape, kind and worker count, with the 1D kernels
/// for each axis precomputed.
///
/// Plans are immutable; cloning shares the kernels.
#[derive(Debug, Clone)]
pub struct FftPlan {
    shape: Vec<usize>,
    kind: TransformKind,
    threads: usize,
    kernels: Vec<Arc<Kernel>>,
}

/// Builds a plan, reading the worker count from `OMP_NUM_THREADS` in `env`.
pub fn make_plan(
    shape: &[usize],
    kind: TransformKind,
    env: &HashMap<String, String>,
) -> Result<FftPlan, SpectralError> {
    let threads = match env.get(THREADS_VAR) {
        None => 1,
        Some(raw) => match raw.parse::<usize>() {
            Ok(t) if t >= 1 && raw.bytes().all(|b| b.is_ascii_digit()) => t,
            _ => return Err(SpectralError::BadThreadCount(raw.clone())),
        },
    };
    FftPlan::with_threads(shape, kind, threads)
}

impl FftPlan {
    pub fn with_threads(shape: &[usize], kind: TransformKind, threads: usize) -> Result<Self, SpectralError> {
        check_shape(shape)?;
        if threads == 0 {
            return Err(SpectralError::BadThreadCount("0".to_string()));
        }
        let mut kernels: Vec<Arc<Kernel>> = Vec::with_capacity(shape.len());
        for (axis, &n) in shape.iter().enumerate() {
            let shared = shape[..axis]
                .iter()
                .position(|&m| m == n)
                .map(|i| Arc::clone(&kernels[i]));
            kernels.push(shared.unwrap_or_else(|| Arc::new(Kernel::new(n))));
        }
        Ok(FftPlan {
            shape: shape.to_vec(),
            kind,
            threads,
            kernels,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Shape of the half spectrum produced by [`rfft`].
    pub fn spectrum_shape(&self) -> Vec<usize> {
        let mut shape = self.shape.clone();
        if self.kind == TransformKind::RealToComplex {
            let last = shape.len() - 1;
            shape[last] = shape[last] / 2 + 1;
        }
        shape
    }

    fn expect_kind(&self, kind: TransformKind) -> Result<(), SpectralError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(SpectralError::WrongPlanKind(self.kind))
        }
    }

    fn expect_shape(&self, expected: &[usize], found: &[usize]) -> Result<(), SpectralError> {
        if expected == found {
            Ok(())
        } else {
            Err(SpectralError::ShapeMismatch {
                expected: expected.to_vec(),
                found: found.to_vec(),
            })
        }
    }

    /// Unscaled forward (or, with `inverse`, conjugate-direction) transform
    /// of the full array in place.
    fn transform_all(&self, data: &mut [Complex64], inverse: bool) {
        if inverse {
            data.iter_mut().for_each(|v| *v = v.conj());
        }
        for axis in 0..self.shape.len() {
            self.transform_axis(data, axis);
        }
        if inverse {
            let scale = 1.0 / data.len() as f64;
            data.iter_mut().for_each(|v| *v = v.conj() * scale);
        }
    }

    fn transform_axis(&self, data: &mut [Complex64], axis: usize) {
        let n = self.shape[axis];
        if n == 1 {
            return;
        }
        let stride: usize = self.shape[axis + 1..].iter().product();
        let lines = data.len() / n;
        let kernel = &self.kernels[axis];
        let line_start = |line: usize| (line / stride) * n * stride + line % stride;

        let run = |range: std::ops::Range<usize>, data: &[Complex64]| -> Vec<Complex64> {
            let mut out = Vec::with_capacity(range.len() * n);
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            for line in range {
                let start = line_start(line);
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = data[start + j * stride];
                }
                kernel.forward(&mut buf);
                out.extend_from_slice(&buf);
            }
            out
        };

        let workers = self.threads.min(lines);
        let results: Vec<(usize, Vec<Complex64>)> = if workers <= 1 {
            vec![(0, run(0..lines, data))]
        } else {
            let chunk = lines.div_ceil(workers);
            let shared: &[Complex64] = data;
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..lines)
                    .step_by(chunk)
                    .map(|first| {
                        let range = first..(first + chunk).min(lines);
                        let run = &run;
                        scope.spawn(move || (first, run(range, shared)))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("FFT worker panicked")).collect()
            })
        };
        for (first, values) in results {
            for (offset, line_values) in values.chunks(n).enumerate() {
                let start = line_start(first + offset);
                for (j, v) in line_values.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
    }
}

/// Forward complex transform.
pub fn fft(plan: &FftPlan, field: &SpectralField) -> Result<SpectralField, SpectralError> {
    plan.expect_kind(TransformKind::ComplexToComplex)?;
    plan.expect_shape(&plan.shape, &field.shape)?;
    let mut data = field.data.clone();
    plan.transform_all(&mut data, false);
    Ok(SpectralField {
        shape: field.shape.clone(),
        data,
    })
}

/// Inverse complex transform, scaled by `1/N`.
pub fn ifft(plan: &FftPlan, spectrum: &SpectralField) -> Result<SpectralField, SpectralError> {
    plan.expect_kind(TransformKind::ComplexToComplex)?;
    plan.expect_shape(&plan.shape, &spectrum.shape)?;
    let mut data = spectrum.data.clone();
    plan.transform_all(&mut data, true);
    Ok(SpectralField {
        shape: spectrum.shape.clone(),
        data,
    })
}

/// Forward real-to-complex transform, keeping `n/2 + 1` bins on the last axis.
pub fn rfft(plan: &FftPlan, field: &RealField) -> Result<SpectralField, SpectralError> {
    plan.expect_kind(TransformKind::RealToComplex)?;
    plan.expect_shape(&plan.shape, &field.shape)?;
    let mut data: Vec<Complex64> = field.data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    plan.transform_all(&mut data, false);
    let n = *plan.shape.last().expect("non-empty shape");
    let half = n / 2 + 1;
    let spectrum: Vec<Complex64> = data.chunks(n).flat_map(|row| row[..half].iter().copied()).collect();
    Ok(SpectralField {
        shape: plan.spectrum_shape(),
        data: spectrum,
    })
}

/// Inverse of [`rfft`]: rebuilds the full spectrum by Hermitian symmetry,
/// transforms back with `1/N` scaling and drops the imaginary residue after
/// checking it against [`HERMITIAN_TOLERANCE`].
pub fn irfft(plan: &FftPlan, spectrum: &SpectralField) -> Result<RealField, SpectralError> {
    plan.expect_kind(TransformKind::RealToComplex)?;
    plan.expect_shape(&plan.spectrum_shape(), &spectrum.shape)?;
    let shape = &plan.shape;
    let rank = shape.len();
    let n = shape[rank - 1];
    let half = n / 2 + 1;
    let outer: usize = shape[..rank - 1].iter().product();

    let mut full = vec![Complex64::new(0.0, 0.0); outer * n];
    let mut index = vec![0usize; rank - 1];
    for row in 0..outer {
        let mut rem = row;
        for axis in (0..rank - 1).rev() {
            index[axis] = rem % shape[axis];
            rem /= shape[axis];
        }
        let mirror_row = (0..rank - 1).fold(0, |acc, axis| {
            acc * shape[axis] + (shape[axis] - index[axis]) % shape[axis]
        });
        for k in 0..n {
            full[row * n + k] = if k < half {
                spectrum.data[row * half + k]
            } else {
                spectrum.data[mirror_row * half + (n - k)].conj()
            };
        }
    }
    plan.transform_all(&mut full, true);

    let residue = full.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let magnitude = full.iter().map(|v| v.re.abs()).fold(1.0, f64::max);
    if residue > HERMITIAN_TOLERANCE * magnitude {
        return Err(SpectralError::NonHermitianInput(residue));
    }
    Ok(RealField {
        shape: shape.clone(),
        data: full.into_iter().map(|v| v.re).collect(),
    })
}
