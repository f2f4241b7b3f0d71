//! Linear convolution: direct time-domain for short kernels, overlap-add
//! FFT above [`DIRECT_MAX_TAPS`].

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Scalar;

/// Longest kernel convolved in the time domain.
pub const DIRECT_MAX_TAPS: usize = 512;

/// Kernels with at most this many non-zero taps are convolved in the time
/// domain whatever their length, which keeps delayed deltas bit-exact.
pub const SPARSE_MAX_NONZERO: usize = 64;

/// Full linear convolution (`signal.len() + kernel.len() - 1` samples).
/// Returns an empty vector when either input is empty.
pub fn convolve<T: Scalar>(signal: &[T], kernel: &[T]) -> Vec<T> {
    convolve_many(signal, &[kernel]).pop().unwrap_or_default()
}

/// Convolves one signal with several kernels. On the FFT path the signal
/// spectrum of each block is computed once and shared by all kernels.
pub fn convolve_many<T: Scalar>(signal: &[T], kernels: &[&[T]]) -> Vec<Vec<T>> {
    let longest = kernels.iter().map(|k| k.len()).max().unwrap_or(0);
    let sparse = kernels
        .iter()
        .all(|k| k.iter().filter(|&&h| h != T::zero()).count() <= SPARSE_MAX_NONZERO);
    if longest <= DIRECT_MAX_TAPS || sparse {
        kernels.iter().map(|k| convolve_direct(signal, k)).collect()
    } else {
        OverlapAdd::new(kernels).process(signal)
    }
}

/// Time-domain convolution.
///
/// Output samples below `signal.len()` start from the lag-0 product rather
/// than from zero, so a single-tap kernel yields `signal[i] * kernel[0]`
/// bit for bit.
pub fn convolve_direct<T: Scalar>(signal: &[T], kernel: &[T]) -> Vec<T> {
    if signal.is_empty() || kernel.is_empty() {
        return Vec::new();
    }
    let n = signal.len();
    let mut out = Vec::with_capacity(n + kernel.len() - 1);
    let h0 = kernel[0];
    out.extend(signal.iter().map(|&s| s * h0));
    out.resize(n + kernel.len() - 1, T::zero());
    for (lag, &h) in kernel.iter().enumerate().skip(1) {
        if h == T::zero() {
            continue;
        }
        for (o, &s) in out[lag..lag + n].iter_mut().zip(signal) {
            *o += s * h;
        }
    }
    out
}

/// Overlap-add FFT convolution of one signal with one kernel.
pub fn convolve_fft<T: Scalar>(signal: &[T], kernel: &[T]) -> Vec<T> {
    OverlapAdd::new(&[kernel]).process(signal).pop().unwrap_or_default()
}

struct OverlapAdd<T: Scalar> {
    fft_len: usize,
    block_len: usize,
    kernel_lens: Vec<usize>,
    spectra: Vec<Vec<Complex<T>>>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Scalar> OverlapAdd<T> {
    fn new(kernels: &[&[T]]) -> Self {
        let longest = kernels.iter().map(|k| k.len()).max().unwrap_or(1).max(1);
        let fft_len = (2 * longest).next_power_of_two().max(64);
        let block_len = fft_len - longest + 1;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(fft_len);
        let inverse = planner.plan_fft_inverse(fft_len);
        let spectra = kernels
            .iter()
            .map(|k| {
                let mut buf = vec![Complex::new(T::zero(), T::zero()); fft_len];
                for (b, &v) in buf.iter_mut().zip(k.iter()) {
                    b.re = v;
                }
                forward.process(&mut buf);
                buf
            })
            .collect();
        Self {
            fft_len,
            block_len,
            kernel_lens: kernels.iter().map(|k| k.len()).collect(),
            spectra,
            forward,
            inverse,
        }
    }

    fn process(&self, signal: &[T]) -> Vec<Vec<T>> {
        let mut outs: Vec<Vec<T>> = self
            .kernel_lens
            .iter()
            .map(|&l| {
                if signal.is_empty() || l == 0 {
                    Vec::new()
                } else {
                    vec![T::zero(); signal.len() + l - 1]
                }
            })
            .collect();
        if signal.is_empty() {
            return outs;
        }
        let zero = Complex::new(T::zero(), T::zero());
        let scale = T::one() / T::from_usize_lossy(self.fft_len);
        let mut block = vec![zero; self.fft_len];
        let mut work = vec![zero; self.fft_len];
        for start in (0..signal.len()).step_by(self.block_len) {
            let chunk = &signal[start..(start + self.block_len).min(signal.len())];
            block.fill(zero);
            for (b, &s) in block.iter_mut().zip(chunk) {
                b.re = s;
            }
            self.forward.process(&mut block);
            for ((out, spectrum), &klen) in outs.iter_mut().zip(&self.spectra).zip(&self.kernel_lens) {
                if klen == 0 {
                    continue;
                }
                for ((w, &b), &h) in work.iter_mut().zip(&block).zip(spectrum) {
                    *w = b * h;
                }
                self.inverse.process(&mut work);
                let valid = (chunk.len() + klen - 1).min(out.len() - start);
                for (o, w) in out[start..start + valid].iter_mut().zip(&work) {
                    *o += w.re * scale;
                }
            }
        }
        outs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // textbook double loop, kept independent of convolve_direct's layout
    fn naive(s: &[f64], h: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; s.len() + h.len() - 1];
        for n in 0..out.len() {
            for k in 0..h.len() {
                if n >= k && n - k < s.len() {
                    out[n] += s[n - k] * h[k];
                }
            }
        }
        out
    }

    fn random(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn direct_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, l) in [(1, 1), (5, 3), (3, 5), (100, 17)] {
            let s = random(&mut rng, n);
            let h = random(&mut rng, l);
            for (a, b) in convolve_direct(&s, &h).iter().zip(naive(&s, &h)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fft_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (n, l) in [(1, 1), (10, 700), (3000, 513), (5000, 1200), (7, 64)] {
            let s = random(&mut rng, n);
            let h = random(&mut rng, l);
            let a = convolve_fft(&s, &h);
            let b = convolve_direct(&s, &h);
            assert_eq!(a.len(), b.len());
            let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(err < 1e-9, "n={n} l={l} err={err}");
        }
    }

    #[test]
    fn empty_inputs() {
        assert!(convolve::<f64>(&[], &[1.0]).is_empty());
        assert!(convolve::<f64>(&[1.0], &[]).is_empty());
        assert!(convolve_fft::<f64>(&[], &[1.0; 600]).is_empty());
    }

    #[test]
    fn single_tap_is_bit_exact() {
        let s = [0.25f32, -0.0, 0.5, -1.0];
        let out = convolve_direct(&s, &[-0.5f32]);
        for (o, x) in out.iter().zip(s) {
            assert_eq!(o.to_bits(), (x * -0.5).to_bits());
        }
    }

    #[test]
    fn long_delayed_delta_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random(&mut rng, 3000);
        let mut h = vec![0.0; 2048];
        h[100] = 1.0;
        let out = convolve(&s, &h);
        assert_eq!(out.len(), 3000 + 2047);
        assert!(out[..100].iter().all(|&v| v == 0.0));
        assert_eq!(&out[100..3100], &s[..]);
    }

    #[test]
    fn many_kernels_share_lengths() {
        let s = vec![1.0f64; 50];
        let k1 = vec![0.5; 600];
        let k2 = vec![0.25; 10];
        let outs = convolve_many(&s, &[&k1, &k2]);
        assert_eq!(outs[0].len(), 649);
        assert_eq!(outs[1].len(), 59);
        assert!((outs[1][20] - 2.5).abs() < 1e-9);
    }
}
