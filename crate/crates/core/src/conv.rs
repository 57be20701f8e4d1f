//! Zero-padded FFT convolution of real sequences.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Linear convolution of a length-`n` signal against kernels of at most
/// `max_kernel_len` taps, carried out in a fixed transform size so that
/// spectra can be cached and combined.
pub(crate) struct SpectralConvolver {
    n: usize,
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralConvolver {
    pub fn new(n: usize, max_kernel_len: usize) -> Self {
        let size = (n + max_kernel_len).next_power_of_two();
        let mut planner = FftPlanner::new();
        Self {
            n,
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn spectrum(&self, data: &[f64]) -> Vec<Complex64> {
        debug_assert!(data.len() <= self.size);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.size];
        for (b, &d) in buf.iter_mut().zip(data) {
            b.re = d;
        }
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform of a product spectrum, returning the `n` outputs
    /// `out[i] = Σ_k c[k] f[i + center - k]` where the kernel `c` was centred
    /// at tap `center`.
    pub fn finish(&self, mut spec: Vec<Complex64>, center: usize) -> Vec<f64> {
        self.inverse.process(&mut spec);
        let scale = 1.0 / self.size as f64;
        spec[center..center + self.n]
            .iter()
            .map(|c| c.re * scale)
            .collect()
    }

    pub fn half_len(&self) -> usize {
        self.size / 2 + 1
    }

    /// The non-redundant half `0..=size/2` of a real signal's spectrum.
    pub fn half_spectrum(&self, data: &[f64]) -> Vec<Complex64> {
        let mut full = self.spectrum(data);
        full.truncate(self.size / 2 + 1);
        full
    }

    /// [`finish`](Self::finish) for a product of half spectra.
    pub fn finish_half(&self, half: &[Complex64], center: usize) -> Vec<f64> {
        let mut full = Vec::with_capacity(self.size);
        full.extend_from_slice(half);
        for k in self.size / 2 + 1..self.size {
            full.push(half[self.size - k].conj());
        }
        self.finish(full, center)
    }
}

/// `out[i] = Σ_k kernel[k] · signal[i + center − k]`, zero outside the signal.
pub(crate) fn convolve_centered(signal: &[f64], kernel: &[f64], center: usize) -> Vec<f64> {
    let n = signal.len();
    let m = kernel.len();
    if (n as f64) * (m as f64) < 4.0e4 {
        return (0..n)
            .map(|i| {
                kernel
                    .iter()
                    .enumerate()
                    .filter_map(|(k, &c)| {
                        let j = i as isize + center as isize - k as isize;
                        (0..n as isize).contains(&j).then(|| c * signal[j as usize])
                    })
                    .sum()
            })
            .collect();
    }
    let conv = SpectralConvolver::new(n, m);
    let a = conv.spectrum(signal);
    let b = conv.spectrum(kernel);
    let prod = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    conv.finish(prod, center)
}
