//! Circular convolution of arbitrary length through a power-of-two FFT.
//!
//! Lengths b^m - 1 are rarely powers of two, so the cyclic convolution is
//! computed as a zero-padded linear convolution (padded to the next power
//! of two >= 2L-1) followed by wrap-around folding. The O(L^2) direct sum
//! stays available as the test oracle.

use num_complex::Complex64;

/// Iterative radix-2 complex FFT with a precomputed twiddle table.
pub struct Fft {
    len: usize,
    /// exp(-2 pi i k / len) for k < len/2.
    twiddles: Vec<Complex64>,
}

impl Fft {
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT length must be a power of two");
        let twiddles = (0..len / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 / len as f64))
            .collect();
        Fft { len, twiddles }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// Inverse transform, including the 1/len normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let scale = 1.0 / self.len as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.len;
        assert_eq!(data.len(), n);
        if n <= 1 {
            return;
        }
        // Bit-reversal permutation.
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let step = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let mut tw = self.twiddles[k * step];
                    if inverse {
                        tw = tw.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * tw;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            size <<= 1;
        }
    }
}

/// Reusable circular convolution against a fixed first column.
///
/// The FFT of the padded column is cached, so repeated products against the
/// same circulant matrix cost one forward and one inverse transform each.
pub struct CirculantConvolver {
    l: usize,
    fft: Fft,
    column_hat: Vec<Complex64>,
}

impl CirculantConvolver {
    pub fn new(first_column: &[f64]) -> Self {
        let l = first_column.len();
        assert!(l >= 1);
        let padded = (2 * l - 1).next_power_of_two();
        let fft = Fft::new(padded);
        let mut column_hat: Vec<Complex64> =
            first_column.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        column_hat.resize(padded, Complex64::new(0.0, 0.0));
        fft.forward(&mut column_hat);
        CirculantConvolver { l, fft, column_hat }
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    /// out[k] = sum_j column[j] v[(k - j) mod L].
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.l);
        let padded = self.fft.len();
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        buf.resize(padded, Complex64::new(0.0, 0.0));
        self.fft.forward(&mut buf);
        for (x, c) in buf.iter_mut().zip(&self.column_hat) {
            *x *= c;
        }
        self.fft.inverse(&mut buf);
        // Linear convolution has length 2L-1; wrap the overhang.
        let mut out = vec![0.0f64; self.l];
        for (k, o) in out.iter_mut().enumerate() {
            *o = buf[k].re;
            if k + self.l < 2 * self.l - 1 {
                *o += buf[k + self.l].re;
            }
        }
        out
    }
}

/// One-shot circular convolution of two equal-length real vectors.
pub fn circular_convolve(first_column: &[f64], v: &[f64]) -> Vec<f64> {
    CirculantConvolver::new(first_column).apply(v)
}

/// O(L^2) direct circular convolution; the reference for the FFT path.
pub fn direct_convolve(first_column: &[f64], v: &[f64]) -> Vec<f64> {
    let l = first_column.len();
    assert_eq!(v.len(), l);
    let mut out = vec![0.0f64; l];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, c) in first_column.iter().enumerate() {
            acc += c * v[(k + l - j) % l];
        }
        *o = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn fft_roundtrip() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in [1usize, 2, 8, 64, 256] {
            let orig: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let mut data = orig.clone();
            let fft = Fft::new(n);
            fft.forward(&mut data);
            fft.inverse(&mut data);
            for (a, b) in data.iter().zip(&orig) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fft_matches_direct_dft() {
        let mut rng = StdRng::seed_from_u64(8);
        let n = 32usize;
        let input: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let mut fast = input.clone();
        Fft::new(n).forward(&mut fast);
        for (k, f) in fast.iter().enumerate() {
            let mut direct = Complex64::new(0.0, 0.0);
            for (j, x) in input.iter().enumerate() {
                let angle = -2.0 * std::f64::consts::PI * (j * k % n) as f64 / n as f64;
                direct += x * Complex64::from_polar(1.0, angle);
            }
            assert!((f - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn impulse_returns_column() {
        let c = vec![0.3, -1.2, 2.5, 0.75, 4.0];
        let mut v = vec![0.0; 5];
        v[0] = 1.0;
        let out = circular_convolve(&c, &v);
        assert!(max_abs_diff(&out, &c) < 1e-12);
    }

    #[test]
    fn length_one_is_scalar_product() {
        let out = circular_convolve(&[3.5], &[-2.0]);
        assert_eq!(out.len(), 1);
        assert!((out[0] + 7.0).abs() < 1e-14);
    }

    #[test]
    fn random_lengths_match_direct() {
        let mut rng = StdRng::seed_from_u64(9);
        for l in [2usize, 3, 7, 15, 63, 100, 255] {
            let c: Vec<f64> = (0..l).map(|_| rng.random::<f64>() - 0.5).collect();
            let v: Vec<f64> = (0..l).map(|_| rng.random::<f64>() - 0.5).collect();
            let fast = circular_convolve(&c, &v);
            let slow = direct_convolve(&c, &v);
            let scale = c.iter().map(|x| x.abs()).sum::<f64>();
            assert!(max_abs_diff(&fast, &slow) < 1e-10 * scale.max(1.0), "L={l}");
        }
    }

    #[test]
    fn convolver_reuse() {
        let mut rng = StdRng::seed_from_u64(10);
        let l = 31;
        let c: Vec<f64> = (0..l).map(|_| rng.random::<f64>()).collect();
        let conv = CirculantConvolver::new(&c);
        for _ in 0..3 {
            let v: Vec<f64> = (0..l).map(|_| rng.random::<f64>()).collect();
            assert!(max_abs_diff(&conv.apply(&v), &direct_convolve(&c, &v)) < 1e-10);
        }
    }
}
